from __future__ import annotations


class DisputeSimError(Exception):
    """Base class for every error raised by this package."""


class InvalidPopulation(DisputeSimError, ValueError):
    pass


class InvalidParams(DisputeSimError, ValueError):
    pass


class InvalidScenario(DisputeSimError, ValueError):
    pass


class NoWinners(DisputeSimError):
    """No fraud proof accepted, so there is nothing to split."""


class EmptyDispute(DisputeSimError, ValueError):
    pass


class NoViableBidders(DisputeSimError):
    """Every bidder values the priority slot at or below zero."""


class InvalidTrials(DisputeSimError, ValueError):
    pass


class UnknownTheorem(DisputeSimError, KeyError):
    pass


class ScenarioFileError(DisputeSimError, ValueError):
    """Scenario document failed schema or domain validation."""
