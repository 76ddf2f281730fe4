from __future__ import annotations

import pytest

from disputesim.money import parse_amount
from disputesim.model import (
    FairOrdering,
    Population,
    ProtocolParams,
    Scenario,
)


def U(x) -> int:
    """Currency units -> minor units."""
    return parse_amount(str(x))


@pytest.fixture
def make_scenario():
    def _make(n=4, a=0, c_init="0.5", c_proc="1", deposit="10", alpha="1", eta="0.5",
              policy=None, regime=None, **kw):
        pop = Population.of(n, a, c_init, c_proc)
        params = ProtocolParams.of(deposit, alpha, eta, policy)
        return Scenario(pop, params, regime or FairOrdering(), **kw)

    return _make


_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, passed, detail)``."""
    lines = request.config.stash.setdefault(_CRITERIA_KEY, [])

    def _record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        lines.append(line)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
