"""Domain types and payoff accounting shared by the simulator and calibrator.

All currency fields are integers in minor units (see :mod:`disputesim.money`);
``alpha`` and ``eta`` are exact :class:`fractions.Fraction` values.
Challengers are identified by integers ``0 .. N-1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .errors import InvalidParams, InvalidPopulation, InvalidScenario, NoWinners
from .money import SCALE, Numberish, parse_amount, to_fraction

DEFAULT_EPS = SCALE // 1000  # 0.001 currency units


@dataclass(frozen=True, slots=True)
class CostProfile:
    c_init: int
    c_proc: int

    def __post_init__(self) -> None:
        if self.c_init < 0 or self.c_proc < 0:
            raise InvalidPopulation(f"costs must be non-negative, got {self}")

    @property
    def total(self) -> int:
        return self.c_init + self.c_proc


@dataclass(frozen=True, slots=True)
class CostBounds:
    c_tilde_init: int
    c_tilde_proc: int

    def __post_init__(self) -> None:
        if self.c_tilde_init < 0 or self.c_tilde_proc < 0:
            raise InvalidPopulation(f"cost bounds must be non-negative, got {self}")

    @property
    def c_tilde(self) -> int:
        return self.c_tilde_init + self.c_tilde_proc

    def worst_case(self) -> CostProfile:
        return CostProfile(self.c_tilde_init, self.c_tilde_proc)

    def admits(self, profile: CostProfile) -> bool:
        return profile.c_init <= self.c_tilde_init and profile.c_proc <= self.c_tilde_proc


# -- winner policies ---------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SingleWinner:
    def announced_m(self, n: int) -> int:
        return 1


@dataclass(frozen=True, slots=True)
class NonExclusion:
    def announced_m(self, n: int) -> int:
        return n


@dataclass(frozen=True, slots=True)
class Capped:
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise InvalidParams(f"winner cap must be >= 1, got {self.m}")

    def announced_m(self, n: int) -> int:
        return min(self.m, n)


WinnerPolicy = Union[SingleWinner, NonExclusion, Capped]


@dataclass(frozen=True, slots=True)
class ProtocolParams:
    """Slashing and payout knobs.

    ``challenger_stake_s`` is carried for reporting only; no payoff uses it.
    """

    deposit_dp: int
    alpha: Fraction
    eta: Fraction
    winner_policy: WinnerPolicy = field(default_factory=SingleWinner)
    challenger_stake_s: int = 0

    def __post_init__(self) -> None:
        if self.deposit_dp <= 0:
            raise InvalidParams("deposit must be positive")
        if not 0 < self.alpha <= 1:
            raise InvalidParams(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 < self.eta < 1:
            raise InvalidParams(f"eta must lie in (0, 1), got {self.eta}")
        if self.challenger_stake_s < 0:
            raise InvalidParams("stake must be non-negative")

    @classmethod
    def of(
        cls,
        deposit: Numberish,
        alpha: Numberish,
        eta: Numberish,
        winner_policy: WinnerPolicy | None = None,
        stake: Numberish = 0,
    ) -> ProtocolParams:
        """Build from human-scale numbers (decimal strings, ints, Fractions)."""
        return cls(
            deposit_dp=parse_amount(deposit),
            alpha=to_fraction(alpha),
            eta=to_fraction(eta),
            winner_policy=winner_policy or SingleWinner(),
            challenger_stake_s=parse_amount(stake),
        )

    @property
    def payout_pool(self) -> Fraction:
        """alpha * D_p in minor units (possibly non-integral)."""
        return self.alpha * self.deposit_dp


@dataclass(frozen=True, slots=True)
class Population:
    n_challengers: int
    coalition: frozenset[int]
    cost_bounds: CostBounds
    cost_profiles: tuple[CostProfile, ...] = ()

    def __post_init__(self) -> None:
        n = self.n_challengers
        if n < 1:
            raise InvalidPopulation("need at least one challenger")
        coalition = frozenset(self.coalition)
        object.__setattr__(self, "coalition", coalition)
        if any(not 0 <= i < n for i in coalition):
            raise InvalidPopulation(f"coalition ids must lie in [0, {n})")
        if 2 * len(coalition) >= n:
            raise InvalidPopulation(
                f"coalition size {len(coalition)} violates A < N/2 for N={n}"
            )
        profiles = tuple(self.cost_profiles) or (self.cost_bounds.worst_case(),) * n
        if len(profiles) != n:
            raise InvalidPopulation(f"expected {n} cost profiles, got {len(profiles)}")
        for i, p in enumerate(profiles):
            if not self.cost_bounds.admits(p):
                raise InvalidPopulation(f"cost profile {i} exceeds the cost bounds")
        object.__setattr__(self, "cost_profiles", profiles)

    @classmethod
    def of(
        cls,
        n: int,
        coalition_size: int = 0,
        c_init: Numberish = 0,
        c_proc: Numberish = 0,
    ) -> Population:
        """Worst-case population with the coalition on the lowest ids."""
        bounds = CostBounds(parse_amount(c_init), parse_amount(c_proc))
        return cls(n, frozenset(range(coalition_size)), bounds)

    @property
    def coalition_size(self) -> int:
        return len(self.coalition)

    @property
    def honest(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_challengers) if i not in self.coalition)

    def is_coalition(self, i: int) -> bool:
        return i in self.coalition


# -- ordering regimes --------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FairOrdering:
    window_delta: Fraction = Fraction(0)  # carried only; all arrivals are simultaneous


@dataclass(frozen=True, slots=True)
class BuilderPriority:
    bid_increment_eps: int = DEFAULT_EPS

    def __post_init__(self) -> None:
        if self.bid_increment_eps <= 0:
            raise InvalidParams("bid increment must be positive")


@dataclass(frozen=True, slots=True)
class ProposerPriority:
    bid_increment_eps: int = DEFAULT_EPS

    def __post_init__(self) -> None:
        if self.bid_increment_eps <= 0:
            raise InvalidParams("bid increment must be positive")


OrderingRegime = Union[FairOrdering, BuilderPriority, ProposerPriority]


# -- cost sampling & strategies ---------------------------------------------


class CostSampling(enum.Enum):
    WORST_CASE = "worst_case"
    UNIFORM = "uniform"  # each component uniform on [0, bound], fresh per trial
    FIXED = "fixed"  # use Population.cost_profiles as given


class HonestRule(enum.Enum):
    BEST_EFFORT = "best_effort"
    ALWAYS = "always"
    ABSTAIN = "abstain"


class CoalitionRule(enum.Enum):
    RECAPTURE = "recapture"
    PRIORITY_CAPTURE = "priority_capture"
    PASSIVE = "passive"


@dataclass(frozen=True, slots=True)
class StrategyConfig:
    honest_rule: HonestRule = HonestRule.BEST_EFFORT
    coalition_rule: CoalitionRule = CoalitionRule.RECAPTURE


@dataclass(frozen=True, slots=True)
class Scenario:
    population: Population
    params: ProtocolParams
    regime: OrderingRegime = field(default_factory=FairOrdering)
    cost_sampling: CostSampling = CostSampling.WORST_CASE
    seed: int = 0
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    fee_upper: int = 0  # exogenous fee bound used by best-effort participation

    def __post_init__(self) -> None:
        policy = self.params.winner_policy
        if isinstance(policy, Capped) and policy.m > self.population.n_challengers:
            raise InvalidScenario(
                f"winner cap {policy.m} exceeds N={self.population.n_challengers}"
            )
        if (
            self.strategy.coalition_rule is CoalitionRule.PRIORITY_CAPTURE
            and isinstance(self.regime, FairOrdering)
        ):
            raise InvalidScenario("priority capture needs a priority regime")
        if self.fee_upper < 0:
            raise InvalidScenario("fee upper bound must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise InvalidScenario("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, slots=True)
class DisputeOutcome:
    realized_order: tuple[int, ...]
    winners: tuple[int, ...]
    utilities: Mapping[int, int]
    clearing_fee: int
    adversary_loss: int
    burned: int
    distributed: int
    participants: tuple[int, ...] = ()
    fees_paid: Mapping[int, int] = field(default_factory=dict)
    builder_fees: int = 0
    proposer_fees: int = 0
    recycled_fees: int = 0  # honest fees flowing to the proposer's coalition
    costs_incurred: int = 0
    fraud_caught: bool = True


# -- operations --------------------------------------------------------------


def effective_m(params: ProtocolParams, n_valid: int) -> int:
    """Number of winners actually included given ``n_valid`` challenges."""
    if n_valid < 0:
        raise ValueError("n_valid must be non-negative")
    policy = params.winner_policy
    if isinstance(policy, SingleWinner):
        return min(1, n_valid)
    if isinstance(policy, NonExclusion):
        return n_valid
    return min(policy.m, n_valid)


def winner_reward(params: ProtocolParams, m: int) -> int:
    """Equal share ``alpha * D_p / m`` in minor units, floored.

    The floor remainder is burned by the caller, so ``m * reward + burned``
    always reconciles to ``D_p``.
    """
    if m < 1:
        raise NoWinners("no accepted fraud proof, deposit not slashed")
    pool = params.payout_pool
    return pool.numerator // (pool.denominator * m)


def split_deposit(params: ProtocolParams, m: int) -> tuple[int, int, int]:
    """Return ``(reward_each, distributed, burned)`` for ``m`` winners."""
    reward = winner_reward(params, m)
    distributed = reward * m
    return reward, distributed, params.deposit_dp - distributed


def coalition_fraction(pop: Population) -> Fraction:
    return Fraction(pop.coalition_size, pop.n_challengers)
