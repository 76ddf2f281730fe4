"""Ordering regimes: fair random permutation and the two priority auctions.

Auction clearing follows a competitive-market model: the winner pays its
own value minus the bid increment ``eps``, so its surplus is exactly
``eps`` (or its whole value, if that is below ``eps``).  Losers pay nothing.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import EmptyDispute, NoViableBidders
from .model import (
    BuilderPriority,
    CoalitionRule,
    CostProfile,
    FairOrdering,
    NonExclusion,
    ProposerPriority,
    Scenario,
    effective_m,
    winner_reward,
)


class FeeRecipient(enum.Enum):
    BUILDER = "builder"
    PROPOSER = "proposer"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class Bid:
    bidder: int
    value: int  # alpha*D_p/m - c_proc, may be negative
    bid_amount: int
    is_coalition: bool = False

    def __post_init__(self) -> None:
        if self.bid_amount < 0:
            raise ValueError("bid_amount must be non-negative")


@dataclass(frozen=True, slots=True)
class OrderingResult:
    order: tuple[int, ...]
    fees_paid: Mapping[int, int] = field(default_factory=dict)
    fee_recipient: FeeRecipient = FeeRecipient.NONE
    # payers whose fee is an internal coalition transfer (effective fee 0)
    recycled: frozenset[int] = frozenset()
    competitive: bool = True

    @property
    def clearing_fee(self) -> int:
        return max(self.fees_paid.values(), default=0)

    def effective_fee(self, i: int) -> int:
        if i in self.recycled:
            return 0
        return self.fees_paid.get(i, 0)


def fair_permutation(
    participants: Sequence[int], window_delta: Fraction | float = 0, rng: random.Random | None = None
) -> OrderingResult:
    """Uniformly random order with zero fees.

    ``window_delta`` is accepted for interface stability; every arrival is
    treated as simultaneous.
    """
    if not participants:
        raise EmptyDispute("no valid challenges to order")
    order = list(participants)
    (rng or random.Random(0)).shuffle(order)
    return OrderingResult(tuple(order))


def _best(bids: Sequence[Bid]) -> Bid:
    # highest value, lowest id on ties
    return min(bids, key=lambda b: (-b.value, b.bidder))


def _winner_first(winner: int, bids: Sequence[Bid], rng: random.Random | None) -> tuple[int, ...]:
    rest = sorted(b.bidder for b in bids if b.bidder != winner)
    if rng is not None:
        rng.shuffle(rest)
    return (winner, *rest)


def _competitive_clear(
    bids: Sequence[Bid], eps: int, recipient: FeeRecipient, rng: random.Random | None
) -> OrderingResult:
    if not bids:
        raise EmptyDispute("no bids")
    viable = [b for b in bids if b.value > 0]
    if not viable:
        raise NoViableBidders("no bidder values the slot above zero")
    top = _best(viable)
    fee = max(0, top.value - eps)
    return OrderingResult(
        order=_winner_first(top.bidder, bids, rng),
        fees_paid={top.bidder: fee},
        fee_recipient=recipient,
        competitive=len(viable) >= 2,
    )


def clear_builder_auction(
    bids: Sequence[Bid], eps: int, rng: random.Random | None = None
) -> OrderingResult:
    """Builder-run priority auction; the fee leaves the game entirely."""
    return _competitive_clear(bids, eps, FeeRecipient.BUILDER, rng)


def _honest_clearing_price(bids: Sequence[Bid], eps: int) -> int:
    honest = [b for b in bids if not b.is_coalition and b.value > 0]
    if not honest:
        return 0
    return max(0, _best(honest).value - eps)


def clear_proposer_auction(
    bids: Sequence[Bid], eps: int, rng: random.Random | None = None
) -> OrderingResult:
    """Proposer-run priority auction.

    Any coalition bidder outbids the honest clearing price by ``eps``; the
    payment goes to the proposer and stays inside the coalition, so it is
    marked recycled.  Without coalition bidders this is the builder auction
    with the proposer as recipient.
    """
    if not bids:
        raise EmptyDispute("no bids")
    coalition = [b for b in bids if b.is_coalition]
    if not coalition:
        return _competitive_clear(bids, eps, FeeRecipient.PROPOSER, rng)
    a = _best(coalition)
    fee = _honest_clearing_price(bids, eps) + eps
    return OrderingResult(
        order=_winner_first(a.bidder, bids, rng),
        fees_paid={a.bidder: fee},
        fee_recipient=FeeRecipient.PROPOSER,
        recycled=frozenset({a.bidder}),
        competitive=sum(1 for b in bids if b.value > 0) >= 2,
    )


def capture_builder_slot(
    bids: Sequence[Bid], eps: int, rng: random.Random | None = None
) -> OrderingResult:
    """Coalition buys the builder's slot outright, paying honest price + eps externally."""
    coalition = [b for b in bids if b.is_coalition]
    if not coalition:
        return clear_builder_auction(bids, eps, rng)
    a = _best(coalition)
    return OrderingResult(
        order=_winner_first(a.bidder, bids, rng),
        fees_paid={a.bidder: _honest_clearing_price(bids, eps) + eps},
        fee_recipient=FeeRecipient.BUILDER,
        competitive=sum(1 for b in bids if b.value > 0) >= 2,
    )


def make_bids(
    scenario: Scenario, participants: Sequence[int], costs: Sequence[CostProfile]
) -> list[Bid]:
    m = effective_m(scenario.params, len(participants))
    reward = winner_reward(scenario.params, m)
    pop = scenario.population
    bids = []
    for i in participants:
        value = reward - costs[i].c_proc
        bids.append(Bid(i, value, max(0, value), pop.is_coalition(i)))
    return bids


def realize_order(
    scenario: Scenario,
    valid_challengers: Sequence[int],
    rng: random.Random,
    costs: Sequence[CostProfile] | None = None,
) -> OrderingResult:
    """Order the valid challenges under the scenario's regime.

    Under non-exclusion every challenge is included, priority is worthless,
    and all regimes reduce to a fee-free fair permutation.  With a winner cap
    only the first slot is auctioned; the rest are fair-ordered.
    """
    if not valid_challengers:
        raise EmptyDispute("no valid challenges to order")
    regime = scenario.regime
    if isinstance(regime, FairOrdering) or isinstance(
        scenario.params.winner_policy, NonExclusion
    ):
        window = regime.window_delta if isinstance(regime, FairOrdering) else 0
        return fair_permutation(valid_challengers, window, rng)

    costs = costs if costs is not None else scenario.population.cost_profiles
    bids = make_bids(scenario, valid_challengers, costs)
    eps = regime.bid_increment_eps
    try:
        if isinstance(regime, ProposerPriority):
            return clear_proposer_auction(bids, eps, rng)
        assert isinstance(regime, BuilderPriority)
        if scenario.strategy.coalition_rule is CoalitionRule.PRIORITY_CAPTURE:
            return capture_builder_slot(bids, eps, rng)
        return clear_builder_auction(bids, eps, rng)
    except NoViableBidders:
        return fair_permutation(valid_challengers, 0, rng)
