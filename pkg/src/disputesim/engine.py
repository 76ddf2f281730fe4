"""One dispute in the fraud branch: participation, ordering, payoffs, loss."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .model import (
    CoalitionRule,
    CostProfile,
    CostSampling,
    DisputeOutcome,
    HonestRule,
    Population,
    Scenario,
    effective_m,
    split_deposit,
)
from .ordering import FeeRecipient, realize_order


@dataclass(frozen=True, slots=True)
class ParticipationDecision:
    challenger: int
    participates: bool
    conservative_bound: int


def trial_seed(seed: int, trial_index: int) -> int:
    """Per-trial seed derived from the scenario seed; stable across platforms."""
    digest = hashlib.blake2b(
        f"{seed}:{trial_index}".encode(), digest_size=8, person=b"disputesim"
    ).digest()
    return int.from_bytes(digest, "big")


def trial_rng(seed: int, trial_index: int) -> random.Random:
    return random.Random(trial_seed(seed, trial_index))


def conservative_bound(scenario: Scenario, f_upper: int) -> int:
    """Public worst-case net payoff of a winner at the announced capacity.

    Capacity is N under non-exclusion, 1 for a single winner, min(m, N) when
    capped.  Uses the same floored share as settlement.
    """
    pop, params = scenario.population, scenario.params
    m = params.winner_policy.announced_m(pop.n_challengers)
    reward, _, _ = split_deposit(params, m)
    return reward - pop.cost_bounds.c_tilde - f_upper


def decide_participation(
    scenario: Scenario, f_upper: int | None = None
) -> list[ParticipationDecision]:
    """Who submits a challenge.

    Honest best-effort challengers participate iff the conservative bound is
    non-negative.  A recapturing coalition joins whenever any honest
    challenger does, and stays out otherwise.
    """
    f_upper = scenario.fee_upper if f_upper is None else f_upper
    if f_upper < 0:
        raise ValueError("f_upper must be non-negative")
    pop = scenario.population
    bound = conservative_bound(scenario, f_upper)
    rule = scenario.strategy.honest_rule
    honest_in = {
        HonestRule.BEST_EFFORT: bound >= 0,
        HonestRule.ALWAYS: True,
        HonestRule.ABSTAIN: False,
    }[rule]
    any_honest = honest_in and len(pop.honest) > 0
    coalition_in = (
        scenario.strategy.coalition_rule is not CoalitionRule.PASSIVE and any_honest
    )
    return [
        ParticipationDecision(
            i, coalition_in if pop.is_coalition(i) else honest_in, bound
        )
        for i in range(pop.n_challengers)
    ]


def sample_costs(scenario: Scenario, rng: random.Random) -> tuple[CostProfile, ...]:
    pop = scenario.population
    bounds = pop.cost_bounds
    if scenario.cost_sampling is CostSampling.WORST_CASE:
        return (bounds.worst_case(),) * pop.n_challengers
    if scenario.cost_sampling is CostSampling.FIXED:
        return pop.cost_profiles
    return tuple(
        CostProfile(rng.randint(0, bounds.c_tilde_init), rng.randint(0, bounds.c_tilde_proc))
        for _ in range(pop.n_challengers)
    )


def run_dispute(scenario: Scenario, rng: random.Random) -> DisputeOutcome:
    """Play one dispute against a fraudulent proposal.

    Only included winners pay ``c_proc`` and any priority fee; every
    participant pays ``c_init``.  With no participants the deposit is not
    slashed and the outcome is reported with ``fraud_caught=False``.
    """
    pop, params = scenario.population, scenario.params
    costs = sample_costs(scenario, rng)
    participants = tuple(
        d.challenger for d in decide_participation(scenario) if d.participates
    )
    if not participants:
        return DisputeOutcome(
            realized_order=(),
            winners=(),
            utilities={i: 0 for i in range(pop.n_challengers)},
            clearing_fee=0,
            adversary_loss=0,
            burned=0,
            distributed=0,
            fraud_caught=False,
        )

    ordering = realize_order(scenario, participants, rng, costs)
    m = effective_m(params, len(participants))
    winners = ordering.order[:m]
    reward, distributed, burned = split_deposit(params, m)

    utilities = {i: 0 for i in range(pop.n_challengers)}
    costs_incurred = 0
    for i in participants:
        utilities[i] -= costs[i].c_init
        costs_incurred += costs[i].c_init
    for w in winners:
        utilities[w] += reward - costs[w].c_proc - ordering.effective_fee(w)
        costs_incurred += costs[w].c_proc

    fees = dict(ordering.fees_paid)
    total_fees = sum(fees.values())
    builder = total_fees if ordering.fee_recipient is FeeRecipient.BUILDER else 0
    proposer = total_fees if ordering.fee_recipient is FeeRecipient.PROPOSER else 0
    recycled = sum(
        f for i, f in fees.items()
        if ordering.fee_recipient is FeeRecipient.PROPOSER and not pop.is_coalition(i)
    )
    recaptured = reward * sum(1 for w in winners if pop.is_coalition(w))

    return DisputeOutcome(
        realized_order=ordering.order,
        winners=winners,
        utilities=utilities,
        clearing_fee=ordering.clearing_fee,
        adversary_loss=params.deposit_dp - recaptured - recycled,
        burned=burned,
        distributed=distributed,
        participants=participants,
        fees_paid=fees,
        builder_fees=builder,
        proposer_fees=proposer,
        recycled_fees=recycled,
        costs_incurred=costs_incurred,
        fraud_caught=True,
    )


def adversary_loss(outcome: DisputeOutcome, pop: Population) -> int:
    """Recompute the coalition's net loss from an outcome's ledger entries.

    The slashed deposit is ``distributed + burned``; the coalition claws back
    the shares its own winners took and any honest fees paid to the proposer.
    """
    if not outcome.fraud_caught:
        return 0
    deposit_dp = outcome.distributed + outcome.burned
    m = len(outcome.winners)
    reward = outcome.distributed // m
    coalition_rewards = reward * sum(1 for w in outcome.winners if pop.is_coalition(w))
    honest_fees_to_proposer = outcome.recycled_fees
    return deposit_dp - coalition_rewards - honest_fees_to_proposer


def conservation_errors(outcome: DisputeOutcome, scenario: Scenario) -> list[str]:
    """Ledger checks that must hold exactly; returns a list of violations."""
    errs: list[str] = []
    dp = scenario.params.deposit_dp
    if outcome.fraud_caught:
        if outcome.distributed + outcome.burned != dp:
            errs.append("distributed + burned != D_p")
        m = len(outcome.winners)
        if m == 0 or outcome.distributed % m:
            errs.append("distributed is not an equal split")
        elif outcome.burned < 0:
            errs.append("negative burn")
    elif outcome.distributed or outcome.burned or outcome.adversary_loss:
        errs.append("deposit moved although fraud went uncaught")
    if sum(outcome.fees_paid.values()) != outcome.builder_fees + outcome.proposer_fees:
        errs.append("fees paid != fees received")
    # every unit of utility is a reward minus a cost or an external fee
    external_fees = outcome.builder_fees + outcome.proposer_fees - _internal_fees(outcome, scenario)
    if sum(outcome.utilities.values()) != outcome.distributed - outcome.costs_incurred - external_fees:
        errs.append("utilities do not reconcile with rewards, costs and fees")
    if not set(outcome.winners) <= set(outcome.participants):
        errs.append("winner did not participate")
    return errs


def _internal_fees(outcome: DisputeOutcome, scenario: Scenario) -> int:
    # coalition payments to the proposer never leave the coalition
    if outcome.proposer_fees == 0:
        return 0
    pop = scenario.population
    return sum(f for i, f in outcome.fees_paid.items() if pop.is_coalition(i))

