import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from disputesim import calibration as cal
from disputesim.analytics import estimate_utilities
from disputesim.engine import (
    adversary_loss,
    conservation_errors,
    decide_participation,
    run_dispute,
    trial_rng,
    trial_seed,
)
from disputesim.model import (
    BuilderPriority,
    CoalitionRule,
    CostBounds,
    CostProfile,
    CostSampling,
    HonestRule,
    NonExclusion,
    Population,
    ProposerPriority,
    ProtocolParams,
    Scenario,
    StrategyConfig,
)

from conftest import U
from strategies import scenarios

ALWAYS = StrategyConfig(honest_rule=HonestRule.ALWAYS)


# -- participation -------------------------------------------------------------


def test_single_agent_participates(make_scenario):
    sc = make_scenario(n=1, c_init=1, c_proc=1, deposit=10, alpha=1)
    (d,) = decide_participation(sc, 0)
    assert d.participates and d.conservative_bound == U(8)


def test_nonexclusion_bound_negative_so_honest_abstain(make_scenario):
    sc = make_scenario(n=10, a=0, c_init=1, c_proc=1, deposit=10, alpha="0.1", policy=NonExclusion())
    decisions = decide_participation(sc, 0)
    assert all(not d.participates for d in decisions)
    assert decisions[0].conservative_bound == U("-1.9")
    # the same boundary from the closed form: alpha < N c~ / D_p
    assert Fraction(1, 10) < cal.alpha_lower_bound(10, 0, 2, 10)


def test_coalition_follows_honest_abstention(make_scenario):
    sc = make_scenario(n=5, a=2, c_init=5, c_proc=5, deposit=1, alpha="1")
    assert not any(d.participates for d in decide_participation(sc))
    out = run_dispute(sc, random.Random(0))
    assert not out.fraud_caught and out.adversary_loss == 0 and out.burned == 0


def test_coalition_recaptures_when_honest_join(make_scenario):
    sc = make_scenario(n=5, a=2)
    assert all(d.participates for d in decide_participation(sc))


def test_passive_coalition_stays_out(make_scenario):
    sc = make_scenario(n=5, a=2, strategy=StrategyConfig(coalition_rule=CoalitionRule.PASSIVE))
    parts = [d.challenger for d in decide_participation(sc) if d.participates]
    assert parts == [2, 3, 4]


def test_fee_upper_bound_enters_conservative_bound(make_scenario):
    sc = make_scenario(n=1, c_init=1, c_proc=1, deposit=10)
    assert not decide_participation(sc, U("8.5"))[0].participates
    assert decide_participation(sc, U(8))[0].participates


# -- single dispute ------------------------------------------------------------


def test_proposer_priority_single_winner_example(make_scenario):
    sc = make_scenario(n=3, a=1, c_init=1, c_proc=1, deposit=100, alpha="0.5", regime=ProposerPriority())
    out = run_dispute(sc, random.Random(0))
    assert out.winners == (0,)
    assert out.utilities[1] == out.utilities[2] == -U(1)
    assert out.adversary_loss == U(50)
    assert out.fees_paid[0] > 0 and out.recycled_fees == 0


def test_nonexclusion_worst_case_example():
    pop = Population(10, frozenset(range(4)), CostBounds(U(2), U(3)))
    sc = Scenario(pop, ProtocolParams.of(100, "0.8", "0.5", NonExclusion()), strategy=ALWAYS)
    out = run_dispute(sc, random.Random(0))
    assert set(out.utilities.values()) == {U(3)}
    assert out.adversary_loss == U(68) == (1 - Fraction(4, 10) * Fraction(8, 10)) * U(100)
    assert out.burned == U(20)


def _fair_oracle(n, deposit, alpha, c_init, c_proc):
    """Average utility of challenger 0 over all n! equally likely orders."""
    total = Fraction(0)
    perms = list(itertools.permutations(range(n)))
    for order in perms:
        won = order[0] == 0
        total += (alpha * deposit - c_proc if won else 0) - c_init
    return total / len(perms)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_fair_expectation_matches_enumeration(make_scenario, n):
    deposit, alpha, c_init, c_proc = Fraction(10), Fraction(1), Fraction(1, 2), Fraction(1)
    oracle = _fair_oracle(n, deposit, alpha, c_init, c_proc)
    assert oracle == (alpha * deposit - c_proc) / n - c_init
    sc = make_scenario(n=n, c_init="0.5", c_proc="1", deposit="10")
    rep = estimate_utilities(sc, 20_000)
    for e in rep.estimates:
        assert abs(Fraction(e.mean_utility, U(1)) - oracle) <= 3 * Fraction(e.std_error) / U(1) + Fraction(1, 10**9)


def test_builder_winner_surplus_is_eps(make_scenario):
    eps = U("0.01")
    sc = make_scenario(n=3, a=0, c_init="0.5", c_proc="1", regime=BuilderPriority(eps))
    out = run_dispute(sc, random.Random(0))
    (w,) = out.winners
    assert out.utilities[w] == eps - U("0.5")
    assert out.builder_fees == U(9) - eps
    assert out.adversary_loss == U(10)


def test_priority_capture_under_builder(make_scenario):
    eps = U("0.01")
    strat = StrategyConfig(coalition_rule=CoalitionRule.PRIORITY_CAPTURE)
    sc = make_scenario(n=3, a=1, regime=BuilderPriority(eps), strategy=strat)
    out = run_dispute(sc, random.Random(0))
    assert out.winners == (0,)
    assert out.builder_fees == U(9)  # honest clearing price 9 - eps, plus eps
    assert out.adversary_loss == 0


def test_honest_fee_to_proposer_reduces_loss(make_scenario):
    sc = make_scenario(n=2, a=0, c_init="0.5", c_proc="1", regime=ProposerPriority(U("0.1")))
    out = run_dispute(sc, random.Random(0))
    assert out.recycled_fees == U("8.9")
    assert out.adversary_loss == U(10) - U("8.9")


# -- adversary loss ------------------------------------------------------------


def test_loss_without_coalition_is_full_deposit(make_scenario):
    out = run_dispute(make_scenario(n=4, a=0), random.Random(3))
    assert adversary_loss(out, make_scenario(n=4).population) == U(10)


def test_loss_when_coalition_takes_single_slot(make_scenario):
    sc = make_scenario(n=3, a=1, alpha="1", regime=ProposerPriority())
    out = run_dispute(sc, random.Random(0))
    assert adversary_loss(out, sc.population) == out.adversary_loss == 0


def test_loss_nonexclusion_example():
    pop = Population.of(10, 4, 0, 1)
    sc = Scenario(pop, ProtocolParams.of(100, "0.5", "0.5", NonExclusion()), strategy=ALWAYS)
    out = run_dispute(sc, random.Random(0))
    assert adversary_loss(out, pop) == out.adversary_loss == U(80)


def _ne_loss(n, a, alpha):
    pop = Population.of(n, a, 0, "0.01")
    sc = Scenario(pop, ProtocolParams.of(1000, alpha, "0.5", NonExclusion()), strategy=ALWAYS)
    return run_dispute(sc, random.Random(0)).adversary_loss


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (n - 1) // 2))),
       st.integers(1, 99))
def test_loss_monotone_in_alpha_and_coalition(na, k):
    n, a = na
    lo, hi = Fraction(k, 100), Fraction(k + 1, 100)
    assert _ne_loss(n, a, hi) <= _ne_loss(n, a, lo)
    if 2 * (a + 1) < n:
        assert _ne_loss(n, a + 1, lo) <= _ne_loss(n, a, lo)


# -- theorems as invariants ----------------------------------------------------


@given(st.integers(3, 9), st.integers(1, 4), st.sampled_from(["0.3", "0.7", "1"]),
       st.integers(1, 500), st.integers(0, 2**32))
@settings(max_examples=60)
def test_up_single_honest_always_lose_c_init(n, a, alpha, deposit, seed):
    if 2 * a >= n:
        return
    profiles = tuple(CostProfile(U("0.2") + i, U(i % 3)) for i in range(n))
    pop = Population(n, frozenset(range(a)), CostBounds(U("0.2") + n, U(2)), profiles)
    sc = Scenario(pop, ProtocolParams.of(deposit, alpha, "0.5"), ProposerPriority(),
                  CostSampling.FIXED, seed)
    for t in range(5):
        out = run_dispute(sc, trial_rng(seed, t))
        for i in pop.honest:
            if out.utilities[i] != 0:  # honest may abstain when the bound is negative
                assert out.utilities[i] == -profiles[i].c_init
                assert i not in out.winners


@given(scenarios())
@settings(max_examples=300)
def test_conservation_on_random_scenarios(sc):
    out = run_dispute(sc, trial_rng(sc.seed, 0))
    assert conservation_errors(out, sc) == []
    assert adversary_loss(out, sc.population) == out.adversary_loss
    assert len(out.winners) <= len(out.participants)


def test_trial_seed_is_stable():
    assert trial_seed(0, 0) == trial_seed(0, 0)
    assert trial_seed(0, 0) != trial_seed(0, 1)
    assert trial_seed(1, 0) != trial_seed(0, 1)
