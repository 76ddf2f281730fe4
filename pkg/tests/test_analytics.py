import dataclasses
from fractions import Fraction

import pytest

from disputesim.analytics import (
    Accumulator,
    default_trials,
    estimate_utilities,
    is_deterministic,
    run_trials,
    summarize,
)
from disputesim.errors import InvalidTrials
from disputesim.model import HonestRule, NonExclusion, ProposerPriority, StrategyConfig
from disputesim.serialization import report_to_json

from conftest import U


def test_zero_trials_rejected(make_scenario):
    with pytest.raises(InvalidTrials):
        estimate_utilities(make_scenario(), 0)


def test_up_single_mean_is_minus_c_init_with_zero_se(make_scenario):
    sc = make_scenario(n=5, a=2, regime=ProposerPriority())
    rep = estimate_utilities(sc, 200)
    for e in rep.honest:
        assert e.mean_utility == -U("0.5") and e.std_error == 0
        assert e.ci_low == e.ci_high == e.mean_utility
        assert e.inclusion_rate == 0


def test_fair_inclusion_rate_is_symmetric(make_scenario):
    rep = estimate_utilities(make_scenario(n=4), 10_000)
    for e in rep.estimates:
        q = float(e.inclusion_rate)
        se = (0.25 * 0.75 / 10_000) ** 0.5
        assert abs(q - 0.25) <= 3 * se
        assert e.ci_low <= e.mean_utility <= e.ci_high


def test_nonexclusion_worst_case_is_deterministic(make_scenario):
    sc = make_scenario(n=10, a=4, c_init=1, c_proc=1, deposit=100, alpha="0.8", policy=NonExclusion(),
                       strategy=StrategyConfig(honest_rule=HonestRule.ALWAYS))
    assert is_deterministic(sc) and default_trials(sc) == 1
    rep = estimate_utilities(sc, 50)
    for e in rep.honest:
        assert e.mean_utility == U(8) - U(2) and e.std_error == 0


def test_default_trials_for_fair_game(make_scenario):
    assert not is_deterministic(make_scenario(n=4))
    assert default_trials(make_scenario(n=4)) == 10_000


def test_worker_count_does_not_change_report(make_scenario):
    sc = make_scenario(n=5, a=1, seed=2024)
    one = report_to_json(estimate_utilities(sc, 3001, workers=1))
    assert report_to_json(estimate_utilities(sc, 3001, workers=3)) == one
    assert report_to_json(estimate_utilities(sc, 3001, workers=8)) == one


def test_accumulator_merge_is_associative(make_scenario):
    sc = make_scenario(n=4, seed=5)
    whole = run_trials(sc, 0, 90)
    a, b, c = run_trials(sc, 0, 20), run_trials(sc, 20, 55), run_trials(sc, 55, 90)
    assert a.merge(b).merge(c) == whole == a.merge(b.merge(c))
    assert summarize(whole, sc) == summarize(c.merge(a).merge(b), sc)


def test_accumulator_rejects_size_mismatch():
    with pytest.raises(ValueError):
        Accumulator(3).merge(Accumulator(4))


def test_o2_is_violated_when_coalition_recaptures(make_scenario):
    sc = make_scenario(n=5, a=2, eta="0.9", regime=ProposerPriority())
    rep = estimate_utilities(sc, 10)
    assert rep.adversary_loss.min_when_caught == 0 and not rep.o2_holds


def test_ci_coverage_fair_single_winner(make_scenario):
    # known expectation (alpha*D_p - c_proc)/N - c_init
    n, trials, metas = 4, 200, 500
    truth = (Fraction(U(10)) - U(1)) / n - U("0.5")
    base = make_scenario(n=n)
    covered = 0
    for k in range(metas):
        rep = estimate_utilities(dataclasses.replace(base, seed=10_000 + k), trials)
        e = rep.estimates[0]
        covered += e.ci_low <= truth <= e.ci_high
    assert covered / metas >= 0.93
