"""Theorem harness: each result is checked analytically and by simulation.

``verify_theorem(theorem_id, config)`` returns a :class:`TheoremReport`
whose verdict passes only when every sub-check does.  ``config`` keys are
optional; the defaults below are what ``verify --theorem all`` runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

from . import calibration as cal
from .analytics import SimulationReport, default_trials, estimate_utilities
from .errors import UnknownTheorem
from .money import SCALE, format_fraction, parse_amount, units_to_fraction
from .model import (
    BuilderPriority,
    CostBounds,
    CostProfile,
    CostSampling,
    FairOrdering,
    HonestRule,
    NonExclusion,
    Population,
    ProposerPriority,
    ProtocolParams,
    Scenario,
    StrategyConfig,
)

THEOREM_IDS = (
    "UP_single",
    "UB_single",
    "F_single_bound",
    "NonExclusion_interval",
    "ScaleFree",
    "EtaCorollary",
)

FULL_PARTICIPATION = StrategyConfig(honest_rule=HonestRule.ALWAYS)


@dataclass(frozen=True, slots=True)
class Check:
    name: str
    kind: str  # "analytic" or "simulation"
    expected: str
    observed: str
    tolerance: str
    passed: bool
    trials: int = 0


@dataclass(frozen=True, slots=True)
class TheoremReport:
    theorem_id: str
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _units(x: Fraction) -> str:
    return format_fraction(x / SCALE)


def _simulate(scenario: Scenario, cfg: Mapping[str, Any]) -> SimulationReport:
    trials = cfg.get("trials") or default_trials(scenario)
    return estimate_utilities(scenario, trials, cfg.get("workers"))


# -- single winner, proposer-ordered ------------------------------------------


def _up_single(cfg: Mapping[str, Any]) -> list[Check]:
    c_init, c_proc = parse_amount(cfg.get("c_init", "1")), parse_amount(cfg.get("c_proc", "1"))
    checks = []
    for n, a, alpha, dp in itertools.product(
        cfg.get("n", (3, 5, 9)), cfg.get("a", (1, 2)),
        cfg.get("alpha", ("0.3", "1")), cfg.get("deposit", (10, 100)),
    ):
        if 2 * a >= n:
            continue  # outside the coalition bound, e.g. N=3 A=2
        pop = Population(n, frozenset(range(a)), CostBounds(c_init, c_proc))
        sc = Scenario(pop, ProtocolParams.of(dp, alpha, "0.5"), ProposerPriority(), seed=n * 100 + a)
        trials = cfg.get("trials") or 1000
        rep = estimate_utilities(sc, trials, cfg.get("workers"))
        honest = rep.honest
        ok = all(
            e.inclusion_rate == 0 and e.mean_utility == -c_init and e.std_error == 0 for e in honest
        )
        worst = max(honest, key=lambda e: (e.inclusion_rate, e.mean_utility))
        checks.append(Check(
            f"N={n} A={a} alpha={alpha} D_p={dp}", "simulation",
            f"q=0, E[U]={_units(Fraction(-c_init))}, SE=0",
            f"q={worst.inclusion_rate}, E[U]={_units(worst.mean_utility)}, SE={worst.std_error}",
            "exact", ok, trials,
        ))
    # E[U] = q(alpha D_p - c_proc) - c_init with q = 0
    q = Fraction(0)
    formula = q * (Fraction(10) - 1) - 1
    checks.append(Check("closed form at q=0", "analytic", "-c_init < 0", str(formula),
                        "exact", formula == -1 and formula < 0))
    return checks


# -- single winner, builder-ordered -------------------------------------------


def _ub_single(cfg: Mapping[str, Any]) -> list[Check]:
    checks = []
    for n, a, eps in itertools.product(
        cfg.get("n", (3, 5)), cfg.get("a", (0, 1)), cfg.get("eps", ("0.001", "0.01"))
    ):
        profiles = tuple(
            CostProfile(parse_amount("0.1") + i * parse_amount("0.05"),
                        parse_amount("0.5") + ((i * 7) % n) * parse_amount("0.25"))
            for i in range(n)
        )
        bounds = CostBounds(max(p.c_init for p in profiles), max(p.c_proc for p in profiles))
        pop = Population(n, frozenset(range(a)), bounds, profiles)
        eps_u = parse_amount(eps)
        sc = Scenario(pop, ProtocolParams.of(10, 1, "0.5"), BuilderPriority(eps_u),
                      CostSampling.FIXED, seed=n + 10 * a)
        rep = _simulate(sc, cfg)
        ok = True
        detail = []
        for e in rep.honest:
            c_i = profiles[e.challenger].c_init
            bound = e.inclusion_rate * eps_u - c_i
            ok &= e.mean_utility <= bound < 0
            detail.append(f"{e.challenger}:{_units(e.mean_utility)}<={_units(bound)}")
        checks.append(Check(f"N={n} A={a} eps={eps}", "simulation",
                            "E[U_i] <= q_i*eps - c_init < 0", "; ".join(detail),
                            "inequality on the sample mean", ok, rep.trials))
        min_init = min(p.c_init for p in profiles)
        checks.append(Check(f"eps={eps} below every c_init", "analytic",
                            "q*eps - c_init < 0 for all q in [0,1]",
                            f"eps={eps}, min c_init={_units(Fraction(min_init))}",
                            "strict", eps_u - min_init < 0))
    return checks


# -- single winner, fair ordering ---------------------------------------------


def _f_single(cfg: Mapping[str, Any]) -> list[Check]:
    n = cfg.get("n", 4)
    c_init, c_proc = Fraction(cfg.get("c_init", "0.5")), Fraction(cfg.get("c_proc", "1"))
    trials = cfg.get("trials") or 10_000
    checks = []
    boundary = cal.fair_single_winner_min_payout(n, c_init, c_proc)
    for label, payout in (("alpha*D_p = 10", Fraction(10)), ("alpha*D_p at the bound", boundary)):
        pop = Population.of(n, 0, c_init, c_proc)
        sc = Scenario(pop, ProtocolParams.of(payout, 1, "0.5"), FairOrdering(), seed=7)
        rep = estimate_utilities(sc, trials, cfg.get("workers"))
        expected = (payout - c_proc) / n - c_init
        ok = all(abs(units_to_fraction(e.mean_utility) - expected) <= 3 * e.std_error / SCALE
                 for e in rep.honest)
        checks.append(Check(
            label, "simulation", format_fraction(expected),
            ", ".join(f"{_units(e.mean_utility)}±{e.std_error / SCALE:.6f}" for e in rep.honest),
            "3 SE", ok, trials,
        ))
    at_bound = (boundary - c_proc) / n - c_init
    checks.append(Check("E[U] vanishes at the bound", "analytic", "0", format_fraction(at_bound),
                        "exact", at_bound == 0))
    big = cal.fair_single_winner_feasible(10**6, 1, 0, 10**5, "0.5", 0)
    checks.append(Check("N=1e6, c_init=1, D_p=1e5", "analytic", "infeasible",
                        "feasible" if big else "infeasible", "exact", not big))
    grows = [cal.fair_single_winner_min_payout(k, 1, 2) for k in (10, 100, 1000)]
    linear = grows[1] - grows[0] == 90 and grows[2] - grows[1] == 900
    checks.append(Check("required payout linear in N", "analytic", "12, 102, 1002",
                        ", ".join(map(str, grows)), "exact", linear))
    return checks


# -- non-exclusion interval ---------------------------------------------------


def nonexclusion_grid_point(
    n: int, a: int, alpha: Fraction, eta: Fraction, c_init: int, c_proc: int, deposit: int
) -> tuple[SimulationReport, cal.FeasibleInterval, cal.GoalCheck]:
    pop = Population(n, frozenset(range(a)), CostBounds(c_init, c_proc))
    params = ProtocolParams(deposit, alpha, eta, NonExclusion())
    sc = Scenario(pop, params, FairOrdering(), strategy=FULL_PARTICIPATION)
    rep = estimate_utilities(sc, 1, 1)
    c_tilde = units_to_fraction(c_init + c_proc)
    dp = units_to_fraction(deposit)
    return rep, cal.feasible_interval(n, a, c_tilde, dp, eta), cal.check_goals(alpha, n, a, c_tilde, dp, eta)


def _nonexclusion(cfg: Mapping[str, Any]) -> list[Check]:
    # D_p = 693 = 9*7*11 with c~ = 33 keeps alpha*D_p/N on the minor-unit grid
    # for every N <= 12 and every alpha on the 0.05 grid, so splits are exact.
    n_max = cfg.get("n_max", 12)
    etas = [Fraction(e) for e in cfg.get("eta", ("0.6", "0.8"))]
    c_init, c_proc = parse_amount(cfg.get("c_init", "11")), parse_amount(cfg.get("c_proc", "22"))
    deposit = parse_amount(cfg.get("deposit", "693"))
    step = Fraction(cfg.get("alpha_step", "0.05"))
    alphas = [step * k for k in range(1, int(1 / step) + 1)]
    points = mismatches = loss_errors = 0
    first_bad: list[str] = []
    for n in range(1, n_max + 1):
        for a in range(0, (n + 1) // 2):
            for alpha, eta in itertools.product(alphas, etas):
                rep, interval, goals = nonexclusion_grid_point(n, a, alpha, eta, c_init, c_proc, deposit)
                points += 1
                inside = alpha in interval
                if (rep.o1_holds, rep.o2_holds) != (goals.o1_holds, goals.o2_holds) or (
                    (rep.o1_holds and rep.o2_holds) != inside
                ):
                    mismatches += 1
                    first_bad.append(f"N={n} A={a} alpha={alpha} eta={eta}")
                expected_loss = (1 - Fraction(a, n) * alpha) * deposit
                if rep.adversary_loss.mean != expected_loss or rep.adversary_loss.std_error != 0:
                    loss_errors += 1
                    first_bad.append(f"loss N={n} A={a} alpha={alpha}")
    return [
        Check("O1/O2 verdicts vs interval membership", "simulation",
              "0 mismatches", f"{mismatches} mismatches over {points} points {first_bad[:3]}",
              "exact", mismatches == 0, points),
        Check("adversary loss = (1 - phi*alpha) D_p", "simulation",
              "0 deviations", f"{loss_errors} deviations over {points} points",
              "exact", loss_errors == 0, points),
        Check("interval examples", "analytic", "[1/10, 1] and [1/10, 1/2], empty at D_p=5",
              _interval_examples(), "exact", _interval_examples() == "[1/10, 1] [1/10, 1/2] empty"),
    ]


def _interval_examples() -> str:
    a = cal.feasible_interval(10, 4, 1, 100, "0.6")
    b = cal.feasible_interval(10, 4, 1, 100, "0.8")
    c = cal.feasible_interval(10, 4, 1, 5, "0.8")
    fmt = lambda iv: f"[{iv.alpha_lower}, {iv.alpha_upper}]"  # noqa: E731
    return f"{fmt(a)} {fmt(b)} {'empty' if not c.nonempty else 'nonempty'}"


# -- scale-free deposit -------------------------------------------------------


def _scale_free(cfg: Mapping[str, Any]) -> list[Check]:
    c_tilde = Fraction(cfg.get("c_tilde", "1"))
    a = cfg.get("a", 4)
    eta = Fraction(cfg.get("eta", "0.9"))
    delta = Fraction(cfg.get("delta", "0.000001"))
    dp = cal.scale_free_min_deposit(c_tilde, a, eta).deposit
    binding = [n for n in range(2 * a + 1, 100 * a) if cal.deterrence_binds(n, a, eta)]
    nonempty = [n for n in binding if cal.feasible_interval(n, a, c_tilde, dp, eta).nonempty]
    empty_below = [n for n in binding if not cal.feasible_interval(n, a, c_tilde, dp - delta, eta).nonempty]
    checks = [
        Check("nonempty at D_p = c~A/(1-eta) while deterrence binds", "analytic",
              f"all of N={binding[0]}..{binding[-1]}" if binding else "some binding N",
              f"{len(nonempty)}/{len(binding)} nonempty", "exact",
              bool(binding) and nonempty == binding),
        Check("empty just below the deposit", "analytic", f"D_p - {delta} empty",
              f"{len(empty_below)}/{len(binding)} empty", "exact",
              bool(binding) and empty_below == binding),
    ]
    for n in sorted({binding[0], binding[len(binding) // 2], binding[-1]}) if binding else ():
        iv = cal.feasible_interval(n, a, c_tilde, dp, eta)
        rep, _, _ = nonexclusion_grid_point(
            n, a, iv.alpha_upper, eta, parse_amount(c_tilde), 0, parse_amount(dp)
        )
        checks.append(Check(
            f"N={n} at alpha={iv.alpha_upper}", "simulation", "O1 and O2 hold",
            f"O1={rep.o1_holds} O2={rep.o2_holds} loss={_units(rep.adversary_loss.mean)}",
            "exact", rep.o1_holds and rep.o2_holds, rep.trials,
        ))
    return checks


# -- phi-free bound -----------------------------------------------------------


def _eta_corollary(cfg: Mapping[str, Any]) -> list[Check]:
    tiny = Fraction(cfg.get("delta", "0.000001"))
    half = Fraction(1, 2)
    checks = []
    for eta, expect in ((half - tiny, False), (half, False), (half + tiny, True)):
        bound, nontrivial = cal.phi_free_upper_bound(eta)
        checks.append(Check(f"eta={format_fraction(eta)}", "analytic", f"nontrivial={expect}",
                            f"nontrivial={nontrivial} bound={format_fraction(bound)}",
                            "exact", nontrivial is expect and (bound < 1) is expect))
    for eta, a in itertools.product(cfg.get("eta", ("0.6", "0.75", "0.9")), cfg.get("a", (1, 5, 50))):
        eta = Fraction(eta)
        n = 2 * a + 1
        alpha, _ = cal.phi_free_upper_bound(eta)
        # D_p = 10 per challenger keeps alpha*D_p/N exact for decimal alpha
        rep, _, _ = nonexclusion_grid_point(
            n, a, alpha, eta, parse_amount("0.001"), 0, parse_amount(10 * n)
        )
        checks.append(Check(
            f"N={n} A={a} eta={eta} alpha=2(1-eta)", "simulation", "loss >= eta*D_p",
            f"loss={_units(rep.adversary_loss.mean)} eta*D_p={format_fraction(eta * 10 * n)}",
            "exact", rep.o2_holds, rep.trials,
        ))
    return checks


_RUNNERS: dict[str, Callable[[Mapping[str, Any]], list[Check]]] = {
    "UP_single": _up_single,
    "UB_single": _ub_single,
    "F_single_bound": _f_single,
    "NonExclusion_interval": _nonexclusion,
    "ScaleFree": _scale_free,
    "EtaCorollary": _eta_corollary,
}


def verify_theorem(theorem_id: str, config: Mapping[str, Any] | None = None) -> TheoremReport:
    try:
        runner = _RUNNERS[theorem_id]
    except KeyError:
        raise UnknownTheorem(theorem_id) from None
    return TheoremReport(theorem_id, tuple(runner(config or {})))


def verify_all(config: Mapping[str, Any] | None = None) -> list[TheoremReport]:
    return [verify_theorem(t, config) for t in THEOREM_IDS]
