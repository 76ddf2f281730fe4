"""One-axis parameter sweeps emitting plot-ready rows.

Each row carries the analytic bounds next to the empirical verdicts.  Rows
whose parameters are invalid (for example A >= N/2) are kept and flagged so
a plot shows where the validity boundary sits.

Column contract, in order: see ``SWEEP_COLUMNS``.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction
from typing import Any, Sequence

from . import calibration as cal
from .analytics import default_trials, estimate_utilities
from .errors import DisputeSimError
from .money import SCALE, format_fraction, parse_amount, to_fraction, units_to_fraction
from .model import CostBounds, CostSampling, Population, Scenario

AXES = ("N", "A", "alpha", "D_p", "eta", "c_tilde")

SWEEP_COLUMNS = (
    "axis",
    "value",
    "valid",
    "error",
    "n",
    "a",
    "alpha",
    "deposit",
    "eta",
    "c_tilde",
    "alpha_lower",
    "alpha_upper",
    "nonempty",
    "regime",
    "fair_single_min_payout",
    "o1_analytic",
    "o2_analytic",
    "o1_empirical",
    "o2_empirical",
    "min_honest_mean_utility",
    "adversary_loss_mean",
    "trials",
)


def apply_axis(base: Scenario, axis: str, value: str) -> Scenario:
    """Return ``base`` with one parameter replaced; raises on invalid values."""
    pop, params = base.population, base.params
    if axis == "N":
        n = int(value)
        if base.cost_sampling is CostSampling.FIXED:
            raise DisputeSimError("cannot resize a fixed cost profile list")
        pop = Population(n, pop.coalition, pop.cost_bounds)
    elif axis == "A":
        pop = Population(pop.n_challengers, frozenset(range(int(value))), pop.cost_bounds,
                         pop.cost_profiles if base.cost_sampling is CostSampling.FIXED else ())
    elif axis == "alpha":
        params = dataclasses.replace(params, alpha=to_fraction(value))
    elif axis == "D_p":
        params = dataclasses.replace(params, deposit_dp=parse_amount(value))
    elif axis == "eta":
        params = dataclasses.replace(params, eta=to_fraction(value))
    elif axis == "c_tilde":
        if base.cost_sampling is CostSampling.FIXED:
            raise DisputeSimError("cannot rescale a fixed cost profile list")
        total = parse_amount(value)
        old = pop.cost_bounds
        # keep the init/proc split ratio; the floor remainder goes to proc
        init = total * old.c_tilde_init // old.c_tilde if old.c_tilde else 0
        pop = Population(pop.n_challengers, pop.coalition, CostBounds(init, total - init))
    else:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    return dataclasses.replace(base, population=pop, params=params)


def _blank(axis: str, value: str, error: str) -> dict[str, Any]:
    row: dict[str, Any] = {c: None for c in SWEEP_COLUMNS}
    row.update(axis=axis, value=value, valid=False, error=error)
    return row


def sweep_row(sc: Scenario, axis: str, value: str, trials: int | None, workers: int | None) -> dict[str, Any]:
    pop, params = sc.population, sc.params
    n, a = pop.n_challengers, pop.coalition_size
    c_tilde = units_to_fraction(pop.cost_bounds.c_tilde)
    dp = units_to_fraction(params.deposit_dp)
    f = units_to_fraction(sc.fee_upper)
    m = params.winner_policy.announced_m(n)
    lower = cal.alpha_lower_bound(m, f, c_tilde, dp)
    upper = cal.alpha_upper_bound(params.eta, Fraction(a, n))
    regime = cal.feasible_interval(n, a, c_tilde, dp, params.eta).regime
    goals = cal.check_goals(params.alpha, n, a, c_tilde, dp, params.eta, m=m, f=f)
    fair_min = cal.fair_single_winner_min_payout(
        n, units_to_fraction(pop.cost_bounds.c_tilde_init), units_to_fraction(pop.cost_bounds.c_tilde_proc)
    )
    t = trials or default_trials(sc)
    rep = estimate_utilities(sc, t, workers)
    honest = rep.honest
    return {
        "axis": axis,
        "value": value,
        "valid": True,
        "error": "",
        "n": n,
        "a": a,
        "alpha": format_fraction(params.alpha),
        "deposit": format_fraction(dp),
        "eta": format_fraction(params.eta),
        "c_tilde": format_fraction(c_tilde),
        "alpha_lower": format_fraction(lower),
        "alpha_upper": format_fraction(upper),
        "nonempty": lower <= upper,
        "regime": regime.value,
        "fair_single_min_payout": format_fraction(fair_min),
        "o1_analytic": goals.o1_holds,
        "o2_analytic": goals.o2_holds,
        "o1_empirical": rep.o1_holds,
        "o2_empirical": rep.o2_holds,
        "min_honest_mean_utility": (
            format_fraction(min(e.mean_utility for e in honest) / SCALE) if honest else None
        ),
        "adversary_loss_mean": format_fraction(rep.adversary_loss.mean / SCALE),
        "trials": t,
    }


def sweep(
    axis: str,
    values: Sequence[str],
    base: Scenario,
    trials: int | None = None,
    workers: int | None = None,
) -> list[dict[str, Any]]:
    """One row per value; ``trials=None`` picks 1 or 10^4 per row by probing."""
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    rows = []
    for raw in values:
        value = str(raw).strip()
        try:
            sc = apply_axis(base, axis, value)
        except (DisputeSimError, ValueError, TypeError) as exc:
            rows.append(_blank(axis, value, str(exc)))
            continue
        rows.append(sweep_row(sc, axis, value, trials, workers))
    return rows
