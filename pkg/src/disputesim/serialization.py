"""Scenario files and report renderings (JSON and CSV).

Currency and fractions travel as decimal strings; binary floats are
rejected on input.  ``dump_scenario`` emits the canonical form (every key
present, sorted), so ``dump(load(dump(load(x)))) == dump(load(x))``.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable, Mapping

import jsonschema

from . import model as m
from .analytics import SimulationReport, UtilityEstimate
from .errors import DisputeSimError, ScenarioFileError
from .harness import TheoremReport
from .money import SCALE, format_amount, format_exact, format_fraction, parse_amount, to_fraction

DECIMAL = {"type": "string", "pattern": r"^[0-9]+(\.[0-9]+)?$"}
COST_PAIR = {
    "type": "object",
    "additionalProperties": False,
    "required": ["init", "proc"],
    "properties": {"init": DECIMAL, "proc": DECIMAL},
}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["population", "protocol", "regime", "seed"],
    "properties": {
        "population": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n", "coalition_ids", "cost_bounds"],
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "coalition_ids": {
                    "type": "array", "items": {"type": "integer", "minimum": 0}, "uniqueItems": True,
                },
                "cost_bounds": COST_PAIR,
                "cost_sampling": {
                    "oneOf": [
                        {"enum": ["worst_case", "uniform"]},
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["fixed"],
                            "properties": {"fixed": {"type": "array", "items": COST_PAIR}},
                        },
                    ]
                },
            },
        },
        "protocol": {
            "type": "object",
            "additionalProperties": False,
            "required": ["deposit", "alpha", "eta"],
            "properties": {
                "deposit": DECIMAL,
                "alpha": DECIMAL,
                "eta": DECIMAL,
                "stake": DECIMAL,
                "winner_policy": {
                    "oneOf": [
                        {"enum": ["single", "non_exclusion"]},
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["capped"],
                            "properties": {"capped": {"type": "integer", "minimum": 1}},
                        },
                    ]
                },
            },
        },
        "regime": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["fair", "builder", "proposer"]},
                "window_delta": DECIMAL,
                "eps": DECIMAL,
            },
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "strategy": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "honest": {"enum": [r.value for r in m.HonestRule]},
                "coalition": {"enum": [r.value for r in m.CoalitionRule]},
                "fee_upper": DECIMAL,
            },
        },
    },
}


def _no_floats(text: str) -> float:
    raise ScenarioFileError(f"binary float {text} not allowed; quote decimals as strings")


def parse_scenario(doc: Mapping[str, Any]) -> m.Scenario:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioFileError(f"{where}: {exc.message}") from None
    try:
        return _build(doc)
    except (DisputeSimError, ValueError) as exc:
        raise ScenarioFileError(str(exc)) from exc


def _build(doc: Mapping[str, Any]) -> m.Scenario:
    p, proto, reg = doc["population"], doc["protocol"], doc["regime"]
    bounds = m.CostBounds(parse_amount(p["cost_bounds"]["init"]), parse_amount(p["cost_bounds"]["proc"]))
    sampling_doc = p.get("cost_sampling", "worst_case")
    profiles: tuple[m.CostProfile, ...] = ()
    if isinstance(sampling_doc, dict):
        sampling = m.CostSampling.FIXED
        profiles = tuple(
            m.CostProfile(parse_amount(c["init"]), parse_amount(c["proc"])) for c in sampling_doc["fixed"]
        )
    else:
        sampling = m.CostSampling(sampling_doc)
    pop = m.Population(p["n"], frozenset(p["coalition_ids"]), bounds, profiles)

    wp = proto.get("winner_policy", "single")
    policy: m.WinnerPolicy
    if isinstance(wp, dict):
        policy = m.Capped(wp["capped"])
    else:
        policy = m.SingleWinner() if wp == "single" else m.NonExclusion()
    params = m.ProtocolParams(
        deposit_dp=parse_amount(proto["deposit"]),
        alpha=to_fraction(proto["alpha"]),
        eta=to_fraction(proto["eta"]),
        winner_policy=policy,
        challenger_stake_s=parse_amount(proto.get("stake", "0")),
    )

    regime: m.OrderingRegime
    if reg["kind"] == "fair":
        if "eps" in reg:
            raise ScenarioFileError("regime/eps only applies to priority regimes")
        regime = m.FairOrdering(to_fraction(reg.get("window_delta", "0")))
    else:
        if "window_delta" in reg:
            raise ScenarioFileError("regime/window_delta only applies to fair ordering")
        eps = parse_amount(reg["eps"]) if "eps" in reg else m.DEFAULT_EPS
        regime = m.BuilderPriority(eps) if reg["kind"] == "builder" else m.ProposerPriority(eps)

    st = doc.get("strategy", {})
    strategy = m.StrategyConfig(
        m.HonestRule(st.get("honest", m.HonestRule.BEST_EFFORT.value)),
        m.CoalitionRule(st.get("coalition", m.CoalitionRule.RECAPTURE.value)),
    )
    return m.Scenario(
        population=pop,
        params=params,
        regime=regime,
        cost_sampling=sampling,
        seed=doc["seed"],
        strategy=strategy,
        fee_upper=parse_amount(st.get("fee_upper", "0")),
    )


def loads_scenario(text: str) -> m.Scenario:
    try:
        doc = json.loads(text, parse_float=_no_floats)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"invalid JSON: {exc}") from None
    return parse_scenario(doc)


def _fraction_text(x: Fraction) -> str:
    # exact decimal when finite, else the rational form
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        raise ScenarioFileError(f"{format_exact(x)} has no finite decimal form")
    text = format_fraction(x, places=40).rstrip("0").rstrip(".")
    return text or "0"


def _amount_text(units: int) -> str:
    return _fraction_text(Fraction(units, SCALE))


def scenario_to_doc(sc: m.Scenario) -> dict[str, Any]:
    pop, params, reg = sc.population, sc.params, sc.regime
    sampling: Any = sc.cost_sampling.value
    if sc.cost_sampling is m.CostSampling.FIXED:
        sampling = {"fixed": [
            {"init": _amount_text(c.c_init), "proc": _amount_text(c.c_proc)} for c in pop.cost_profiles
        ]}
    policy = params.winner_policy
    wp: Any = (
        {"capped": policy.m} if isinstance(policy, m.Capped)
        else "single" if isinstance(policy, m.SingleWinner) else "non_exclusion"
    )
    if isinstance(reg, m.FairOrdering):
        regime: dict[str, Any] = {"kind": "fair", "window_delta": _fraction_text(Fraction(reg.window_delta))}
    else:
        kind = "builder" if isinstance(reg, m.BuilderPriority) else "proposer"
        regime = {"kind": kind, "eps": _amount_text(reg.bid_increment_eps)}
    return {
        "population": {
            "n": pop.n_challengers,
            "coalition_ids": sorted(pop.coalition),
            "cost_bounds": {
                "init": _amount_text(pop.cost_bounds.c_tilde_init),
                "proc": _amount_text(pop.cost_bounds.c_tilde_proc),
            },
            "cost_sampling": sampling,
        },
        "protocol": {
            "deposit": _amount_text(params.deposit_dp),
            "alpha": _fraction_text(params.alpha),
            "eta": _fraction_text(params.eta),
            "winner_policy": wp,
            "stake": _amount_text(params.challenger_stake_s),
        },
        "regime": regime,
        "seed": sc.seed,
        "strategy": {
            "honest": sc.strategy.honest_rule.value,
            "coalition": sc.strategy.coalition_rule.value,
            "fee_upper": _amount_text(sc.fee_upper),
        },
    }


def dump_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def dump_scenario(sc: m.Scenario) -> str:
    return dump_json(scenario_to_doc(sc))


# -- reports ------------------------------------------------------------------

CSV_COLUMNS = ("id", "role", "mean_utility", "se", "ci_low", "ci_high", "inclusion_rate")


def _money(x: Fraction | int) -> str:
    return format_fraction(Fraction(x) / SCALE)


def _se(se: float) -> str:
    return format_fraction(Fraction(se) / SCALE)


def estimate_row(e: UtilityEstimate) -> dict[str, str]:
    return {
        "id": str(e.challenger),
        "role": e.role,
        "mean_utility": _money(e.mean_utility),
        "se": _se(e.std_error),
        "ci_low": _money(e.ci_low),
        "ci_high": _money(e.ci_high),
        "inclusion_rate": format_fraction(e.inclusion_rate),
    }


def report_to_doc(rep: SimulationReport) -> dict[str, Any]:
    loss = rep.adversary_loss
    params = rep.scenario.params
    return {
        "scenario": scenario_to_doc(rep.scenario),
        "trials": rep.trials,
        "challengers": [estimate_row(e) for e in rep.estimates],
        "adversary_loss": {
            "mean": _money(loss.mean),
            "se": _se(loss.std_error),
            "ci_low": _money(loss.ci_low),
            "ci_high": _money(loss.ci_high),
            "min_when_caught": None if loss.min_when_caught is None else format_amount(loss.min_when_caught),
            "deterrence_target": _money(params.eta * params.deposit_dp),
        },
        "fraud_caught_rate": format_fraction(rep.fraud_caught_rate),
        "mean_clearing_fee": _money(rep.mean_clearing_fee),
        "o1_holds": rep.o1_holds,
        "o2_holds": rep.o2_holds,
        "conservation_failures": rep.conservation_failures,
        "challenger_stake": format_amount(params.challenger_stake_s),
    }


def report_to_json(rep: SimulationReport) -> str:
    return dump_json(report_to_doc(rep))


def rows_to_csv(rows: Iterable[Mapping[str, Any]], columns: Iterable[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def report_to_csv(rep: SimulationReport) -> str:
    return rows_to_csv((estimate_row(e) for e in rep.estimates), CSV_COLUMNS)


def theorem_reports_to_doc(reports: Iterable[TheoremReport]) -> dict[str, Any]:
    reports = list(reports)
    return {
        "all_pass": all(r.passed for r in reports),
        "reports": [
            {
                "theorem_id": r.theorem_id,
                "verdict": r.verdict,
                "evidence": [
                    {
                        "name": c.name,
                        "kind": c.kind,
                        "expected": c.expected,
                        "observed": c.observed,
                        "tolerance": c.tolerance,
                        "trials": c.trials,
                        "passed": c.passed,
                    }
                    for c in r.checks
                ],
            }
            for r in reports
        ],
    }
