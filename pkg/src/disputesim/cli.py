"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 empty feasible
interval (calibrate only), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import calibration as cal
from .analytics import WORKERS_ENV, default_trials, default_workers, estimate_utilities
from .errors import DisputeSimError, ScenarioFileError
from .harness import THEOREM_IDS, verify_all, verify_theorem
from .money import format_exact, format_fraction, to_fraction
from .serialization import (
    dump_json,
    loads_scenario,
    report_to_csv,
    report_to_json,
    rows_to_csv,
    theorem_reports_to_doc,
)
from .sweep import AXES, SWEEP_COLUMNS, sweep

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


class IOFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 already; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _decimal(x: Fraction) -> dict[str, str]:
    return {"decimal": format_fraction(x), "exact": format_exact(x)}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="disputesim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("calibrate", help="feasible alpha interval under non-exclusion")
    c.add_argument("--n", type=_positive_int, required=True, help="number of challengers N")
    c.add_argument("--coalition", type=int, required=True, help="coalition size A (< N/2)")
    c.add_argument("--cost", type=_num, help="aggregate cost bound c~ (alternative to init/proc)")
    c.add_argument("--cost-bound-init", type=_num, default=None, help="c~_init (default 0)")
    c.add_argument("--cost-bound-proc", type=_num, default=None, help="c~_proc (default 0)")
    c.add_argument("--deposit", type=_num, required=True, help="proposer deposit D_p")
    c.add_argument("--eta", type=_num, required=True, help="deterrence fraction in (0, 1)")
    c.add_argument("--phi-override", type=_num, default=None, help="recapture fraction (default A/N)")

    s = sub.add_parser("simulate", help="Monte Carlo run of one scenario file")
    s.add_argument("--scenario", required=True, type=Path)
    s.add_argument("--trials", type=int, default=None,
                   help="trial count (default: 1 if deterministic else 10000)")
    s.add_argument("--out", type=Path, default=None, help="report path (default stdout)")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--workers", type=_positive_int, default=None,
                   help=f"worker processes (default ${WORKERS_ENV} or 1)")

    v = sub.add_parser("verify", help="theorem harness")
    v.add_argument("--theorem", default="all", help=f"all or one of {', '.join(THEOREM_IDS)}")
    v.add_argument("--trials", type=_positive_int, default=None, help="override per-cell trials")
    v.add_argument("--out", type=Path, default=None)
    v.add_argument("--workers", type=_positive_int, default=None)

    w = sub.add_parser("sweep", help="one-axis parameter sweep to CSV")
    w.add_argument("--scenario", required=True, type=Path)
    w.add_argument("--axis", required=True, choices=AXES)
    w.add_argument("--values", required=True, help='comma separated, e.g. "10,100,1000"')
    w.add_argument("--trials", type=int, default=None)
    w.add_argument("--out", type=Path, default=None)
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.add_argument("--workers", type=_positive_int, default=None)
    return p


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.write_text(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {out}: {exc}") from None


def _read_scenario(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from None
    return loads_scenario(text)


def _check_trials(trials: int | None) -> None:
    if trials is not None and trials < 1:
        raise UsageError(f"--trials must be >= 1, got {trials}")


def cmd_calibrate(args: argparse.Namespace) -> int:
    if args.cost is not None and (args.cost_bound_init is not None or args.cost_bound_proc is not None):
        raise UsageError("--cost cannot be combined with --cost-bound-init/--cost-bound-proc")
    if args.cost is not None:
        c_init, c_proc = args.cost, Fraction(0)
    else:
        c_init = args.cost_bound_init if args.cost_bound_init is not None else Fraction(0)
        c_proc = args.cost_bound_proc if args.cost_bound_proc is not None else Fraction(0)
    if c_init < 0 or c_proc < 0:
        raise UsageError("cost bounds must be non-negative")
    if args.deposit <= 0:
        raise UsageError("--deposit must be positive")
    c_tilde = c_init + c_proc
    n, a = args.n, args.coalition
    iv = cal.feasible_interval(n, a, c_tilde, args.deposit, args.eta, args.phi_override)
    phi = Fraction(a, n) if args.phi_override is None else args.phi_override
    min_dep = cal.scale_free_min_deposit(c_tilde, a, args.eta)
    bound, nontrivial = cal.phi_free_upper_bound(args.eta)
    doc = {
        "inputs": {
            "n": n,
            "coalition": a,
            "phi": _decimal(phi),
            "c_tilde_init": _decimal(c_init),
            "c_tilde_proc": _decimal(c_proc),
            "c_tilde": _decimal(c_tilde),
            "deposit": _decimal(args.deposit),
            "eta": _decimal(args.eta),
        },
        "interval": {
            "alpha_lower": _decimal(iv.alpha_lower),
            "alpha_upper": _decimal(iv.alpha_upper),
            "nonempty": iv.nonempty,
            "regime": iv.regime.value,
        },
        "scale_free_min_deposit": {
            **_decimal(min_dep.deposit),
            "deterrence_binds": cal.deterrence_binds(n, a, args.eta),
            "note": "no colluders: deterrence is vacuous" if min_dep.honest_population else "",
        },
        "phi_free_bound": {**_decimal(bound), "nontrivial": nontrivial},
        "fair_single_winner_min_payout": _decimal(cal.fair_single_winner_min_payout(n, c_init, c_proc)),
    }
    sys.stdout.write(dump_json(doc))
    return EXIT_OK if iv.nonempty else EXIT_INFEASIBLE


def cmd_simulate(args: argparse.Namespace) -> int:
    _check_trials(args.trials)
    sc = _read_scenario(args.scenario)
    trials = args.trials or default_trials(sc)
    rep = estimate_utilities(sc, trials, args.workers)
    text = report_to_json(rep) if args.format == "json" else report_to_csv(rep)
    _write(text, args.out)
    print(
        f"trials={rep.trials} O1={'holds' if rep.o1_holds else 'fails'} "
        f"O2={'holds' if rep.o2_holds else 'fails'} "
        f"fraud_caught_rate={format_fraction(rep.fraud_caught_rate)}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.theorem != "all" and args.theorem not in THEOREM_IDS:
        raise UsageError(f"unknown theorem {args.theorem!r}; expected all or one of {THEOREM_IDS}")
    cfg = {"trials": args.trials, "workers": args.workers}
    reports = verify_all(cfg) if args.theorem == "all" else [verify_theorem(args.theorem, cfg)]
    doc = theorem_reports_to_doc(reports)
    _write(dump_json(doc), args.out)
    for r in reports:
        print(f"{r.theorem_id}: {r.verdict}", file=sys.stderr)
    return EXIT_OK if doc["all_pass"] else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    _check_trials(args.trials)
    sc = _read_scenario(args.scenario)
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values is empty")
    rows = sweep(args.axis, values, sc, args.trials, args.workers)
    text = rows_to_csv(rows, SWEEP_COLUMNS) if args.format == "csv" else dump_json(rows)
    _write(text, args.out)
    return EXIT_OK


COMMANDS = {
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "workers", None) is None and hasattr(args, "workers"):
            args.workers = default_workers()
        return COMMANDS[args.command](args)
    except IOFailure as exc:
        print(f"disputesim: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ScenarioFileError, DisputeSimError, ValueError) as exc:
        print(f"disputesim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
