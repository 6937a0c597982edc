"""Command-line entry point: ``stopped-clock <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 on a runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

from . import estimators as est
from .core import read_path_csv, write_path_csv
from .errors import StoppedClockError
from .harness import (
    EXAMPLE_KAPPA,
    EXAMPLE_P,
    ModelConfig,
    run_table1_study,
    run_tdc_validation,
    run_theta_validation,
    simulate,
)
from .processes import WindowRuleParams
from .theory import armax_inputs, theory_report

logger = logging.getLogger(__name__)

FORMAT_VERSION = "stopped-clock/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_model_args(p, n_default: int = 1000):
    p.add_argument("--armax-phi", type=float, default=None,
                   help="ARMAX coefficient of the base sequence (omit for i.i.d. Frechet)")
    p.add_argument("--p", type=float, default=EXAMPLE_P, help="event probability of the window rule")
    p.add_argument("--kappa", type=int, default=EXAMPLE_KAPPA)
    p.add_argument("--n", type=int, default=n_default, help="series length")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (falls back to $STOPPED_CLOCK_THREADS)")
    p.add_argument("--out", default="-", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stopped-clock", description="Stopped clock model toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate one path and write t,x,u,y CSV")
    _add_model_args(p)
    _add_common(p)

    p = sub.add_parser("study", help="Monte Carlo studies")
    study = p.add_subparsers(dest="study", required=True, parser_class=_Parser)
    t1 = study.add_parser("table1", help="abias/rmse of the repeat-pattern estimators")
    t1.add_argument("--replicas", type=int, default=1000)
    t1.add_argument("--sizes", type=_int_list, default=[100, 1000, 5000])
    t1.add_argument("--p", type=float, default=EXAMPLE_P)
    t1.add_argument("--kappa", type=int, default=EXAMPLE_KAPPA)
    _add_common(t1)
    th = study.add_parser("theta", help="extremal index estimates vs closed form")
    th.add_argument("--phis", type=_float_list, default=[0.0, 0.25, 0.5])
    th.add_argument("--q", type=_float_list, default=[0.995])
    th.add_argument("--p", type=float, default=EXAMPLE_P)
    th.add_argument("--kappa", type=int, default=EXAMPLE_KAPPA)
    th.add_argument("--n", type=int, default=10**6)
    _add_common(th)
    td = study.add_parser("tdc", help="lag-m tail dependence estimates vs closed form")
    _add_model_args(td, n_default=10**6)
    td.add_argument("--lags", type=_int_list, default=[1, 2, 3, 4])
    td.add_argument("--q", type=float, default=0.998)
    _add_common(td)

    p = sub.add_parser("theory", help="closed-form extremal index and tail dependence as JSON")
    p.add_argument("--armax-phi", type=float, default=0.0)
    p.add_argument("--p", type=float, default=EXAMPLE_P)
    p.add_argument("--kappa", type=int, default=EXAMPLE_KAPPA)
    p.add_argument("--max-lag", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("estimate", help="run one estimator on a series CSV")
    p.add_argument("--input", required=True, help="CSV with at least a 'y' column ('-' for stdin)")
    p.add_argument("--estimator", required=True,
                   choices=["change", "run-pattern", "kappa", "runs", "intervals", "tdc", "theta-x"])
    p.add_argument("--q", type=float, default=0.995)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--r", type=int, default=None, help="run length (default kappa-hat)")
    p.add_argument("--lag", type=int, default=1)
    p.add_argument("--tol", type=float, default=0.0, help="tolerance for detecting repeats")
    p.add_argument("--out", default="-")
    return parser


@contextmanager
def _open_out(target: str):
    if target == "-":
        yield sys.stdout
    else:
        with open(target, "w", newline="") as fh:
            yield fh


def _dump_json(obj, target: str) -> None:
    with _open_out(target) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _cmd_simulate(args) -> None:
    cfg = ModelConfig(args.armax_phi, args.p, args.kappa, args.n, args.seed)
    path = simulate(cfg, None, 0)
    with _open_out(args.out) as fh:
        write_path_csv(path, fh)


def _cmd_study(args) -> None:
    if args.study == "table1":
        cfg = ModelConfig(None, args.p, args.kappa, max(args.sizes), args.seed, args.replicas)
        report = run_table1_study(cfg, args.sizes, threads=args.threads)
        with _open_out(args.out) as fh:
            report.write_csv(fh)
        for m, rate in report.kappa_success.items():
            print(f"kappa recovered in {rate:.1%} of replicas at m={m}", file=sys.stderr)
        return
    if args.study == "theta":
        cfg = ModelConfig(None, args.p, args.kappa, args.n, args.seed)
        rows = run_theta_validation(cfg, args.phis, args.q)
    else:
        cfg = ModelConfig(args.armax_phi, args.p, args.kappa, args.n, args.seed)
        rows = run_tdc_validation(cfg, args.lags, args.q)
    _dump_json({"spec": FORMAT_VERSION, "study": args.study, "seed": args.seed,
                "n": cfg.n, "rows": [r.to_dict() for r in rows]}, args.out)


def _cmd_theory(args) -> None:
    window = WindowRuleParams(args.p, args.kappa)
    report = theory_report(armax_inputs(args.armax_phi, window, args.max_lag), args.max_lag)
    _dump_json(report.to_dict(), args.out)


def _cmd_estimate(args) -> None:
    if args.input == "-":
        path = read_path_csv(sys.stdin)
    else:
        with open(args.input, newline="") as fh:
            path = read_path_csv(fh)
    y = path.y
    m = len(y)
    tol = args.tol
    if args.estimator == "change":
        p1, p0 = est.estimate_change_probs(y, tol)
        summary = est.EstimateSummary("change_probs", p0, m, None, {"p1": p1, "p0": p0})
    elif args.estimator == "run-pattern":
        value = est.estimate_run_pattern_prob(y, args.s, tol)
        summary = est.EstimateSummary("run_pattern_prob", value, m, None, {"s": args.s})
    elif args.estimator == "kappa":
        summary = est.EstimateSummary("kappa", float(est.estimate_kappa(y, tol)), m)
    elif args.estimator == "runs":
        r = args.r if args.r is not None else est.estimate_kappa(y, tol)
        summary = est.extremal_index_runs(y, args.q, r)
    elif args.estimator == "intervals":
        summary = est.extremal_index_intervals(y, args.q)
    elif args.estimator == "tdc":
        summary = est.empirical_tdc(y, args.lag, args.q)
    else:
        summary = est.estimate_theta_x_from_y(y, args.s, args.q, tol)
    _dump_json(dict(summary.to_dict(), spec=FORMAT_VERSION), args.out)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "study": _cmd_study,
    "theory": _cmd_theory,
    "estimate": _cmd_estimate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stopped-clock: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _COMMANDS[args.command](args)
    except (StoppedClockError, ValueError, OSError) as exc:
        print(f"stopped-clock: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
