"""Command-line interface: ``dyadreg fit`` and ``dyadreg simulate``.

Exit status:
    0  success
    1  unexpected internal error
    2  invalid flags or input data
    3  fit did not converge (report still written, with warnings)
    4  a requested variance estimate failed (report written, SE left null)
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .data import expand_node_covariates
from .errors import DataError, DyadError, InvalidFlag, NonFiniteLikelihood, NotConverged
from .fit import FitOptions, fit_poisson_pml
from .io import FitReport, coverage_report_csv, dumps_json, load_dyads_csv, load_nodes_csv
from .simulate import SimConfig, run_coverage
from .vcov import ESTIMATORS, SIGMA1_DENOMINATORS, assemble_vcov, sym_scores, wald_ci

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_DATA = 2
EXIT_NOT_CONVERGED = 3
EXIT_VARIANCE = 4


def _names(text):
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _default_threads():
    env = os.environ.get("DYADREG_THREADS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise InvalidFlag(f"DYADREG_THREADS must be an integer, got {env!r}") from None


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _level(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("level must lie in (0, 1)")
    return v


def _theta(text):
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as R,R,R") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("--theta needs exactly three comma-separated values")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyadreg", description="Dyadic Poisson PML regression with dyadic-robust inference.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit a PPML model to a directed-dyad CSV")
    f.add_argument("--dyads", required=True, metavar="PATH", help="CSV with one row per ordered pair")
    f.add_argument("--outcome", required=True, metavar="NAME")
    f.add_argument("--regressors", default="", metavar="NAMES", help="comma-separated dyad-level columns")
    f.add_argument("--ego", required=True, metavar="NAME", help="column holding the sending node label")
    f.add_argument("--alter", required=True, metavar="NAME", help="column holding the receiving node label")
    f.add_argument("--nodes", metavar="PATH", help="node attribute CSV")
    f.add_argument("--node-label", default=None, metavar="NAME", help="label column of --nodes (default: first column)")
    f.add_argument("--ego-cols", default="", metavar="NAMES", help="node columns appended with the ego's values")
    f.add_argument("--alter-cols", default="", metavar="NAMES", help="node columns appended with the alter's values")
    f.add_argument("--no-intercept", action="store_true")
    f.add_argument("--vcov", action="append", choices=ESTIMATORS, help="repeatable; default all three")
    f.add_argument("--level", type=_level, default=0.95)
    f.add_argument("--sigma1-denominator", choices=SIGMA1_DENOMINATORS, default="printed")
    f.add_argument("--tol", type=float, default=FitOptions.gradient_tolerance, help="score infinity-norm tolerance")
    f.add_argument("--max-iter", type=int, default=FitOptions.max_iterations)
    f.add_argument("--full-vcov", action="store_true", help="include covariance matrices in the JSON report")
    f.add_argument("--out", default="-", metavar="PATH")
    f.add_argument("--format", choices=("json", "csv"), default="json")

    s = sub.add_parser("simulate", help="run the Monte Carlo coverage experiment")
    s.add_argument("--n", type=int, default=200, help="number of agents")
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sigma", type=float, default=1.0, help="log-scale of dyad noise U")
    s.add_argument("--sigma-a", type=float, default=0.25, help="log-scale of agent effects A")
    s.add_argument("--theta", type=_theta, default=(-1.0, -0.5, 0.5), metavar="R,R,R")
    s.add_argument("--level", type=_level, default=0.95)
    s.add_argument("--vcov", action="append", choices=ESTIMATORS)
    s.add_argument("--sigma1-denominator", choices=SIGMA1_DENOMINATORS, default="printed")
    s.add_argument("--no-intercept", action="store_true", help="fit the three slopes only")
    s.add_argument("--threads", type=int, default=None, help="worker processes (default $DYADREG_THREADS or 1)")
    s.add_argument("--out", default="-", metavar="PATH")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _estimators(selected):
    # keep canonical order, drop repeats
    return [e for e in ESTIMATORS if e in selected] if selected else list(ESTIMATORS)


def cmd_fit(args) -> int:
    estimators = _estimators(args.vcov)
    ds = load_dyads_csv(args.dyads, args.outcome, _names(args.regressors), args.ego, args.alter, intercept=not args.no_intercept)
    ego_cols, alter_cols = _names(args.ego_cols), _names(args.alter_cols)
    if (ego_cols or alter_cols) and not args.nodes:
        raise InvalidFlag("--ego-cols/--alter-cols require --nodes")
    if args.nodes:
        label_col = args.node_label
        if label_col is None:
            with open(args.nodes, encoding="utf-8") as fh:
                label_col = fh.readline().split(",")[0].strip()
        table = load_nodes_csv(args.nodes, label_col)
        ds = expand_node_covariates(ds, table, ego_cols, alter_cols)
    if ds.n_regressors == 0:
        raise InvalidFlag("model has no regressors: pass --regressors or drop --no-intercept")

    fit = fit_poisson_pml(ds, FitOptions(max_iterations=args.max_iter, gradient_tolerance=args.tol), raise_on_failure=False)
    status = EXIT_OK if fit.converged else EXIT_NOT_CONVERGED
    notes = [] if fit.converged else [f"NotConverged: score norm {fit.final_score_norm:.3e} after {fit.iterations} iterations"]

    vcovs, ci = {}, {}
    sym = None
    for e in estimators:
        try:
            sym = sym if sym is not None else sym_scores(ds, fit.theta_hat)
            vc = assemble_vcov(fit, sym, (e,), args.sigma1_denominator)
        except DyadError as exc:
            notes.append(f"{type(exc).__name__}: {exc}")
            status = status or EXIT_VARIANCE
            continue
        vcovs[e] = (vc.vcov(e), vc.se(e))
        ci[e] = wald_ci(fit.theta_hat, vc.se(e), args.level)

    report = FitReport.build(
        ds, fit, vcovs, args.level, estimators, args.sigma1_denominator, ci, include_vcov=args.full_vcov, warnings=notes
    )
    _write(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    for note in report.warnings:
        print(f"dyadreg: warning: {note}", file=sys.stderr)
    return status


def cmd_simulate(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    if threads < 1:
        raise InvalidFlag("--threads must be >= 1")
    try:
        config = SimConfig(
            n_nodes=args.n,
            theta_true=args.theta,
            sigma=args.sigma,
            sigma_a=args.sigma_a,
            n_reps=args.reps,
            nominal_level=args.level,
            master_seed=args.seed,
            estimators=tuple(_estimators(args.vcov)),
            sigma1_denominator=args.sigma1_denominator,
            intercept=not args.no_intercept,
        )
    except ValueError as exc:
        raise InvalidFlag(str(exc)) from None
    report = run_coverage(config, threads=threads).to_dict()
    _write(dumps_json(report) if args.format == "json" else coverage_report_csv(report), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"fit": cmd_fit, "simulate": cmd_simulate}[args.command]
    try:
        return handler(args)
    except (DataError, OSError) as exc:
        print(f"dyadreg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NotConverged, NonFiniteLikelihood) as exc:
        print(f"dyadreg {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except DyadError as exc:
        print(f"dyadreg {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VARIANCE
    except Exception as exc:  # noqa: BLE001
        print(f"dyadreg {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
