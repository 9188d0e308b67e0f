"""Command-line front end: fit/path on CSV data, simulation campaigns, and
optimality diagnostics."""

import argparse
import csv
import json
import sys

import numpy as np

from . import diagnostics, report as rpt
from .data import TrueModel, standardize
from .errors import (
    AllExcluded,
    CalipenError,
    ConstantColumn,
    DimensionMismatch,
    InvalidDesign,
    TooLargeForBruteForce,
)
from .penalty import Family, PenaltySpec
from .selection import CvConfig, HbicConfig, cv_select, select_hbic
from .sim import SCENARIOS, run_monte_carlo, scenario
from .solver import SolverConfig, calibrated_cccp, lambda_grid, lasso, path, resolve_tau

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_INPUT_ERRORS = (InvalidDesign, DimensionMismatch, ConstantColumn,
                 TooLargeForBruteForce, FileNotFoundError, KeyError, ValueError)


def _penalty_from_args(args):
    fam = Family(args.penalty)
    if fam is Family.L1:
        return PenaltySpec.l1()
    a = args.a if args.a is not None else (3.7 if fam is Family.SCAD else 3.0)
    return PenaltySpec(fam, a)


def _solver_cfg(args):
    return SolverConfig(tol=args.tol, max_iter=args.max_iter)


def _hbic_cfg(args):
    return HbicConfig(c_n=args.cn, k_n=args.kn)


def _load_csv(fname, response=None):
    with open(fname, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DimensionMismatch(f"{fname}: missing header row")
        rows = list(reader)
    if not rows:
        raise DimensionMismatch(f"{fname}: no data rows")
    resp = response if response is not None else header[0]
    if resp not in header:
        raise KeyError(f"response column {resp!r} not found in {fname}")
    ridx = header.index(resp)
    try:
        M = np.array(rows, dtype=float)
    except ValueError as exc:
        raise DimensionMismatch(f"{fname}: non-numeric entry ({exc})") from exc
    y = M[:, ridx]
    X = np.delete(M, ridx, axis=1)
    names = [h for i, h in enumerate(header) if i != ridx]
    return X, y, names


def _fit_and_select(data, args):
    spec = _penalty_from_args(args)
    cfg = _solver_cfg(args)
    if args.lam is not None:
        tau = resolve_tau(args.tau, data.n, args.lam)
        fit = calibrated_cccp(data, spec, args.lam, tau, cfg=cfg)
        return args.lam, fit, None
    grid = lambda_grid(data, n_points=args.grid_points, ratio=args.grid_ratio)
    sol = path(data, spec, grid, tau_rule=args.tau, cfg=cfg)
    if args.select == "cv":
        lam_hat, fit = cv_select(
            data,
            lambda d, lam, w: calibrated_cccp(
                d, spec, lam, resolve_tau(args.tau, d.n, lam), cfg=cfg,
                warm_start_step1=w),
            grid, CvConfig(folds=args.folds, seed=args.seed))
    else:
        lam_hat, fit = select_hbic(sol, _hbic_cfg(args))
    return lam_hat, fit, sol


def cmd_fit(args):
    X, y, names = _load_csv(args.data, args.response)
    data = standardize(X, y, center=not args.no_center)
    lam_hat, fit, sol = _fit_and_select(data, args)
    beta, intercept = data.original_coefficients(fit.beta)
    sse = float(np.sum((data.y - data.X @ fit.beta) ** 2))
    support = sorted(fit.support)
    print(f"lambda = {lam_hat:.6g}  support size = {len(support)}  "
          f"sigma^2 = {sse / data.n:.6g}")
    for j in support:
        print(f"  {names[j]:>20s}  {beta[j]: .6g}")
    if not args.no_center:
        print(f"  {'(intercept)':>20s}  {intercept: .6g}")
    test_err = None
    if args.test:
        Xt, yt, _ = _load_csv(args.test, args.response)
        pred = Xt @ beta + intercept
        test_err = float(np.mean((yt - pred) ** 2))
        print(f"held-out mean squared prediction error = {test_err:.6g}")
    if args.out:
        rpt.write_coefficients_csv(
            args.out + "_coefficients.csv", beta,
            intercept if not args.no_center else None)
        payload = {
            "lambda": lam_hat,
            "support": support,
            "support_names": [names[j] for j in support],
            "sigma2": sse / data.n,
            "test_error": test_err,
            "converged": fit.converged,
        }
        with open(args.out + ".json", "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
        if sol is not None and not args.no_figures:
            rpt.plot_path(sol, args.out + "_path.png", selected_lam=lam_hat)
    return EXIT_OK


def cmd_path(args):
    X, y, _ = _load_csv(args.data, args.response)
    data = standardize(X, y, center=not args.no_center)
    spec = _penalty_from_args(args)
    grid = lambda_grid(data, n_points=args.grid_points, ratio=args.grid_ratio)
    sol = path(data, spec, grid, tau_rule=args.tau, cfg=_solver_cfg(args))
    try:
        lam_hat, _ = select_hbic(sol, _hbic_cfg(args))
    except AllExcluded:
        lam_hat = None
    print("lambda,size,sigma2,hbic")
    for k in range(len(sol)):
        h = sol.hbic[k] if sol.hbic is not None else float("nan")
        print(f"{sol.lambdas[k]:.8g},{len(sol.fits[k].support)},"
              f"{sol.sigma2[k]:.8g},{h:.8g}")
    if args.out:
        with open(args.out + "_path.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "size", "sigma2", "hbic"])
            for k in range(len(sol)):
                h = sol.hbic[k] if sol.hbic is not None else float("nan")
                w.writerow(["%.17g" % sol.lambdas[k], len(sol.fits[k].support),
                            "%.17g" % sol.sigma2[k], "%.17g" % h])
        if not args.no_figures:
            rpt.plot_path(sol, args.out + "_path.png", selected_lam=lam_hat)
    return EXIT_OK


def cmd_simulate(args):
    if args.reps < 1:
        raise InvalidDesign("--reps must be at least 1")
    design = scenario(args.scenario, seed=args.seed)
    methods = tuple(m.strip() for m in args.methods.split(",")) \
        if args.methods else None
    report = run_monte_carlo(
        design, methods=methods, reps=args.reps, spec=_penalty_from_args(args),
        cfg=_solver_cfg(args), hbic_cfg=_hbic_cfg(args),
        cv_cfg=CvConfig(folds=args.folds, seed=args.seed),
        grid_points=args.grid_points, grid_ratio=args.grid_ratio,
        test_size=args.test_size, threads=args.threads)
    sys.stdout.write(rpt.report_table(report))
    if args.out:
        with open(args.out + ".json", "w") as fh:
            fh.write(rpt.report_json(report))
        rpt.write_report_csv(report, args.out + ".csv")
        if not args.no_figures:
            rpt.plot_report(report, args.out + ".png")
    return EXIT_OK


def cmd_diagnose(args):
    X, y, _ = _load_csv(args.data, args.response)
    data = standardize(X, y, center=not args.no_center)
    beta, _ = rpt.read_coefficients_csv(args.coef, p=data.p)
    beta_std = beta * data.col_scale  # diagnostics run on the solver's scale
    spec = _penalty_from_args(args)
    lam = args.lam if args.lam is not None else 1.0
    if args.kkt:
        k = diagnostics.kkt_violation(beta_std, data, spec, lam,
                                      tolerance=args.kkt_tol)
        print(f"kkt: satisfied={k.satisfied} "
              f"max_nonzero={k.max_violation_nonzero:.3e} "
              f"max_zero={k.max_violation_zero:.3e} worst_index={k.worst_index}")
    support = sorted(int(j) for j in np.flatnonzero(beta_std))
    if args.xi_min is not None:
        xi = diagnostics.xi_min(data, support, args.xi_min)
        print(f"xi_min({args.xi_min}) = {xi:.8g}")
    if args.l2_bound is not None:
        if not args.truth:
            raise InvalidDesign("--l2-bound requires --truth")
        bstar, _ = rpt.read_coefficients_csv(args.truth, p=data.p)
        truth = TrueModel(beta_star=bstar * data.col_scale)
        lhs, rhs, holds = diagnostics.l2_bound_check(beta_std, data, truth,
                                                     lam, args.l2_bound)
        print(f"l2 bound: lhs={lhs:.8g} rhs={rhs:.8g} holds={holds}")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--penalty", choices=["scad", "mcp", "l1"], default="scad")
    p.add_argument("--a", type=float, default=None,
                   help="penalty shape parameter (default 3.7 SCAD, 3 MCP)")
    p.add_argument("--tau", default="invlogn",
                   help="'invlogn', 'lambda', or a number in (0, 1]")
    p.add_argument("--grid-points", type=int, default=100)
    p.add_argument("--grid-ratio", type=float, default=0.01)
    p.add_argument("--kn", type=int, default=None)
    p.add_argument("--cn", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--out", default=None, help="output prefix")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--config", default=None,
                   help="flat key = value file; command-line flags override it")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="calipen",
        description="Calibrated nonconvex penalized regression toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a CSV dataset and select lambda")
    p.add_argument("--data", required=True)
    p.add_argument("--response", default=None)
    p.add_argument("--test", default=None)
    p.add_argument("--select", choices=["hbic", "cv"], default="hbic")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="skip selection and fit at this value")
    p.add_argument("--no-center", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="compute and print a full solution path")
    p.add_argument("--data", required=True)
    p.add_argument("--response", default=None)
    p.add_argument("--no-center", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("simulate", help="run a Monte Carlo scenario")
    p.add_argument("scenario", choices=sorted(SCENARIOS))
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--methods", default=None,
                   help="comma-separated subset of new,lasso,scad,hlasso,oracle")
    p.add_argument("--test-size", type=int, default=1000)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diagnose", help="optimality diagnostics for a fit")
    p.add_argument("--data", required=True)
    p.add_argument("--response", default=None)
    p.add_argument("--coef", required=True,
                   help="coefficient CSV written by 'fit'")
    p.add_argument("--truth", default=None,
                   help="true-coefficient CSV (for --l2-bound)")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--kkt", action="store_true")
    p.add_argument("--kkt-tol", type=float, default=1e-6)
    p.add_argument("--xi-min", type=int, default=None, metavar="M")
    p.add_argument("--l2-bound", type=float, default=None, metavar="U_N")
    p.add_argument("--no-center", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_diagnose)
    return parser


def _apply_config_file(parser, argv):
    """Load a flat 'key = value' file and install its entries as parser
    defaults, so explicit command-line flags still take precedence."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    values = {}
    with open(known.config) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidDesign(f"bad config line: {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    for action_container in parser._subparsers._group_actions:
        for sp in action_container.choices.values():
            for action in sp._actions:
                if action.dest in values:
                    raw = values[action.dest]
                    sp.set_defaults(**{
                        action.dest: action.type(raw) if action.type else raw})


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CalipenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
