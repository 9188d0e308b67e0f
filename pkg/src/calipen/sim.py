"""Monte Carlo harness: data generators for the benchmark designs and the
replication driver with TP/FP/TM/MSE aggregation."""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import HlassoConfig, hlasso_path_select
from .data import TrueModel, oracle_fit, selection_metrics, standardize
from .errors import CalipenError, InvalidDesign
from .logistic import (
    lambda_grid_logistic,
    logistic_oracle,
    logistic_path_select,
    predict_class,
    standardize_binary,
)
from .penalty import PenaltySpec
from .selection import CvConfig, HbicConfig, cv_select, select_hbic
from .solver import SolverConfig, cccp_full, lambda_grid, lasso, path


@dataclass(frozen=True)
class SimDesign:
    """One simulation scenario: correlation structure, dimensions, truth."""

    name: str
    kind: str  # "ar1" | "cs" | "blocks"
    n: int
    p: int
    rho: float = 0.5
    sigma: float | None = 2.0  # None means a logistic (Bernoulli) response
    beta_template: tuple = (3.0, 1.5, 0.0, 0.0, 2.0)
    block_size: int = 20
    signal_blocks: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("ar1", "cs", "blocks"):
            raise InvalidDesign(f"unknown design kind {self.kind!r}")
        if self.kind in ("ar1", "cs") and not 0 <= self.rho < 1:
            raise InvalidDesign("need 0 <= rho < 1")
        if self.kind == "blocks":
            if self.p % self.block_size != 0:
                raise InvalidDesign("p must be divisible by the block size")
            if self.p // self.block_size < self.signal_blocks:
                raise InvalidDesign("fewer blocks than signal blocks")

    @property
    def logistic(self):
        return self.sigma is None


SCENARIOS = {
    "case1a": SimDesign("case1a", "ar1", n=100, p=3000, rho=0.5, sigma=2.0),
    "case1b": SimDesign("case1b", "ar1", n=100, p=3000, rho=0.8, sigma=2.0),
    "case1c": SimDesign("case1c", "cs", n=100, p=3000, rho=0.5, sigma=2.0),
    "case2a": SimDesign("case2a", "blocks", n=200, p=3000, rho=0.5, sigma=1.0),
    "case2b": SimDesign("case2b", "blocks", n=300, p=4000, rho=0.5, sigma=1.0),
    "logit": SimDesign("logit", "ar1", n=300, p=2000, rho=0.5, sigma=None),
}


def _draw_X(design, rng, n):
    p = design.p
    if design.kind in ("ar1", "blocks"):
        Z = rng.standard_normal((n, p))
        X = np.empty((n, p))
        X[:, 0] = Z[:, 0]
        c = np.sqrt(1.0 - design.rho**2)
        for j in range(1, p):
            X[:, j] = design.rho * X[:, j - 1] + c * Z[:, j]
        return X
    # compound symmetry via the rank-1 construction
    z0 = rng.standard_normal(n)
    Z = rng.standard_normal((n, p))
    return np.sqrt(design.rho) * z0[:, None] + np.sqrt(1.0 - design.rho) * Z


def _truth(design, rng):
    beta = np.zeros(design.p)
    if design.kind == "blocks":
        pattern = np.zeros(design.block_size)
        tmpl = np.asarray(design.beta_template)
        pattern[: tmpl.size] = tmpl / 1.5
        blocks = rng.choice(design.p // design.block_size,
                            size=design.signal_blocks, replace=False)
        for b in blocks:
            beta[b * design.block_size:(b + 1) * design.block_size] = pattern
        assert np.count_nonzero(beta) == 30 or design.signal_blocks != 10
    else:
        tmpl = np.asarray(design.beta_template)
        beta[: tmpl.size] = tmpl
    return TrueModel(beta_star=beta)


def rep_rng(design, rep):
    return np.random.default_rng(np.random.SeedSequence((design.seed, rep)))


def gen_design(design, rep, test_size=0):
    """Generate one replication. Returns (dataset, truth) plus a held-out
    (X_test, y_test) pair when test_size > 0 (logistic designs)."""
    rng = rep_rng(design, rep)
    truth = _truth(design, rng)
    X = _draw_X(design, rng, design.n)
    if design.logistic:
        eta = X @ truth.beta_star
        y = (rng.random(design.n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        data = standardize_binary(X, y, intercept=False)
    else:
        y = X @ truth.beta_star + design.sigma * rng.standard_normal(design.n)
        data = standardize(X, y, center=False)
    if test_size:
        Xt = _draw_X(design, rng, test_size)
        if design.logistic:
            et = Xt @ truth.beta_star
            yt = (rng.random(test_size) < 1.0 / (1.0 + np.exp(-et))).astype(float)
        else:
            yt = Xt @ truth.beta_star + design.sigma * rng.standard_normal(test_size)
        return data, truth, (Xt, yt)
    return data, truth, None


@dataclass
class MethodRun:
    beta: np.ndarray | None
    converged: bool = True
    error: str | None = None
    misclass: float | None = None


@dataclass
class SimReport:
    design: SimDesign
    methods: tuple
    reps: int
    metrics: dict = field(default_factory=dict)  # method -> Metrics
    misclass: dict = field(default_factory=dict)  # method -> mean rate or None
    nonconverged: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    wall_time: float = 0.0
    config_echo: dict = field(default_factory=dict)


LINEAR_METHODS = ("new", "lasso", "scad", "hlasso", "oracle")
LOGISTIC_METHODS = ("new", "oracle")


def _run_linear_method(method, data, truth, design, spec, cfg, hbic_cfg, cv_cfg,
                       grid_points, grid_ratio):
    grid = lambda_grid(data, n_points=grid_points, ratio=grid_ratio)
    if method == "oracle":
        return oracle_fit(data, truth.support)
    if method == "new":
        sol = path(data, spec, grid, tau_rule="invlogn", cfg=cfg)
        _, fit = select_hbic(sol, hbic_cfg)
        # report the least squares refit on the selected support; the raw
        # two-step estimate carries shrinkage in the transition band and the
        # benchmark tables compare against the oracle on the selected model
        refit = oracle_fit(data, fit.support)
        refit.lam = fit.lam
        refit.converged = fit.converged
        return refit
    if method == "hlasso":
        _, fit = hlasso_path_select(data, grid, HlassoConfig(),
                                    hbic_cfg=hbic_cfg, solver_cfg=cfg)
        return fit
    if method == "lasso":
        _, fit = cv_select(data, lambda d, lam, w: lasso(d, lam, w, cfg),
                           grid, cv_cfg)
        return fit
    if method == "scad":
        _, fit = cv_select(data, lambda d, lam, w: cccp_full(d, spec, lam, cfg),
                           grid, cv_cfg)
        return fit
    raise ValueError(f"unknown method {method!r}")


def _misclass(beta, b0, X_test, y_test):
    eta = X_test @ beta + b0
    return float(np.mean((eta > 0).astype(float) != y_test))


def _run_rep(design, rep, methods, spec, cfg, hbic_cfg, cv_cfg, grid_points,
             grid_ratio, test_size):
    data, truth, test = gen_design(design, rep,
                                   test_size=test_size if design.logistic else 0)
    out = {}
    for method in methods:
        try:
            if design.logistic:
                if method == "oracle":
                    fit = logistic_oracle(data, truth.support, cfg=cfg)
                elif method == "new":
                    grid = lambda_grid_logistic(data, n_points=grid_points,
                                                ratio=grid_ratio)
                    _, sel = logistic_path_select(data, spec, grid,
                                                  cfg=cfg, hbic_cfg=hbic_cfg)
                    fit = logistic_oracle(data, sel.support, cfg=cfg)
                    fit.converged = fit.converged and sel.converged
                else:
                    raise ValueError(
                        f"method {method!r} is not available for logistic designs")
                beta, b0 = data.original_coefficients(fit.beta,
                                                      fit.intercept_value)
                mis = _misclass(beta, b0, *test) if test is not None else None
                out[method] = MethodRun(beta=beta, converged=fit.converged,
                                        misclass=mis)
            else:
                fit = _run_linear_method(method, data, truth, design, spec, cfg,
                                         hbic_cfg, cv_cfg, grid_points, grid_ratio)
                beta, _ = data.original_coefficients(fit.beta)
                out[method] = MethodRun(beta=beta, converged=fit.converged)
        except CalipenError as exc:
            out[method] = MethodRun(beta=None, converged=False,
                                    error=f"{type(exc).__name__}: {exc}")
    return truth, out


def aggregate_report(design, methods, records, config_echo=None, wall_time=0.0):
    """Fold per-rep records into a SimReport. ``records`` is a list of
    (truth, {method: MethodRun}) pairs."""
    report = SimReport(design=design, methods=tuple(methods), reps=len(records),
                       config_echo=config_echo or {}, wall_time=wall_time)
    for method in methods:
        estimates, truths = [], []
        mis = []
        bad = failed = 0
        for truth, runs in records:
            run = runs[method]
            if run.error is not None:
                failed += 1
                continue
            estimates.append(run.beta)
            truths.append(truth)
            if not run.converged:
                bad += 1
            if run.misclass is not None:
                mis.append(run.misclass)
        report.metrics[method] = (selection_metrics(estimates, truths)
                                  if estimates else None)
        report.misclass[method] = float(np.mean(mis)) if mis else None
        report.nonconverged[method] = bad
        report.failures[method] = failed
    return report


def run_monte_carlo(design, methods=None, reps=100, spec=None,
                    cfg=SolverConfig(), hbic_cfg=HbicConfig(),
                    cv_cfg=None, grid_points=100, grid_ratio=0.01,
                    test_size=1000, threads=1):
    """Run ``reps`` independent replications of every requested method."""
    if reps < 1:
        raise InvalidDesign("reps must be at least 1")
    if methods is None:
        methods = LOGISTIC_METHODS if design.logistic else LINEAR_METHODS
    spec = spec or PenaltySpec.scad()
    cv_cfg = cv_cfg or CvConfig(seed=design.seed)
    t0 = time.perf_counter()
    args = [(design, rep, methods, spec, cfg, hbic_cfg, cv_cfg, grid_points,
             grid_ratio, test_size) for rep in range(reps)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda a: _run_rep(*a), args))
    else:
        records = [_run_rep(*a) for a in args]
    echo = {
        "design": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in vars(design).items()},
        "methods": list(methods),
        "reps": reps,
        "penalty": {"family": spec.family.value, "a": spec.a},
        "solver": vars(cfg).copy(),
        "hbic": {"c_n": hbic_cfg.c_n, "k_n": hbic_cfg.k_n},
        "cv": {"folds": cv_cfg.folds, "seed": cv_cfg.seed},
        "grid": {"points": grid_points, "ratio": grid_ratio},
        "test_size": test_size if design.logistic else None,
    }
    return aggregate_report(design, methods, records, config_echo=echo,
                            wall_time=time.perf_counter() - t0)


def scenario(name, seed=None):
    if name not in SCENARIOS:
        raise InvalidDesign(f"unknown scenario {name!r}")
    design = SCENARIOS[name]
    if seed is not None:
        design = replace(design, seed=int(seed))
    return design
