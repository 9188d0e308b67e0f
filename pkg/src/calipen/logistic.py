"""Penalized logistic regression: CCCP over the negative log-likelihood with
IRLS-driven inner solves."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._kernels import cd_weighted
from .data import standardize
from .errors import DimensionMismatch, Separation
from .penalty import concave_grad
from .selection import HbicConfig
from .solver import SolverConfig, resolve_tau

_W_COLLAPSE = 1e-10
_W_FLOOR = 1e-6
_MAX_IRLS = 100
_MAX_HALVINGS = 20


@dataclass(frozen=True)
class BinaryDataset:
    """0/1 responses with a standardized design; centering tracks ``intercept``."""

    y: np.ndarray
    X: np.ndarray
    col_scale: np.ndarray
    col_center: np.ndarray
    intercept: bool

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def original_coefficients(self, beta_std, intercept_value):
        beta = np.asarray(beta_std, dtype=float) / self.col_scale
        b0 = float(intercept_value) - float(self.col_center @ beta)
        return beta, b0


@dataclass
class LogisticFit:
    beta: np.ndarray
    intercept_value: float
    deviance: float
    iterations_outer: int = 0
    iterations_inner: int = 0
    converged: bool = True
    lam: float | None = None
    tau: float | None = None
    step1: "LogisticFit | None" = None

    @property
    def support(self):
        return frozenset(int(j) for j in np.flatnonzero(self.beta))


def standardize_binary(raw_X, raw_y, intercept=True):
    y = np.asarray(raw_y, dtype=float).ravel()
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise DimensionMismatch("responses must be coded 0/1")
    if y.min() == y.max():
        raise DimensionMismatch("need at least one observation of each class")
    ds = standardize(raw_X, np.zeros(y.shape[0]), center=intercept)
    return BinaryDataset(y=y, X=ds.X, col_scale=ds.col_scale,
                         col_center=ds.col_center, intercept=intercept)


def neg_loglik(beta, intercept_value, data):
    """Average negative log-likelihood n^-1 sum[-eta_i y_i + log(1 + e^eta_i)],
    evaluated stably for large |eta|."""
    eta = data.X @ np.asarray(beta, dtype=float) + float(intercept_value)
    return float(np.mean(np.logaddexp(0.0, eta) - eta * data.y))


def _nll_eta(eta, y):
    return float(np.mean(np.logaddexp(0.0, eta) - eta * y))


def _penalized_l1_logistic(data, g, lam, beta0=None, b0=0.0, cfg=SolverConfig()):
    """IRLS for avg-nll + g'b + lam||b||_1 (+ unpenalized intercept).

    Each round solves the weighted quadratic expansion by coordinate descent;
    step-halving keeps the subproblem objective nonincreasing.
    """
    X, y = data.X, data.y
    n = data.n
    beta = np.zeros(data.p) if beta0 is None else np.array(beta0, dtype=float)
    b0 = float(b0) if data.intercept else 0.0
    g = np.ascontiguousarray(g, dtype=float)
    eta = X @ beta + b0
    obj = _nll_eta(eta, y) + float(g @ beta) + lam * float(np.abs(beta).sum())
    inner = 0
    converged = False
    for _ in range(_MAX_IRLS):
        prob = expit(eta)
        w = prob * (1.0 - prob)
        if float(w.max()) < _W_COLLAPSE:
            raise Separation("IRLS weights collapsed; data may be separable")
        w = np.maximum(w, _W_FLOOR)
        # working residual of the quadratic expansion at (beta, b0)
        r = (y - prob) / w
        beta_try = beta.copy()
        b0_box = np.array([b0])
        sweeps, _, _ = cd_weighted(X, w, r.copy(), beta_try, g, float(lam),
                                   data.intercept, b0_box, cfg.tol,
                                   cfg.max_iter, cfg.active_set_cycles)
        inner += sweeps
        step = 1.0
        d_beta = beta_try - beta
        d_b0 = b0_box[0] - b0
        new_obj = obj
        for _ in range(_MAX_HALVINGS + 1):
            cand_beta = beta + step * d_beta
            cand_b0 = b0 + step * d_b0
            cand_eta = X @ cand_beta + cand_b0
            cand_obj = (_nll_eta(cand_eta, y) + float(g @ cand_beta)
                        + lam * float(np.abs(cand_beta).sum()))
            if cand_obj <= obj + 1e-14:
                beta, b0, eta, new_obj = cand_beta, cand_b0, cand_eta, cand_obj
                break
            step /= 2.0
        if abs(obj - new_obj) <= cfg.tol:
            obj = new_obj
            converged = True
            break
        obj = new_obj
    dev = 2.0 * n * _nll_eta(eta, y)
    return LogisticFit(beta=beta, intercept_value=b0, deviance=dev,
                       iterations_inner=inner, converged=converged,
                       lam=float(lam))


def logistic_lasso(data, lam, beta0=None, b0=0.0, cfg=SolverConfig()):
    """L1-penalized logistic regression (zero concave offsets)."""
    return _penalized_l1_logistic(data, np.zeros(data.p), lam, beta0, b0, cfg)


def logistic_calibrated_cccp(data, spec, lam, tau, cfg=SolverConfig(),
                             warm_start=None):
    """Two CCCP steps over the penalized logistic objective: an L1 step at
    tau*lam, then one offset step at lam."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    w1, wb0 = (None, 0.0) if warm_start is None else warm_start
    step1 = _penalized_l1_logistic(data, np.zeros(data.p), tau * lam,
                                   beta0=w1, b0=wb0, cfg=cfg)
    g = np.asarray(concave_grad(spec, step1.beta, lam))
    fit = _penalized_l1_logistic(data, g, lam, beta0=step1.beta,
                                 b0=step1.intercept_value, cfg=cfg)
    fit.iterations_outer = 2
    fit.tau = float(tau)
    fit.step1 = step1
    fit.converged = fit.converged and step1.converged
    return fit


def logistic_oracle(data, support, cfg=SolverConfig()):
    """Unpenalized logistic regression restricted to the given columns."""
    support = sorted(int(j) for j in support)
    sub = BinaryDataset(y=data.y, X=np.asfortranarray(data.X[:, support]),
                        col_scale=data.col_scale[support],
                        col_center=data.col_center[support],
                        intercept=data.intercept)
    fit = _penalized_l1_logistic(sub, np.zeros(len(support)), 0.0, cfg=cfg)
    beta = np.zeros(data.p)
    beta[support] = fit.beta
    return LogisticFit(beta=beta, intercept_value=fit.intercept_value,
                       deviance=fit.deviance, iterations_inner=fit.iterations_inner,
                       converged=fit.converged)


def predict_class(fit, x):
    """1 iff the predicted probability strictly exceeds one half."""
    x = np.asarray(x, dtype=float)
    eta = x @ fit.beta + fit.intercept_value
    out = (eta > 0).astype(np.int64)
    return out if out.ndim else int(out)


def hbic_logistic(deviance, model_size, n, p, c_n):
    """Deviance analogue of the HBIC: deviance/n + |M| C_n log(p) / n."""
    return deviance / n + model_size * c_n * math.log(p) / n


def lambda_grid_logistic(data, n_points=100, ratio=0.01):
    """Grid from the null-model KKT threshold down to ratio times it."""
    ybar = data.y.mean() if data.intercept else 0.5
    lam_max = float(np.max(np.abs(data.X.T @ (data.y - ybar) / data.n)))
    if n_points == 1:
        return np.array([lam_max])
    return lam_max * np.logspace(0.0, np.log10(ratio), n_points)


def logistic_path_select(data, spec, grid, tau_rule="invlogn",
                         cfg=SolverConfig(), hbic_cfg=HbicConfig()):
    """Calibrated CCCP down the grid, tuned by the deviance HBIC."""
    grid = np.asarray(grid, dtype=float)
    c_n, k_n = hbic_cfg.resolve(data.n)
    fits = []
    warm = None
    for lam in grid:
        tau = resolve_tau(tau_rule, data.n, lam)
        fit = logistic_calibrated_cccp(data, spec, lam, tau, cfg=cfg,
                                       warm_start=warm)
        warm = (fit.step1.beta, fit.step1.intercept_value)
        fits.append(fit)
    best = None
    best_score = np.inf
    for k, fit in enumerate(fits):
        size = len(fit.support)
        if size > k_n:
            continue
        score = hbic_logistic(fit.deviance, size, data.n, data.p, c_n)
        if score < best_score:
            best, best_score = k, score
    if best is None:
        from .errors import AllExcluded
        raise AllExcluded("no path point has support size within K_n")
    return float(grid[best]), fits[best]
