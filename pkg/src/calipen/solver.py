"""Coordinate-descent solver for the convex surrogate and the CCCP drivers."""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import cd_linear
from .data import Dataset, FitResult
from .errors import NotStandardized
from .penalty import PenaltySpec, concave_grad, penalty_deriv, penalty_value


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-7
    max_iter: int = 10000
    active_set_cycles: int = 10

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class SurrogateProblem:
    """Convex subproblem (2n)^-1 ||y - Xb||^2 + g'b + lam ||b||_1."""

    data: Dataset
    g: np.ndarray
    lam: float

    def __post_init__(self):
        g = np.ascontiguousarray(self.g, dtype=float)
        object.__setattr__(self, "g", g)
        if np.any(np.abs(g) > self.lam * (1 + 1e-12) + 1e-15):
            raise ValueError("surrogate offsets must satisfy |g_j| <= lam")


@dataclass
class SolutionPath:
    """Per-lambda fits along a decreasing grid, with sigma^2 and HBIC scores."""

    lambdas: np.ndarray
    fits: list
    sigma2: np.ndarray
    hbic: np.ndarray | None = None
    y_norm_sq: float | None = None
    n: int | None = None
    p: int | None = None

    def __len__(self):
        return len(self.fits)


def _check_standardized(data):
    if not data.standardized:
        raise NotStandardized("solver requires a standardized Dataset")


def convex_kkt_residual(data, beta, g, lam):
    """Max KKT violation of the convex surrogate at ``beta``."""
    r = data.y - data.X @ beta
    corr = data.X.T @ r / data.n
    viol_nz = np.abs(corr - g - lam * np.sign(beta))
    viol_z = np.maximum(np.abs(corr - g) - lam, 0.0)
    viol = np.where(beta != 0.0, viol_nz, viol_z)
    return float(viol.max()) if viol.size else 0.0


def solve_surrogate(prob, warm_start=None, cfg=SolverConfig()):
    """Globally minimize the convex surrogate by cyclic coordinate descent."""
    data = prob.data
    _check_standardized(data)
    if warm_start is None:
        beta = np.zeros(data.p)
        r = data.y.copy()
    else:
        beta = np.array(warm_start, dtype=float)
        r = data.y - data.X @ beta
    sweeps, change, converged = cd_linear(
        data.X, r, beta, prob.g, float(prob.lam),
        cfg.tol, cfg.max_iter, cfg.active_set_cycles,
    )
    return FitResult(
        beta=beta,
        iterations=sweeps,
        max_coord_change=float(change),
        kkt_residual=convex_kkt_residual(data, beta, prob.g, prob.lam),
        lam=float(prob.lam),
        converged=bool(converged),
    )


def lasso(data, lam, warm_start=None, cfg=SolverConfig()):
    """L1-penalized least squares: the surrogate with zero offsets."""
    prob = SurrogateProblem(data=data, g=np.zeros(data.p), lam=float(lam))
    return solve_surrogate(prob, warm_start=warm_start, cfg=cfg)


def nonconvex_kkt_residual(data, beta, spec, lam):
    """Max violation of the stationarity condition of the penalized objective."""
    r = data.y - data.X @ beta
    corr = data.X.T @ r / data.n
    pd = penalty_deriv(spec, np.abs(beta), lam)
    viol_nz = np.abs(corr - np.sign(beta) * pd)
    viol_z = np.maximum(np.abs(corr) - lam, 0.0)
    viol = np.where(beta != 0.0, viol_nz, viol_z)
    return float(viol.max()) if viol.size else 0.0


def penalized_objective(data, beta, spec, lam):
    """(2n)^-1 ||y - Xb||^2 + sum_j p(|b_j|)."""
    r = data.y - data.X @ beta
    return float(r @ r / (2 * data.n) + penalty_value(spec, np.abs(beta), lam).sum())


def calibrated_cccp(data, spec, lam, tau, cfg=SolverConfig(), warm_start=None,
                    warm_start_step1=None):
    """Two-step calibrated CCCP: an L1 step at level tau*lam, then one
    surrogate step at level lam with offsets from the first step."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    step1 = lasso(data, tau * lam, warm_start=warm_start_step1, cfg=cfg)
    g = np.asarray(concave_grad(spec, step1.beta, lam))
    prob = SurrogateProblem(data=data, g=g, lam=float(lam))
    fit = solve_surrogate(prob, warm_start=warm_start if warm_start is not None
                          else step1.beta, cfg=cfg)
    fit.tau = float(tau)
    fit.step1 = step1
    fit.converged = fit.converged and step1.converged
    fit.kkt_residual = nonconvex_kkt_residual(data, fit.beta, spec, lam)
    return fit


def cccp_full(data, spec, lam, cfg=SolverConfig(), max_outer=50):
    """Uncalibrated CCCP from zero: iterate surrogate minimizations until the
    outer iterates stabilize."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    beta = np.zeros(data.p)
    converged = False
    outer = 0
    total_sweeps = 0
    for outer in range(1, max_outer + 1):
        g = np.asarray(concave_grad(spec, beta, lam))
        prob = SurrogateProblem(data=data, g=g, lam=float(lam))
        fit = solve_surrogate(prob, warm_start=beta, cfg=cfg)
        total_sweeps += fit.iterations
        change = float(np.max(np.abs(fit.beta - beta))) if data.p else 0.0
        beta = fit.beta
        if change <= cfg.tol:
            converged = True
            break
    result = FitResult(
        beta=beta,
        iterations=total_sweeps,
        max_coord_change=change,
        kkt_residual=nonconvex_kkt_residual(data, beta, spec, lam),
        lam=float(lam),
        converged=converged,
    )
    return result


def lambda_grid(data, n_points=100, ratio=0.01):
    """Log-spaced grid from lambda_max = ||X'y/n||_inf down to ratio*lambda_max."""
    _check_standardized(data)
    lam_max = float(np.max(np.abs(data.X.T @ data.y / data.n)))
    if n_points == 1:
        return np.array([lam_max])
    return lam_max * np.logspace(0.0, np.log10(ratio), n_points)


def resolve_tau(tau_rule, n, lam):
    """Map a tau rule ('invlogn', 'lambda', or a number) to a value in (0, 1]."""
    if tau_rule == "invlogn":
        return 1.0 / np.log(n)
    if tau_rule == "lambda":
        return min(float(lam), 1.0)
    tau = float(tau_rule)
    if not 0 < tau <= 1:
        raise ValueError("fixed tau must lie in (0, 1]")
    return tau


def path(data, spec, grid, tau_rule="invlogn", cfg=SolverConfig()):
    """Calibrated CCCP fit at every grid point, warm-started down the grid."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) >= 0):
        raise ValueError("grid must be strictly decreasing")
    fits = []
    sigma2 = np.empty(len(grid))
    warm1 = None
    warm2 = None
    for k, lam in enumerate(grid):
        tau = resolve_tau(tau_rule, data.n, lam)
        fit = calibrated_cccp(data, spec, lam, tau, cfg=cfg,
                              warm_start=warm2, warm_start_step1=warm1)
        warm1 = fit.step1.beta
        warm2 = fit.beta
        r = data.y - data.X @ fit.beta
        sigma2[k] = float(r @ r) / data.n
        fits.append(fit)
    return SolutionPath(lambdas=grid, fits=fits, sigma2=sigma2,
                        y_norm_sq=float(data.y @ data.y), n=data.n, p=data.p)
