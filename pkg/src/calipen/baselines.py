"""Comparison estimators: hard-thresholded Lasso with least squares refitting."""

from dataclasses import dataclass

import numpy as np

from .data import oracle_fit
from .errors import TooManySurvivors
from .selection import HbicConfig, select_hbic
from .solver import SolutionPath, SolverConfig, lasso


@dataclass(frozen=True)
class HlassoConfig:
    """Threshold eta = c * lam applied to the Lasso coefficients."""

    c: float = 2.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")


def hlasso_fit(data, lam, cfg=HlassoConfig(), solver_cfg=SolverConfig(),
               warm_start=None):
    """Lasso at lam, keep |b_j| > c*lam, refit least squares on the survivors."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    init = lasso(data, lam, warm_start=warm_start, cfg=solver_cfg)
    survivors = np.flatnonzero(np.abs(init.beta) > cfg.c * lam)
    if survivors.size > data.n - 1:
        raise TooManySurvivors(
            f"{survivors.size} survivors exceed n-1 = {data.n - 1}")
    refit = oracle_fit(data, survivors)
    refit.lam = float(lam)
    refit.converged = init.converged
    refit.step1 = init
    return refit


def hlasso_path_select(data, grid, cfg=HlassoConfig(), hbic_cfg=HbicConfig(),
                       solver_cfg=SolverConfig()):
    """Hard-thresholded Lasso at every grid point, tuned by HBIC."""
    grid = np.asarray(grid, dtype=float)
    fits = []
    sigma2 = np.empty(grid.size)
    warm = None
    for k, lam in enumerate(grid):
        fit = hlasso_fit(data, lam, cfg=cfg, solver_cfg=solver_cfg, warm_start=warm)
        warm = fit.step1.beta
        r = data.y - data.X @ fit.beta
        sigma2[k] = float(r @ r) / data.n
        fits.append(fit)
    path = SolutionPath(lambdas=grid, fits=fits, sigma2=sigma2,
                        y_norm_sq=float(data.y @ data.y), n=data.n, p=data.p)
    return select_hbic(path, hbic_cfg)
