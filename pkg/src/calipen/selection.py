"""Tuning-parameter selection: high-dimensional BIC and k-fold cross-validation."""

import math
from dataclasses import dataclass

import numpy as np

from .data import standardize
from .errors import AllExcluded, DegenerateSSE

_SSE_FLOOR = 1e-12


@dataclass(frozen=True)
class HbicConfig:
    """Defaults follow C_n = log log n and K_n = ceil(n / log n)."""

    c_n: float | None = None
    k_n: int | None = None

    def resolve(self, n):
        c_n = self.c_n if self.c_n is not None else math.log(math.log(n))
        k_n = self.k_n if self.k_n is not None else math.ceil(n / math.log(n))
        if not c_n > 0:
            raise ValueError("C_n must be positive")
        if k_n < 1:
            raise ValueError("K_n must be at least 1")
        return c_n, k_n


@dataclass(frozen=True)
class CvConfig:
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("need at least 2 folds")


def hbic_score(sse, model_size, n, p, c_n):
    """log(sse/n) + |M| * C_n * log(p) / n."""
    if not sse > 0:
        raise DegenerateSSE("SSE must be positive")
    return math.log(sse / n) + model_size * c_n * math.log(p) / n


def select_hbic(path, cfg, n=None, p=None):
    """Minimize HBIC over path points with support size <= K_n.

    Ties break toward larger lambda (the sparser side). Perfect-fit points
    (SSE below 1e-12 * ||y||^2) are excluded as degenerate.
    """
    if len(path) == 0:
        raise AllExcluded("empty path")
    n = n if n is not None else path.n
    p = p if p is not None else (path.p or path.fits[0].beta.shape[0])
    if n is None:
        raise ValueError("sample size n is required")
    c_n, k_n = cfg.resolve(n)
    floor = _SSE_FLOOR * path.y_norm_sq if path.y_norm_sq is not None else 0.0
    best = None
    scores = np.full(len(path), np.nan)
    for k, fit in enumerate(path.fits):
        size = len(fit.support)
        sse = path.sigma2[k] * n
        if size > k_n or sse <= floor or sse <= 0:
            continue
        scores[k] = hbic_score(sse, size, n, p, c_n)
        if best is None or scores[k] < scores[best]:
            best = k
    path.hbic = scores
    if best is None:
        raise AllExcluded("no path point has support size within K_n")
    return float(path.lambdas[best]), path.fits[best]


def fold_assignments(n, folds, seed):
    """Deterministic fold labels: a seeded permutation split into blocks."""
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0x5F01D)))
    perm = rng.permutation(n)
    labels = np.empty(n, dtype=np.int64)
    for f, chunk in enumerate(np.array_split(perm, folds)):
        labels[chunk] = f
    return labels


def cv_select(data, fitter, grid, cfg):
    """k-fold CV over a lambda grid; refits on the full data at the winner.

    ``fitter(train_dataset, lam, warm_start)`` must return a FitResult whose
    ``beta`` is on the train dataset's standardized scale. Held-out error is
    computed on the original scale, so centering choices carry over.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty lambda grid")
    n = data.n
    if cfg.folds > n:
        raise ValueError("more folds than observations")
    raw_X = data.X * data.col_scale + data.col_center
    raw_y = data.y + data.y_center
    center = bool(np.any(data.col_center) or data.y_center != 0.0)
    labels = fold_assignments(n, cfg.folds, cfg.seed)
    err = np.zeros(grid.size)
    for f in range(cfg.folds):
        val = labels == f
        train = standardize(raw_X[~val], raw_y[~val], center=center)
        warm = None
        for k, lam in enumerate(grid):
            fit = fitter(train, lam, warm)
            warm = fit.beta
            beta, intercept = train.original_coefficients(fit.beta)
            pred = raw_X[val] @ beta + intercept
            err[k] += float(np.sum((raw_y[val] - pred) ** 2))
    err /= n
    best = int(np.argmin(err))  # argmin returns the first (largest-lambda) tie
    lam_hat = float(grid[best])
    final = fitter(data, lam_hat, None)
    return lam_hat, final
