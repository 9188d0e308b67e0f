"""Core data model: standardized datasets, oracle least squares, selection metrics."""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstantColumn,
    DimensionMismatch,
    EmptyList,
    RankDeficient,
    SupportTooLarge,
)

_RANK_TOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Response and design matrix with column standardization metadata.

    Columns of ``X`` satisfy x_j'x_j / n == 1; ``col_scale`` and
    ``col_center`` map coefficients back to the original scale.
    """

    y: np.ndarray
    X: np.ndarray
    col_scale: np.ndarray
    col_center: np.ndarray
    y_center: float
    standardized: bool = True

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def original_coefficients(self, beta_std):
        """Map standardized-scale coefficients to (original-scale beta, intercept)."""
        beta = np.asarray(beta_std, dtype=float) / self.col_scale
        intercept = self.y_center - float(self.col_center @ beta)
        return beta, intercept


@dataclass(frozen=True)
class TrueModel:
    """Ground-truth coefficient vector used by simulations and metrics."""

    beta_star: np.ndarray
    support: frozenset = field(init=False)
    q: int = field(init=False)
    d_star: float = field(init=False)

    def __post_init__(self):
        beta = np.asarray(self.beta_star, dtype=float)
        object.__setattr__(self, "beta_star", beta)
        supp = frozenset(int(j) for j in np.flatnonzero(beta))
        object.__setattr__(self, "support", supp)
        object.__setattr__(self, "q", len(supp))
        d = float(np.min(np.abs(beta[beta != 0]))) if supp else 0.0
        object.__setattr__(self, "d_star", d)


@dataclass(frozen=True)
class Metrics:
    """Averaged sparsity-recovery and estimation-accuracy summaries."""

    tp: float
    fp: float
    tm: float
    mse: float


@dataclass
class FitResult:
    """One coefficient vector with convergence and diagnostic metadata.

    ``beta`` is on the standardized scale; use ``Dataset.original_coefficients``
    for reporting.
    """

    beta: np.ndarray
    iterations: int = 0
    max_coord_change: float = 0.0
    kkt_residual: float = float("nan")
    lam: float | None = None
    tau: float | None = None
    converged: bool = True
    step1: "FitResult | None" = None

    @property
    def support(self):
        return frozenset(int(j) for j in np.flatnonzero(self.beta))


def standardize(raw_X, raw_y, center=True):
    """Scale (and optionally center) columns so that x_j'x_j / n = 1.

    Centering makes an implicit unpenalized intercept; disable it to work
    with mean-zero synthetic data on the natural scale.
    """
    X = np.asarray(raw_X, dtype=float)
    y = np.asarray(raw_y, dtype=float).ravel()
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-d array")
    n, p = X.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"len(y)={y.shape[0]} but X has {n} rows")
    if n < 2 or p < 1:
        raise DimensionMismatch("need n >= 2 and p >= 1")

    spread = X.max(axis=0) - X.min(axis=0)
    for j in range(p):
        if spread[j] == 0.0:
            raise ConstantColumn(j)

    if center:
        col_center = X.mean(axis=0)
        y_center = float(y.mean())
    else:
        col_center = np.zeros(p)
        y_center = 0.0
    Xc = X - col_center
    col_scale = np.sqrt(np.einsum("ij,ij->j", Xc, Xc) / n)
    if np.any(col_scale <= 0):
        raise ConstantColumn(int(np.argmin(col_scale)))
    Xs = np.asfortranarray(Xc / col_scale)
    Xs.setflags(write=False)
    ys = y - y_center
    ys.setflags(write=False)
    return Dataset(y=ys, X=Xs, col_scale=col_scale, col_center=col_center,
                   y_center=y_center, standardized=True)


def oracle_fit(data, support):
    """Least squares using only the given columns, zeros elsewhere."""
    support = sorted(int(j) for j in support)
    beta = np.zeros(data.p)
    if not support:
        return FitResult(beta=beta)
    if len(support) > data.n:
        raise SupportTooLarge(f"|support|={len(support)} exceeds n={data.n}")
    Xs = data.X[:, support]
    sv = np.linalg.svd(Xs, compute_uv=False)
    if sv[-1] < _RANK_TOL * sv[0]:
        raise RankDeficient("X restricted to the support is rank deficient")
    coef, *_ = np.linalg.lstsq(Xs, data.y, rcond=None)
    beta[support] = coef
    return FitResult(beta=beta)


def selection_metrics(estimates, truth):
    """TP/FP averaged over the estimates; TM and MSE against the truth.

    When per-estimate truths differ (random supports across replications),
    pass a list of TrueModel of matching length.
    """
    if len(estimates) == 0:
        raise EmptyList("no estimates to score")
    truths = truth if isinstance(truth, (list, tuple)) else [truth] * len(estimates)
    if len(truths) != len(estimates):
        raise DimensionMismatch("estimates and truths differ in length")
    tp = fp = tm = mse = 0.0
    for beta, t in zip(estimates, truths):
        beta = np.asarray(beta, dtype=float)
        if beta.shape[0] != t.beta_star.shape[0]:
            raise DimensionMismatch("estimate length does not match the truth")
        supp = frozenset(int(j) for j in np.flatnonzero(beta))
        tp += len(supp & t.support)
        fp += len(supp - t.support)
        tm += 1.0 if supp == t.support else 0.0
        mse += float(np.sum((beta - t.beta_star) ** 2))
    m = len(estimates)
    return Metrics(tp=tp / m, fp=fp / m, tm=tm / m, mse=mse / m)
