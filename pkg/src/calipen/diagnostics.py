"""Stationarity certification and small-p spectral diagnostics."""

import itertools
from dataclasses import dataclass

import numpy as np

from .data import oracle_fit
from .errors import TooLargeForBruteForce
from .penalty import penalty_deriv

_BRUTE_FORCE_MAX_P = 25


@dataclass(frozen=True)
class KktReport:
    max_violation_nonzero: float
    max_violation_zero: float
    worst_index: int
    satisfied: bool
    tolerance: float


def kkt_violation(beta, data, spec, lam, tolerance=1e-6):
    """Residuals of the necessary stationarity condition of the penalized
    objective: correlation matches the penalty derivative on the support and
    stays within lam off it."""
    beta = np.asarray(beta, dtype=float)
    r = data.y - data.X @ beta
    corr = data.X.T @ r / data.n
    nz = beta != 0.0
    pd = penalty_deriv(spec, np.abs(beta), lam)
    viol_nz = np.where(nz, np.abs(corr - np.sign(beta) * pd), 0.0)
    viol_z = np.where(nz, 0.0, np.maximum(np.abs(corr) - lam, 0.0))
    worst = int(np.argmax(np.maximum(viol_nz, viol_z)))
    mx_nz = float(viol_nz.max()) if beta.size else 0.0
    mx_z = float(viol_z.max()) if beta.size else 0.0
    return KktReport(
        max_violation_nonzero=mx_nz,
        max_violation_zero=mx_z,
        worst_index=worst,
        satisfied=max(mx_nz, mx_z) <= tolerance,
        tolerance=tolerance,
    )


def xi_min(data, A0, m):
    """Exact minimum of lambda_min(X_B'X_B / n) over supersets B of A0 with
    |B| <= m, by exhaustive enumeration (p <= 25)."""
    A0 = sorted(int(j) for j in A0)
    p = data.p
    if p > _BRUTE_FORCE_MAX_P:
        raise TooLargeForBruteForce(
            f"p={p} exceeds the enumeration cap {_BRUTE_FORCE_MAX_P}")
    if m < len(A0):
        raise ValueError("m must be at least |A0|")
    rest = [j for j in range(p) if j not in A0]
    best = np.inf
    for extra in range(0, min(m, p) - len(A0) + 1):
        for comb in itertools.combinations(rest, extra):
            B = A0 + list(comb)
            G = data.X[:, B].T @ data.X[:, B] / data.n
            ev = float(np.linalg.eigvalsh(G)[0])
            if ev < best:
                best = ev
    return max(best, 0.0)


def l2_bound_check(beta_hat, data, truth, lam, u_n):
    """Evaluate both sides of the sparse-local-minimum distance bound
    ||b - b_oracle|| <= 2 lam sqrt(q u*) / xi_min(q u*), u* = u_n + 1."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    q = truth.q
    if np.count_nonzero(beta_hat) > q * u_n:
        raise ValueError("beta_hat is denser than the q*u_n sparsity precondition")
    u_star = u_n + 1.0
    m = int(np.ceil(q * u_star))
    oracle = oracle_fit(data, sorted(truth.support))
    lhs = float(np.linalg.norm(beta_hat - oracle.beta))
    xi = xi_min(data, sorted(truth.support), m)
    rhs = 2.0 * lam * np.sqrt(q * u_star) / xi if xi > 0 else np.inf
    return lhs, float(rhs), lhs <= rhs
