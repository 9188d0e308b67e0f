"""Numba coordinate-descent kernels. Kept free of Python objects so that
paths and Monte Carlo replications can run on threads."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sweep(X, r, beta, g, lam, n, indices):
    maxc = 0.0
    for k in range(indices.shape[0]):
        j = indices[k]
        bj = beta[j]
        s = 0.0
        for i in range(n):
            s += X[i, j] * r[i]
        z = bj + s / n - g[j]
        az = abs(z) - lam
        if az > 0.0:
            new = az if z > 0.0 else -az
        else:
            new = 0.0
        if new != bj:
            d = bj - new
            for i in range(n):
                r[i] += d * X[i, j]
            beta[j] = new
        c = abs(new - bj)
        if c > maxc:
            maxc = c
    return maxc


@njit(cache=True, nogil=True)
def cd_linear(X, r, beta, g, lam, tol, max_iter, active_cycles):
    """Cyclic CD for (2n)^-1 ||y - X b||^2 + g'b + lam ||b||_1 on unit-norm columns.

    ``r`` holds the current residual y - X b and is updated in place together
    with ``beta``. Returns (sweeps, last_full_sweep_change, converged).
    """
    n, p = X.shape
    all_idx = np.arange(p)
    sweeps = 0
    maxc = np.inf
    while sweeps < max_iter:
        maxc = _sweep(X, r, beta, g, lam, n, all_idx)
        sweeps += 1
        if maxc <= tol:
            return sweeps, maxc, True
        # restrict to the active set between full sweeps
        nact = 0
        for j in range(p):
            if beta[j] != 0.0:
                nact += 1
        active = np.empty(nact, dtype=np.int64)
        k = 0
        for j in range(p):
            if beta[j] != 0.0:
                active[k] = j
                k += 1
        for _ in range(active_cycles):
            if sweeps >= max_iter or nact == 0:
                break
            c = _sweep(X, r, beta, g, lam, n, active)
            sweeps += 1
            if c <= tol:
                break
    return sweeps, maxc, False


@njit(cache=True, nogil=True)
def cd_weighted(X, w, r, beta, g, lam, intercept, b0_box, tol, max_iter,
                active_cycles):
    """Cyclic CD for the weighted penalized least squares subproblem

        (2n)^-1 sum_i w_i (z_i - b0 - x_i'b)^2 + g'b + lam ||b||_1,

    with an unpenalized intercept when ``intercept`` is true. ``r`` holds the
    working residual z - b0 - X b. ``b0_box`` is a length-1 array carrying b0.
    """
    n, p = X.shape
    sweeps = 0
    maxc = np.inf
    wsum = 0.0
    for i in range(n):
        wsum += w[i]
    denom = np.empty(p)
    for j in range(p):
        s = 0.0
        for i in range(n):
            s += w[i] * X[i, j] * X[i, j]
        denom[j] = s / n
    while sweeps < max_iter:
        maxc = 0.0
        if intercept and wsum > 0.0:
            s = 0.0
            for i in range(n):
                s += w[i] * r[i]
            d0 = s / wsum
            if d0 != 0.0:
                b0_box[0] += d0
                for i in range(n):
                    r[i] -= d0
            if abs(d0) > maxc:
                maxc = abs(d0)
        for j in range(p):
            if denom[j] <= 0.0:
                continue
            bj = beta[j]
            s = 0.0
            for i in range(n):
                s += w[i] * X[i, j] * r[i]
            z = denom[j] * bj + s / n - g[j]
            az = abs(z) - lam
            if az > 0.0:
                new = (az if z > 0.0 else -az) / denom[j]
            else:
                new = 0.0
            if new != bj:
                d = bj - new
                for i in range(n):
                    r[i] += d * X[i, j]
                beta[j] = new
            c = abs(new - bj)
            if c > maxc:
                maxc = c
        sweeps += 1
        if maxc <= tol:
            return sweeps, maxc, True
    return sweeps, maxc, False
