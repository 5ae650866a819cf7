"""Maximum rank association (RMAE) between two score matrices, the Spearman
correlation it is built on, and a Kaplan-Meier exporter for reporting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import InputError


def _midranks(a, axis=0):
    return rankdata(a, method="average", axis=axis)


def spearman(u, v) -> float:
    """Pearson correlation of midranks."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.size != v.size:
        raise InputError("vectors must have equal length")
    if u.size < 3:
        raise InputError("spearman needs at least 3 observations")
    if np.ptp(u) == 0 or np.ptp(v) == 0:
        warnings.warn("constant vector in spearman; returning 0", stacklevel=2)
        return 0.0
    ru = _midranks(u)
    rv = _midranks(v)
    return float(np.corrcoef(ru, rv)[0, 1])


def _corr_cols(rank_cols, r):
    """|Pearson| of each rank column against the fixed rank vector r."""
    a = rank_cols - rank_cols.mean(axis=0, keepdims=True)
    rc = r - r.mean()
    den = np.sqrt((a * a).sum(axis=0) * (rc * rc).sum())
    num = a.T @ rc
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / den, 0.0)
    return np.abs(out)


def _sweep_side(M, w, u, r_other, cos_t, sin_t, best):
    """One pass of 2-d plane rotations over all coordinate pairs of w."""
    d = M.shape[1]
    for i in range(d - 1):
        for j in range(i + 1, d):
            dwi = cos_t * w[i] - sin_t * w[j] - w[i]
            dwj = sin_t * w[i] + cos_t * w[j] - w[j]
            cand = u[:, None] + np.outer(M[:, i], dwi) + np.outer(M[:, j], dwj)
            corrs = _corr_cols(_midranks(cand, axis=0), r_other)
            k = int(np.argmax(corrs))
            if corrs[k] > best:
                best = float(corrs[k])
                w = w.copy()
                w[i] += dwi[k]
                w[j] += dwj[k]
                u = cand[:, k]
    return w, u, best


def _abs_spearman(u, v):
    if np.ptp(u) == 0 or np.ptp(v) == 0:
        return 0.0
    return abs(float(np.corrcoef(_midranks(u), _midranks(v))[0, 1]))


def _cca_start(X, Y):
    """Leading canonical-correlation pair, used as one of the starts."""
    n = X.shape[0]
    Xc = X - X.mean(axis=0)
    Yc = Y - Y.mean(axis=0)
    ridge = 1e-8
    sxx = Xc.T @ Xc / n + ridge * np.eye(X.shape[1])
    syy = Yc.T @ Yc / n + ridge * np.eye(Y.shape[1])
    sxy = Xc.T @ Yc / n
    try:
        A = np.linalg.solve(sxx, sxy) @ np.linalg.solve(syy, sxy.T)
        vals, vecs = np.linalg.eig(A)
        a = np.real(vecs[:, np.argmax(np.real(vals))])
        b = np.linalg.solve(syy, sxy.T @ a)
    except np.linalg.LinAlgError:
        return None
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0 or not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        return None
    return a / na, b / nb


@dataclass(frozen=True)
class RmaeResult:
    value: float
    alpha: np.ndarray
    beta: np.ndarray
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def rmae(x, y, n_angles=90, n_starts=5, max_sweeps=50, tol=1e-6) -> RmaeResult:
    """Maximum Spearman correlation over linear projections of two score sets.

    Alternate maximization: with one side's projection held fixed, the other
    side's direction is improved by grid-searched 2-d plane rotations
    (n_angles points over (-pi/2, pi/2]); sides alternate until a sweep gains
    less than tol.  Multi-start from coordinate axes plus the leading
    canonical-correlation pair.  The value is reported in [0, 1] with the sign
    pushed into beta, so spearman(x @ alpha, y @ beta) equals the value.
    """
    X = np.atleast_2d(np.asarray(x, dtype=float))
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    if X.shape[0] == 1 and np.asarray(x).ndim == 1:
        X = X.T
    if Y.shape[0] == 1 and np.asarray(y).ndim == 1:
        Y = Y.T
    if X.shape[0] != Y.shape[0]:
        raise InputError("score matrices must have the same number of rows")
    if X.shape[0] < 10:
        raise InputError("rmae needs at least 10 observations")

    swapped = X.shape[1] < Y.shape[1]
    if swapped:
        X, Y = Y, X
    p, q = X.shape[1], Y.shape[1]

    # canonical row order (rank keys): makes the search path, hence the
    # value, exactly invariant to joint row permutation and to monotone
    # columnwise transforms
    keys = tuple(_midranks(Y[:, j]) for j in range(q - 1, -1, -1))
    keys += tuple(_midranks(X[:, j]) for j in range(p - 1, -1, -1))
    order = np.lexsort(keys)
    X = X[order]
    Y = Y[order]

    x_scale = X.std(axis=0)
    y_scale = Y.std(axis=0)
    if np.all(x_scale == 0) or np.all(y_scale == 0):
        a = np.zeros(p)
        a[0] = 1.0
        b = np.zeros(q)
        b[0] = 1.0
        if swapped:
            a, b = b, a
        return RmaeResult(value=0.0, alpha=a, beta=b, iterations=0,
                          converged=False)
    xs = np.where(x_scale > 0, x_scale, 1.0)
    ys = np.where(y_scale > 0, y_scale, 1.0)
    Xs = (X - X.mean(axis=0)) / xs
    Ys = (Y - Y.mean(axis=0)) / ys

    thetas = -np.pi / 2 + np.pi * np.arange(1, n_angles + 1) / n_angles
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)

    starts = []
    for k in range(min(p, max(n_starts - 1, 1))):
        a0 = np.zeros(p)
        a0[k] = 1.0
        b0 = np.zeros(q)
        b0[min(k, q - 1)] = 1.0
        starts.append((a0, b0))
    # CCA start on column midranks: keeps the whole search a function of
    # ranks only, so monotone columnwise transforms cannot move the start
    Xr = np.column_stack([_midranks(X[:, j]) for j in range(p)])
    Yr = np.column_stack([_midranks(Y[:, j]) for j in range(q)])
    cca = _cca_start(Xr, Yr)
    if cca is not None:
        starts.append(cca)

    best = (-1.0, None, None, 0, False)
    for a0, b0 in starts:
        a, b = a0.copy(), b0.copy()
        u, v = Xs @ a, Ys @ b
        val = _abs_spearman(u, v)
        converged = False
        sweep = 0
        for sweep in range(1, max_sweeps + 1):
            prev = val
            if p > 1:
                a, u, val = _sweep_side(Xs, a, u, _midranks(v), cos_t, sin_t, val)
            if q > 1:
                b, v, val = _sweep_side(Ys, b, v, _midranks(u), cos_t, sin_t, val)
            if val - prev < tol:
                converged = True
                break
        if val > best[0]:
            best = (val, a, b, sweep, converged)

    val, a, b, iterations, converged = best
    # undo the column standardization, restore unit norms
    a = a / xs
    b = b / ys
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    signed = spearman(X @ a, Y @ b) if val > 0 else 0.0
    if signed < 0:
        b = -b
        signed = -signed
    if swapped:
        a, b = b, a
    return RmaeResult(value=float(min(max(signed, 0.0), 1.0)), alpha=a, beta=b,
                      iterations=iterations, converged=converged)


def kaplan_meier(times, status):
    """Product-limit survival estimate.

    Returns (step_times, step_values): survival after each distinct event
    time.  S(t) is 1 before the first step.  All-censored data yields empty
    arrays (S identically 1).
    """
    times = np.asarray(times, dtype=float)
    status = np.asarray(status)
    if times.size == 0:
        raise InputError("kaplan_meier needs at least one observation")
    order = np.argsort(times, kind="stable")
    t_sorted = times[order]
    d_sorted = status[order]
    step_t, step_s = [], []
    s = 1.0
    at_risk = times.size
    i = 0
    while i < t_sorted.size:
        j = i
        deaths = 0
        while j < t_sorted.size and t_sorted[j] == t_sorted[i]:
            deaths += int(d_sorted[j] == 1)
            j += 1
        if deaths > 0:
            s *= 1.0 - deaths / at_risk
            step_t.append(float(t_sorted[i]))
            step_s.append(s)
        at_risk -= j - i
        i = j
    return np.asarray(step_t), np.asarray(step_s)


def km_eval(step_times, step_values, t) -> float:
    """Evaluate a kaplan_meier step function at time t (right-continuous)."""
    idx = np.searchsorted(step_times, t, side="right") - 1
    return 1.0 if idx < 0 else float(step_values[idx])
