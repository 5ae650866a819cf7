"""Slice partitions, the double-slicing projection, and censoring-weighted
slice matrices.

A plan with L slices stores the L-1 interior boundaries; the outer ones are
implicitly 0 and +inf.  Slice l covers [t_l, t_{l+1}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, SliceDegeneracyError

P_FLOOR = 1e-8


@dataclass(frozen=True)
class SlicePlan:
    boundaries: np.ndarray  # strictly increasing interior boundaries, len L-1
    count: int

    def assign(self, times) -> np.ndarray:
        """0-based slice index for each time."""
        return np.searchsorted(self.boundaries, np.asarray(times), side="right")


@dataclass(frozen=True)
class DoubleSlicePlan:
    censored_plan: SlicePlan | None
    event_plan: SlicePlan | None
    cells: np.ndarray  # flat cell id per observation
    cell_count: int


@dataclass(frozen=True)
class WeightedSliceMatrices:
    weights: np.ndarray  # W_hat, n x L
    probs: np.ndarray    # p_hat, length L
    q: np.ndarray        # (1/n) W P^{-1} W', n x n
    plan: SlicePlan      # effective plan after any merging


def make_slices(times, count) -> SlicePlan:
    """Quantile slice boundaries over the supplied times.

    Duplicate boundaries from ties are merged and empty slices are folded into
    a neighbor, so the resulting count may be below `count`.
    """
    times = np.asarray(times, dtype=float)
    n = times.size
    if count < 2:
        raise InputError("need at least 2 slices")
    if n < count:
        raise InputError(f"cannot cut {n} observations into {count} slices")
    if np.unique(times).size < 2:
        raise SliceDegeneracyError(
            "all observation times identical; slicing impossible"
        )
    bounds = np.quantile(times, np.arange(1, count) / count)
    bounds = np.unique(bounds)
    # fold empty slices into their left neighbor
    while bounds.size > 0:
        idx = np.searchsorted(bounds, times, side="right")
        occupancy = np.bincount(idx, minlength=bounds.size + 1)
        empty = np.flatnonzero(occupancy == 0)
        if empty.size == 0:
            break
        drop = empty[0] if empty[0] == 0 else empty[0] - 1
        bounds = np.delete(bounds, drop)
    if bounds.size == 0:
        raise SliceDegeneracyError(
            "slice boundaries collapsed to a single slice; too many ties"
        )
    return SlicePlan(boundaries=bounds, count=bounds.size + 1)


def _single_cell_plan() -> SlicePlan:
    return SlicePlan(boundaries=np.empty(0), count=1)


def _group_plan(times, count):
    if times.size == 0:
        return None
    if times.size == 1 or np.unique(times).size < 2 or count < 2:
        return _single_cell_plan()
    return make_slices(times, min(count, times.size))


def double_slice_q(times, status, count_censored=10, count_event=10):
    """Double slicing of (time, status) and the joint projection matrix.

    Censored and event observations are partitioned separately by quantiles of
    their own times.  Returns (DoubleSlicePlan, Q_J) where Q_J[i, j] equals
    1/n_cell when i and j share a cell and 0 otherwise.
    """
    times = np.asarray(times, dtype=float)
    status = np.asarray(status)
    n = times.size
    if n == 0:
        raise InputError("empty dataset")
    cens = status == 0
    ev = ~cens
    cens_plan = _group_plan(times[cens], count_censored)
    ev_plan = _group_plan(times[ev], count_event)
    if cens_plan is None and ev_plan is None:
        raise InputError("empty dataset")

    cells = np.zeros(n, dtype=int)
    offset = 0
    if cens_plan is not None:
        cells[cens] = cens_plan.assign(times[cens])
        offset = cens_plan.count
    if ev_plan is not None:
        cells[ev] = offset + ev_plan.assign(times[ev])
        offset += ev_plan.count

    qj = np.zeros((n, n))
    for c in range(offset):
        members = np.flatnonzero(cells == c)
        if members.size:
            qj[np.ix_(members, members)] = 1.0 / members.size
    plan = DoubleSlicePlan(censored_plan=cens_plan, event_plan=ev_plan,
                           cells=cells, cell_count=int(np.unique(cells).size))
    return plan, qj


def weighted_slice_matrices(times, status, plan: SlicePlan, w_hat=None):
    """Per-observation slice weights and the quadratic form Q.

    w_hat(t_prime, t, i) is the estimated probability that subject i, censored
    at t_prime, survives past t; it is consulted only for censored subjects
    and only at boundaries above their censoring time.  Weight rows telescope
    to 1; negative increments (non-monotone w_hat) are clamped to 0 and the
    row renormalized.  Slices whose mass p_hat falls below the floor are
    merged with a neighbor so P^{-1} stays well defined.
    """
    times = np.asarray(times, dtype=float)
    status = np.asarray(status)
    n = times.size
    bounds = plan.boundaries
    L = plan.count
    censored = np.flatnonzero(status == 0)
    if censored.size and w_hat is None:
        raise InputError("dataset has censored observations but no weight function")

    # survival-style step values g_i at 0, t_2, ..., t_L, +inf
    g = np.empty((n, L + 1))
    g[:, 0] = 1.0
    g[:, L] = 0.0
    for col, t in enumerate(bounds, start=1):
        gt = (times >= t).astype(float)
        for i in censored:
            if times[i] < t:
                gt[i] = w_hat(times[i], t, i)
        g[:, col] = gt

    W = g[:, :-1] - g[:, 1:]
    np.clip(W, 0.0, None, out=W)
    W /= W.sum(axis=1, keepdims=True)

    col_mass = W.sum(axis=0)  # = n * p_hat
    bounds = bounds.copy()
    while col_mass.min() < n * P_FLOOR:
        if col_mass.size <= 1:
            raise SliceDegeneracyError(
                "all slice mass collapsed; reduce the number of slices"
            )
        j = int(np.argmin(col_mass))
        # merge with the right neighbor (left for the last slice)
        left = j if j < col_mass.size - 1 else j - 1
        W = np.hstack([W[:, :left], (W[:, left] + W[:, left + 1])[:, None],
                       W[:, left + 2:]])
        bounds = np.delete(bounds, left)
        col_mass = W.sum(axis=0)
    if col_mass.size < 2:
        raise SliceDegeneracyError(
            "fewer than 2 slices retain mass; reduce the number of slices"
        )

    # (1/n) W P^{-1} W' written through column masses so the indicator case
    # produces exactly 1/n_l entries
    q = (W / col_mass[None, :]) @ W.T
    q = 0.5 * (q + q.T)
    eff = SlicePlan(boundaries=bounds, count=col_mass.size)
    return WeightedSliceMatrices(weights=W, probs=col_mass / n, q=q, plan=eff)
