"""Kernel smoothing on the reduced joint directions: density, conditional
survival, conditional cumulative hazard, and the censoring weight
w(t', t | z) = exp(-Lambda(t', t | z)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, LocalSupportError

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class ReducedCoordinates:
    """Joint-direction scores with the smoothing bandwidth and kernel order."""

    z: np.ndarray        # n x m
    bandwidth: float
    order: int = 2

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 2 or z.shape[1] < 1:
            raise InputError("coordinates must be an n x m matrix with m >= 1")
        if not np.all(np.isfinite(z)):
            raise InputError("coordinates contain non-finite values")
        if not self.bandwidth > 0:
            raise InputError("bandwidth must be positive")
        if self.order not in (2, 4):
            raise InputError("smoother order must be 2 or 4")
        object.__setattr__(self, "z", z)


def bandwidth(n, order=2, c0=1.0, sigma=1.0) -> float:
    """h = c0 * sigma * n^(-1/(2 order)); sigma is the caller's average
    per-coordinate standard deviation of the scores."""
    if n < 2 or order < 1:
        raise InputError("need n >= 2 and order >= 1")
    if c0 <= 0 or sigma <= 0:
        raise InputError("c0 and sigma must be positive")
    return c0 * sigma * float(n) ** (-1.0 / (2.0 * order))


def _product_kernel(diff, h, order):
    """h^{-m} K_m(diff / h) for rows of scaled differences, shape (..., m)."""
    u = diff / h
    m = u.shape[-1]
    base = np.exp(-0.5 * np.sum(u * u, axis=-1)) / _SQRT_2PI ** m
    if order == 4:
        # fourth-order Gaussian kernel (3 - u^2)/2 * phi(u) per coordinate
        base = base * np.prod((3.0 - u * u) / 2.0, axis=-1)
    return base / h**m


class HazardSmoother:
    """Precomputes the pairwise kernel matrix, training densities, and
    per-subject conditional survival so weight evaluations are O(n) each."""

    def __init__(self, coords: ReducedCoordinates, times, status):
        self.coords = coords
        self.times = np.asarray(times, dtype=float)
        self.status = np.asarray(status)
        n, m = coords.z.shape
        if self.times.size != n:
            raise InputError("times length does not match coordinate rows")
        self.n = n
        self.m = m
        h = coords.bandwidth
        self.f_floor = 1e-12 * h**-m
        self.s_floor = 1.0 / (n * np.log(n)) if n > 2 else 1.0 / n

        diff = coords.z[:, None, :] - coords.z[None, :, :]
        self.kmat = _product_kernel(diff, h, coords.order)
        self.f = self.kmat.mean(axis=1)
        self._bad = self.f < self.f_floor

        later = self.times[None, :] > self.times[:, None]
        numer = np.where(later, self.kmat, 0.0).sum(axis=1) / n
        with np.errstate(divide="ignore", invalid="ignore"):
            surv = numer / self.f
        self.surv = np.clip(surv, self.s_floor, 1.0)

    def _row(self, z):
        z = np.asarray(z, dtype=float).ravel()
        if z.size != self.m:
            raise InputError(f"query point must have {self.m} coordinates")
        return _product_kernel(self.coords.z - z[None, :], self.coords.bandwidth,
                               self.coords.order)

    def density(self, z) -> float:
        return float(self._row(z).mean())

    def cond_survival(self, i) -> float:
        if self._bad[i]:
            raise LocalSupportError(
                f"density at training point {i} below floor"
            )
        return float(self.surv[i])

    def _cum_hazard_row(self, row, fz, t_prime, t):
        if not t_prime < t:
            raise InputError("cum_hazard needs t_prime < t")
        if fz < self.f_floor:
            raise LocalSupportError("no local support at the query point")
        window = (self.times > t_prime) & (self.times < t) & (self.status == 1)
        if not window.any():
            return 0.0
        if self._bad[window].any():
            raise LocalSupportError(
                "an event inside the window has no local support"
            )
        val = float((row[window] / self.surv[window]).sum()) / self.n / fz
        return max(val, 0.0)

    def cum_hazard(self, t_prime, t, z) -> float:
        row = self._row(z)
        return self._cum_hazard_row(row, float(row.mean()), t_prime, t)

    def weight(self, t_prime, t, z) -> float:
        lam = self.cum_hazard(t_prime, t, z)
        return min(np.exp(-lam), 1.0)

    def weight_at(self, i, t) -> float:
        """Censoring weight for subject i at boundary t, evaluated at the
        subject's own reduced coordinates (the only form fitting needs)."""
        lam = self._cum_hazard_row(self.kmat[i], float(self.f[i]),
                                   float(self.times[i]), t)
        return min(np.exp(-lam), 1.0)


def nw_density(coords, z) -> float:
    u = np.asarray(z, dtype=float).ravel()
    if u.size != coords.z.shape[1]:
        raise InputError("query point dimension mismatch")
    row = _product_kernel(coords.z - u[None, :], coords.bandwidth, coords.order)
    return float(row.mean())


def cond_survival(coords, times, status, i) -> float:
    return HazardSmoother(coords, times, status).cond_survival(i)


def cum_hazard(coords, times, status, t_prime, t, z) -> float:
    return HazardSmoother(coords, times, status).cum_hazard(t_prime, t, z)


def weight(coords, times, status, t_prime, t, z) -> float:
    return HazardSmoother(coords, times, status).weight(t_prime, t, z)
