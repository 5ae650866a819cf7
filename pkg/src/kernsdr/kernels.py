"""Reproducing kernels, Gram matrices, centering, out-of-sample kernel columns."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError

FAMILIES = ("linear", "polynomial", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and parameters.

    scale=None on the gaussian family means "use the median heuristic",
    resolved when a Gram matrix is built.  linear ignores every parameter.
    """

    family: str = "gaussian"
    scale: float | None = None
    offset: float = 1.0
    degree: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(
                f"unknown kernel family {self.family!r}; choose from {FAMILIES}"
            )
        if self.scale is not None and not self.scale > 0:
            raise InputError("kernel scale must be positive")
        if self.family == "polynomial":
            if self.degree < 1 or int(self.degree) != self.degree:
                raise InputError("polynomial degree must be a positive integer")


@dataclass(frozen=True)
class GramMatrix:
    """Raw and centered kernel matrix plus the metadata needed to center
    out-of-sample kernel columns consistently with training."""

    raw: np.ndarray
    centered: np.ndarray
    row_means: np.ndarray
    grand_mean: float
    spec: KernelSpec


def _as_matrix(X, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise InputError(f"{name} must be a 2-d array")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{name} contains non-finite values")
    return X


def median_heuristic_scale(X) -> float:
    """1 / median of pairwise squared distances (i < j)."""
    X = _as_matrix(X)
    n = X.shape[0]
    if n < 2:
        raise InputError("median heuristic needs at least 2 points")
    sq = _sq_dists(X, X)
    med = float(np.median(sq[np.triu_indices(n, k=1)]))
    if med <= 0:
        raise InputError("all pairwise distances are zero; cannot set a scale")
    return 1.0 / med


def _sq_dists(A, B):
    aa = np.sum(A * A, axis=1)
    bb = np.sum(B * B, axis=1)
    sq = aa[:, None] + bb[None, :] - 2.0 * (A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return sq


def kernel_matrix(spec: KernelSpec, A, B) -> np.ndarray:
    """Raw kernel evaluations between the rows of A and the rows of B."""
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise InputError(
            f"dimension mismatch: {A.shape[1]} vs {B.shape[1]} features"
        )
    if spec.family == "linear":
        return A @ B.T
    if spec.family == "polynomial":
        scale = 1.0 if spec.scale is None else spec.scale
        return (scale * (A @ B.T) + spec.offset) ** spec.degree
    if spec.scale is None:
        raise InputError("gaussian scale unresolved; call resolve_spec first")
    return np.exp(-spec.scale * _sq_dists(A, B))


def eval_kernel(spec: KernelSpec, s, t) -> float:
    s = np.asarray(s, dtype=float).ravel()
    t = np.asarray(t, dtype=float).ravel()
    if s.shape != t.shape:
        raise InputError("s and t must have the same dimension")
    return float(kernel_matrix(spec, s[None, :], t[None, :])[0, 0])


def resolve_spec(spec: KernelSpec, X) -> KernelSpec:
    """Fill in a data-driven scale when KernelSpec.scale is None."""
    if spec.family == "gaussian" and spec.scale is None:
        return replace(spec, scale=median_heuristic_scale(X))
    if spec.family == "polynomial" and spec.scale is None:
        return replace(spec, scale=1.0)
    return spec


def gram(X, spec: KernelSpec) -> GramMatrix:
    X = _as_matrix(X)
    n = X.shape[0]
    if n < 2:
        raise InputError("need at least 2 observations to build a Gram matrix")
    spec = resolve_spec(spec, X)
    raw = kernel_matrix(spec, X, X)
    raw = 0.5 * (raw + raw.T)
    row_means = raw.mean(axis=1)
    grand_mean = float(raw.mean())
    centered = raw - row_means[:, None] - row_means[None, :] + grand_mean
    centered = 0.5 * (centered + centered.T)
    return GramMatrix(raw=raw, centered=centered, row_means=row_means,
                      grand_mean=grand_mean, spec=spec)


def cross_kernel(x_train, spec: KernelSpec, x_new, row_means, grand_mean):
    """Centered out-of-sample kernel columns.

    Row i of the result is the kernel vector of x_new[i] against the training
    points, centered with the stored training row means and grand mean so that
    evaluating a fitted direction at a training point reproduces the in-sample
    value.  A 1-d x_new returns a single n-vector.
    """
    x_new = np.asarray(x_new, dtype=float)
    single = x_new.ndim == 1
    k = kernel_matrix(spec, x_new, x_train)
    row_means = np.asarray(row_means, dtype=float)
    if row_means.shape[0] != k.shape[1]:
        raise InputError("row_means length does not match training size")
    kc = k - row_means[None, :] - k.mean(axis=1, keepdims=True) + grand_mean
    return kc[0] if single else kc
