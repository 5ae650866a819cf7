"""Regularized generalized eigenproblems for SDR coefficient vectors.

The pencil is M alpha = lambda S alpha with M = R Q R and S = R^2 + n^2 tau I.
scipy.linalg.eigh reduces the symmetric-definite pencil through a Cholesky
factor of S and maps the vectors back, which is exactly the stable route we
want; we never form S^{-1} M.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DegenerateDirectionError, InputError, NumericalError


def _fix_signs(vectors):
    # sign convention: coordinate of largest magnitude is positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs[None, :]


def reg_gen_eig(R, Q, tau, k=None):
    """Top-k eigenpairs of R Q R alpha = lambda (R^2 + n^2 tau I) alpha.

    Returns (values, vectors): values nonincreasing and nonnegative,
    vectors in columns with a deterministic sign.  k=None returns all n.
    """
    R = np.asarray(R, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = R.shape[0]
    if R.shape != (n, n) or Q.shape != (n, n):
        raise InputError("R and Q must be square matrices of the same size")
    if tau < 0:
        raise InputError("tau must be nonnegative")
    if k is None:
        k = n
    if not 1 <= k <= n:
        raise InputError(f"k must be in [1, {n}], got {k}")

    M = R @ Q @ R
    M = 0.5 * (M + M.T)
    S = R @ R + (n * n * tau) * np.eye(n)
    S = 0.5 * (S + S.T)
    try:
        values, vectors = scipy.linalg.eigh(M, S)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise NumericalError(
            "regularized pencil is not positive definite; "
            "use a positive tau (R^2 alone is rank deficient)"
        ) from exc

    values = values[::-1][:k]
    vectors = vectors[:, ::-1][:, :k]

    scale = max(abs(values[0]), 1.0)
    if values.min() < -1e-8 * scale:
        raise NumericalError(
            f"pencil produced a significantly negative eigenvalue ({values.min():.3e})"
        )
    values = np.maximum(values, 0.0)
    return values, _fix_signs(vectors)


def unitize(alpha, R):
    """Scale alpha so alpha' R alpha = 1 (unit norm of the induced direction)."""
    alpha = np.asarray(alpha, dtype=float)
    nrm2 = float(alpha @ (R @ alpha))
    if nrm2 <= 1e-12:
        raise DegenerateDirectionError(
            "direction has (numerically) zero norm under the Gram metric"
        )
    return alpha / np.sqrt(nrm2)


def select_components(values, threshold=0.9):
    """Smallest k whose leading eigenvalues capture `threshold` of the total."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InputError("empty eigenvalue list")
    if not 0 < threshold <= 1:
        raise InputError("threshold must lie in (0, 1]")
    total = values.sum()
    if total <= 0:
        return 1
    frac = np.cumsum(values) / total
    return int(np.searchsorted(frac, threshold - 1e-12) + 1)
