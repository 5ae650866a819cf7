"""Bootstrap stability selection of the ridge levels (tau for the final
eigenproblem, s for the initial double-sliced one).

For each grid value the full-data scores implied by B bootstrap refits are
Procrustes-aligned to a full-data anchor fit and compared against the
bootstrap mean at the spectral-scale default tau0: the loss is the summed
across-replicate variance plus the summed squared drift of the bootstrap mean
from that reference.  The replicate pipeline up to the slice projection does
not depend on the ridge, so it is computed once per replicate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import orthogonal_procrustes

from .eigensolve import reg_gen_eig
from .errors import InputError, NumericalError
from .kernels import KernelSpec, cross_kernel, gram, resolve_spec
from .sdr import (
    FitOptions,
    SurvivalDataset,
    _joint_directions,
    _select_and_unitize,
    _spectral_reg,
    weighted_q,
)
from .slicing import double_slice_q

REF_KEY = -1


@dataclass(frozen=True)
class TuningResult:
    selected: float
    grid: np.ndarray
    loss: np.ndarray
    variance_term: np.ndarray
    bias_term: np.ndarray
    tau0: float
    B: int
    discarded: int

    def to_dict(self) -> dict:
        return {
            "selected": self.selected,
            "grid": self.grid.tolist(),
            "loss": self.loss.tolist(),
            "variance_term": self.variance_term.tolist(),
            "bias_term": self.bias_term.tolist(),
            "tau0": self.tau0,
            "B": self.B,
            "discarded": self.discarded,
        }


def tau0(r_centered, n: Optional[int] = None) -> float:
    """Spectral-scale default ridge: 0.05 * lambda_1(R^2) / n^2."""
    r = np.asarray(r_centered, dtype=float)
    if n is None:
        n = r.shape[0]
    top = float(np.linalg.eigvalsh(r)[-1])
    if top <= 0:
        raise NumericalError("centered Gram matrix is zero; no ridge scale")
    return 0.05 * top ** 2 / n ** 2


def make_grid(center: float, n_points: int = 20, span: float = 20.0):
    """Geometric grid from center/span to center*span."""
    if center <= 0:
        raise InputError("grid center must be positive")
    return np.geomspace(center / span, center * span, n_points)


def _aligned(scores, anchor):
    omega, _ = orthogonal_procrustes(scores, anchor)
    return scores @ omega


def _stability_select(grid, reference_value, replicate_scores, anchor,
                      n_boot) -> TuningResult:
    """Shared loss computation.  replicate_scores: one dict per kept
    replicate mapping grid index (and REF_KEY for the reference ridge) to an
    (n, k) full-data score matrix."""
    kept = len(replicate_scores)
    discarded = n_boot - kept
    if 2 * discarded > n_boot:
        raise NumericalError(
            f"bootstrap tuning discarded {discarded} of {n_boot} replicates; "
            "data too degenerate to tune")
    if kept < 2:
        raise NumericalError("not enough bootstrap replicates to tune")
    ref = np.mean([_aligned(rep[REF_KEY], anchor)
                   for rep in replicate_scores], axis=0)
    variance = np.empty(grid.size)
    bias = np.empty(grid.size)
    for j in range(grid.size):
        arr = np.stack([_aligned(rep[j], anchor) for rep in replicate_scores])
        variance[j] = float(arr.var(axis=0, ddof=1).sum())
        bias[j] = float(((arr.mean(axis=0) - ref) ** 2).sum())
    loss = variance + bias
    j_best = int(np.argmin(loss))
    return TuningResult(
        selected=float(grid[j_best]),
        grid=np.asarray(grid, dtype=float),
        loss=loss,
        variance_term=variance,
        bias_term=bias,
        tau0=float(reference_value),
        B=n_boot,
        discarded=discarded,
    )


def tune(data: SurvivalDataset, kernel: Optional[KernelSpec] = None,
         options: Optional[FitOptions] = None,
         grid=None) -> TuningResult:
    """Select tau for the final eigenproblem by bootstrap stability."""
    from .sdr import fit

    opts = options if options is not None else FitOptions()
    if not isinstance(data, SurvivalDataset):
        raise InputError("tune expects a SurvivalDataset")
    spec = resolve_spec(kernel if kernel is not None else KernelSpec(), data.x)
    gm_full = gram(data.x, spec)

    s = opts.s if isinstance(opts.s, (int, float)) else _spectral_reg(gm_full)
    reference = tau0(gm_full.centered)
    grid = make_grid(reference) if grid is None else np.asarray(grid,
                                                                dtype=float)

    anchor_model = fit(data.x, data.times, data.status, kernel=spec,
                       options=replace(opts, tau=reference, s=float(s)))
    anchor = anchor_model.scores
    k_fix = anchor_model.q

    rng = np.random.default_rng(opts.seed)
    draws = [rng.integers(0, data.n, data.n) for _ in range(opts.n_boot)]
    reps = []
    for idx in draws:
        try:
            sub = data.subset(idx)
            gm = gram(sub.x, spec)
            _, _, _, z_joint = _joint_directions(gm, sub.times, sub.status,
                                                 opts, float(s))
            mats, _, _ = weighted_q(sub.times, sub.status, opts, z_joint)
            k_cross = cross_kernel(sub.x, spec, data.x, gm.row_means,
                                   gm.grand_mean)
            per_tau = {}
            for j, tau in [(REF_KEY, reference)] + list(enumerate(grid)):
                values, vectors = reg_gen_eig(gm.centered, mats.q, float(tau))
                a_hat, _ = _select_and_unitize(gm, values, vectors, k_fix,
                                               opts.evr)
                per_tau[j] = k_cross @ a_hat
            reps.append(per_tau)
        except (NumericalError, InputError, np.linalg.LinAlgError):
            continue
    return _stability_select(grid, reference, reps, anchor, opts.n_boot)


def tune_joint(data: SurvivalDataset, kernel: Optional[KernelSpec] = None,
               options: Optional[FitOptions] = None,
               grid=None) -> TuningResult:
    """Select s for the double-sliced eigenproblem by bootstrap stability."""
    opts = options if options is not None else FitOptions()
    if not isinstance(data, SurvivalDataset):
        raise InputError("tune_joint expects a SurvivalDataset")
    spec = resolve_spec(kernel if kernel is not None else KernelSpec(), data.x)
    gm_full = gram(data.x, spec)

    reference = _spectral_reg(gm_full)
    grid = make_grid(reference) if grid is None else np.asarray(grid,
                                                                dtype=float)

    _, a_anchor, m_fix, z_anchor = _joint_directions(
        gm_full, data.times, data.status, opts, reference)

    rng = np.random.default_rng(opts.seed)
    draws = [rng.integers(0, data.n, data.n) for _ in range(opts.n_boot)]
    reps = []
    for idx in draws:
        try:
            sub = data.subset(idx)
            gm = gram(sub.x, spec)
            k_cross = cross_kernel(sub.x, spec, data.x, gm.row_means,
                                   gm.grand_mean)
            _, qj = double_slice_q(sub.times, sub.status,
                                   count_censored=opts.L0,
                                   count_event=opts.L1)
            per_s = {}
            for j, s in [(REF_KEY, reference)] + list(enumerate(grid)):
                values, vectors = reg_gen_eig(gm.centered, qj, float(s))
                a_j, _ = _select_and_unitize(gm, values, vectors, m_fix,
                                             opts.evr)
                per_s[j] = k_cross @ a_j
            reps.append(per_s)
        except (NumericalError, InputError, np.linalg.LinAlgError):
            continue
    return _stability_select(grid, reference, reps, z_anchor, opts.n_boot)
