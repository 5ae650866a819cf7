"""Kernel sufficient dimension reduction for right-censored responses.

Pipeline: centered Gram matrix -> initial directions from double slicing on
(time, status) -> kernel-smoothed censoring weights on those reduced
coordinates -> weighted slicing of the observed times -> regularized
generalized eigenproblem -> score directions.  A linear kernel recovers the
classical sliced-inverse comparator (fit_dsir).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .association import kaplan_meier, km_eval
from .eigensolve import reg_gen_eig, select_components, unitize
from .errors import InputError, LocalSupportError, NumericalError
from .hazard import HazardSmoother, ReducedCoordinates, bandwidth
from .kernels import GramMatrix, KernelSpec, cross_kernel, gram, resolve_spec
from .slicing import double_slice_q, make_slices, weighted_slice_matrices


@dataclass(frozen=True)
class SurvivalDataset:
    """Right-censored sample: covariates x (n, p), observed times, and a 0/1
    status vector (1 = event, 0 = censored)."""

    x: np.ndarray
    times: np.ndarray
    status: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise InputError("x must be a 2-d array")
        times = np.asarray(self.times, dtype=float).ravel()
        status = np.asarray(self.status).ravel()
        if times.shape[0] != x.shape[0] or status.shape[0] != x.shape[0]:
            raise InputError("x, times and status must have matching length")
        if not np.all(np.isfinite(x)):
            raise InputError("x contains non-finite values")
        if not np.all(np.isfinite(times)) or np.any(times <= 0):
            raise InputError("times must be finite and positive")
        st = np.asarray(status, dtype=float)
        if not np.all(np.isin(st, (0.0, 1.0))):
            raise InputError("status must be coded 0 (censored) / 1 (event)")
        st = st.astype(int)
        if st.sum() > 0 and np.unique(times[st == 1]).size < 2:
            raise InputError("need at least 2 distinct event times")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "status", st)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def subset(self, idx) -> "SurvivalDataset":
        idx = np.asarray(idx, dtype=int)
        return SurvivalDataset(self.x[idx], self.times[idx], self.status[idx])


@dataclass(frozen=True)
class FitOptions:
    """Numeric knobs for fit.  L slices the observed times for the weighted
    stage; L0 / L1 slice the censored / event groups for the initial stage.
    tau and s accept a float, None (spectral-scale default) or "auto"
    (bootstrap tuning).  q and m default to the 90% eigenvalue-share rule."""

    L: int = 10
    L0: int = 10
    L1: int = 10
    tau: Union[float, str, None] = None
    s: Union[float, str, None] = None
    q: Optional[int] = None
    m: Optional[int] = None
    evr: float = 0.9
    c0: float = 1.0
    smoother_order: int = 2
    n_boot: int = 20
    seed: int = 0

    def __post_init__(self):
        for name in ("L", "L0", "L1"):
            if int(getattr(self, name)) < 2:
                raise InputError(f"{name} must be at least 2")
        for name in ("tau", "s"):
            v = getattr(self, name)
            if isinstance(v, str) and v != "auto":
                raise InputError(f"{name} must be a number, None or 'auto'")
            if isinstance(v, (int, float)) and v < 0:
                raise InputError(f"{name} must be nonnegative")
        if self.q is not None and self.q < 1:
            raise InputError("q must be positive")
        if self.m is not None and self.m < 1:
            raise InputError("m must be positive")
        if not 0 < self.evr <= 1:
            raise InputError("evr must lie in (0, 1]")
        if self.smoother_order not in (2, 4):
            raise InputError("smoother_order must be 2 or 4")
        if self.n_boot < 2:
            raise InputError("n_boot must be at least 2")


MODEL_VERSION = "kernsdr-model/1"


@dataclass
class SdrModel:
    """Fitted reduction.  alphas columns are unitized (a' R a = 1); scores
    are the in-sample reduced coordinates R @ alphas."""

    kernel: KernelSpec
    x_train: np.ndarray
    row_means: np.ndarray
    grand_mean: float
    alphas: np.ndarray
    eigenvalues: np.ndarray
    scores: np.ndarray
    alphas_joint: np.ndarray
    eigenvalues_joint: np.ndarray
    joint_scores: np.ndarray
    tau: float
    s: float
    L: int
    L0: int
    L1: int
    q: int
    m: int
    slice_probs: np.ndarray
    bandwidth: float = 0.0
    smoother_order: int = 2
    km_fallbacks: int = 0

    @property
    def n(self) -> int:
        return self.x_train.shape[0]

    @property
    def p(self) -> int:
        return self.x_train.shape[1]

    def to_dict(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "kernel": {
                "family": self.kernel.family,
                "scale": self.kernel.scale,
                "offset": self.kernel.offset,
                "degree": self.kernel.degree,
            },
            "x_train": self.x_train.tolist(),
            "row_means": self.row_means.tolist(),
            "grand_mean": self.grand_mean,
            "alphas": self.alphas.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "scores": self.scores.tolist(),
            "alphas_joint": self.alphas_joint.tolist(),
            "eigenvalues_joint": self.eigenvalues_joint.tolist(),
            "joint_scores": self.joint_scores.tolist(),
            "tau": self.tau,
            "s": self.s,
            "L": self.L,
            "L0": self.L0,
            "L1": self.L1,
            "q": self.q,
            "m": self.m,
            "slice_probs": self.slice_probs.tolist(),
            "bandwidth": self.bandwidth,
            "smoother_order": self.smoother_order,
            "km_fallbacks": self.km_fallbacks,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SdrModel":
        if d.get("version") != MODEL_VERSION:
            raise InputError(f"unsupported model version: {d.get('version')!r}"
                             f" (expected {MODEL_VERSION})")
        try:
            k = d["kernel"]
            spec = KernelSpec(family=k["family"], scale=k["scale"],
                              offset=k["offset"], degree=k["degree"])
            return cls(
                kernel=spec,
                x_train=np.asarray(d["x_train"], dtype=float),
                row_means=np.asarray(d["row_means"], dtype=float),
                grand_mean=float(d["grand_mean"]),
                alphas=np.asarray(d["alphas"], dtype=float),
                eigenvalues=np.asarray(d["eigenvalues"], dtype=float),
                scores=np.asarray(d["scores"], dtype=float),
                alphas_joint=np.asarray(d["alphas_joint"], dtype=float),
                eigenvalues_joint=np.asarray(d["eigenvalues_joint"],
                                             dtype=float),
                joint_scores=np.asarray(d["joint_scores"], dtype=float),
                tau=float(d["tau"]),
                s=float(d["s"]),
                L=int(d["L"]),
                L0=int(d["L0"]),
                L1=int(d["L1"]),
                q=int(d["q"]),
                m=int(d["m"]),
                slice_probs=np.asarray(d["slice_probs"], dtype=float),
                bandwidth=float(d["bandwidth"]),
                smoother_order=int(d["smoother_order"]),
                km_fallbacks=int(d.get("km_fallbacks", 0)),
            )
        except KeyError as exc:
            raise InputError(f"model file missing field {exc}") from exc


def _spectral_reg(gm: GramMatrix) -> float:
    """Default ridge level: 0.05 * lambda_1(R^2) / n^2."""
    n = gm.centered.shape[0]
    top = float(np.linalg.eigvalsh(gm.centered)[-1])
    if top <= 0:
        raise NumericalError("centered Gram matrix is zero; no ridge scale "
                             "(are all covariate rows identical?)")
    return 0.05 * top ** 2 / n ** 2


def _select_and_unitize(gm, values, vectors, k, evr):
    if k is None:
        k = select_components(values, evr)
    if k > vectors.shape[1]:
        raise InputError(f"requested {k} directions but only "
                         f"{vectors.shape[1]} are available")
    cols = [unitize(vectors[:, j], gm.centered) for j in range(k)]
    return np.column_stack(cols), k


def _joint_directions(gm: GramMatrix, times, status, opts: FitOptions,
                      s: float):
    """Initial directions from double slicing on (time, status)."""
    _, q_joint = double_slice_q(times, status, count_censored=opts.L0,
                                count_event=opts.L1)
    values, vectors = reg_gen_eig(gm.centered, q_joint, s)
    a_joint, m = _select_and_unitize(gm, values, vectors, opts.m, opts.evr)
    return values, a_joint, m, gm.centered @ a_joint


def fit_joint(x, times, status, kernel: Optional[KernelSpec] = None,
              s: Optional[float] = None,
              options: Optional[FitOptions] = None):
    """Directions of the initial double-sliced problem only.

    Returns (alphas_joint, eigenvalues_joint) with eigenvalues truncated to
    the selected m columns.
    """
    opts = options if options is not None else FitOptions()
    data = SurvivalDataset(x, times, status)
    spec = resolve_spec(kernel if kernel is not None else KernelSpec(), data.x)
    gm = gram(data.x, spec)
    s_val = float(s) if s is not None else _spectral_reg(gm)
    values, a_joint, m, _ = _joint_directions(gm, data.times, data.status,
                                              opts, s_val)
    return a_joint, values[:m]


def _km_weight_fn(times, status):
    step_t, step_s = kaplan_meier(times, status)

    def w(t_prime, t):
        s0 = km_eval(step_t, step_s, t_prime)
        if s0 <= 0:
            return 0.0
        return min(km_eval(step_t, step_s, t) / s0, 1.0)

    return w


def censoring_weights(times, status, joint_scores, opts: FitOptions):
    """Per-observation weight callback w(t_prime, t, i), with a marginal
    Kaplan-Meier fallback when the local smoother has no support at i."""
    n = times.shape[0]
    sigma = float(np.mean(joint_scores.std(axis=0)))
    if sigma <= 0:
        sigma = 1.0
    h = bandwidth(n, order=opts.smoother_order, c0=opts.c0, sigma=sigma)
    coords = ReducedCoordinates(z=joint_scores, bandwidth=h,
                                order=opts.smoother_order)
    smoother = HazardSmoother(coords, times, status)
    km_w = _km_weight_fn(times, status)
    fallbacks = [0]

    def w_hat(t_prime, t, i):
        try:
            return smoother.weight_at(i, t)
        except LocalSupportError:
            fallbacks[0] += 1
            return km_w(t_prime, t)

    return w_hat, h, fallbacks


def weighted_q(times, status, opts: FitOptions, joint_scores):
    """Weighted-slice projection matrix for the final eigenproblem."""
    plan = make_slices(times, opts.L)
    if np.all(status == 1):
        mats = weighted_slice_matrices(times, status, plan, w_hat=None)
        return mats, 0.0, [0]
    w_hat, h, fallbacks = censoring_weights(times, status, joint_scores, opts)
    mats = weighted_slice_matrices(times, status, plan, w_hat=w_hat)
    return mats, h, fallbacks


def fit(x, times, status, kernel: Optional[KernelSpec] = None,
        options: Optional[FitOptions] = None) -> SdrModel:
    """Fit the full reduction and return a transformable model."""
    opts = options if options is not None else FitOptions()
    data = SurvivalDataset(x, times, status)
    spec = resolve_spec(kernel if kernel is not None else KernelSpec(), data.x)
    gm = gram(data.x, spec)

    s = opts.s
    if s == "auto":
        from .tuning import tune_joint

        s = tune_joint(data, spec, opts).selected
    elif s is None:
        s = _spectral_reg(gm)
    s = float(s)
    opts = replace(opts, s=s)

    joint_vals, a_joint, m, z_joint = _joint_directions(
        gm, data.times, data.status, opts, s)

    mats, h, fallbacks = weighted_q(data.times, data.status, opts, z_joint)

    tau = opts.tau
    if tau == "auto":
        from .tuning import tune

        tau = tune(data, spec, opts).selected
    elif tau is None:
        tau = _spectral_reg(gm)
    tau = float(tau)

    values, vectors = reg_gen_eig(gm.centered, mats.q, tau)
    a_hat, q = _select_and_unitize(gm, values, vectors, opts.q, opts.evr)

    return SdrModel(
        kernel=spec,
        x_train=data.x,
        row_means=gm.row_means,
        grand_mean=gm.grand_mean,
        alphas=a_hat,
        eigenvalues=values[:q],
        scores=gm.centered @ a_hat,
        alphas_joint=a_joint,
        eigenvalues_joint=joint_vals[:m],
        joint_scores=z_joint,
        tau=tau,
        s=s,
        L=opts.L,
        L0=opts.L0,
        L1=opts.L1,
        q=q,
        m=m,
        slice_probs=mats.probs,
        bandwidth=h,
        smoother_order=opts.smoother_order,
        km_fallbacks=fallbacks[0],
    )


def fit_dsir(x, times, status,
             options: Optional[FitOptions] = None) -> SdrModel:
    """Linear-kernel comparator: sliced inverse regression with the same
    double-slicing and censoring-weight machinery."""
    return fit(x, times, status, kernel=KernelSpec(family="linear"),
               options=options)


def transform(model: SdrModel, x_new) -> np.ndarray:
    """Score new covariate rows with a fitted model."""
    x_new = np.asarray(x_new, dtype=float)
    squeeze = x_new.ndim == 1
    if squeeze:
        x_new = x_new[None, :]
    if x_new.ndim != 2 or x_new.shape[1] != model.p:
        raise InputError(f"x_new must have {model.p} columns")
    k_centered = cross_kernel(model.x_train, model.kernel, x_new,
                              model.row_means, model.grand_mean)
    scores = np.atleast_2d(k_centered) @ model.alphas
    return scores[0] if squeeze else scores
