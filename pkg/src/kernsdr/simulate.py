"""Generators for four synthetic right-censored designs with censoring rates
calibrated by bisection on the censoring scale c.

Model 1: probit time in a single linear index, censoring by a shifted
uniform.  Model 2: proportional-hazards time in two linear indices.  Model 3:
scaled squared-norm time, censoring through a squared sine-sum index.
Model 4: hazard driven by a sine-square sum plus a Gaussian-bump shift.
Models 3/4 sum their signal over the first min(p, 50) coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import CalibrationError, InputError
from .kernels import KernelSpec
from .sdr import SurvivalDataset

MODELS = (1, 2, 3, 4)
_CAL_N = 20000
_TINY_TIME = 1e-10
_SIGNAL_DIM = 50


@dataclass(frozen=True)
class SimSpec:
    model: int
    n_train: int = 100
    n_test: int = 200
    p: int = 50
    target_censoring: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise InputError(f"model must be one of {MODELS}")
        if self.n_train < 10:
            raise InputError("n_train must be at least 10")
        if self.n_test < 1:
            raise InputError("n_test must be at least 1")
        if not 0 <= self.target_censoring <= 0.9:
            raise InputError("target_censoring must lie in [0, 0.9]")
        if self.model in (1, 2) and self.p < 20:
            raise InputError("models 1 and 2 need p >= 20 "
                             "(coefficient patterns)")
        if self.p < 1:
            raise InputError("p must be positive")


@dataclass(frozen=True)
class SimOutput:
    train: SurvivalDataset
    test_x: np.ndarray
    truth_train: np.ndarray
    truth_test: np.ndarray
    c_used: float
    censoring_achieved: float


def beta_vectors(model: int, p: int):
    """Coefficient pair for models 1 and 2; None for models 3 and 4.

    beta1: pattern over the first p-10 coordinates, last 10 zero (model 1
    repeats (1, 0, -1, 0), model 2 repeats (1, -1)); beta2: zero on the first
    10 coordinates, then (1, -1) repeating.  Both divided by 5.
    """
    if model not in MODELS:
        raise InputError(f"model must be one of {MODELS}")
    if model in (3, 4):
        return None
    if p < 20:
        raise InputError("models 1 and 2 need p >= 20")
    b1 = np.zeros(p)
    head = p - 10
    if model == 1:
        pattern = np.array([1.0, 0.0, -1.0, 0.0])
    else:
        pattern = np.array([1.0, -1.0])
    b1[:head] = np.resize(pattern, head)
    b2 = np.zeros(p)
    b2[10:] = np.resize(np.array([1.0, -1.0]), p - 10)
    return b1 / 5.0, b2 / 5.0


def default_kernel(model: int) -> KernelSpec:
    """Kernel used for each design in the reference experiments."""
    if model in (1, 2):
        return KernelSpec(family="linear")
    if model == 3:
        return KernelSpec(family="polynomial", scale=1.0, offset=1.0,
                          degree=2)
    if model == 4:
        return KernelSpec(family="gaussian")
    raise InputError(f"model must be one of {MODELS}")


def _signal(x):
    k = min(x.shape[1], _SIGNAL_DIM)
    head = x[:, :k]
    return {
        "sumsq": (head ** 2).sum(axis=1),
        "sinsum": np.sin(head).sum(axis=1),
        "sin2sum": (np.sin(head / 2.0) ** 2).sum(axis=1),
        "fullsq": (x ** 2).sum(axis=1),
    }


def _draw(p, n, rng):
    x = rng.standard_normal((n, p))
    # keep u off 0 so -log(u) and u-scaled times stay finite and positive
    u = np.maximum(rng.uniform(size=n), 1e-15)
    v = rng.uniform(size=n)
    return x, u, v


def _event_times(model, x, u, betas):
    sig = _signal(x)
    if model == 1:
        return ndtr(u * (x @ betas[0]))
    if model == 2:
        rate = np.exp(x @ betas[0]) + np.exp(x @ betas[1])
        return -np.log(u) / rate
    if model == 3:
        return u * sig["sumsq"]
    return -np.log(u) / sig["sin2sum"] + np.exp(-0.5 * sig["fullsq"])


def _censor_times(model, x, v, c, betas):
    # c < 0 is meaningful only for model 1 (shifts the uniform downward);
    # all censoring times are clamped positive
    if not np.isfinite(c):
        return np.full(x.shape[0], np.inf)
    if model == 1:
        return np.maximum(ndtr(x @ betas[1]) + c * v, _TINY_TIME)
    if model == 3:
        return np.maximum(c * v * _signal(x)["sinsum"] ** 2, _TINY_TIME)
    return np.maximum(c * v, _TINY_TIME)


def truth_matrix(model: int, x) -> np.ndarray:
    """Analytic reduced coordinates for each design (recomputable from x)."""
    sig = _signal(x)
    if model == 1:
        b1, _ = beta_vectors(1, x.shape[1])
        return (x @ b1)[:, None]
    if model == 2:
        b1, b2 = beta_vectors(2, x.shape[1])
        return np.column_stack([x @ b1, x @ b2])
    if model == 3:
        return np.column_stack([sig["sumsq"], sig["sinsum"] ** 2])
    if model == 4:
        return np.column_stack([sig["sin2sum"], sig["fullsq"]])
    raise InputError(f"model must be one of {MODELS}")


def _calibrate(model, p, target, seed):
    """Bisection on c against a fixed 20000-draw calibration sample (common
    random numbers make the censored fraction monotone nonincreasing in c)."""
    rng = np.random.default_rng(seed)
    x, u, v = _draw(p, _CAL_N, rng)
    betas = beta_vectors(model, p)
    t = _event_times(model, x, u, betas)

    def frac(c):
        return float(np.mean(_censor_times(model, x, v, c, betas) < t))

    if model == 1:
        lo, hi = -1.0, 1.0
        for _ in range(60):
            if frac(lo) >= target:
                break
            lo *= 2
        for _ in range(60):
            if frac(hi) <= target:
                break
            hi *= 2
    else:
        lo, hi = 1e-12, 1.0
        for _ in range(60):
            if frac(hi) <= target:
                break
            hi *= 2
    f_lo, f_hi = frac(lo), frac(hi)
    if f_lo < f_hi:
        raise CalibrationError(
            f"censored fraction not monotone on bracket: frac({lo})={f_lo}, "
            f"frac({hi})={f_hi}")
    if not f_lo >= target >= f_hi:
        raise CalibrationError(
            f"cannot bracket target {target}: achievable range "
            f"[{f_hi:.4f}, {f_lo:.4f}] for model {model}")
    mid, f = lo, f_lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        f = frac(mid)
        if abs(f - target) <= 0.005:
            return float(mid), f
        if f > target:
            lo = mid
        else:
            hi = mid
    if abs(f - target) > 0.02:
        raise CalibrationError(
            f"bisection stalled at c={mid} with censored fraction {f:.4f} "
            f"(target {target})")
    return float(mid), f


def calibrate_c(model: int, p: int, target: float, seed: int = 0) -> float:
    """Censoring scale c whose censored fraction is within 0.005 of target."""
    if not 0 < target <= 0.9:
        raise InputError("target must lie in (0, 0.9]")
    if model not in MODELS:
        raise InputError(f"model must be one of {MODELS}")
    return _calibrate(model, p, target, seed)[0]


def generate(spec: SimSpec, c: float = None,
             achieved: float = None) -> SimOutput:
    """Draw a calibrated train/test pair with analytic truth matrices.

    Passing a precomputed c (from calibrate_c) skips calibration;
    censoring_achieved is always the calibration-sample estimate, not the
    small-sample train fraction.
    """
    ss = np.random.SeedSequence(spec.seed)
    seed_cal, seed_train, seed_test = ss.spawn(3)
    betas = beta_vectors(spec.model, spec.p)

    if spec.target_censoring == 0:
        c_used, ach = np.inf, 0.0
    elif c is not None:
        c_used = float(c)
        if achieved is not None:
            ach = float(achieved)
        else:
            rng = np.random.default_rng(seed_cal)
            x, u, v = _draw(spec.p, _CAL_N, rng)
            t = _event_times(spec.model, x, u, betas)
            cc = _censor_times(spec.model, x, v, c_used, betas)
            ach = float(np.mean(cc < t))
    else:
        c_used, ach = _calibrate(spec.model, spec.p, spec.target_censoring,
                                 seed_cal)

    x_tr, u_tr, v_tr = _draw(spec.p, spec.n_train,
                             np.random.default_rng(seed_train))
    t_tr = _event_times(spec.model, x_tr, u_tr, betas)
    c_tr = _censor_times(spec.model, x_tr, v_tr, c_used, betas)
    times = np.minimum(t_tr, c_tr)
    status = (t_tr <= c_tr).astype(int)

    x_te = np.random.default_rng(seed_test).standard_normal(
        (spec.n_test, spec.p))

    return SimOutput(
        train=SurvivalDataset(x_tr, times, status),
        test_x=x_te,
        truth_train=truth_matrix(spec.model, x_tr),
        truth_test=truth_matrix(spec.model, x_te),
        c_used=float(c_used),
        censoring_achieved=ach,
    )
