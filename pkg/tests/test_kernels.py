import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernsdr.errors import InputError
from kernsdr.kernels import (
    KernelSpec,
    cross_kernel,
    eval_kernel,
    gram,
    kernel_matrix,
    median_heuristic_scale,
    resolve_spec,
)


def random_matrix(seed, n=12, p=3):
    return np.random.default_rng(seed).standard_normal((n, p))


def test_unknown_family_rejected():
    with pytest.raises(InputError):
        KernelSpec("cubic")


def test_nonpositive_scale_rejected():
    with pytest.raises(InputError):
        KernelSpec("gaussian", scale=0.0)


def test_bad_polynomial_degree_rejected():
    with pytest.raises(InputError):
        KernelSpec("polynomial", degree=0)


def test_linear_kernel_is_dot_product():
    A = random_matrix(0)
    B = random_matrix(1, n=5)
    got = kernel_matrix(KernelSpec("linear"), A, B)
    np.testing.assert_allclose(got, A @ B.T, rtol=0, atol=1e-14)


def test_polynomial_kernel_matches_manual():
    A = random_matrix(2, n=6)
    B = random_matrix(3, n=4)
    got = kernel_matrix(KernelSpec("polynomial", offset=1.0, degree=2), A, B)
    np.testing.assert_allclose(got, (A @ B.T + 1.0) ** 2, atol=1e-12)


def test_gaussian_kernel_matches_manual():
    A = random_matrix(4, n=5)
    spec = KernelSpec("gaussian", scale=0.25)
    got = kernel_matrix(spec, A, A)
    d2 = ((A[:, None, :] - A[None, :, :]) ** 2).sum(-1)
    np.testing.assert_allclose(got, np.exp(-0.25 * d2), atol=1e-12)


def test_gaussian_without_scale_needs_resolution():
    A = random_matrix(5)
    with pytest.raises(InputError):
        kernel_matrix(KernelSpec("gaussian"), A, A)
    spec = resolve_spec(KernelSpec("gaussian"), A)
    assert spec.scale is not None and spec.scale > 0


def test_median_heuristic_on_crafted_points():
    # three points with pairwise squared distances 1, 4, 9 -> median 4
    x = np.array([[0.0], [1.0], [3.0]])
    assert median_heuristic_scale(x) == pytest.approx(1.0 / 4.0)


def test_median_heuristic_rejects_coincident_points():
    with pytest.raises(InputError):
        median_heuristic_scale(np.ones((4, 2)))


def test_eval_kernel_scalar_and_symmetry():
    s = np.array([1.0, -2.0])
    t = np.array([0.5, 1.5])
    spec = KernelSpec("polynomial")
    assert eval_kernel(spec, s, t) == pytest.approx((s @ t + 1.0) ** 2)
    assert eval_kernel(spec, s, t) == eval_kernel(spec, t, s)


def test_dimension_mismatch_rejected():
    with pytest.raises(InputError):
        kernel_matrix(KernelSpec("linear"), random_matrix(0, p=3),
                      random_matrix(1, p=4))


def test_nonfinite_input_rejected():
    A = random_matrix(6)
    A[0, 0] = np.nan
    with pytest.raises(InputError):
        gram(A, KernelSpec("linear"))


@given(st.integers(0, 1000), st.sampled_from(["linear", "polynomial", "gaussian"]))
@settings(max_examples=25, deadline=None)
def test_centered_gram_rows_sum_to_zero(seed, family):
    X = random_matrix(seed, n=9, p=2)
    g = gram(X, KernelSpec(family))
    np.testing.assert_allclose(g.centered.sum(axis=0), 0.0, atol=1e-8)
    np.testing.assert_allclose(g.centered.sum(axis=1), 0.0, atol=1e-8)


@given(st.integers(0, 1000))
@settings(max_examples=25, deadline=None)
def test_centered_gram_is_psd(seed):
    X = random_matrix(seed, n=10, p=3)
    g = gram(X, KernelSpec("gaussian"))
    vals = np.linalg.eigvalsh(g.centered)
    assert vals.min() >= -1e-8 * max(vals.max(), 1.0)


def test_cross_kernel_reproduces_in_sample_columns():
    X = random_matrix(7, n=10)
    for family in ("linear", "polynomial", "gaussian"):
        g = gram(X, KernelSpec(family))
        kc = cross_kernel(X, g.spec, X, g.row_means, g.grand_mean)
        np.testing.assert_allclose(kc, g.centered, atol=1e-10)


def test_cross_kernel_single_row():
    X = random_matrix(8, n=6)
    g = gram(X, KernelSpec("linear"))
    row = cross_kernel(X, g.spec, X[2], g.row_means, g.grand_mean)
    assert row.shape == (6,)
    np.testing.assert_allclose(row, g.centered[2], atol=1e-10)


def test_cross_kernel_checks_row_means_length():
    X = random_matrix(9, n=6)
    g = gram(X, KernelSpec("linear"))
    with pytest.raises(InputError):
        cross_kernel(X, g.spec, X, g.row_means[:-1], g.grand_mean)
