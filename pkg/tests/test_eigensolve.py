import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernsdr.eigensolve import reg_gen_eig, select_components, unitize
from kernsdr.errors import DegenerateDirectionError, InputError, NumericalError


def random_pencil(seed, n=8):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    R = A @ A.T
    B = rng.standard_normal((n, 4))
    Q = B @ B.T
    return R, Q


def dense_oracle(R, Q, tau):
    n = R.shape[0]
    M = R @ Q @ R
    S = R @ R + n * n * tau * np.eye(n)
    vals = np.linalg.eigvals(np.linalg.solve(S, M))
    return np.sort(vals.real)[::-1]


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_eigenvalues_match_dense_oracle(seed):
    R, Q = random_pencil(seed)
    vals, _ = reg_gen_eig(R, Q, tau=0.05)
    ref = dense_oracle(R, Q, 0.05)
    np.testing.assert_allclose(vals, ref, rtol=1e-8, atol=1e-10)


def test_eigenvectors_satisfy_pencil():
    R, Q = random_pencil(3)
    n = R.shape[0]
    vals, vecs = reg_gen_eig(R, Q, tau=0.01)
    M = R @ Q @ R
    S = R @ R + n * n * 0.01 * np.eye(n)
    for j in range(n):
        resid = M @ vecs[:, j] - vals[j] * (S @ vecs[:, j])
        assert np.linalg.norm(resid) < 1e-8 * max(vals[0], 1.0)


def test_values_nonincreasing_nonnegative():
    R, Q = random_pencil(11)
    vals, _ = reg_gen_eig(R, Q, tau=0.1)
    assert (np.diff(vals) <= 1e-12).all()
    assert vals.min() >= 0.0


def test_top_k_selection():
    R, Q = random_pencil(5)
    vals_all, vecs_all = reg_gen_eig(R, Q, tau=0.2)
    vals_k, vecs_k = reg_gen_eig(R, Q, tau=0.2, k=3)
    np.testing.assert_allclose(vals_k, vals_all[:3])
    np.testing.assert_allclose(vecs_k, vecs_all[:, :3])


def test_sign_convention_deterministic():
    R, Q = random_pencil(7)
    _, v1 = reg_gen_eig(R, Q, tau=0.05)
    _, v2 = reg_gen_eig(R, Q, tau=0.05)
    np.testing.assert_array_equal(v1, v2)
    idx = np.argmax(np.abs(v1), axis=0)
    assert (v1[idx, np.arange(v1.shape[1])] > 0).all()


def test_rank_deficient_needs_positive_tau():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((8, 3))
    R = A @ A.T  # rank 3
    Q = np.eye(8)
    with pytest.raises(NumericalError):
        reg_gen_eig(R, Q, tau=0.0)
    vals, _ = reg_gen_eig(R, Q, tau=1e-6)
    assert np.isfinite(vals).all()


def test_regularization_shrinks_eigenvalues():
    R, Q = random_pencil(13)
    small, _ = reg_gen_eig(R, Q, tau=1e-9)
    large, _ = reg_gen_eig(R, Q, tau=10.0)
    assert (large <= small + 1e-9).all()


def test_shape_and_k_validation():
    R, Q = random_pencil(1)
    with pytest.raises(InputError):
        reg_gen_eig(R[:, :4], Q, tau=0.1)
    with pytest.raises(InputError):
        reg_gen_eig(R, Q, tau=-1.0)
    with pytest.raises(InputError):
        reg_gen_eig(R, Q, tau=0.1, k=9)


def test_unitize_normalizes_gram_norm():
    R, _ = random_pencil(2)
    a = np.random.default_rng(4).standard_normal(8)
    u = unitize(a, R)
    assert u @ R @ u == pytest.approx(1.0, abs=1e-10)


def test_unitize_rejects_null_direction():
    R = np.zeros((4, 4))
    with pytest.raises(DegenerateDirectionError):
        unitize(np.ones(4), R)


def test_select_components_ninety_percent_rule():
    assert select_components([5.0, 4.0, 1.0], threshold=0.9) == 2
    assert select_components([10.0, 0.0, 0.0]) == 1
    assert select_components([1.0, 1.0, 1.0, 1.0], threshold=1.0) == 4


def test_select_components_degenerate_total():
    assert select_components([0.0, 0.0]) == 1


def test_select_components_validation():
    with pytest.raises(InputError):
        select_components([])
    with pytest.raises(InputError):
        select_components([1.0], threshold=0.0)
