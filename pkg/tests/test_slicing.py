import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernsdr.errors import InputError, SliceDegeneracyError
from kernsdr.slicing import (
    SlicePlan,
    double_slice_q,
    make_slices,
    weighted_slice_matrices,
)


def test_two_slices_split_at_median():
    plan = make_slices(np.arange(1.0, 11.0), 2)
    assert plan.count == 2
    idx = plan.assign(np.arange(1.0, 11.0))
    assert (np.bincount(idx) == [5, 5]).all()


def test_quantile_slices_balanced():
    rng = np.random.default_rng(0)
    t = rng.uniform(size=100)
    plan = make_slices(t, 10)
    occ = np.bincount(plan.assign(t), minlength=plan.count)
    assert plan.count == 10
    assert (occ == 10).all()


def test_identical_times_degenerate():
    with pytest.raises(SliceDegeneracyError):
        make_slices(np.ones(20), 4)


def test_slice_count_validation():
    with pytest.raises(InputError):
        make_slices(np.arange(5.0), 1)
    with pytest.raises(InputError):
        make_slices(np.arange(3.0), 4)


def test_heavy_ties_fold_slices():
    t = np.array([1.0] * 8 + [2.0] * 8 + [3.0] * 4)
    plan = make_slices(t, 10)
    occ = np.bincount(plan.assign(t), minlength=plan.count)
    assert plan.count < 10
    assert (occ > 0).all()


def test_double_slice_two_cells():
    times = np.array([1.0, 2.0, 3.0, 4.0])
    status = np.array([0, 0, 1, 1])
    plan, qj = double_slice_q(times, status, 2, 2)
    # censored pair and event pair each form one cell of size 2
    assert plan.cell_count >= 2
    assert qj[2, 3] in (0.0, 0.5)
    np.testing.assert_allclose(qj.sum(axis=1), 1.0)


def test_double_slice_single_group_is_plain_slicing():
    times = np.arange(1.0, 21.0)
    status = np.ones(20, dtype=int)
    plan, qj = double_slice_q(times, status, 10, 4)
    assert plan.censored_plan is None
    assert plan.event_plan.count == 4
    np.testing.assert_allclose(np.trace(qj), 4.0, atol=1e-12)


def test_double_slice_all_in_one_cell():
    times = np.array([1.0, 1.0, 1.0])
    status = np.ones(3, dtype=int)
    _, qj = double_slice_q(times, status, 2, 2)
    np.testing.assert_allclose(qj, np.full((3, 3), 1.0 / 3.0))


def test_double_slice_empty_rejected():
    with pytest.raises(InputError):
        double_slice_q(np.empty(0), np.empty(0, dtype=int))


@given(st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_double_slice_projection_properties(seed):
    rng = np.random.default_rng(seed)
    n = 30
    times = rng.exponential(size=n) + 0.01
    status = rng.integers(0, 2, size=n)
    plan, qj = double_slice_q(times, status, 3, 4)
    np.testing.assert_allclose(qj, qj.T, atol=1e-15)
    np.testing.assert_allclose(qj @ qj, qj, atol=1e-12)
    assert np.trace(qj) == pytest.approx(plan.cell_count, abs=1e-12)


def indicator_oracle(times, plan):
    idx = plan.assign(times)
    W = np.zeros((times.size, plan.count))
    W[np.arange(times.size), idx] = 1.0
    return W


def test_zero_censoring_reduces_to_indicators():
    rng = np.random.default_rng(3)
    times = rng.uniform(size=50)
    status = np.ones(50, dtype=int)
    plan = make_slices(times, 5)
    mats = weighted_slice_matrices(times, status, plan)
    W = indicator_oracle(times, plan)
    np.testing.assert_array_equal(mats.weights, W)
    counts = W.sum(axis=0)
    np.testing.assert_allclose(mats.probs, counts / 50)
    # Q entries are exactly 1/n_l within a shared slice
    same = W @ W.T
    np.testing.assert_allclose(mats.q, same / counts[plan.assign(times)][:, None])


def test_censored_weight_telescopes_by_hand():
    # boundaries at 2 and 4; censored subject at t=1 with w(1,2)=0.6, w(1,4)=0.15
    times = np.array([1.0, 1.5, 2.5, 3.0, 4.5, 5.0])
    status = np.array([0, 1, 1, 1, 1, 1])
    plan = SlicePlan(boundaries=np.array([2.0, 4.0]), count=3)

    def w_hat(t_prime, t, i):
        assert i == 0
        return {2.0: 0.6, 4.0: 0.15}[round(t, 6)]

    mats = weighted_slice_matrices(times, status, plan, w_hat)
    np.testing.assert_allclose(mats.weights[0], [0.4, 0.45, 0.15], atol=1e-12)
    # event rows stay exact indicators
    np.testing.assert_array_equal(mats.weights[1], [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(mats.weights[4], [0.0, 0.0, 1.0])


def test_rows_sum_to_one_and_probs_normalized():
    rng = np.random.default_rng(9)
    times = rng.uniform(0.1, 3.0, size=40)
    status = rng.integers(0, 2, size=40)

    def w_hat(t_prime, t, i):
        return float(np.exp(-(t - t_prime)))

    plan = make_slices(times, 6)
    mats = weighted_slice_matrices(times, status, plan, w_hat)
    np.testing.assert_allclose(mats.weights.sum(axis=1), 1.0, atol=1e-8)
    assert mats.probs.sum() == pytest.approx(1.0, abs=1e-8)
    vals = np.linalg.eigvalsh(mats.q)
    assert vals.min() >= -1e-10


def test_censored_data_requires_weight_function():
    times = np.array([1.0, 2.0, 3.0, 4.0])
    status = np.array([0, 1, 1, 1])
    plan = make_slices(times, 2)
    with pytest.raises(InputError):
        weighted_slice_matrices(times, status, plan)


def test_nonmonotone_weights_clamped():
    times = np.array([0.5, 1.5, 2.5, 3.5, 4.5])
    status = np.array([0, 1, 1, 1, 1])
    plan = make_slices(times, 5)

    calls = iter([0.2, 0.9, 0.9, 0.9])  # increasing w would give negative mass

    def w_hat(t_prime, t, i):
        return next(calls)

    mats = weighted_slice_matrices(times, status, plan, w_hat)
    assert (mats.weights >= 0).all()
    np.testing.assert_allclose(mats.weights.sum(axis=1), 1.0, atol=1e-8)


def test_weighted_rows_recover_marginal_survival():
    # with exponential event and censoring times, true conditional survival is
    # memoryless; averaged tail sums of the weight rows estimate P(T >= t)
    rng = np.random.default_rng(42)
    n = 2000
    t_true = rng.exponential(size=n)
    c = rng.exponential(size=n)
    obs = np.minimum(t_true, c)
    status = (t_true <= c).astype(int)

    def w_hat(t_prime, t, i):
        return float(np.exp(-(t - t_prime)))

    plan = make_slices(obs, 5)
    mats = weighted_slice_matrices(obs, status, plan, w_hat)
    for k, b in enumerate(mats.plan.boundaries):
        g_bar = mats.weights[:, k + 1:].sum(axis=1).mean()
        assert abs(g_bar - np.exp(-b)) < 0.05


@given(st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_weight_rows_telescope_for_random_data(seed):
    rng = np.random.default_rng(seed)
    n = 25
    times = rng.uniform(0.05, 2.0, size=n)
    status = rng.integers(0, 2, size=n)
    rate = rng.uniform(0.5, 2.0)

    def w_hat(t_prime, t, i):
        return float(np.exp(-rate * (t - t_prime)))

    plan = make_slices(times, 4)
    mats = weighted_slice_matrices(times, status, plan, w_hat)
    np.testing.assert_allclose(mats.weights.sum(axis=1), 1.0, atol=1e-8)
    assert mats.probs.min() > 0
