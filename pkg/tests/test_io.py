import json

import numpy as np
import pytest

from kernsdr.errors import InputError
from kernsdr.io import (
    read_dataset,
    read_matrix,
    read_table,
    remap_status,
    load_model,
    save_json,
    save_model,
    write_dataset,
    write_matrix,
)
from kernsdr.kernels import KernelSpec
from kernsdr.sdr import FitOptions, fit, transform


def sample_data(seed=0, n=30, p=3):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, p))
    times = np.exp(x[:, 0]) * rng.uniform(0.5, 1.5, size=n)
    status = rng.integers(0, 2, size=n)
    if np.unique(times[status == 1]).size < 2:
        status[:] = 1
    return times, status, x


def test_dataset_round_trip_exact(tmp_path):
    times, status, x = sample_data()
    path = tmp_path / "d.csv"
    write_dataset(path, times, status, x)
    t2, s2, x2 = read_dataset(path)
    np.testing.assert_array_equal(t2, times)
    np.testing.assert_array_equal(s2, status)
    np.testing.assert_array_equal(x2, x)


def test_dataset_round_trip_awkward_floats(tmp_path):
    times = np.array([1e-300, 1.0 + 2**-52, 1e300])
    status = np.array([1, 0, 1])
    x = np.array([[2**-1074], [np.pi], [1.0 / 3.0]])
    path = tmp_path / "d.csv"
    write_dataset(path, times, status, x)
    t2, s2, x2 = read_dataset(path)
    np.testing.assert_array_equal(t2, times)
    np.testing.assert_array_equal(x2, x)


def test_read_dataset_header_validation(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,x1,status\n1.0,2.0,1\n")
    with pytest.raises(InputError):
        read_dataset(path)
    path.write_text("time,status,x1,cov2\n1.0,1,2.0,3.0\n")
    with pytest.raises(InputError):
        read_dataset(path)
    path.write_text("time,status,x1\n")
    with pytest.raises(InputError):
        read_dataset(path)


def test_read_dataset_value_validation(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,status,x1\n1.0,1,oops\n")
    with pytest.raises(InputError):
        read_dataset(path)
    path.write_text("time,status,x1\n1.0,1,inf\n")
    with pytest.raises(InputError):
        read_dataset(path)
    path.write_text("time,status,x1\n-1.0,1,0.5\n")
    with pytest.raises(InputError):
        read_dataset(path)
    path.write_text("time,status,x1\n1.0,3,0.5\n")
    with pytest.raises(InputError):
        read_dataset(path)
    path.write_text("time,status,x1\n1.0,1,0.5,9.9\n")
    with pytest.raises(InputError):
        read_dataset(path)


def test_read_dataset_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_dataset(tmp_path / "absent.csv")


def test_remap_status_codings():
    np.testing.assert_array_equal(remap_status([0, 1, 1], "zero-one"),
                                  [0, 1, 1])
    np.testing.assert_array_equal(
        remap_status([1, 2, 2, 1], "censored1-dead2"), [0, 1, 1, 0])
    with pytest.raises(InputError):
        remap_status([0, 1], "censored1-dead2")
    with pytest.raises(InputError):
        remap_status([1, 2], "zero-one")
    with pytest.raises(InputError):
        remap_status([0, 1], "mystery")


def test_read_dataset_lung_coding(tmp_path):
    path = tmp_path / "lung.csv"
    path.write_text("time,status,x1\n10,1,0.5\n20,2,1.5\n")
    times, status, x = read_dataset(path, status_coding="censored1-dead2")
    np.testing.assert_array_equal(status, [0, 1])


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    a = rng.normal(size=(12, 4))
    path = tmp_path / "m.csv"
    write_matrix(path, a, prefix="u")
    b = read_matrix(path)
    np.testing.assert_array_equal(b, a)
    header, _ = read_table(path)
    assert header == ["u1", "u2", "u3", "u4"]


def test_matrix_vector_written_as_column(tmp_path):
    path = tmp_path / "v.csv"
    write_matrix(path, np.array([[1.5], [2.5]]))
    b = read_matrix(path)
    assert b.shape == (2, 1)


def test_read_matrix_width_mismatch(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("z1,z2\n1.0,2.0\n3.0\n")
    with pytest.raises(InputError):
        read_matrix(path)


def test_model_file_round_trip(tmp_path):
    times, status, x = sample_data(seed=2)
    model = fit(x, times, status, KernelSpec(family="gaussian"),
                FitOptions(q=2))
    path = tmp_path / "model.json"
    save_model(model, path)
    clone = load_model(path)
    grid = np.random.default_rng(3).normal(size=(9, x.shape[1]))
    np.testing.assert_allclose(transform(clone, grid),
                               transform(model, grid), atol=1e-12)


def test_load_model_rejects_bad_files(tmp_path):
    path = tmp_path / "model.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_model(path)
    path.write_text("[1, 2, 3]")
    with pytest.raises(InputError):
        load_model(path)
    path.write_text(json.dumps({"version": "kernsdr-model/0"}))
    with pytest.raises(InputError):
        load_model(path)
    with pytest.raises(InputError):
        load_model(tmp_path / "absent.json")


def test_save_json(tmp_path):
    path = tmp_path / "doc.json"
    save_json({"a": 1, "b": [1.5, 2.5]}, path)
    with open(path) as fh:
        assert json.load(fh) == {"a": 1, "b": [1.5, 2.5]}
