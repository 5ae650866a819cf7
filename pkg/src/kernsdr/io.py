"""CSV and JSON readers/writers.

Datasets are CSV with header `time,status,x1,...,xp`; score/truth matrices
are CSV with a single header row; models and tuning results are JSON.
Floats are written with 17 significant digits so round-trips are lossless at
double precision.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import InputError
from .sdr import SdrModel

STATUS_CODINGS = ("zero-one", "censored1-dead2")


def _fmt(v) -> str:
    return "%.17g" % float(v)


def _read_rows(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise InputError(f"{path}: need a header row and at least one data "
                         "row")
    return [c.strip() for c in rows[0]], rows[1:]


def _numeric(rows, path):
    try:
        body = np.array(rows, dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric value in data rows "
                         f"({exc})") from exc
    if not np.all(np.isfinite(body)):
        raise InputError(f"{path}: non-finite value in data rows")
    return body


def remap_status(raw, coding: str):
    """Map a raw status column to the internal 0=censored / 1=event coding."""
    raw = np.asarray(raw, dtype=float)
    if coding == "zero-one":
        if not np.all(np.isin(raw, (0.0, 1.0))):
            raise InputError("status must be 0 or 1 (or pass "
                             "--status-coding censored1-dead2)")
        return raw.astype(int)
    if coding == "censored1-dead2":
        if not np.all(np.isin(raw, (1.0, 2.0))):
            raise InputError("status must be 1 (censored) or 2 (dead) under "
                             "censored1-dead2 coding")
        return (raw == 2.0).astype(int)
    raise InputError(f"unknown status coding {coding!r}; choose from "
                     f"{STATUS_CODINGS}")


def read_dataset(path, status_coding: str = "zero-one"):
    """Read a dataset CSV; returns (times, status, x)."""
    header, rows = _read_rows(path)
    if len(header) < 3 or header[0] != "time" or header[1] != "status":
        raise InputError(f"{path}: header must be time,status,x1,...,xp")
    want = [f"x{j}" for j in range(1, len(header) - 1)]
    if header[2:] != want:
        raise InputError(f"{path}: covariate columns must be named "
                         f"x1,...,x{len(header) - 2}")
    body = _numeric(rows, path)
    if body.shape[1] != len(header):
        raise InputError(f"{path}: row width does not match header")
    times = body[:, 0]
    status = remap_status(body[:, 1], status_coding)
    if np.any(times <= 0):
        raise InputError(f"{path}: times must be positive")
    return times, status, body[:, 2:]


def write_dataset(path, times, status, x) -> None:
    times = np.asarray(times, dtype=float)
    status = np.asarray(status, dtype=int)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "status"] +
                   [f"x{j}" for j in range(1, x.shape[1] + 1)])
        for i in range(x.shape[0]):
            w.writerow([_fmt(times[i]), str(int(status[i]))] +
                       [_fmt(v) for v in x[i]])


def read_matrix(path):
    """Read a score/truth/covariate matrix CSV (one header row)."""
    header, rows = _read_rows(path)
    body = _numeric(rows, path)
    if body.shape[1] != len(header):
        raise InputError(f"{path}: row width does not match header")
    return body


def write_matrix(path, a, prefix: str = "z") -> None:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"{prefix}{j}" for j in range(1, a.shape[1] + 1)])
        for row in a:
            w.writerow([_fmt(v) for v in row])


def read_table(path):
    """Generic CSV with named columns; returns (header list, string rows)."""
    return _read_rows(path)


def save_model(model: SdrModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh)


def load_model(path) -> SdrModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return SdrModel.from_dict(doc)


def save_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
