"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 numerical/degeneracy error,
4 partial benchmark failure (some replicates or cells discarded).
A config file of key=value lines can preload any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import io
from .association import kaplan_meier, rmae
from .benchmark import BenchConfig, format_table, run, write_csv
from .errors import InputError, KernsdrError, NumericalError
from .kernels import FAMILIES, KernelSpec
from .sdr import (
    FitOptions,
    SurvivalDataset,
    fit,
    fit_dsir,
    transform,
)
from .simulate import SimSpec, generate
from .tuning import tune, tune_joint


def _float_or_auto(text):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number or 'auto', got {text!r}")


def _int_or_auto(text):
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer or 'auto', got {text!r}")


def _csv_floats(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list {text!r}")


def _csv_ints(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list {text!r}")


def _csv_strs(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("KERNSDR_THREADS", "1")))
    except ValueError:
        return 1


def _add_kernel_flags(p, default_family=None):
    p.add_argument("--kernel", choices=FAMILIES, default=default_family,
                   help="kernel family (default: %(default)s)")
    p.add_argument("--scale", type=float, default=None,
                   help="kernel scale (gaussian default: median heuristic)")
    p.add_argument("--offset", type=float, default=1.0,
                   help="polynomial offset")
    p.add_argument("--degree", type=int, default=2, help="polynomial degree")


def _add_fit_flags(p):
    p.add_argument("--tau", type=_float_or_auto, default=None,
                   help="final ridge level, a number or 'auto'")
    p.add_argument("--s", type=_float_or_auto, default=None,
                   help="initial-stage ridge level, a number or 'auto'")
    p.add_argument("--L", type=int, default=10, help="slices, weighted stage")
    p.add_argument("--L0", type=int, default=10, help="censored-group slices")
    p.add_argument("--L1", type=int, default=10, help="event-group slices")
    p.add_argument("--q", type=_int_or_auto, default=None,
                   help="direction count, an integer or 'auto' (90%% rule)")
    p.add_argument("--m", type=_int_or_auto, default=None,
                   help="initial-stage direction count or 'auto'")
    p.add_argument("--c0", type=float, default=1.0,
                   help="bandwidth constant for the hazard smoother")
    p.add_argument("--order", type=int, choices=(2, 4), default=2,
                   help="smoother kernel order")
    p.add_argument("--n-boot", type=int, default=20,
                   help="bootstrap replicates for 'auto' tuning")
    p.add_argument("--seed", type=int, default=0)


def _kernel_from_args(args):
    if args.kernel is None:
        return None
    return KernelSpec(family=args.kernel, scale=args.scale,
                      offset=args.offset, degree=args.degree)


def _options_from_args(args) -> FitOptions:
    return FitOptions(L=args.L, L0=args.L0, L1=args.L1, tau=args.tau,
                      s=args.s, q=args.q, m=args.m, c0=args.c0,
                      smoother_order=args.order, n_boot=args.n_boot,
                      seed=args.seed)


def _load_dataset(args):
    times, status, x = io.read_dataset(args.dataset,
                                       status_coding=args.status_coding)
    return SurvivalDataset(x, times, status)


def cmd_simulate(args) -> int:
    spec = SimSpec(model=args.model, n_train=args.n_train,
                   n_test=args.n_test, p=args.p,
                   target_censoring=args.censoring, seed=args.seed)
    out = generate(spec)
    train_path = f"{args.out_prefix}_train.csv"
    test_path = f"{args.out_prefix}_test.csv"
    truth_path = f"{args.out_prefix}_truth.csv"
    io.write_dataset(train_path, out.train.times, out.train.status,
                     out.train.x)
    io.write_matrix(test_path, out.test_x, prefix="x")
    io.write_matrix(truth_path, out.truth_test, prefix="u")
    print(f"wrote {train_path}, {test_path}, {truth_path}")
    print(f"achieved censoring: {out.censoring_achieved:.4f}")
    return 0


def cmd_fit(args) -> int:
    data = _load_dataset(args)
    model = fit(data.x, data.times, data.status,
                kernel=_kernel_from_args(args),
                options=_options_from_args(args))
    io.save_model(model, args.out)
    print(f"wrote {args.out}")
    print(f"q={model.q} m={model.m} tau={model.tau:.6g} s={model.s:.6g} "
          f"km_fallbacks={model.km_fallbacks}")
    return 0


def cmd_transform(args) -> int:
    model = io.load_model(args.model)
    header, _ = io.read_table(args.data)
    if header[:2] == ["time", "status"]:
        _, _, x = io.read_dataset(args.data,
                                  status_coding=args.status_coding)
    else:
        x = io.read_matrix(args.data)
    scores = transform(model, x)
    io.write_matrix(args.out, scores, prefix="z")
    print(f"wrote {args.out}")
    return 0


def cmd_tune(args) -> int:
    data = _load_dataset(args)
    kern = _kernel_from_args(args)
    opts = _options_from_args(args)
    if args.param == "tau":
        res = tune(data, kern, opts)
    else:
        res = tune_joint(data, kern, opts)
    io.save_json(res.to_dict(), args.out)
    print(f"wrote {args.out}")
    print(f"selected {args.param}={res.selected:.6g} "
          f"(discarded {res.discarded}/{res.B})")
    return 0


def cmd_evaluate(args) -> int:
    a = io.read_matrix(args.scores_a)
    b = io.read_matrix(args.scores_b)
    res = rmae(a, b)
    if args.out:
        io.save_json(res.to_dict(), args.out)
        print(f"wrote {args.out}")
    print(f"rmae: {res.value:.10g}")
    return 0


def cmd_km(args) -> int:
    header, rows = io.read_table(args.dataset)
    for col in ("time", "status"):
        if col not in header:
            raise InputError(f"{args.dataset}: missing column {col!r}")
    t_idx = header.index("time")
    s_idx = header.index("status")
    if args.group_col is not None:
        if args.group_col not in header:
            raise InputError(f"{args.dataset}: no column named "
                             f"{args.group_col!r}")
        g_idx = header.index(args.group_col)
        labels = [r[g_idx] for r in rows]
    else:
        labels = ["all"] * len(rows)
    try:
        times = np.array([float(r[t_idx]) for r in rows])
        raw_status = np.array([float(r[s_idx]) for r in rows])
    except ValueError as exc:
        raise InputError(f"{args.dataset}: non-numeric time/status "
                         f"({exc})") from exc
    status = io.remap_status(raw_status, args.status_coding)
    if np.any(~np.isfinite(times)) or np.any(times <= 0):
        raise InputError(f"{args.dataset}: times must be positive and finite")

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["group", "time", "survival"])
        for grp in sorted(set(labels)):
            mask = np.array([lab == grp for lab in labels])
            step_t, step_s = kaplan_meier(times[mask], status[mask])
            for t, s in zip(step_t, step_s):
                w.writerow([grp, "%.17g" % t, "%.17g" % s])
    print(f"wrote {args.out}")
    return 0


def cmd_benchmark(args) -> int:
    sim = SimSpec(model=args.model, n_train=args.n_train, n_test=args.n_test,
                  p=args.p, target_censoring=0.0, seed=0)
    fit_opts = FitOptions(L=args.L, L0=args.L0, L1=args.L1, tau=args.tau,
                          s=args.s, c0=args.c0, smoother_order=args.order,
                          n_boot=args.n_boot, seed=args.seed)
    config = BenchConfig(sim=sim, methods=args.methods,
                         kernel=_kernel_from_args(args),
                         replications=args.reps, q_values=args.q_values,
                         censoring_levels=args.censoring_levels,
                         seed=args.seed, threads=args.threads,
                         fit_options=fit_opts)
    table = run(config)
    write_csv(table, args.out)
    print(format_table(table))
    print(f"wrote {args.out}")
    if table.any_failed or table.total_discards > 0:
        print(f"warning: {table.total_discards} replicate(s) discarded",
              file=sys.stderr)
        return 4
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kernsdr",
        description="Kernel sufficient dimension reduction for censored "
                    "survival data")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    p.add_argument("--model", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--n-train", type=int, default=100)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--censoring", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", default="sim")
    p.set_defaults(func=cmd_simulate)
    subparsers["simulate"] = p

    p = sub.add_parser("fit", help="fit a reduction model")
    p.add_argument("dataset")
    _add_kernel_flags(p, default_family=None)
    _add_fit_flags(p)
    p.add_argument("--status-coding", choices=io.STATUS_CODINGS,
                   default="zero-one")
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=cmd_fit)
    subparsers["fit"] = p

    p = sub.add_parser("transform", help="score new rows with a model")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--status-coding", choices=io.STATUS_CODINGS,
                   default="zero-one")
    p.add_argument("--out", default="scores.csv")
    p.set_defaults(func=cmd_transform)
    subparsers["transform"] = p

    p = sub.add_parser("tune", help="bootstrap-select a ridge level")
    p.add_argument("dataset")
    p.add_argument("--param", choices=("tau", "s"), default="tau")
    _add_kernel_flags(p)
    _add_fit_flags(p)
    p.add_argument("--status-coding", choices=io.STATUS_CODINGS,
                   default="zero-one")
    p.add_argument("--out", default="tuning.json")
    p.set_defaults(func=cmd_tune)
    subparsers["tune"] = p

    p = sub.add_parser("evaluate", help="RMAE between two score matrices")
    p.add_argument("scores_a")
    p.add_argument("scores_b")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)
    subparsers["evaluate"] = p

    p = sub.add_parser("km", help="Kaplan-Meier step functions per group")
    p.add_argument("dataset")
    p.add_argument("--group-col", default=None)
    p.add_argument("--status-coding", choices=io.STATUS_CODINGS,
                   default="zero-one")
    p.add_argument("--out", default="km.csv")
    p.set_defaults(func=cmd_km)
    subparsers["km"] = p

    p = sub.add_parser("benchmark", help="Monte Carlo comparison table")
    p.add_argument("--model", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--methods", type=_csv_strs, default=("rdsir", "dsir"))
    _add_kernel_flags(p)
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--q-values", type=_csv_ints, default=(1, 2))
    p.add_argument("--censoring-levels", type=_csv_floats,
                   default=(0.0, 0.2, 0.4, 0.6))
    p.add_argument("--n-train", type=int, default=100)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--tau", type=_float_or_auto, default=None)
    p.add_argument("--s", type=_float_or_auto, default=None)
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--L0", type=int, default=10)
    p.add_argument("--L1", type=int, default=10)
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--order", type=int, choices=(2, 4), default=2)
    p.add_argument("--n-boot", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out", default="benchmark.csv")
    p.set_defaults(func=cmd_benchmark)
    subparsers["benchmark"] = p

    for name, sp in subparsers.items():
        sp.add_argument("--config", default=None,
                        help="key=value file preloading any flag of this "
                             "subcommand; explicit flags win")
    return parser, subparsers


def _read_config_file(path) -> dict:
    cfg = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise InputError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                cfg[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return cfg


def _config_path_from_argv(argv):
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise InputError("--config needs a path")
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(subparser, cfg_path):
    cfg = _read_config_file(cfg_path)
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, text in cfg.items():
        if key not in actions:
            raise InputError(f"config key {key!r} matches no flag of this "
                             "subcommand")
        action = actions[key]
        try:
            value = action.type(text) if action.type is not None else text
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise InputError(f"config key {key!r}: {exc}") from exc
        if action.choices is not None and value not in action.choices:
            raise InputError(f"config key {key!r}: {value!r} not in "
                             f"{tuple(action.choices)}")
        defaults[key] = value
    subparser.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        if argv and argv[0] in subparsers:
            cfg_path = _config_path_from_argv(argv[1:])
            if cfg_path is not None:
                _apply_config(subparsers[argv[0]], cfg_path)
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except KernsdrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
