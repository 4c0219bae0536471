"""Command-line entry point.

Exit status: 0 on success, 2 for configuration or input errors, 3 for
numerical failures.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
import warnings
from pathlib import Path

from . import arima as _arima
from . import decomposition as _dec
from .bench.datasets import BUILTIN, descriptor, load_dataset
from .bench.experiment import OUTPUT_DIR_ENV, load_config, run_experiment
from .bench.report import emit_report
from .errors import ConfigurationError, NumericalError
from .hybrids import METHODS, PipelineSpec, emd_wrap, run_pipeline
from .series import TRANSFORMS, apply_transform, read_csv, split
from .stats import adf_test

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _load(source, transform):
    """A CSV path or the name of a built-in dataset."""
    if source in BUILTIN and not Path(source).exists():
        ts = load_dataset(descriptor(source))
        if transform not in (None, "none"):
            raise ConfigurationError("built-in datasets carry their own transform")
        return ts, descriptor(source)
    ts = read_csv(source)
    if transform:
        ts = apply_transform(ts, transform)
    return ts, None


def _out(args):
    if getattr(args, "out", None):
        return open(args.out, "w", newline="", encoding="utf-8")
    return contextlib.nullcontext(sys.stdout)


def _arch(text):
    try:
        n, h = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"architecture must look like NxH, got {text!r}") from None
    return n, h


def _order(text):
    try:
        return _arima.ArimaOrder.parse(text)
    except (ValueError, ConfigurationError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_adf(args):
    ts, _ = _load(args.source, args.transform)
    autolag = None if args.autolag == "none" else args.autolag
    res = adf_test(ts, max_lag=args.max_lag, autolag=autolag)
    print(json.dumps({"statistic": res.statistic, "p_value": res.p_value,
                      "lags_used": res.lags_used, "n_obs": res.n_obs}, indent=2))
    return EXIT_OK


def cmd_decompose(args):
    ts, _ = _load(args.source, args.transform)
    y = ts.values
    info = {}
    if args.rule == "adf":
        m, p = _dec.find_ma_length_adf(y, args.threshold, args.m_max)
        info = {"m": m, "adf_p": p}
    elif args.rule == "kurtosis":
        m = _dec.find_ma_length_kurtosis(y, args.m_max)
        info = {"m": m}
    elif args.rule.startswith("fixed:"):
        try:
            m = int(args.rule.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad rule {args.rule!r}") from None
        info = {"m": m}
    else:
        raise ConfigurationError("rule must be adf, kurtosis or fixed:<m>")
    dec = _dec.ma_filter(y, m)
    labels = ts.labels[dec.offset:] if ts.labels is not None else range(dec.offset, len(y))
    with _out(args) as fh:
        _write_columns(fh, {"linear": dec.linear, "residual": dec.residual}, labels)
    print(json.dumps(info), file=sys.stderr)
    return EXIT_OK


def _write_columns(fh, columns, labels):
    w = csv.writer(fh, lineterminator="\n")
    names = list(columns)
    w.writerow(["label", *names])
    for i, lab in enumerate(labels):
        w.writerow([lab, *(repr(float(columns[k][i])) for k in names)])


def cmd_emd(args):
    ts, _ = _load(args.source, args.transform)
    cfg = _dec.EmdConfig(sd_threshold=args.sd, max_sift_iters=args.max_sifts,
                         max_imfs=args.max_imfs)
    res = _dec.emd(ts, cfg)
    cols = {f"imf{i + 1}": imf for i, imf in enumerate(res.imfs)}
    cols["residue"] = res.residue
    labels = ts.labels if ts.labels is not None else range(len(ts))
    with _out(args) as fh:
        _write_columns(fh, cols, labels)
    print(json.dumps({"n_imfs": len(res.imfs), "sift_counts": res.sift_counts}), file=sys.stderr)
    return EXIT_OK


def _spec_from_args(args, desc):
    kw = dict(runs=args.runs, seed_base=args.seed)
    if args.order is not None:
        kw["arima_order"] = args.order
    elif desc is not None and desc.fixed_arima_order is not None and args.method in (
            "arima", "zhang", "khashei_bijari"):
        kw["arima_order"] = desc.fixed_arima_order
    if args.arch is not None:
        kw["ann_arch"] = args.arch
    elif desc is not None and args.method == "ann" and desc.fixed_ann_arch is not None:
        kw["ann_arch"] = desc.fixed_ann_arch
    if args.rule is not None:
        kw["ma_rule"] = args.rule
    if args.method == "proposed":
        if args.lags is not None:
            kw["proposed_lags"] = tuple(int(x) for x in args.lags.split(","))
        elif desc is not None and desc.proposed_lags is not None:
            kw["proposed_lags"] = desc.proposed_lags
        if args.rule is None and desc is not None and desc.fixed_ma_length is not None:
            kw["ma_rule"] = f"fixed:{desc.fixed_ma_length}"
    return PipelineSpec(args.method, **kw)


def _train_len(args, desc, n):
    if args.train_len is not None:
        return args.train_len
    if desc is not None:
        return desc.split_point(n)
    return int(n * 0.8)


def cmd_fit(args):
    ts, desc = _load(args.source, args.transform)
    if args.method == "arima":
        cut = _train_len(args, desc, len(ts)) if args.train_len or desc else len(ts)
        y = ts.values[:cut]
        order = args.order or (desc.fixed_arima_order if desc else None) \
            or _arima.select_order(y, 6, 2, 2)
        model = _arima.fit(y, order)
        print(json.dumps({"order": str(order), "intercept": model.intercept,
                          "ar": model.ar_coeffs.tolist(), "ma": model.ma_coeffs.tolist(),
                          "sigma2": model.sigma2, "aic": model.aic,
                          "nonstationary": model.nonstationary}, indent=2))
        return EXIT_OK
    train, test = split(ts, _train_len(args, desc, len(ts)))
    res = run_pipeline(train, test, _spec_from_args(args, desc))
    print(json.dumps({"method": args.method, "metrics": res.mean, "std": res.std,
                      "diagnostics": res.diagnostics}, indent=2, default=str))
    return EXIT_OK


def cmd_forecast(args):
    ts, desc = _load(args.source, args.transform)
    train, test = split(ts, _train_len(args, desc, len(ts)))
    spec = _spec_from_args(args, desc)
    res = emd_wrap(spec, train, test, causal=args.causal) if args.emd \
        else run_pipeline(train, test, spec)
    labels = test.labels if test.labels is not None else range(len(train), len(ts))
    with _out(args) as fh:
        _write_columns(fh, {"actual": test.values, "forecast": res.mean_forecast}, labels)
    print(json.dumps({"metrics": res.mean, "std": res.std}), file=sys.stderr)
    return EXIT_OK


def cmd_bench(args):
    out = args.out or os.environ.get(OUTPUT_DIR_ENV)
    cfg = load_config(args.config, runs=args.runs, seed_base=args.seed,
                      use_emd=True if args.emd else None, output_dir=out)

    def progress(key, res):
        if not args.quiet:
            print(f"{key[0]:>10} {key[1]:<15} " + " ".join(
                f"{k}={v:.6g}" for k, v in res.mean.items()), file=sys.stderr)

    table = run_experiment(cfg, progress=progress)
    for (d, m), err in sorted(table.errors.items()):
        print(f"{d}/{m}: {err}", file=sys.stderr)
    if not table.cells:
        print("no cell could be computed", file=sys.stderr)
        return EXIT_NUMERIC
    paths = emit_report(table, cfg.output_dir, formats=args.formats.split(","))
    print(f"wrote {len(paths)} files to {cfg.output_dir}", file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="hybridcast", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("source", help="label,value CSV file or built-in dataset name")
        sp.add_argument("--transform", choices=TRANSFORMS, default=None)

    sp = sub.add_parser("adf", help="augmented Dickey-Fuller test")
    source(sp)
    sp.add_argument("--max-lag", type=int, default=None)
    sp.add_argument("--autolag", choices=("t-stat", "aic", "none"), default="t-stat")
    sp.set_defaults(func=cmd_adf)

    sp = sub.add_parser("decompose", help="moving-average split into linear and residual parts")
    source(sp)
    sp.add_argument("--rule", default="adf", help="adf, kurtosis or fixed:<m>")
    sp.add_argument("--threshold", type=float, default=0.05)
    sp.add_argument("--m-max", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("emd", help="empirical mode decomposition")
    source(sp)
    sp.add_argument("--sd", type=float, default=0.2)
    sp.add_argument("--max-sifts", type=int, default=100)
    sp.add_argument("--max-imfs", type=int, default=16)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_emd)

    for name, func, helptext in (("fit", cmd_fit, "fit a model and report diagnostics"),
                                 ("forecast", cmd_forecast, "rolling one-step test forecasts")):
        sp = sub.add_parser(name, help=helptext)
        source(sp)
        sp.add_argument("--method", choices=METHODS, required=True)
        sp.add_argument("--order", type=_order, default=None, help="p,d,q or rw")
        sp.add_argument("--arch", type=_arch, default=None, help="NxH")
        sp.add_argument("--rule", default=None, help="adf, kurtosis or fixed:<m>")
        sp.add_argument("--lags", default=None, help="a,b for the proposed method")
        sp.add_argument("--train-len", type=int, default=None)
        sp.add_argument("--runs", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        if name == "forecast":
            sp.add_argument("--emd", action="store_true")
            sp.add_argument("--causal", action="store_true",
                            help="re-decompose at every forecast origin")
            sp.add_argument("--out", default=None)
        sp.set_defaults(func=func)

    sp = sub.add_parser("bench", help="run an experiment config and write reports")
    sp.add_argument("--config", required=True)
    sp.add_argument("--emd", action="store_true")
    sp.add_argument("--runs", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_DIR_ENV})")
    sp.add_argument("--formats", default="csv,json,svg")
    sp.add_argument("--quiet", action="store_true")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            if not sys.warnoptions:
                warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, IndexError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
