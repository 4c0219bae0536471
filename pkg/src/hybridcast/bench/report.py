"""Result emission: CSV and JSON tables plus SVG actual-vs-forecast plots."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .experiment import ResultTable

FORMATS = ("csv", "json", "svg")


def _fmt(x):
    return repr(float(x))


def write_table_csv(table: ResultTable, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "method", "metric", "mean", "std"])
        for (d, m, k), (mu, sd) in sorted(table.cells.items()):
            w.writerow([d, m, k, _fmt(mu), _fmt(sd)])


def read_table_csv(path) -> dict:
    """Cells of a table written by :func:`write_table_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {(r["dataset"], r["method"], r["metric"]): (float(r["mean"]), float(r["std"]))
            for r in rows}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_table_json(table: ResultTable, path):
    cells = [{"dataset": d, "method": m, "metric": k, "mean": mu, "std": sd}
             for (d, m, k), (mu, sd) in sorted(table.cells.items())]
    errors = [{"dataset": d, "method": m, "error": e} for (d, m), e in sorted(table.errors.items())]
    diags = {f"{d}/{m}": v for (d, m), v in sorted(table.diagnostics.items())}
    doc = {"provenance": table.provenance, "cells": cells, "errors": errors,
           "diagnostics": diags}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def svg_plot(actual, forecast, title="", width=640, height=320) -> str:
    """Two-path line chart: actual (black) and forecast (red dashed)."""
    a = np.asarray(actual, dtype=float)
    f = np.asarray(forecast, dtype=float)
    pad = 40
    lo = float(min(a.min(), f.min()))
    hi = float(max(a.max(), f.max()))
    span = hi - lo if hi > lo else 1.0
    n = max(a.shape[0] - 1, 1)

    def path(v):
        pts = []
        for i, y in enumerate(v):
            px = pad + (width - 2 * pad) * i / n
            py = height - pad - (height - 2 * pad) * (y - lo) / span
            pts.append(f"{'M' if i == 0 else 'L'}{px:.2f},{py:.2f}")
        return " ".join(pts)

    esc = title.replace("&", "&amp;").replace("<", "&lt;")
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n'
            f'<text x="{pad}" y="20" font-family="sans-serif" font-size="13">{esc}</text>\n'
            f'<path d="{path(a)}" fill="none" stroke="black" stroke-width="1.5"/>\n'
            f'<path d="{path(f)}" fill="none" stroke="#c0392b" stroke-width="1.5" '
            f'stroke-dasharray="5,3"/>\n</svg>\n')


def emit_report(table: ResultTable, out_dir, formats=FORMATS, stem="results") -> list:
    """Write the requested formats under ``out_dir``; returns the paths written."""
    if not table.cells and not table.errors:
        raise ConfigurationError("refusing to emit an empty result table")
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ConfigurationError(f"unknown report formats {sorted(bad)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out / f"{stem}.csv"
        write_table_csv(table, p)
        written.append(p)
    if "json" in formats:
        p = out / f"{stem}.json"
        write_table_json(table, p)
        written.append(p)
    if "svg" in formats:
        plots = out / "plots"
        plots.mkdir(exist_ok=True)
        for (d, m), (actual, fc) in sorted(table.series.items()):
            p = plots / f"{d}_{m}.svg"
            p.write_text(svg_plot(actual, fc, f"{d} / {m}"), encoding="utf-8")
            written.append(p)
    return written
