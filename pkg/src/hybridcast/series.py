"""Time series container, log transforms, splitting and CSV ingestion."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import BoundsError, DomainError, ShapeError

TRANSFORMS = ("none", "log-natural", "log-base10")


@dataclass(frozen=True)
class TimeSeries:
    """Ordered finite observations with optional strictly increasing labels.

    ``transform`` records the last transform applied so that
    :func:`inverse_transform` can undo it.
    """

    values: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = ""
    transform: str = "none"

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise ShapeError("values must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DomainError(f"non-finite value at index {bad}", index=bad)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.array(self.labels)
            if labels.shape != values.shape:
                raise ShapeError("labels must have the same length as values")
            if labels.size > 1 and not np.all(labels[1:] > labels[:-1]):
                raise ShapeError("labels must be strictly increasing")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)
        if self.transform not in TRANSFORMS:
            raise ValueError(f"unknown transform tag {self.transform!r}")

    def __len__(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def with_values(self, values, transform=None):
        return TimeSeries(values, self.labels, self.name,
                          self.transform if transform is None else transform)


def as_array(series) -> np.ndarray:
    """Float view of a :class:`TimeSeries` or any 1-d array-like."""
    if isinstance(series, TimeSeries):
        return series.values
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError("expected a 1-d series")
    return arr


def apply_transform(series: TimeSeries, kind: str) -> TimeSeries:
    """Apply ``kind`` elementwise and record it in the transform tag."""
    if kind not in TRANSFORMS:
        raise ValueError(f"unknown transform {kind!r}; expected one of {TRANSFORMS}")
    if series.transform != "none" and kind != "none":
        raise ValueError(f"series already carries transform {series.transform!r}")
    y = series.values
    if kind == "none":
        return series
    nonpos = np.flatnonzero(y <= 0)
    if nonpos.size:
        i = int(nonpos[0])
        raise DomainError(f"{kind} needs positive values; value {y[i]!r} at index {i}", index=i)
    out = np.log(y) if kind == "log-natural" else np.log10(y)
    return series.with_values(out, transform=kind)


def inverse_transform(series: TimeSeries) -> TimeSeries:
    if series.transform == "log-natural":
        return series.with_values(np.exp(series.values), transform="none")
    if series.transform == "log-base10":
        return series.with_values(np.power(10.0, series.values), transform="none")
    return series


@dataclass(frozen=True)
class SplitSpec:
    train_len: int
    validation_fraction: float = 0.2

    def __post_init__(self):
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")


def split(series: TimeSeries, spec: SplitSpec | int):
    """Cut into (train, test) at ``train_len``; concatenating them restores the input."""
    train_len = spec if isinstance(spec, int) else spec.train_len
    n = len(series)
    if not 1 <= train_len < n:
        raise BoundsError(f"train_len must be in [1, {n - 1}], got {train_len}")
    lab = series.labels
    train = TimeSeries(series.values[:train_len], None if lab is None else lab[:train_len],
                       series.name, series.transform)
    test = TimeSeries(series.values[train_len:], None if lab is None else lab[train_len:],
                      series.name, series.transform)
    return train, test


def validation_cut(n_rows: int, fraction: float) -> int:
    """Index where the trailing validation slice of ``n_rows`` starts."""
    n_val = int(math.floor(n_rows * fraction + 1e-9))
    return n_rows - n_val


def read_csv(path, name: str | None = None) -> TimeSeries:
    """Read a ``label,value`` CSV with a header row.

    Integer labels become ints, other numeric labels floats, the rest strings.
    """
    path = Path(path)
    labels: list = []
    values: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["label", "value"]:
            raise ValueError(f"{path}: expected header 'label,value', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {row}")
            try:
                values.append(float(row[1]))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: cannot parse value {row[1]!r}") from None
            labels.append(row[0].strip())
    if not values:
        raise ValueError(f"{path}: no observations")
    lab = np.array(labels)
    for cast in (int, float):
        try:
            lab = np.array([cast(x) for x in labels])
            break
        except ValueError:
            continue
    return TimeSeries(values, lab, name or path.stem)


def write_csv(path, columns: dict[str, Sequence[float]], labels: Sequence | None = None):
    """Write equal-length columns with a leading ``label`` column."""
    names = list(columns)
    n = len(next(iter(columns.values())))
    if any(len(c) != n for c in columns.values()):
        raise ShapeError("columns must share one length")
    if labels is None:
        labels = range(n)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["label", *names])
        for i, lab in enumerate(labels):
            w.writerow([lab, *(repr(float(columns[k][i])) for k in names)])
