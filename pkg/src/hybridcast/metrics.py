"""Forecast accuracy metrics (MAE, MSE, MASE)."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import DegenerateInputError, ShapeError

METRICS = ("mae", "mse", "mase")


@dataclass(frozen=True)
class MetricReport:
    mae: float
    mse: float
    mase: float
    n: int

    def as_dict(self):
        return asdict(self)

    def __getitem__(self, key):
        return getattr(self, key)


def evaluate(actual, forecast) -> MetricReport:
    """Score one-step forecasts against actuals.

    MASE scales the summed absolute error by the summed absolute first
    differences of the actuals over the same window::

        MASE = (n - 1) / n * sum|e_t| / sum_{t>=2} |y_t - y_{t-1}|
    """
    y = np.asarray(actual, dtype=np.float64)
    f = np.asarray(forecast, dtype=np.float64)
    if y.shape != f.shape or y.ndim != 1:
        raise ShapeError(f"actual {y.shape} and forecast {f.shape} must be equal-length 1-d")
    n = y.shape[0]
    if n < 2:
        raise ShapeError("need at least two points to evaluate")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(f))):
        raise ValueError("actual and forecast must be finite")
    e = y - f
    abs_sum = np.abs(e).sum()
    naive = np.abs(np.diff(y)).sum()
    if naive == 0.0:
        raise DegenerateInputError("MASE denominator is zero: actual series is constant")
    return MetricReport(
        mae=float(abs_sum / n),
        mse=float((e * e).sum() / n),
        mase=float((n - 1) / n * abs_sum / naive),
        n=n,
    )


def summarize(reports):
    """Mean and population std of each metric over a list of reports."""
    arr = {k: np.array([r[k] for r in reports], dtype=np.float64) for k in METRICS}
    mean = {k: float(v.mean()) for k, v in arr.items()}
    std = {k: float(v.std()) for k, v in arr.items()}
    return mean, std
