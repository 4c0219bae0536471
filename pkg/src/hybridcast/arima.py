"""ARIMA modelling: differencing, OLS/CSS estimation, AIC order selection and
one-step-ahead forecasting.

The ARMA part follows the sign convention::

    w_t = c + sum_i ar_i w_{t-i} + eps_t - sum_j ma_j eps_{t-j}

where ``w`` is the ``d``-times differenced series.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import comb

from . import kernels
from .errors import (BoundsError, ConfigurationError, ConvergenceError,
                     DegenerateInputError, NumericalError, RankError)
from .series import as_array
from .stats import adf_test


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int
    random_walk: bool = False

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ConfigurationError("ARIMA orders must be nonnegative")
        if self.d > 2:
            raise ConfigurationError("differencing order above 2 is not supported")
        if self.random_walk:
            if (self.p, self.d, self.q) != (0, 1, 0):
                raise ConfigurationError("the random walk is ARIMA(0,1,0)")
        elif self.p + self.q < 1:
            raise ConfigurationError("p + q must be at least 1 (use ArimaOrder.rw() for a random walk)")

    @classmethod
    def rw(cls):
        return cls(0, 1, 0, random_walk=True)

    @classmethod
    def parse(cls, text: str) -> "ArimaOrder":
        """Parse ``"p,d,q"`` or ``"rw"``."""
        text = text.strip().lower()
        if text in ("rw", "random_walk", "random-walk"):
            return cls.rw()
        try:
            p, d, q = (int(v) for v in text.split(","))
        except ValueError:
            raise ConfigurationError(f"cannot parse ARIMA order {text!r}") from None
        return cls(p, d, q)

    def __str__(self):
        return "rw" if self.random_walk else f"{self.p},{self.d},{self.q}"


@dataclass(frozen=True)
class ArimaModel:
    order: ArimaOrder
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    intercept: float = 0.0
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sigma2: float = float("nan")
    history_tail: np.ndarray = field(default_factory=lambda: np.zeros(0))
    aic: float = float("nan")
    nonstationary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ar_coeffs", np.asarray(self.ar_coeffs, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "ma_coeffs", np.asarray(self.ma_coeffs, dtype=np.float64).reshape(-1))
        if self.ar_coeffs.shape[0] != self.order.p or self.ma_coeffs.shape[0] != self.order.q:
            raise ConfigurationError("coefficient counts do not match the order")


def difference(series, d: int) -> np.ndarray:
    """Apply ``d`` first differences."""
    x = as_array(series)
    if d < 0 or d > 2:
        raise BoundsError("d must be in 0..2")
    if d > x.shape[0] - 1:
        raise BoundsError(f"cannot difference {x.shape[0]} points {d} times")
    return np.diff(x, n=d) if d else x.copy()


def undifference(diffed, seeds) -> np.ndarray:
    """Invert :func:`difference` given the first ``d`` original values."""
    w = np.asarray(diffed, dtype=np.float64)
    seeds = np.asarray(seeds, dtype=np.float64).reshape(-1)
    d = seeds.shape[0]
    if d == 0:
        return w.copy()
    # first value of each intermediate difference level, from the seeds
    heads = [np.diff(seeds, n=k)[0] for k in range(d)]
    out = w
    for k in range(d - 1, -1, -1):
        out = np.concatenate(([heads[k]], heads[k] + np.cumsum(out)))
    return out


def _ar_nonstationary(ar) -> bool:
    if ar.shape[0] == 0:
        return False
    roots = np.roots(np.concatenate((-ar[::-1], [1.0])))
    return bool(np.any(np.abs(roots) <= 1.0 + 1e-10))


def _ols_ar(w, p):
    n = w.shape[0]
    rows = n - p
    X = np.ones((rows, p + 1))
    for i in range(p):
        X[:, i + 1] = w[p - i - 1:n - i - 1]
    y = w[p:]
    coef, _, rank, sv = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1] or sv[-1] <= sv[0] * 1e-12:
        raise RankError(f"AR({p}) design matrix is rank deficient")
    return coef[0], coef[1:]


def _css(params, w, p, q):
    eps = kernels.arma_residuals(w, params[0], params[1:1 + p], params[1 + p:])
    e = eps[p:]
    return float(e @ e) / e.shape[0]


def fit(series, order: ArimaOrder, max_iter: int = 500) -> ArimaModel:
    """Fit an ARIMA model to ``series``.

    Pure AR orders are estimated by OLS on the lagged design; orders with
    ``q > 0`` minimise the conditional sum of squares with BFGS, starting
    from the OLS AR estimate and ``ma = 0``.
    """
    x = as_array(series)
    if order.random_walk:
        resid = np.diff(x)
        return ArimaModel(order, np.zeros(0), np.zeros(0), 0.0, resid,
                          float(np.mean(resid ** 2)) if resid.size else float("nan"),
                          x[-1:].copy())
    p, d, q = order.p, order.d, order.q
    if x.shape[0] < 10 * (p + q + 1):
        warnings.warn(f"fitting ARIMA{(p, d, q)} on only {x.shape[0]} points", stacklevel=2)
    w = difference(x, d)
    if w.shape[0] <= p + q + 1:
        raise BoundsError(f"{w.shape[0]} differenced points are too few for ARIMA{(p, d, q)}")
    if np.ptp(w) == 0.0:
        raise RankError("series is constant after differencing")

    if p > 0:
        c0, ar0 = _ols_ar(w, p)
    else:
        c0, ar0 = float(np.mean(w)), np.zeros(0)
    if q == 0:
        c, ar, ma = float(c0), ar0, np.zeros(0)
    else:
        x0 = np.concatenate(([c0], ar0, np.zeros(q)))
        res = minimize(_css, x0, args=(w, p, q), method="BFGS",
                       options={"maxiter": max_iter, "gtol": 1e-8})
        best = res.x
        if not np.all(np.isfinite(best)) or not np.isfinite(res.fun):
            raise ConvergenceError(f"CSS produced non-finite estimates for ARIMA{(p, d, q)}", best=best)
        if res.status == 1:
            raise ConvergenceError(
                f"CSS did not converge in {max_iter} iterations for ARIMA{(p, d, q)}", best=best)
        c, ar, ma = float(best[0]), best[1:1 + p], best[1 + p:]

    eps = kernels.arma_residuals(w, c, ar, ma)[p:]
    n_eff = eps.shape[0]
    ssr = float(eps @ eps)
    k = p + q + 1
    sigma2 = ssr / max(n_eff - k, 1)
    aic = n_eff * math.log(max(ssr, 1e-300) / n_eff) + 2.0 * k
    flag = _ar_nonstationary(ar)
    if flag:
        warnings.warn(f"ARIMA{(p, d, q)} fit has AR roots on or inside the unit circle", stacklevel=2)
    tail = x[-(max(p, q, d) + d):].copy() if max(p, q, d) + d else x[:0].copy()
    return ArimaModel(order, ar, ma, c, eps, sigma2, tail, aic, flag)


def _aic_grid(w, p_max, q_max, max_iter):
    table = []
    for p in range(p_max + 1):
        for q in range(q_max + 1):
            if p + q == 0:
                continue
            # condition every candidate on the same p_max leading points
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    m = fit(w[p_max - p:], ArimaOrder(p, 0, q), max_iter=max_iter)
            except NumericalError:
                continue
            table.append((m.aic, p + q, p, q))
    table.sort()
    return table


def aic_ranking(series, p_max: int, q_max: int, d: int = 0, max_iter: int = 500):
    """All feasible ``(aic, p, q)`` on the ``d``-differenced series, best first."""
    w = difference(series, d)
    return [(a, p, q) for a, _, p, q in _aic_grid(w, p_max, q_max, max_iter)]


def choose_d(series, d_max: int, threshold: float = 0.05) -> int:
    """Smallest ``d <= d_max`` whose differenced series rejects a unit root."""
    x = as_array(series)
    for d in range(d_max + 1):
        w = difference(x, d)
        try:
            if adf_test(w).p_value < threshold:
                return d
        except DegenerateInputError:
            return d
    return d_max


def select_order(series, p_max: int, d_max: int, q_max: int, max_iter: int = 500) -> ArimaOrder:
    """Box-Jenkins style order choice.

    ``d`` is the smallest differencing order whose ADF p-value is below 0.05
    (``d_max`` if none); ``(p, q)`` minimises AIC over the grid, ties going to
    smaller ``p + q`` and then smaller ``p``.
    """
    if min(p_max, d_max, q_max) < 0:
        raise ConfigurationError("order bounds must be nonnegative")
    if p_max + q_max == 0:
        raise ConfigurationError("empty (p, q) grid")
    x = as_array(series)
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("cannot select an order for a constant series")
    d = choose_d(x, d_max)
    table = _aic_grid(difference(x, d), p_max, q_max, max_iter)
    if not table:
        raise ConfigurationError("no order in the grid could be fitted")
    _, _, p, q = table[0]
    return ArimaOrder(p, d, q)


def predict_path(model: ArimaModel, series) -> np.ndarray:
    """One-step predictions for every index of ``series`` plus the next one.

    Element ``t`` of the result (length ``n + 1``) forecasts ``y_t`` from
    ``y_0..y_{t-1}``; entries without enough history are NaN.
    """
    y = as_array(series)
    n = y.shape[0]
    out = np.full(n + 1, np.nan)
    if model.order.random_walk:
        out[1:] = y
        return out
    p, d = model.order.p, model.order.d
    w = np.diff(y, n=d) if d else y
    nw = w.shape[0]
    if nw < p:
        return out
    eps = kernels.arma_residuals(w, model.intercept, model.ar_coeffs, model.ma_coeffs)
    what = np.full(nw + 1, np.nan)
    what[p:nw] = w[p:] - eps[p:]
    nxt = model.intercept
    for i in range(p):
        nxt += model.ar_coeffs[i] * w[nw - i - 1]
    for j in range(model.order.q):
        if nw - j - 1 >= p:
            nxt -= model.ma_coeffs[j] * eps[nw - j - 1]
    what[nw] = nxt
    # integrate back: yhat_t = what_{t-d} + sum_k (-1)^(k+1) C(d,k) y_{t-k}
    t = np.arange(d, n + 1)
    level = np.zeros(t.shape[0])
    for k in range(1, d + 1):
        level += (-1) ** (k + 1) * comb(d, k, exact=True) * y[t - k]
    out[d:] = what + level
    return out


def forecast_one_step(model: ArimaModel, history=None) -> float:
    """Forecast the value following ``history`` (default: the training tail)."""
    if history is None:
        if model.order.q > 0:
            raise BoundsError("an MA model needs the full history to rebuild residuals")
        history = model.history_tail
    y = as_array(history)
    need = max(model.order.p + model.order.d, model.order.d) + model.order.q
    if model.order.random_walk:
        need = 1
    if y.shape[0] < max(need, 1):
        raise BoundsError(f"need at least {max(need, 1)} observations, got {y.shape[0]}")
    return float(predict_path(model, y)[-1])


def rolling_forecast(model: ArimaModel, series, start: int) -> np.ndarray:
    """One-step forecasts of ``series[start:]``, each from the actual past."""
    return predict_path(model, series)[start:-1]


def random_walk_forecast(history) -> float:
    y = as_array(history)
    if y.shape[0] == 0:
        raise BoundsError("random walk needs at least one observation")
    return float(y[-1])


def simulate(ar, ma=(), n: int = 1000, rng=None, intercept: float = 0.0,
             sigma: float = 1.0, burn: int = 500) -> np.ndarray:
    """Draw an ARMA path in the same sign convention as :func:`fit`."""
    rng = np.random.default_rng(rng)
    ar = np.asarray(ar, dtype=np.float64)
    ma = np.asarray(ma, dtype=np.float64)
    e = rng.normal(0.0, sigma, n + burn)
    y = np.zeros(n + burn)
    for t in range(n + burn):
        v = intercept + e[t]
        for i in range(ar.shape[0]):
            if t - i - 1 >= 0:
                v += ar[i] * y[t - i - 1]
        for j in range(ma.shape[0]):
            if t - j - 1 >= 0:
                v -= ma[j] * e[t - j - 1]
        y[t] = v
    return y[burn:]
