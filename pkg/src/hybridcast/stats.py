"""Stationarity and shape statistics: ADF test, kurtosis, ACF and PACF."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import BoundsError, DegenerateInputError, InsufficientDataError
from .series import as_array

# MacKinnon (1994) response-surface coefficients for a single I(1) series,
# large-p and small-p polynomials in the tau statistic (MacKinnon 2010 scaling).
_TAU = {
    "n": dict(max=math.inf, min=-19.04, star=-1.04,
              smallp=(0.6344, 1.2378, 0.032496),
              largep=(0.4797, 0.93557, -0.06999, 0.033066)),
    "c": dict(max=2.74, min=-18.83, star=-1.61,
              smallp=(2.1659, 1.4412, 0.038269),
              largep=(1.7339, 0.93202, -0.12745, -0.010368)),
    "ct": dict(max=0.7, min=-16.18, star=-2.89,
               smallp=(3.2512, 1.6047, 0.049588),
               largep=(2.5261, 0.61654, -0.37956, -0.060285)),
}

_T_STAT_STOP = 1.6448536269514722  # one-sided 5% normal quantile


def mackinnon_pvalue(stat: float, regression: str = "c") -> float:
    """Approximate asymptotic p-value of a Dickey-Fuller tau statistic."""
    tab = _TAU[regression]
    if stat > tab["max"]:
        return 1.0
    if stat < tab["min"]:
        return 0.0
    coef = tab["smallp"] if stat <= tab["star"] else tab["largep"]
    z = sum(c * stat ** i for i, c in enumerate(coef))
    return float(ndtr(z))


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    p_value: float
    lags_used: int
    n_obs: int
    regression: str = "c"

    def stationary(self, threshold: float = 0.05) -> bool:
        return self.p_value < threshold


def _ols(y, X):
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        return None
    resid = y - X @ coef
    return coef, float(resid @ resid)


def _adf_design(x, lags, start, regression):
    dx = np.diff(x)
    rows = np.arange(start, dx.shape[0])
    cols = [x[rows]]
    cols += [dx[rows - k] for k in range(1, lags + 1)]
    if regression in ("c", "ct"):
        cols.append(np.ones(rows.shape[0]))
    if regression == "ct":
        cols.append(rows.astype(np.float64) + 1.0)
    return dx[rows], np.column_stack(cols)


def adf_test(series, max_lag: int | None = None, autolag: str | None = "t-stat",
             regression: str = "c") -> AdfResult:
    """Augmented Dickey-Fuller unit-root test.

    Regresses ``diff(y)_t`` on ``y_{t-1}``, lagged differences and a
    constant. With ``autolag`` set, the lag order is searched over
    ``0..max_lag`` on a common sample: ``"aic"`` keeps the minimum-AIC order,
    ``"t-stat"`` drops lags from ``max_lag`` until the last one is
    significant at 5%. ``max_lag`` defaults to ``floor(12 (n/100)^0.25)``.
    """
    if regression not in _TAU:
        raise ValueError(f"regression must be one of {tuple(_TAU)}")
    x = as_array(series)
    n = x.shape[0]
    if n < 2 or np.ptp(x) == 0.0:
        raise InsufficientDataError("ADF test needs a nonconstant series")
    ntrend = {"n": 0, "c": 1, "ct": 2}[regression]
    if max_lag is None:
        max_lag = int(math.floor(12.0 * (n / 100.0) ** 0.25))
        max_lag = max(0, min(max_lag, n // 2 - ntrend - 1))
    if max_lag < 0:
        raise BoundsError("max_lag must be nonnegative")
    if n < 10 + max_lag:
        raise InsufficientDataError(f"ADF test needs at least {10 + max_lag} points, got {n}")

    if autolag is None:
        lag = max_lag
    else:
        method = autolag.lower()
        if method == "aic":
            best = None
            for k in range(max_lag + 1):
                y, X = _adf_design(x, k, max_lag, regression)
                fit = _ols(y, X)
                if fit is None:
                    continue
                nobs, kp = X.shape
                llf = -0.5 * nobs * (math.log(2 * math.pi) + math.log(fit[1] / nobs) + 1.0)
                aic = -2.0 * llf + 2.0 * kp
                if best is None or aic < best[0]:
                    best = (aic, k)
            if best is None:
                raise InsufficientDataError("every ADF regression was rank deficient")
            lag = best[1]
        elif method == "t-stat":
            lag = 0
            for k in range(max_lag, 0, -1):
                tval = _tvalues(x, k, max_lag, regression)
                if tval is not None and abs(tval[k]) >= _T_STAT_STOP:
                    lag = k
                    break
        else:
            raise ValueError("autolag must be 'aic', 't-stat' or None")

    y, X = _adf_design(x, lag, lag, regression)
    tval = _tvalues(x, lag, lag, regression)
    if tval is None:
        raise InsufficientDataError("ADF regression is rank deficient")
    stat = float(tval[0])
    return AdfResult(stat, mackinnon_pvalue(stat, regression), lag, y.shape[0], regression)


def _tvalues(x, lags, start, regression):
    y, X = _adf_design(x, lags, start, regression)
    fit = _ols(y, X)
    if fit is None:
        return None
    coef, ssr = fit
    dof = X.shape[0] - X.shape[1]
    if dof <= 0:
        return None
    sigma2 = ssr / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    se = np.sqrt(np.diag(cov))
    if sigma2 == 0.0:
        # exact fit; the level coefficient is infinitely significant
        return np.where(coef < 0, -np.inf, np.inf)
    return coef / se


def kurtosis(series) -> float:
    """Non-excess sample kurtosis ``m4 / m2**2`` (3 for Gaussian data)."""
    x = as_array(series)
    if x.shape[0] < 4:
        raise DegenerateInputError("kurtosis needs at least 4 points")
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    # relative test so float noise around a constant counts as constant
    if m2 <= (64 * np.finfo(float).eps * max(np.abs(x).max(), 1e-150)) ** 2:
        raise DegenerateInputError("kurtosis undefined for zero variance")
    return float(np.mean(d ** 4) / (m2 * m2))


def acf(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags ``0..max_lag``."""
    x = as_array(series)
    n = x.shape[0]
    if max_lag < 0 or max_lag >= n / 2:
        raise BoundsError(f"max_lag must be in [0, {n / 2}), got {max_lag}")
    d = x - x.mean()
    denom = float(d @ d)
    if denom == 0.0:
        raise DegenerateInputError("autocorrelation undefined for a constant series")
    return np.array([float(d[: n - k] @ d[k:]) / denom for k in range(max_lag + 1)])


def pacf(series, max_lag: int) -> np.ndarray:
    """Partial autocorrelations at lags ``0..max_lag`` by Durbin-Levinson."""
    r = acf(series, max_lag)
    out = np.zeros(max_lag + 1)
    out[0] = 1.0
    if max_lag == 0:
        return out
    phi = np.zeros(max_lag + 1)
    phi[1] = r[1]
    out[1] = r[1]
    v = 1.0 - r[1] ** 2
    for k in range(2, max_lag + 1):
        a = (r[k] - phi[1:k] @ r[k - 1:0:-1]) / v
        new = phi.copy()
        new[1:k] = phi[1:k] - a * phi[k - 1:0:-1]
        new[k] = a
        phi = new
        v *= 1.0 - a * a
        out[k] = a
    return out
