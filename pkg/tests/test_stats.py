import numpy as np
import pytest

from hybridcast import BoundsError, DegenerateInputError, InsufficientDataError
from hybridcast.stats import acf, adf_test, kurtosis, mackinnon_pvalue, pacf


def test_mackinnon_reference_points():
    # reference values from the published response-surface tables
    assert mackinnon_pvalue(-2.8621, "c") == pytest.approx(0.05, abs=2e-3)
    assert mackinnon_pvalue(-3.4304, "c") == pytest.approx(0.01, abs=1e-3)
    assert mackinnon_pvalue(5.0, "c") == 1.0
    assert mackinnon_pvalue(-30.0, "c") == 0.0


def test_sunspot_adf_reference(sunspot):
    # oracle values from an independent reference implementation
    res = adf_test(sunspot)
    assert res.statistic == pytest.approx(-2.649776066, abs=1e-8)
    assert res.p_value == pytest.approx(0.0831396380, abs=1e-8)
    assert res.lags_used == 8


def test_aic_autolag_runs(sunspot):
    res = adf_test(sunspot, autolag="aic")
    assert 0 <= res.lags_used <= 15
    assert 0.0 <= res.p_value <= 1.0


def test_fixed_lag():
    x = np.random.default_rng(1).normal(size=200)
    assert adf_test(x, max_lag=3, autolag=None).lags_used == 3


def test_adf_errors():
    with pytest.raises(InsufficientDataError):
        adf_test(np.ones(50))
    with pytest.raises(InsufficientDataError):
        adf_test(np.arange(8.0))


def test_kurtosis_gaussian():
    x = np.random.default_rng(2).normal(size=200_000)
    assert kurtosis(x) == pytest.approx(3.0, abs=0.05)


def test_kurtosis_constant_rejected():
    with pytest.raises(DegenerateInputError):
        kurtosis(np.full(20, 7.0))
    with pytest.raises(DegenerateInputError):
        kurtosis(np.full(20, 0.1) + np.arange(20) * 1e-19)


def test_acf_pacf_ar1():
    rng = np.random.default_rng(3)
    e = rng.normal(size=20_000)
    x = np.zeros_like(e)
    for t in range(1, e.size):
        x[t] = 0.6 * x[t - 1] + e[t]
    r = acf(x, 3)
    assert r[0] == 1.0
    assert r[1] == pytest.approx(0.6, abs=0.02)
    assert r[2] == pytest.approx(0.36, abs=0.02)
    p = pacf(x, 3)
    assert p[1] == pytest.approx(0.6, abs=0.02)
    assert abs(p[2]) < 0.03


def test_acf_bounds():
    with pytest.raises(BoundsError):
        acf(np.arange(10.0), 5)


def test_adf_pvalues_uniform_under_unit_root():
    keep = sum(adf_test(np.cumsum(np.random.default_rng(s).normal(size=500))).p_value > 0.10
               for s in range(300))
    # binomial(300, 0.9): mean 270, sd about 5.2
    assert 255 <= keep <= 285
