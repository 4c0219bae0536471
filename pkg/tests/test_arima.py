import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridcast import BoundsError, ConfigurationError, RankError
from hybridcast import arima
from hybridcast.arima import ArimaOrder


def test_order_parsing():
    assert ArimaOrder.parse("9,0,0") == ArimaOrder(9, 0, 0)
    assert ArimaOrder.parse("rw").random_walk
    assert str(ArimaOrder(1, 1, 2)) == "1,1,2"
    for bad in ("1,2", "a,b,c"):
        with pytest.raises(ConfigurationError):
            ArimaOrder.parse(bad)
    with pytest.raises(ConfigurationError):
        ArimaOrder(0, 1, 0)


@given(st.integers(0, 2), st.lists(st.floats(-100, 100), min_size=6, max_size=40))
def test_difference_round_trip(d, values):
    x = np.array(values)
    w = arima.difference(x, d)
    np.testing.assert_allclose(arima.undifference(w, x[:d]), x, atol=1e-8)


def test_ar2_recovery():
    y = arima.simulate([0.5, -0.3], n=5000, rng=np.random.default_rng(0))
    m = arima.fit(y, ArimaOrder(2, 0, 0))
    np.testing.assert_allclose(m.ar_coeffs, [0.5, -0.3], atol=0.05)


def test_arma11_css():
    y = arima.simulate([0.6], [0.4], n=4000, rng=np.random.default_rng(1))
    m = arima.fit(y, ArimaOrder(1, 0, 1))
    assert m.ar_coeffs[0] == pytest.approx(0.6, abs=0.06)
    assert m.ma_coeffs[0] == pytest.approx(0.4, abs=0.06)


def test_predict_path_matches_manual_ar1():
    y = np.array([1.0, 2.0, 0.5, 1.5])
    m = arima.ArimaModel(ArimaOrder(1, 0, 0), np.array([0.5]), np.zeros(0), 1.0)
    path = arima.predict_path(m, y)
    assert np.isnan(path[0])
    np.testing.assert_allclose(path[1:], 1.0 + 0.5 * y)


def test_predict_path_is_causal():
    y = arima.simulate([0.4], [0.3], n=200, rng=np.random.default_rng(2))
    m = arima.fit(y[:150], ArimaOrder(1, 1, 1))
    full = arima.predict_path(m, y)
    for t in (150, 170, 199):
        assert arima.forecast_one_step(m, y[:t]) == pytest.approx(full[t], abs=1e-12)


def test_random_walk():
    y = np.array([1.0, 3.0, 2.0])
    m = arima.fit(y, ArimaOrder.rw())
    assert arima.forecast_one_step(m, y) == 2.0
    assert arima.random_walk_forecast(y) == 2.0


def test_select_order_recovers_ar3():
    y = arima.simulate([0.5, -0.2, 0.3], n=2000, rng=np.random.default_rng(3))
    assert arima.select_order(y, 5, 1, 2) == ArimaOrder(3, 0, 0)


def test_select_order_differences_a_random_walk():
    y = np.cumsum(np.random.default_rng(4).normal(size=500))
    assert arima.select_order(y, 2, 2, 1).d == 1


def test_fit_errors():
    with pytest.raises(BoundsError), pytest.warns(UserWarning, match="only 4 points"):
        arima.fit(np.arange(4.0), ArimaOrder(4, 0, 0))
    with pytest.raises(RankError):
        arima.fit(np.ones(50), ArimaOrder(1, 0, 0))


def test_nonstationary_fit_is_flagged():
    e = np.random.default_rng(5).normal(size=200)
    y = np.zeros(200)
    for t in range(1, 200):
        y[t] = 1.04 * y[t - 1] + e[t]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = arima.fit(y, ArimaOrder(1, 0, 0))
    assert m.nonstationary
    assert any("unit circle" in str(w.message) for w in caught)


def test_sunspot_ar9_reference(sunspot):
    y = sunspot.values
    m = arima.fit(y[:221], ArimaOrder(9, 0, 0))
    pred = arima.predict_path(m, y)[221:288]
    mse = np.mean((y[221:] - pred) ** 2)
    assert mse == pytest.approx(305.248, abs=0.01)
