import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hybridcast import BoundsError, ConfigurationError, DegenerateInputError, SearchExhaustedError
from hybridcast import arima
from hybridcast.decomposition import (EmdConfig, emd, find_ma_length_adf,
                                      find_ma_length_kurtosis, is_imf, ma_filter)
from hybridcast.kernels import local_extrema, zero_crossings
from hybridcast.stats import adf_test, kurtosis


def test_ma_filter_examples():
    d = ma_filter([1.0, 2.0, 3.0, 4.0, 5.0], 3)
    np.testing.assert_allclose(d.linear, [2, 3, 4])
    np.testing.assert_allclose(d.residual, [1, 1, 1])
    assert d.offset == 2
    one = ma_filter([3.0, 1.0, 2.0], 1)
    np.testing.assert_array_equal(one.linear, [3, 1, 2])
    np.testing.assert_array_equal(one.residual, [0, 0, 0])
    flat = ma_filter(np.full(10, 4.2), 4)
    np.testing.assert_allclose(flat.residual, 0.0, atol=1e-15)
    with pytest.raises(BoundsError):
        ma_filter([1.0, 2.0], 3)


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(5, 80), elements=st.floats(-1e6, 1e6)), st.data())
def test_ma_filter_additivity(y, data):
    m = data.draw(st.integers(1, y.size))
    d = ma_filter(y, m)
    scale = max(1.0, np.abs(y).max())
    assert np.max(np.abs(d.linear + d.residual - y[m - 1:])) <= 1e-12 * scale
    lin, res = d.padded()
    assert np.isnan(lin[: m - 1]).all()


def test_adf_search_minimality(sunspot):
    m, p = find_ma_length_adf(sunspot)
    assert p < 0.05
    assert adf_test(ma_filter(sunspot, m).linear).p_value == p
    for k in range(2, m):
        assert adf_test(ma_filter(sunspot, k).linear).p_value >= 0.05


def test_adf_search_on_stationary_ar():
    y = arima.simulate([0.5], n=400, rng=np.random.default_rng(0))
    m, _ = find_ma_length_adf(y)
    assert m <= 5


def test_adf_search_exhausted_reports_best():
    y = np.cumsum(np.cumsum(np.random.default_rng(1).normal(size=120)))
    with pytest.raises(SearchExhaustedError) as info:
        find_ma_length_adf(y, m_max=6)
    assert info.value.best_candidate in range(2, 7)


def test_search_bounds():
    with pytest.raises(BoundsError):
        find_ma_length_adf(np.arange(20.0), m_max=10)


def test_kurtosis_rule():
    x = np.random.default_rng(2).normal(size=600)
    m = find_ma_length_kurtosis(x, m_max=30)
    assert abs(kurtosis(ma_filter(x, m).linear) - 3.0) < 0.5
    assert find_ma_length_kurtosis(x, m_max=2) == 2
    assert find_ma_length_kurtosis(x, m_max=30) == m


def test_emd_two_tone_separation():
    t = np.linspace(0, 1, 512)
    fast = np.sin(2 * np.pi * 8 * t)
    res = emd(fast + np.sin(2 * np.pi * t))
    a, b = int(0.1 * 512), int(0.9 * 512)
    assert abs(np.corrcoef(res.imfs[0][a:b], fast[a:b])[0, 1]) > 0.9


def test_emd_monotone_input_has_no_imfs():
    ramp = np.linspace(0.0, 5.0, 50) ** 1.5
    res = emd(ramp)
    assert res.imfs == []
    np.testing.assert_array_equal(res.residue, ramp)


@pytest.mark.parametrize("seed", range(5))
def test_emd_properties(seed):
    rng = np.random.default_rng(seed)
    y = np.cumsum(rng.normal(size=300)) + 3 * np.sin(np.arange(300) / 3.0)
    res = emd(y)
    scale = np.abs(y).max()
    assert np.max(np.abs(res.reconstruct() - y)) <= 1e-8 * scale
    for imf in res.imfs:
        assert is_imf(imf)
    assert sum(len(e) for e in local_extrema(res.residue)) < 2
    rates = [zero_crossings(i) for i in res.imfs]
    assert rates[0] >= rates[-1]


def test_emd_frequency_ordering_multitone():
    t = np.linspace(0, 1, 1024)
    y = np.sin(2 * np.pi * 40 * t) + np.sin(2 * np.pi * 10 * t) + np.sin(2 * np.pi * 2 * t)
    rates = [zero_crossings(i) for i in emd(y).imfs]
    assert all(a >= b for a, b in zip(rates, rates[1:]))


def test_emd_errors_and_config():
    with pytest.raises(BoundsError):
        emd(np.arange(5.0))
    with pytest.raises(DegenerateInputError):
        emd(np.ones(20))
    with pytest.raises(ConfigurationError):
        EmdConfig(sd_threshold=0.0)
    with pytest.raises(ConfigurationError):
        EmdConfig(boundary="periodic")
