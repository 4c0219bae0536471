import numpy as np
import pytest

from hybridcast import ConfigurationError, StageError
from hybridcast import arima, hybrids
from hybridcast.arima import ArimaOrder
from hybridcast.decomposition import emd
from hybridcast.hybrids import PipelineSpec, TuningConfig, emd_wrap, run_pipeline
from hybridcast.mlp import TrainConfig, build_lag_matrix, predict_batch, train

FAST = TrainConfig(learning_rate=0.01, max_epochs=300, patience=299)
SMALL_GRID = TuningConfig(seeds=1, epochs=100, ann_inputs=(2, 3), ann_hidden=(2,),
                          kb_y_lags=(1, 2), kb_r_lags=(1,), proposed_a=(1, 2), proposed_b=(0, 1),
                          p_max=2, q_max=1, d_max=1)


def spec(method, **kw):
    kw.setdefault("train_config", FAST)
    kw.setdefault("tuning", SMALL_GRID)
    kw.setdefault("runs", 2)
    return PipelineSpec(method, **kw)


@pytest.fixture(scope="module")
def series():
    rng = np.random.default_rng(11)
    lin = arima.simulate([0.6, -0.2], n=160, rng=rng)
    return lin + 0.8 * np.sin(np.arange(160) / 2.5) + 0.3 * np.tanh(np.roll(lin, 1))


ALL = [("arima", {}), ("ann", {}), ("zhang", {}), ("khashei_bijari", {}),
       ("babu_reddy", {}), ("proposed", {})]


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        PipelineSpec("sarima")
    with pytest.raises(ConfigurationError):
        PipelineSpec("zhang", proposed_lags=(2, 1))
    with pytest.raises(ConfigurationError):
        PipelineSpec("ann", runs=0)
    with pytest.raises(ConfigurationError):
        PipelineSpec("proposed", ma_rule="fixed:x")
    with pytest.raises(ConfigurationError):
        PipelineSpec("ann", final_validation=1.0)
    assert PipelineSpec("babu_reddy").rule == "kurtosis"
    assert PipelineSpec("proposed").rule == "adf"


@pytest.mark.parametrize("method,extra", ALL)
def test_every_method_runs_and_is_causal(series, method, extra):
    n_tr = 120
    a = run_pipeline(series[:n_tr], series[n_tr:], spec(method, **extra))
    assert a.forecasts.shape[1] == 40
    assert np.all(np.isfinite(a.forecasts))
    # changing the last observation cannot move any earlier forecast
    bumped = series.copy()
    bumped[-1] += 50.0
    b = run_pipeline(bumped[:n_tr], bumped[n_tr:], spec(method, **extra))
    np.testing.assert_allclose(a.forecasts, b.forecasts, rtol=0, atol=1e-9)


@pytest.mark.parametrize("method", ["zhang", "proposed", "khashei_bijari"])
def test_prefix_frames_match_full_frame(series, method):
    extra = {"proposed_lags": (2, 1)} if method == "proposed" else {}
    stage = hybrids.prepare(series[:120], spec(method, **extra))
    rows, base, _ = stage.frame(series)
    for t in (121, 140, 159):
        r_t, b_t, _ = stage.frame(series[:t])
        np.testing.assert_allclose(r_t[t], rows[t], rtol=0, atol=1e-12)
        assert b_t[t] == pytest.approx(base[t], abs=1e-12)


def test_zhang_is_arima_plus_residual_network(series):
    n_tr, order = 120, ArimaOrder(2, 0, 0)
    zh = run_pipeline(series[:n_tr], series[n_tr:], spec("zhang", arima_order=order, runs=1))
    ar = run_pipeline(series[:n_tr], series[n_tr:], spec("arima", arima_order=order))
    # rebuild the residual network independently
    model = arima.fit(series[:n_tr], order)
    e = series - arima.predict_path(model, series)[:-1]
    mat = build_lag_matrix({"e": e[2:]}, {"e": 4})
    fit_rows = mat.subset(mat.index + 2 < n_tr)
    net = train(fit_rows, (4, 4), FAST.with_seed(hybrids._component_seed(0, 0)), validation=0.0)
    test_rows = mat.subset(mat.index + 2 >= n_tr)
    nonlinear = predict_batch(net, test_rows.rows)
    np.testing.assert_allclose(zh.forecasts[0], ar.forecasts[0] + nonlinear, rtol=0, atol=1e-12)


def test_babu_reddy_is_sum_of_components(series):
    n_tr = 120
    res = run_pipeline(series[:n_tr], series[n_tr:], spec("babu_reddy", ma_rule="fixed:4", runs=1))
    stage = hybrids.prepare(series[:n_tr], spec("babu_reddy", ma_rule="fixed:4"))
    comp = hybrids._joint_component(stage, series, n_tr, "t")
    rows = hybrids.LagMatrix(comp.train_rows, comp.train_target, {}, comp.train_idx)
    net = train(rows, (4, 4), FAST.with_seed(hybrids._component_seed(0, 0)), validation=0.0)
    linear = comp.test_base
    nonlinear = predict_batch(net, comp.test_rows)
    np.testing.assert_array_equal(res.forecasts[0], linear + nonlinear)


def test_linear_data_zhang_close_to_arima():
    y = arima.simulate([0.7], n=300, rng=np.random.default_rng(3))
    order = ArimaOrder(1, 0, 0)
    zh = run_pipeline(y[:240], y[240:], spec("zhang", arima_order=order, runs=3))
    ar = run_pipeline(y[:240], y[240:], spec("arima", arima_order=order))
    assert abs(zh.mean["mse"] / ar.mean["mse"] - 1.0) < 0.05


def test_constant_residual_gives_constant_network_output():
    y = np.arange(80, dtype=float) * 0.5 + 3.0
    br = spec("babu_reddy", ma_rule="fixed:4", arima_order=ArimaOrder(1, 0, 0), runs=1)
    res = run_pipeline(y[:60], y[60:], br)
    stage = hybrids.prepare(y[:60], br)
    comp = hybrids._joint_component(stage, y, 60, "t")
    contribution = res.forecasts[0] - comp.test_base
    assert np.ptp(contribution) < 1e-12
    assert contribution[0] == pytest.approx(0.75, abs=0.05)  # r = (m - 1) / 2 * slope


def test_kb_runs_with_flat_residuals():
    y = np.arange(60, dtype=float)
    res = run_pipeline(y[:45], y[45:], spec("khashei_bijari", arima_order=ArimaOrder(1, 0, 0),
                                            kb_lags=(2, 2), runs=1))
    assert np.all(np.isfinite(res.forecasts))


def test_proposed_with_no_residual_lags(series):
    res = run_pipeline(series[:120], series[120:], spec("proposed", proposed_lags=(2, 0), runs=1))
    assert res.diagnostics["residual_lags"] == 0
    assert np.all(np.isfinite(res.forecasts))


def test_tuning_records_choice(series):
    res = run_pipeline(series[:120], series[120:], spec("proposed", runs=1))
    assert res.diagnostics["y_lags"] in (1, 2)
    assert res.diagnostics["residual_lags"] in (0, 1)
    assert np.isfinite(res.diagnostics["validation_mae"])


def test_early_stopped_final_fits_differ(series):
    full = run_pipeline(series[:120], series[120:], spec("ann", ann_arch=(3, 3)))
    held = run_pipeline(series[:120], series[120:], spec("ann", ann_arch=(3, 3),
                                                         final_validation=0.2))
    assert np.all(np.isfinite(held.forecasts))
    assert not np.array_equal(full.forecasts, held.forecasts)


@pytest.mark.parametrize("method", ["ann", "proposed"])
def test_determinism(series, method):
    a = run_pipeline(series[:120], series[120:], spec(method))
    b = run_pipeline(series[:120], series[120:], spec(method))
    np.testing.assert_array_equal(a.forecasts, b.forecasts)
    assert a.mean == b.mean


def test_emd_sum_of_component_forecasts(series):
    res = emd_wrap(spec("arima"), series[:120], series[120:])
    total = np.zeros(40)
    for comp in emd(series).components:
        part = run_pipeline(comp[:120], comp[120:], spec("arima").for_component()) \
            if np.ptp(comp[:120]) > 0 else None
        total = total + (part.forecasts[0] if part is not None else comp[120:] * 0 + comp[0])
    np.testing.assert_array_equal(res.forecasts[0], total)


def test_emd_without_imfs_equals_inner_pipeline():
    y = np.linspace(1.0, 4.0, 90) ** 2
    inner = spec("ann", ann_arch=(3, 2), runs=2)
    wrapped = emd_wrap(inner, y[:70], y[70:])
    plain = run_pipeline(y[:70], y[70:], inner.for_component())
    assert wrapped.diagnostics["n_imfs"] == 0
    np.testing.assert_array_equal(wrapped.forecasts, plain.forecasts)


def test_causal_emd_mode(series):
    a = emd_wrap(spec("arima"), series[:120], series[120:], causal=True)
    assert a.diagnostics["mode"] == "causal"
    bumped = series.copy()
    bumped[-1] += 50.0
    b = emd_wrap(spec("arima"), bumped[:120], bumped[120:], causal=True)
    np.testing.assert_allclose(a.forecasts, b.forecasts, rtol=0, atol=1e-9)


def test_component_failures_carry_index():
    y = np.sin(np.arange(60) / 2.0) + np.sin(np.arange(60) / 7.0)
    y = y + np.random.default_rng(0).normal(0, 0.1, 60)
    too_wide = TuningConfig(seeds=1, epochs=10, ann_inputs=(45,), ann_hidden=(2,))
    with pytest.raises(hybrids.ComponentFailures) as info:
        emd_wrap(spec("ann", tuning=too_wide, runs=1), y[:50], y[50:])
    assert sorted(info.value.failures) == list(range(len(info.value.failures)))
    assert all(isinstance(e, StageError) for e in info.value.failures.values())


def test_align_components():
    res = emd(np.sin(np.arange(200) / 3.0) + np.sin(np.arange(200) / 11.0) + np.arange(200) * 0.01)
    k = len(res.components)
    folded = hybrids._align(res, k - 1)
    np.testing.assert_allclose(sum(folded), sum(res.components), atol=1e-12)
    padded = hybrids._align(res, k + 2)
    assert len(padded) == k + 2
    np.testing.assert_allclose(sum(padded), sum(res.components), atol=1e-12)
