import numpy as np
import pytest

from hybridcast import ConfigurationError, RunFailures, ShapeError, evaluate
from hybridcast.errors import AlignmentError
from hybridcast.mlp import (MlpModel, TrainConfig, build_lag_matrix, gradient_check,
                            multi_run, predict, predict_batch, train)


def test_lag_matrix_layout():
    y = np.arange(10.0)
    r = -np.arange(10.0)
    m = build_lag_matrix({"y": y, "r": r}, {"y": 3, "r": 1}, extra={"z": y * 10})
    assert m.width == 5
    assert m.index[0] == 3
    np.testing.assert_array_equal(m.rows[0], [2, 1, 0, -2, 30])
    assert m.targets[0] == 3.0


def test_lag_matrix_alignment():
    with pytest.raises(AlignmentError):
        build_lag_matrix({"y": np.arange(5.0), "r": np.arange(4.0)}, {"y": 1, "r": 1})
    with pytest.raises(ConfigurationError):
        build_lag_matrix({"y": np.arange(5.0)}, {"y": 0})


def test_zero_weights_predict_bias():
    m = MlpModel.zeros(3, 2, output_bias=1.25)
    assert predict(m, [4.0, 5.0, 6.0]) == 1.25
    with pytest.raises(ShapeError):
        predict(m, [1.0, 2.0])


def test_train_fits_smooth_function():
    rng = np.random.default_rng(0)
    x = np.sin(np.arange(300) / 5.0) + 0.01 * rng.normal(size=300)
    mat = build_lag_matrix({"x": x}, {"x": 4})
    model = train(mat, (4, 6), TrainConfig(0.01, 1500, 100, seed=1))
    pred = predict_batch(model, mat.rows)
    assert np.mean((pred - mat.targets) ** 2) < 0.01


def test_training_is_seed_deterministic():
    x = np.sin(np.arange(120) / 4.0)
    mat = build_lag_matrix({"x": x}, {"x": 3})
    cfg = TrainConfig(0.01, 200, 20, seed=3)
    a, b = train(mat, (3, 3), cfg), train(mat, (3, 3), cfg)
    np.testing.assert_array_equal(a.hidden_weights, b.hidden_weights)
    assert a.output_bias == b.output_bias


def test_train_config_validation():
    with pytest.raises(ConfigurationError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ConfigurationError):
        TrainConfig(max_epochs=10, patience=10)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_check(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=80)
    mat = build_lag_matrix({"x": x}, {"x": 4})
    model = MlpModel(rng.uniform(-.5, .5, (3, 4)), rng.uniform(-.5, .5, 3),
                     rng.uniform(-.5, .5, 3), 0.1, np.column_stack((x.min() * np.ones(4),
                                                                    x.max() * np.ones(4))))
    assert gradient_check(model, mat) < 1e-4


def test_gradient_check_epsilon_checks():
    mat = build_lag_matrix({"x": np.arange(20.0)}, {"x": 2})
    model = MlpModel.zeros(2, 2)
    with pytest.warns(UserWarning):
        gradient_check(model, mat, epsilon=1e-2)
    with pytest.raises(ConfigurationError):
        gradient_check(model, mat, epsilon=1.0)


def test_multi_run_ordering_and_failures():
    def trainer(seed):
        return evaluate([0.0, 1.0, 2.0], [0.0, 1.0, 2.0 + seed]), seed

    serial = multi_run(trainer, 4, seed_base=10)
    threaded = multi_run(trainer, 4, seed_base=10, workers=3)
    assert serial.seeds == threaded.seeds == [10, 11, 12, 13]
    assert serial.payloads == threaded.payloads
    assert serial.mean == threaded.mean

    def flaky(seed):
        if seed % 2:
            raise ValueError("boom")
        return evaluate([0.0, 1.0], [0.0, 1.0])

    with pytest.raises(RunFailures) as info:
        multi_run(flaky, 4)
    assert sorted(info.value.failures) == [1, 3]
