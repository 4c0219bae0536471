"""Three-layer perceptron for one-step regression on lagged features.

The network computes ``w0 + sum_j w_j * sigmoid(w0j + sum_i wij * x_i)`` with
``x`` min-max scaled per feature using ranges stored on the model.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from . import kernels
from .errors import AlignmentError, ConfigurationError, RunFailures, ShapeError, TrainingError
from .metrics import MetricReport, summarize
from .series import validation_cut


@dataclass(frozen=True)
class LagMatrix:
    rows: np.ndarray
    targets: np.ndarray
    lag_spec: dict
    index: np.ndarray  # time index of each target

    @property
    def width(self):
        return self.rows.shape[1]

    def __len__(self):
        return self.rows.shape[0]

    def subset(self, mask):
        return LagMatrix(self.rows[mask], self.targets[mask], self.lag_spec, self.index[mask])


def build_lag_matrix(sources: Mapping[str, np.ndarray], lags: Mapping[str, int],
                     extra: Optional[Mapping[str, np.ndarray]] = None,
                     target=None, start: int = 0) -> LagMatrix:
    """Stack lagged windows of aligned sources into a design matrix.

    Row ``t`` holds, for each source in order, its ``lags[name]`` most recent
    values before ``t`` (newest first), followed by each extra feature at
    ``t``. The target defaults to the first source. Rows begin at
    ``max(start, largest lag)``.
    """
    names = list(sources)
    if not names:
        raise ConfigurationError("at least one source is required")
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in sources.items()}
    extra = {k: np.asarray(v, dtype=np.float64) for k, v in (extra or {}).items()}
    n = arrays[names[0]].shape[0]
    for k, a in list(arrays.items()) + list(extra.items()):
        if a.ndim != 1 or a.shape[0] != n:
            raise AlignmentError(f"source {k!r} has shape {a.shape}, expected ({n},)")
    y = arrays[names[0]] if target is None else np.asarray(target, dtype=np.float64)
    if y.shape[0] != n:
        raise AlignmentError("target is not aligned with the sources")
    counts = {k: int(lags.get(k, 0)) for k in names}
    if any(c < 0 for c in counts.values()):
        raise ConfigurationError("lag counts must be nonnegative")
    width = sum(counts.values()) + len(extra)
    if width == 0:
        raise ConfigurationError("the lag matrix would have no features")
    first = max([start, *counts.values()])
    idx = np.arange(first, n)
    cols = []
    for k in names:
        a = arrays[k]
        cols += [a[idx - i] for i in range(1, counts[k] + 1)]
    cols += [extra[k][idx] for k in extra]
    rows = np.column_stack(cols) if idx.size else np.zeros((0, width))
    return LagMatrix(rows, y[idx].copy(), {**counts, **{k: "extra" for k in extra}}, idx)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    max_epochs: int = 2000
    patience: int = 50
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if not 0 < self.patience < self.max_epochs:
            raise ConfigurationError("need 0 < patience < max_epochs")

    def with_seed(self, seed):
        return TrainConfig(self.learning_rate, self.max_epochs, self.patience, int(seed),
                           self.beta1, self.beta2, self.eps)


@dataclass(frozen=True)
class MlpModel:
    hidden_weights: np.ndarray   # (H, N)
    hidden_biases: np.ndarray    # (H,)
    output_weights: np.ndarray   # (H,)
    output_bias: float
    input_scaling: np.ndarray    # (N, 2) rows of (min, max)
    best_epoch: int = 0
    epochs_run: int = 0
    train_history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    val_history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def __post_init__(self):
        H, N = np.shape(self.hidden_weights)
        if np.shape(self.hidden_biases) != (H,) or np.shape(self.output_weights) != (H,):
            raise ShapeError("inconsistent layer sizes")
        if np.shape(self.input_scaling) != (N, 2):
            raise ShapeError("input_scaling must be (N, 2)")

    @property
    def n_input(self):
        return self.hidden_weights.shape[1]

    @property
    def n_hidden(self):
        return self.hidden_weights.shape[0]

    def scale(self, rows):
        rows = np.asarray(rows, dtype=np.float64)
        lo, hi = self.input_scaling[:, 0], self.input_scaling[:, 1]
        span = np.where(hi > lo, hi - lo, 1.0)
        return (rows - lo) / span

    @classmethod
    def zeros(cls, n_input, n_hidden, output_bias=0.0):
        scaling = np.column_stack((np.zeros(n_input), np.ones(n_input)))
        return cls(np.zeros((n_hidden, n_input)), np.zeros(n_hidden), np.zeros(n_hidden),
                   float(output_bias), scaling)


def _feature_ranges(rows):
    return np.column_stack((rows.min(axis=0), rows.max(axis=0)))


def predict_batch(model: MlpModel, rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.shape[1] != model.n_input:
        raise ShapeError(f"row width {rows.shape[1]} != model input width {model.n_input}")
    z = model.scale(rows) @ model.hidden_weights.T + model.hidden_biases
    h = 0.5 * (1.0 + np.tanh(0.5 * z))
    return h @ model.output_weights + model.output_bias


def predict(model: MlpModel, feature_row) -> float:
    row = np.asarray(feature_row, dtype=np.float64)
    if row.ndim != 1:
        raise ShapeError("predict expects one feature row")
    return float(predict_batch(model, row[None, :])[0])


def train(matrix: LagMatrix, arch: tuple[int, int], cfg: TrainConfig = TrainConfig(),
          validation: float = 0.2) -> MlpModel:
    """Fit the network by full-batch Adam with early stopping.

    Weights start uniform in (-0.5, 0.5). The trailing ``validation`` share
    of rows is held out and the weights with the lowest validation MSE are
    returned. Inputs are min-max scaled; targets are min-max scaled while
    training and the scaling is folded back into the output layer.
    """
    N, H = arch
    if N != matrix.width:
        raise ShapeError(f"architecture expects {N} inputs, matrix has {matrix.width}")
    if H < 1:
        raise ConfigurationError("need at least one hidden node")
    n = len(matrix)
    if n < N + H:
        raise ShapeError(f"{n} rows are too few for a {N}x{H}x1 network")
    cut = validation_cut(n, validation)
    if cut < 1:
        raise ShapeError("validation split leaves no training rows")
    X_fit = matrix.rows[:cut]
    scaling = _feature_ranges(X_fit)
    lo, hi = scaling[:, 0], scaling[:, 1]
    span = np.where(hi > lo, hi - lo, 1.0)
    X = (matrix.rows - lo) / span
    t_lo = float(matrix.targets[:cut].min())
    t_span = float(matrix.targets[:cut].max()) - t_lo
    if t_span <= 0.0:
        t_span = 1.0
    y = (matrix.targets - t_lo) / t_span

    rng = np.random.default_rng(cfg.seed)
    W0 = rng.uniform(-0.5, 0.5, (H, N))
    b0 = rng.uniform(-0.5, 0.5, H)
    v0 = rng.uniform(-0.5, 0.5, H)
    c0 = float(rng.uniform(-0.5, 0.5))
    W, b, v, c, best_epoch, epochs, th, vh, diverged = kernels.mlp_train_adam(
        X[:cut], y[:cut], X[cut:], y[cut:], W0, b0, v0, c0,
        cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps, cfg.max_epochs, cfg.patience)
    if diverged >= 0:
        raise TrainingError(f"loss became non-finite at epoch {diverged}", epoch=int(diverged))
    # undo target scaling inside the linear output layer
    return MlpModel(W, b, v * t_span, c * t_span + t_lo, scaling,
                    int(best_epoch), int(epochs), th[:epochs + 1] * t_span ** 2,
                    vh[:epochs + 1] * t_span ** 2)


def loss_and_grad(model: MlpModel, matrix: LagMatrix):
    """Training MSE of ``model`` on ``matrix`` and its gradient.

    The gradient is a tuple matching ``(hidden_weights, hidden_biases,
    output_weights, output_bias)``, taken with respect to the parameters as
    they act on scaled inputs.
    """
    X = model.scale(matrix.rows)
    loss, gW, gb, gv, gc = kernels.mlp_loss_grad(
        X, matrix.targets, model.hidden_weights, model.hidden_biases,
        model.output_weights, model.output_bias)
    return loss, (gW, gb, gv, gc)


def _flat(model):
    return np.concatenate((model.hidden_weights.ravel(), model.hidden_biases,
                           model.output_weights, [model.output_bias]))


def _unflat(model, theta):
    H, N = model.hidden_weights.shape
    k = H * N
    return MlpModel(theta[:k].reshape(H, N), theta[k:k + H], theta[k + H:k + 2 * H],
                    float(theta[-1]), model.input_scaling)


def gradient_check(model: MlpModel, matrix: LagMatrix, epsilon: float = 1e-5,
                   floor: float = 1e-8) -> float:
    """Largest relative gap between analytic and central-difference gradients.

    The relative error of each parameter is ``|a - f| / max(|a|, |f|, floor)``.
    """
    if not 0 < epsilon <= 0.5:
        raise ConfigurationError("epsilon must lie in (0, 0.5]")
    if not 1e-7 <= epsilon <= 1e-4:
        warnings.warn("epsilon outside [1e-7, 1e-4]; truncation or round-off will dominate",
                      stacklevel=2)
    _, grads = loss_and_grad(model, matrix)
    analytic = np.concatenate([np.ravel(g) for g in grads])
    theta = _flat(model)
    numeric = np.empty_like(theta)
    for i in range(theta.shape[0]):
        up = theta.copy()
        up[i] += epsilon
        dn = theta.copy()
        dn[i] -= epsilon
        lu, _ = loss_and_grad(_unflat(model, up), matrix)
        ld, _ = loss_and_grad(_unflat(model, dn), matrix)
        numeric[i] = (lu - ld) / (2.0 * epsilon)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


@dataclass
class MultiRun:
    seeds: list
    reports: list
    mean: dict
    std: dict
    payloads: list


def multi_run(trainer: Callable[[int], object], runs: int, seed_base: int = 0,
              workers: int = 1) -> MultiRun:
    """Run ``trainer(seed)`` for ``seed_base .. seed_base + runs - 1``.

    ``trainer`` returns a :class:`MetricReport` or a ``(MetricReport,
    payload)`` pair. Results are ordered by seed whatever ``workers`` is;
    metrics (not forecasts) are averaged.
    """
    if runs < 1:
        raise ConfigurationError("runs must be at least 1")
    seeds = list(range(seed_base, seed_base + runs))

    def call(seed):
        try:
            return seed, trainer(seed), None
        except Exception as exc:  # noqa: BLE001 - collected and re-raised together
            return seed, None, exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(call, seeds))
    else:
        results = [call(s) for s in seeds]
    failures = {s: e for s, _, e in results if e is not None}
    if failures:
        raise RunFailures(failures)
    reports, payloads = [], []
    for _, out, _ in results:
        if isinstance(out, MetricReport):
            reports.append(out)
            payloads.append(None)
        else:
            reports.append(out[0])
            payloads.append(out[1])
    mean, std = summarize(reports)
    return MultiRun(seeds, reports, mean, std, payloads)
