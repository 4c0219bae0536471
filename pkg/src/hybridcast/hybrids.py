"""End-to-end one-step forecasting pipelines.

Every pipeline is split into a deterministic preparation step (filter
length search, ARIMA fits, lag tuning) and a cheap seeded step that only
trains the network. Preparation produces, for each time index ``t``, a
feature row built from observations before ``t``, a base forecast and the
network target. The forecast of ``y_t`` is ``base_t + net(row_t)``; methods
without a network use the base alone. Because each building block (trailing
mean, lagging, ARIMA one-step recursion) is causal, computing the frame over
the full series equals computing it over each prefix.

Methods
-------
``arima``            ARIMA one-step forecast.
``ann``              network on ``N`` lagged values.
``zhang``            ARIMA forecast plus a network forecast of ARIMA residuals.
``khashei_bijari``   network on lagged values, the ARIMA forecast and lagged
                     ARIMA residuals.
``babu_reddy``       moving-average split with kurtosis-chosen length; ARIMA
                     on the smooth part plus a network on the remainder.
``proposed``         moving-average split with ADF-chosen length; network on
                     ``a`` lagged values, the ARIMA forecast of the smooth part
                     and ``b`` lagged remainders.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import arima as _arima
from . import decomposition as _dec
from .errors import (ConfigurationError, HybridcastError, NumericalError,
                     SearchExhaustedError, ShapeError, StageError)
from .metrics import MetricReport, evaluate
from .mlp import LagMatrix, TrainConfig, multi_run, predict_batch, train
from .series import as_array

METHODS = ("arima", "ann", "zhang", "khashei_bijari", "babu_reddy", "proposed")
_NEURAL = frozenset(METHODS) - {"arima"}
_DEFAULT_RULE = {"babu_reddy": "kurtosis", "proposed": "adf"}


class ComponentFailures(NumericalError):
    """One or more decomposed components failed; ``failures`` maps component index to error."""

    def __init__(self, failures):
        idx = sorted(failures)
        detail = "; ".join(f"component {k}: {failures[k]}" for k in idx)
        super().__init__(f"{len(idx)} component(s) failed: {detail}")
        self.failures = dict(failures)


@dataclass(frozen=True)
class TuningConfig:
    """Search spaces and budget for validation tuning."""

    seeds: int = 2
    epochs: int = 1000
    validation_fraction: float = 0.2
    ann_inputs: tuple = tuple(range(1, 9))
    ann_hidden: tuple = (2, 4, 8)
    kb_y_lags: tuple = tuple(range(1, 9))
    kb_r_lags: tuple = tuple(range(1, 7))
    proposed_a: tuple = tuple(range(1, 11))
    proposed_b: tuple = tuple(range(0, 11))
    p_max: int = 6
    d_max: int = 2
    q_max: int = 2

    def __post_init__(self):
        if self.seeds < 1 or self.epochs < 2:
            raise ConfigurationError("tuning needs at least one seed and two epochs")
        if not 0 < self.validation_fraction < 1:
            raise ConfigurationError("validation_fraction must lie in (0, 1)")
        for name in ("ann_inputs", "ann_hidden", "kb_y_lags", "kb_r_lags",
                     "proposed_a", "proposed_b"):
            if not getattr(self, name):
                raise ConfigurationError(f"tuning grid {name} is empty")


def _parse_rule(rule):
    if rule in ("adf", "kurtosis"):
        return rule, None
    if isinstance(rule, str) and rule.startswith("fixed:"):
        try:
            m = int(rule.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad fixed filter rule {rule!r}") from None
        if m < 1:
            raise ConfigurationError("fixed filter length must be positive")
        return "fixed", m
    raise ConfigurationError(f"ma_rule must be 'adf', 'kurtosis' or 'fixed:<m>', got {rule!r}")


@dataclass(frozen=True)
class PipelineSpec:
    """What to run and with which overrides.

    ``ann_arch`` is ``(inputs, hidden)`` for the plain network and sets only
    the hidden size for the hybrids. ``proposed_lags`` is ``(a, b)``;
    ``kb_lags`` is ``(y_lags, residual_lags)``. Unset lags are tuned on the
    trailing validation share of the training rows. ``final_validation`` is
    the trailing share held out for early stopping in the final fits; at 0
    they use every training row for the whole epoch budget.
    """

    method: str
    arima_order: Optional[_arima.ArimaOrder] = None
    ann_arch: Optional[tuple] = None
    proposed_lags: Optional[tuple] = None
    ma_rule: Optional[str] = None
    runs: int = 50
    seed_base: int = 0
    residual_lags: int = 4
    kb_lags: Optional[tuple] = None
    train_config: TrainConfig = TrainConfig(learning_rate=0.01, max_epochs=2000, patience=1999)
    tuning: TuningConfig = TuningConfig()
    adf_threshold: float = 0.05
    workers: int = 1
    final_validation: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1")
        if self.proposed_lags is not None:
            if self.method != "proposed":
                raise ConfigurationError("proposed_lags only applies to method 'proposed'")
            a, b = self.proposed_lags
            if a < 1 or b < 0:
                raise ConfigurationError("proposed lags need a >= 1 and b >= 0")
        if self.kb_lags is not None and min(self.kb_lags) < 1:
            raise ConfigurationError("khashei_bijari lags must be positive")
        if self.residual_lags < 1:
            raise ConfigurationError("residual_lags must be positive")
        if self.ann_arch is not None and min(self.ann_arch) < 1:
            raise ConfigurationError("ann_arch entries must be positive")
        if self.ma_rule is not None:
            _parse_rule(self.ma_rule)
        if not 0.0 <= self.final_validation < 1.0:
            raise ConfigurationError("final_validation must lie in [0, 1)")

    @property
    def rule(self):
        return self.ma_rule or _DEFAULT_RULE.get(self.method, "adf")

    def for_component(self):
        """Copy with series-specific overrides cleared, for decomposed components."""
        kind, _ = _parse_rule(self.rule)
        return replace(self, arima_order=None, ann_arch=None, proposed_lags=None,
                       kb_lags=None, ma_rule=None if kind == "fixed" else self.ma_rule)


@dataclass
class PipelineResult:
    method: str
    forecasts: np.ndarray          # (runs, test_len); one row for deterministic methods
    reports: list
    mean: dict
    std: dict
    seeds: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def metrics(self) -> MetricReport:
        return MetricReport(self.mean["mae"], self.mean["mse"], self.mean["mase"],
                            self.reports[0].n)

    @property
    def mean_forecast(self):
        return self.forecasts.mean(axis=0)


# ---------------------------------------------------------------- frames

def _lag_cols(x, k):
    """(n + 1, k) array whose row ``t`` is ``x[t-1], ..., x[t-k]`` (NaN-padded)."""
    n = x.shape[0]
    xp = np.concatenate((np.full(k, np.nan), x))
    return np.column_stack([xp[k - i:k - i + n + 1] for i in range(1, k + 1)]) if k else \
        np.zeros((n + 1, 0))


def _next_value_frame(x):
    """``x`` extended by a NaN slot for the next, unseen index."""
    return np.concatenate((x, [np.nan]))


def _arima_path(model, x):
    """One-step ARIMA forecasts aligned to ``x`` (length ``n + 1``), NaN before ``x`` starts."""
    out = np.full(x.shape[0] + 1, np.nan)
    finite = np.flatnonzero(np.isfinite(x))
    if finite.size == 0:
        return out
    first = int(finite[0])
    out[first:] = _arima.predict_path(model, x[first:])
    return out


def _ma_parts(y, m):
    n = y.shape[0]
    lin = np.full(n, np.nan)
    if n >= m:
        lin[m - 1:] = _dec.ma_filter(y, m).linear
    return lin, y - lin


@dataclass
class _Stage:
    """Prepared deterministic part of a pipeline on one series."""

    frame: Callable[[np.ndarray], tuple]   # y -> (rows | None, base, target), n + 1 rows
    hidden: Optional[int]
    diagnostics: dict

    @property
    def neural(self):
        return self.hidden is not None


def _fit_arima(x, order, stage):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            model = _arima.fit(x, order)
        except HybridcastError as exc:
            raise StageError(stage, exc) from exc
    return model, [str(w.message) for w in caught]


def _choose_order(x, spec, fixed, stage):
    if fixed is not None:
        return fixed
    t = spec.tuning
    try:
        return _arima.select_order(x, t.p_max, t.d_max, t.q_max)
    except HybridcastError as exc:
        raise StageError(stage, exc) from exc


def _ma_length(train, spec, stage):
    kind, m = _parse_rule(spec.rule)
    info = {"ma_rule": kind}
    if kind == "fixed":
        if m > train.shape[0] // 2:
            raise StageError(stage, ConfigurationError(f"filter length {m} too long for the series"))
        info["ma_length"] = m
        return m, info
    try:
        if kind == "adf":
            m, p = _dec.find_ma_length_adf(train, spec.adf_threshold)
            info["adf_p"] = p
        else:
            m = _dec.find_ma_length_kurtosis(train)
    except SearchExhaustedError as exc:
        # fall back to the most stationary candidate and say so
        m = int(exc.best_candidate)
        info["adf_p"] = float(exc.best_value)
        info["search_exhausted"] = True
    except HybridcastError as exc:
        raise ConfigurationError(f"[{stage}] filter length search failed: {exc}") from exc
    info["ma_length"] = m
    return m, info


def _linear_stage(train, spec, stage):
    """ARIMA on the raw series; returns (model, diagnostics)."""
    order = _choose_order(train, spec, spec.arima_order, stage)
    if order.random_walk:
        model = _arima.fit(train, order)
        return model, {"arima_order": str(order)}
    model, warns = _fit_arima(train, order, stage)
    diag = {"arima_order": str(order)}
    if warns:
        diag["arima_warnings"] = warns
    return model, diag


def _smooth_stage(train, spec, stage):
    """Moving-average split plus ARIMA on the smooth part."""
    m, diag = _ma_length(train, spec, stage)
    lin, _ = _ma_parts(train, m)
    order = _choose_order(lin[m - 1:], spec, spec.arima_order, stage)
    model, warns = _fit_arima(lin[m - 1:], order, stage)
    diag["linear_order"] = str(order)
    if warns:
        diag["arima_warnings"] = warns
    return m, model, diag


def _hidden(spec, width):
    return spec.ann_arch[1] if spec.ann_arch is not None else width


def _stage_arima(train, spec, stage="arima"):
    model, diag = _linear_stage(train, spec, stage)

    def frame(y):
        return None, _arima_path(model, y), _next_value_frame(y)
    return _Stage(frame, None, diag)


def _stage_ann(train, spec, inputs, hidden):
    def frame(y):
        return _lag_cols(y, inputs), np.zeros(y.shape[0] + 1), _next_value_frame(y)
    return _Stage(frame, hidden, {"ann_arch": f"{inputs}x{hidden}"})


def _stage_zhang(train, spec, model, diag, k):
    def frame(y):
        lhat = _arima_path(model, y)
        e = y - lhat[:-1]
        return _lag_cols(e, k), lhat, _next_value_frame(e)
    return _Stage(frame, _hidden(spec, k), {**diag, "residual_lags": k})


def _stage_kb(train, spec, model, diag, a, b):
    def frame(y):
        lhat = _arima_path(model, y)
        e = y - lhat[:-1]
        rows = np.column_stack((_lag_cols(y, a), lhat, _lag_cols(e, b)))
        return rows, np.zeros(y.shape[0] + 1), _next_value_frame(y)
    return _Stage(frame, _hidden(spec, a + b + 1), {**diag, "y_lags": a, "residual_lags": b})


def _stage_babu_reddy(train, spec, m, model, diag, k):
    def frame(y):
        lin, r = _ma_parts(y, m)
        return _lag_cols(r, k), _arima_path(model, lin), _next_value_frame(r)
    return _Stage(frame, _hidden(spec, k), {**diag, "residual_lags": k})


def _stage_proposed(train, spec, m, model, diag, a, b):
    def frame(y):
        lin, r = _ma_parts(y, m)
        lhat = _arima_path(model, lin)
        rows = np.column_stack((_lag_cols(y, a), lhat, _lag_cols(r, b)))
        return rows, np.zeros(y.shape[0] + 1), _next_value_frame(y)
    return _Stage(frame, _hidden(spec, a + b + 1), {**diag, "y_lags": a, "residual_lags": b})


# ---------------------------------------------------------------- training

def _component_seed(seed, k):
    return int(np.random.SeedSequence([int(seed), int(k)]).generate_state(1)[0])


def _usable(rows, base, target, lo, hi):
    t = np.arange(lo, hi)
    ok = np.isfinite(base[t]) & np.isfinite(target[t]) & np.all(np.isfinite(rows[t]), axis=1)
    return t[ok]


def _fit_net(stage, rows, base, target, idx, cfg, seed):
    matrix = LagMatrix(rows[idx], target[idx], {}, idx)
    return train(matrix, (rows.shape[1], stage.hidden), cfg.with_seed(seed), validation=0.0)


def _validation_score(stage, train_y, spec, k):
    """Mean validation MAE over the tuning seeds (lower is better)."""
    rows, base, target = stage.frame(train_y)
    n = train_y.shape[0]
    idx = _usable(rows, base, target, 0, n)
    if idx.size < 4:
        return np.inf
    n_val = int(np.floor(idx.size * spec.tuning.validation_fraction))
    if n_val < 1 or idx.size - n_val < rows.shape[1] + stage.hidden:
        return np.inf
    fit_idx, val_idx = idx[:-n_val], idx[-n_val:]
    cfg = replace(spec.train_config, max_epochs=spec.tuning.epochs,
                  patience=min(spec.train_config.patience, spec.tuning.epochs - 1))
    scores = []
    for s in range(spec.tuning.seeds):
        model = _fit_net(stage, rows, base, target, fit_idx, cfg, _component_seed(10_000 + s, k))
        pred = base[val_idx] + predict_batch(model, rows[val_idx])
        scores.append(np.mean(np.abs(train_y[val_idx] - pred)))
    return float(np.mean(scores))


def _tune(candidates, build, train_y, spec, k, stage):
    """Pick the candidate whose stage scores lowest; ties keep the earlier one."""
    best = None
    for cand in candidates:
        st = build(*cand)
        score = _validation_score(st, train_y, spec, k)
        if best is None or score < best[0]:
            best = (score, cand, st)
    if best is None or not np.isfinite(best[0]):
        raise StageError(stage, ConfigurationError("no tuning candidate could be scored"))
    best[2].diagnostics["validation_mae"] = best[0]
    return best[2]


def prepare(train_y, spec: PipelineSpec, k: int = 0) -> _Stage:
    """Run the deterministic preparation of ``spec.method`` on a training series."""
    y = as_array(train_y)
    meth = spec.method
    if np.ptp(y) == 0.0:
        # a flat component (e.g. an exhausted EMD residue) forecasts itself
        level = float(y[0])
        return _Stage(lambda s: (None, np.full(s.shape[0] + 1, level), _next_value_frame(s)),
                      None, {"constant": level})
    if meth == "arima":
        return _stage_arima(y, spec)
    if meth == "ann":
        if spec.ann_arch is not None:
            return _stage_ann(y, spec, *spec.ann_arch)
        grid = itertools.product(spec.tuning.ann_inputs, spec.tuning.ann_hidden)
        return _tune(grid, lambda n, h: _stage_ann(y, spec, n, h), y, spec, k, "ann")
    if meth in ("zhang", "khashei_bijari"):
        model, diag = _linear_stage(y, spec, meth)
        if meth == "zhang":
            return _stage_zhang(y, spec, model, diag, spec.residual_lags)
        if spec.kb_lags is not None:
            return _stage_kb(y, spec, model, diag, *spec.kb_lags)
        grid = itertools.product(spec.tuning.kb_y_lags, spec.tuning.kb_r_lags)
        return _tune(grid, lambda a, b: _stage_kb(y, spec, model, diag, a, b), y, spec, k, meth)
    m, model, diag = _smooth_stage(y, spec, meth)
    if meth == "babu_reddy":
        return _stage_babu_reddy(y, spec, m, model, diag, spec.residual_lags)
    if spec.proposed_lags is not None:
        return _stage_proposed(y, spec, m, model, diag, *spec.proposed_lags)
    grid = itertools.product(spec.tuning.proposed_a, spec.tuning.proposed_b)
    return _tune(grid, lambda a, b: _stage_proposed(y, spec, m, model, diag, a, b),
                 y, spec, k, meth)


@dataclass
class _Component:
    """A prepared stage with its training frame and test-time feature rows."""

    stage: _Stage
    train_rows: Optional[np.ndarray]
    train_target: np.ndarray
    train_idx: np.ndarray
    test_rows: Optional[np.ndarray]
    test_base: np.ndarray

    def forecast(self, cfg, seed, validation=0.0):
        if not self.stage.neural:
            return self.test_base.copy()
        model = train(LagMatrix(self.train_rows, self.train_target, {}, self.train_idx),
                      (self.train_rows.shape[1], self.stage.hidden), cfg.with_seed(seed),
                      validation=validation)
        return self.test_base + predict_batch(model, self.test_rows)


def _component(stage, train_y, test_rows, test_base, label):
    rows, base, target = stage.frame(train_y)
    n = train_y.shape[0]
    if not np.all(np.isfinite(test_base)) or (
            test_rows is not None and not np.all(np.isfinite(test_rows))):
        raise StageError(label, ShapeError("training series too short to build test features"))
    if rows is None:
        return _Component(stage, None, target, np.zeros(0, int), None, test_base)
    idx = _usable(rows, base, target, 0, n)
    if idx.size < rows.shape[1] + stage.hidden:
        raise StageError(label, ShapeError(
            f"{idx.size} usable training rows for a {rows.shape[1]}x{stage.hidden} network"))
    return _Component(stage, rows[idx], target[idx], idx, test_rows, test_base)


def _joint_component(stage, series, n_train, label):
    rows, base, _ = stage.frame(series)
    n = series.shape[0]
    test_rows = None if rows is None else rows[n_train:n]
    return _component(stage, series[:n_train], test_rows, base[n_train:n], label)


def _collect(components, actual, spec, neural, diagnostics, method):
    cfg = spec.train_config
    runs = spec.runs if neural else 1

    def trainer(seed):
        total = np.zeros(actual.shape[0])
        for k, comp in enumerate(components):
            total = total + comp.forecast(cfg, _component_seed(seed, k), spec.final_validation)
        return evaluate(actual, total), total

    out = multi_run(trainer, runs, spec.seed_base, workers=spec.workers)
    return PipelineResult(method, np.vstack(out.payloads), out.reports, out.mean, out.std,
                          out.seeds, diagnostics)


def _split_arrays(train, test):
    tr, te = as_array(train), as_array(test)
    if tr.shape[0] < 4 or te.shape[0] < 2:
        raise ShapeError("need at least 4 training and 2 test observations")
    return tr, te


def run_pipeline(train, test, spec: PipelineSpec) -> PipelineResult:
    """Fit ``spec.method`` on ``train`` and forecast ``test`` one step at a time."""
    tr, te = _split_arrays(train, test)
    series = np.concatenate((tr, te))
    stage = prepare(tr, spec)
    comp = _joint_component(stage, series, tr.shape[0], spec.method)
    return _collect([comp], te, spec, stage.neural, dict(stage.diagnostics), spec.method)


def _with_method(spec, method):
    return spec if spec.method == method else replace(spec, method=method)


def run_arima(train, test, spec: PipelineSpec) -> PipelineResult:
    return run_pipeline(train, test, _with_method(spec, "arima"))


def run_ann(train, test, spec: PipelineSpec) -> PipelineResult:
    return run_pipeline(train, test, _with_method(spec, "ann"))


def run_zhang(train, test, spec: PipelineSpec) -> PipelineResult:
    """ARIMA forecast plus a network forecast of the ARIMA residual."""
    return run_pipeline(train, test, _with_method(spec, "zhang"))


def run_khashei_bijari(train, test, spec: PipelineSpec) -> PipelineResult:
    return run_pipeline(train, test, _with_method(spec, "khashei_bijari"))


def run_babu_reddy(train, test, spec: PipelineSpec) -> PipelineResult:
    return run_pipeline(train, test, _with_method(spec, "babu_reddy"))


def run_proposed(train, test, spec: PipelineSpec) -> PipelineResult:
    return run_pipeline(train, test, _with_method(spec, "proposed"))


# ---------------------------------------------------------------- EMD wrapper

def _align(result, k_target):
    """Force a decomposition to ``k_target`` components (IMFs then residue)."""
    comps = result.components
    if len(comps) == k_target:
        return comps
    if len(comps) > k_target:
        head = comps[:k_target - 1]
        return [*head, sum(comps[k_target - 1:])]
    zero = np.zeros_like(result.residue)
    return [*result.imfs, *([zero] * (k_target - len(comps))), result.residue]


def emd_wrap(inner: PipelineSpec, train, test, emd_config: _dec.EmdConfig = _dec.EmdConfig(),
             causal: bool = False) -> PipelineResult:
    """Run ``inner`` on every EMD component and sum the component forecasts.

    By default the series (training and test span together) is decomposed
    once. With ``causal=True`` only the training span is decomposed for
    fitting, and each test origin re-decomposes the observations before it;
    component counts are aligned to the training decomposition by folding
    surplus IMFs into the residue or padding with zero IMFs.
    """
    tr, te = _split_arrays(train, test)
    n_tr, n = tr.shape[0], tr.shape[0] + te.shape[0]
    series = np.concatenate((tr, te))
    spec = inner.for_component()
    try:
        full = _dec.emd(tr if causal else series, emd_config)
    except HybridcastError as exc:
        raise StageError("emd", exc) from exc
    comps = full.components
    if len(comps) == 1:
        # nothing to decompose: identical to the inner pipeline on the raw series
        comps = [tr if causal else series]
    K = len(comps)
    origins = _causal_decompositions(series, n_tr, n, K, emd_config) if causal else None
    failures, prepared, diags = {}, [], []
    for k, comp in enumerate(comps):
        label = f"component {k}"
        try:
            stage = prepare(comp[:n_tr], spec, k)
            if causal:
                rows, base = _origin_rows(stage, [o[k] for o in origins])
                prepared.append(_component(stage, comp[:n_tr], rows, base, label))
            else:
                prepared.append(_joint_component(stage, comp, n_tr, label))
            diags.append(dict(stage.diagnostics))
        except HybridcastError as exc:
            failures[k] = exc
    if failures:
        raise ComponentFailures(failures)
    diag = {"n_imfs": len(full.imfs), "mode": "causal" if causal else "joint",
            "sift_counts": list(full.sift_counts), "components": diags}
    neural = any(c.stage.neural for c in prepared)
    return _collect(prepared, te, spec, neural, diag, spec.method)


def _causal_decompositions(series, n_tr, n, K, cfg):
    """Aligned components of ``series[:t]`` for every test origin ``t``."""
    out = []
    for t in range(n_tr, n):
        hist = series[:t]
        if K == 1:
            out.append([hist])
            continue
        try:
            out.append(_align(_dec.emd(hist, cfg), K))
        except HybridcastError as exc:
            raise StageError(f"emd at origin {t}", exc) from exc
    return out


def _origin_rows(stage, histories):
    rows, base = [], []
    for hist in histories:
        r, b, _ = stage.frame(hist)
        t = hist.shape[0]
        base.append(b[t])
        if r is not None:
            rows.append(r[t])
    return (np.vstack(rows) if rows else None), np.array(base)
