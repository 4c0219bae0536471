"""Experiment orchestration: config files, result tables and improvement tables."""
from __future__ import annotations

import configparser
import hashlib
import json
import os
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..arima import ArimaOrder
from ..decomposition import EmdConfig
from ..errors import ConfigurationError, HybridcastError
from ..hybrids import METHODS, PipelineSpec, TuningConfig, emd_wrap, run_pipeline
from ..mlp import TrainConfig
from ..series import split
from .datasets import DatasetDescriptor, descriptor, load_dataset

OUTPUT_DIR_ENV = "HYBRIDCAST_OUTPUT_DIR"
METRICS = ("mae", "mse", "mase")


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple
    methods: tuple
    use_emd: bool = False
    emd_causal: bool = False
    runs: int = 50
    seed_base: int = 0
    output_dir: str = "results"
    emd: EmdConfig = EmdConfig()
    workers: int = 1

    def __post_init__(self):
        if not self.datasets or not self.methods:
            raise ConfigurationError("an experiment needs at least one dataset and one method")
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1")
        for spec in self.methods:
            if not isinstance(spec, PipelineSpec):
                raise ConfigurationError("methods must be PipelineSpec instances")

    def fingerprint(self) -> dict:
        """Everything that determines the numbers, in a JSON-stable form."""
        def spec_dict(s):
            return {"method": s.method, "arima_order": str(s.arima_order) if s.arima_order else None,
                    "ann_arch": s.ann_arch, "proposed_lags": s.proposed_lags,
                    "ma_rule": s.ma_rule, "residual_lags": s.residual_lags, "kb_lags": s.kb_lags,
                    "train": vars(s.train_config), "tuning": vars(s.tuning),
                    "adf_threshold": s.adf_threshold, "final_validation": s.final_validation}

        def ds_dict(d):
            return {k: (str(v) if isinstance(v, ArimaOrder) else v) for k, v in vars(d).items()}
        return {"datasets": [ds_dict(d) for d in self.datasets],
                "methods": [spec_dict(s) for s in self.methods],
                "use_emd": self.use_emd, "emd_causal": self.emd_causal, "runs": self.runs,
                "seed_base": self.seed_base, "emd": vars(self.emd)}

    def config_hash(self) -> str:
        blob = json.dumps(self.fingerprint(), sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class ResultTable:
    cells: dict = field(default_factory=dict)        # (dataset, method, metric) -> (mean, std)
    errors: dict = field(default_factory=dict)       # (dataset, method) -> message
    provenance: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)       # (dataset, method) -> (actual, forecast)
    diagnostics: dict = field(default_factory=dict)  # (dataset, method) -> dict

    def keys(self):
        return sorted({(d, m) for d, m, _ in self.cells})

    def get(self, dataset, method, metric):
        return self.cells[(dataset, method, metric)]

    def mean(self, dataset, method, metric):
        return self.cells[(dataset, method, metric)][0]


def _spec_for(base: PipelineSpec, desc: DatasetDescriptor, cfg: ExperimentConfig) -> PipelineSpec:
    """Apply dataset-level settings that the method does not already pin."""
    upd = {"runs": cfg.runs, "seed_base": cfg.seed_base, "workers": cfg.workers}
    m = base.method
    if base.arima_order is None and desc.fixed_arima_order is not None and m in (
            "arima", "zhang", "khashei_bijari"):
        upd["arima_order"] = desc.fixed_arima_order
    if base.ann_arch is None and desc.fixed_ann_arch is not None and m == "ann":
        upd["ann_arch"] = desc.fixed_ann_arch
    if m == "proposed":
        if base.ma_rule is None and desc.fixed_ma_length is not None:
            upd["ma_rule"] = f"fixed:{desc.fixed_ma_length}"
        if base.proposed_lags is None and desc.proposed_lags is not None:
            upd["proposed_lags"] = desc.proposed_lags
    return replace(base, **upd)


def run_cell(desc: DatasetDescriptor, spec: PipelineSpec, cfg: ExperimentConfig, ts=None):
    ts = load_dataset(desc) if ts is None else ts
    train, test = split(ts, desc.split_point(len(ts)))
    spec = _spec_for(spec, desc, cfg)
    if cfg.use_emd:
        return emd_wrap(spec, train, test, cfg.emd, causal=cfg.emd_causal), test
    return run_pipeline(train, test, spec), test


def run_experiment(config: ExperimentConfig, progress=None) -> ResultTable:
    """Compute every (dataset, method) cell; failures are recorded, not raised."""
    table = ResultTable()
    cell_seeds = {}
    for desc in config.datasets:
        try:
            ts = load_dataset(desc)
        except (OSError, HybridcastError, ValueError) as exc:
            for spec in config.methods:
                table.errors[(desc.name, spec.method)] = f"{type(exc).__name__}: {exc}"
            continue
        for spec in config.methods:
            key = (desc.name, spec.method)
            try:
                res, test = run_cell(desc, spec, config, ts)
            except (HybridcastError, ValueError, ArithmeticError) as exc:
                table.errors[key] = f"{type(exc).__name__}: {exc}"
                continue
            scale = desc.report_scale
            for metric in METRICS:
                f = scale if metric in ("mae", "mse") else 1.0
                table.cells[(desc.name, spec.method, metric)] = (
                    float(res.mean[metric]) * f, float(res.std[metric]) * f)
            table.series[key] = (np.asarray(test.values), res.mean_forecast)
            table.diagnostics[key] = res.diagnostics
            cell_seeds[f"{desc.name}/{spec.method}"] = list(map(int, res.seeds))
            if progress is not None:
                progress(key, res)
    table.provenance = {"config_hash": config.config_hash(), "seed_base": config.seed_base,
                        "runs": config.runs, "use_emd": config.use_emd,
                        "emd_mode": "causal" if config.emd_causal else "joint",
                        "seeds": cell_seeds,
                        "report_scale": {d.name: d.report_scale for d in config.datasets}}
    return table


def improvement_table(base: ResultTable, improved: ResultTable) -> dict:
    """Percentage improvement ``100 (base - improved) / base`` per shared cell."""
    out = {}
    for key, (b, _) in sorted(base.cells.items()):
        if key not in improved.cells:
            warnings.warn(f"cell {key} missing from the improved table; omitted", stacklevel=2)
            continue
        if b == 0.0:
            warnings.warn(f"cell {key} has a zero base value; omitted", stacklevel=2)
            continue
        out[key] = 100.0 * (b - improved.cells[key][0]) / b
    for key in sorted(set(improved.cells) - set(base.cells)):
        warnings.warn(f"cell {key} missing from the base table; omitted", stacklevel=2)
    return out


# ---------------------------------------------------------------- config files

def _tuple_ints(text, sep=","):
    try:
        return tuple(int(x) for x in text.replace("x", sep).split(sep))
    except ValueError:
        raise ConfigurationError(f"expected integers separated by '{sep}', got {text!r}") from None


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {text!r}")


_DATASET_KEYS = {
    "path": str, "transform": str, "train_len": int, "train_fraction": float,
    "arima_order": ArimaOrder.parse, "ann_arch": lambda s: _tuple_ints(s, "x"),
    "ma_length": int, "proposed_lags": _tuple_ints, "expected_length": int,
    "sha256": str, "report_scale": float,
}
_DATASET_FIELD = {"arima_order": "fixed_arima_order", "ann_arch": "fixed_ann_arch",
                  "ma_length": "fixed_ma_length"}
_METHOD_KEYS = {
    "arima_order": ArimaOrder.parse, "ann_arch": lambda s: _tuple_ints(s, "x"),
    "proposed_lags": _tuple_ints, "ma_rule": str, "residual_lags": int,
    "kb_lags": _tuple_ints, "adf_threshold": float,
}


def _section(parser, name):
    return parser[name] if parser.has_section(name) else {}


def load_config(path, **overrides) -> ExperimentConfig:
    """Parse an INI experiment file.

    ``[experiment]`` lists ``datasets`` and ``methods`` and sets ``runs``,
    ``seed``, ``emd``, ``emd_mode`` (joint or causal), ``output_dir`` and
    ``workers``. Optional sections ``[dataset:<name>]``, ``[method:<tag>]``,
    ``[training]``, ``[tuning]`` and ``[emd]`` override defaults.
    Keyword ``overrides`` (``runs``, ``seed_base``, ``use_emd``,
    ``output_dir``) win over the file.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    return config_from_parser(parser, base_dir=Path(path).parent, **overrides)


def config_from_parser(parser, base_dir=Path("."), **overrides) -> ExperimentConfig:
    if not parser.has_section("experiment"):
        raise ConfigurationError("config needs an [experiment] section")
    exp = parser["experiment"]
    known = {"datasets", "methods", "runs", "seed", "emd", "emd_mode", "output_dir", "workers"}
    unknown = set(exp) - known
    if unknown:
        raise ConfigurationError(f"unknown [experiment] keys: {sorted(unknown)}")
    names = [x.strip() for x in exp.get("datasets", "").split(",") if x.strip()]
    tags = [x.strip() for x in exp.get("methods", ",".join(METHODS)).split(",") if x.strip()]

    try:
        training = dict(_section(parser, "training"))
        final_validation = float(training.pop("validation", 0.0))
        train_cfg = TrainConfig(**{k: (float(v) if k in ("learning_rate", "beta1", "beta2", "eps")
                                       else int(v))
                                   for k, v in training.items()})
        tuning = _tuning(_section(parser, "tuning"))
        emd_cfg = EmdConfig(**{k: (float(v) if k == "sd_threshold" else
                                   v if k == "boundary" else int(v))
                               for k, v in _section(parser, "emd").items()})
    except TypeError as exc:
        raise ConfigurationError(f"unknown option: {exc}") from None
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None

    datasets = []
    for name in names:
        upd = {}
        for key, raw in _section(parser, f"dataset:{name}").items():
            if key not in _DATASET_KEYS:
                raise ConfigurationError(f"unknown key {key!r} in [dataset:{name}]")
            val = _DATASET_KEYS[key](raw)
            if key == "path" and not val.startswith(("package:", "env:")) \
                    and not os.path.isabs(val):
                val = str(base_dir / val)
            upd[_DATASET_FIELD.get(key, key)] = val
        datasets.append(descriptor(name, **upd))

    methods = []
    for tag in tags:
        upd = {}
        for key, raw in _section(parser, f"method:{tag}").items():
            if key not in _METHOD_KEYS:
                raise ConfigurationError(f"unknown key {key!r} in [method:{tag}]")
            upd[key] = _METHOD_KEYS[key](raw)
        methods.append(PipelineSpec(tag, train_config=train_cfg, tuning=tuning,
                                    final_validation=final_validation, **upd))

    mode = exp.get("emd_mode", "joint").strip()
    if mode not in ("joint", "causal"):
        raise ConfigurationError("emd_mode must be 'joint' or 'causal'")
    kw = dict(datasets=tuple(datasets), methods=tuple(methods),
              use_emd=_bool(exp.get("emd", "false")), emd_causal=mode == "causal",
              runs=int(exp.get("runs", 50)), seed_base=int(exp.get("seed", 0)),
              output_dir=exp.get("output_dir", os.environ.get(OUTPUT_DIR_ENV, "results")),
              emd=emd_cfg, workers=int(exp.get("workers", 1)))
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw)


def _tuning(section):
    kw = {}
    for k, v in section.items():
        if k in ("seeds", "epochs", "p_max", "d_max", "q_max"):
            kw[k] = int(v)
        elif k == "validation_fraction":
            kw[k] = float(v)
        else:
            kw[k] = _range_or_list(v)
    return TuningConfig(**kw)


def _range_or_list(text):
    """``"1-8"`` or ``"1,2,4"`` to a tuple of ints."""
    text = text.strip()
    if "-" in text and "," not in text:
        lo, hi = (int(x) for x in text.split("-", 1))
        return tuple(range(lo, hi + 1))
    return _tuple_ints(text)
