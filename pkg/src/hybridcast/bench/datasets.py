"""Benchmark dataset descriptors and loading.

Sunspot (yearly, 1700-1987) and Canadian lynx (yearly, 1821-1934) ship with
the package. The GBP/USD daily exchange rate and the intraday price series
are not redistributed: place ``gbpusd.csv`` and ``intraday.csv`` (``label,value``
with a header) in the directory named by ``HYBRIDCAST_DATA_DIR``.
"""
from __future__ import annotations

import hashlib
import os
import warnings
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from ..arima import ArimaOrder
from ..errors import ConfigurationError
from ..series import TimeSeries, apply_transform, read_csv

DATA_DIR_ENV = "HYBRIDCAST_DATA_DIR"


@dataclass(frozen=True)
class DatasetDescriptor:
    name: str
    path: Optional[str]
    transform: str = "none"
    train_len: Optional[int] = None
    train_fraction: float = 0.8
    fixed_arima_order: Optional[ArimaOrder] = None
    fixed_ann_arch: Optional[tuple] = None
    fixed_ma_length: Optional[int] = None
    proposed_lags: Optional[tuple] = None
    expected_length: Optional[int] = None
    sha256: Optional[str] = None
    report_scale: float = 1.0

    def resolve_path(self) -> Path:
        if self.path is None:
            raise ConfigurationError(f"dataset {self.name!r} has no path")
        if self.path.startswith("package:"):
            return Path(str(resources.files("hybridcast.data") / self.path.split(":", 1)[1]))
        if self.path.startswith("env:"):
            root = os.environ.get(DATA_DIR_ENV)
            fname = self.path.split(":", 1)[1]
            if not root:
                raise FileNotFoundError(
                    f"dataset {self.name!r} is not bundled; put {fname} in a directory and "
                    f"point {DATA_DIR_ENV} at it")
            return Path(root) / fname
        return Path(self.path)

    def available(self) -> bool:
        try:
            return self.resolve_path().is_file()
        except (FileNotFoundError, ConfigurationError):
            return False

    def split_point(self, n: int) -> int:
        if self.train_len is not None:
            cut = self.train_len
        else:
            cut = int(n * self.train_fraction)
        if not 1 <= cut < n:
            raise ConfigurationError(f"dataset {self.name!r}: train length {cut} invalid for {n} points")
        return cut


BUILTIN = {
    "sunspot": DatasetDescriptor(
        "sunspot", "package:sunspot.csv", "none", train_len=221,
        fixed_arima_order=ArimaOrder(9, 0, 0), fixed_ann_arch=(4, 4), fixed_ma_length=15,
        proposed_lags=(4, 2), expected_length=288,
        sha256="1b7366f952f7a4b46e716021dae234221c0947971c69d38794d44857c5185bd7"),
    "lynx": DatasetDescriptor(
        "lynx", "package:lynx.csv", "log-base10", train_len=100,
        fixed_arima_order=ArimaOrder(12, 0, 0), fixed_ann_arch=(7, 5), fixed_ma_length=5,
        proposed_lags=(5, 3), expected_length=114,
        sha256="822d30804243721ddeb745d532294ab8455e42cc64435a6d6df578f672188114"),
    "gbpusd": DatasetDescriptor(
        "gbpusd", "env:gbpusd.csv", "log-natural", train_len=679,
        fixed_arima_order=ArimaOrder.rw(), fixed_ann_arch=(7, 6), fixed_ma_length=40,
        proposed_lags=(5, 3), expected_length=731, report_scale=1e5),
    "intraday": DatasetDescriptor(
        "intraday", "env:intraday.csv", "none", train_fraction=0.8,
        fixed_arima_order=ArimaOrder(9, 0, 0), fixed_ann_arch=(3, 6), fixed_ma_length=6,
        proposed_lags=(8, 8), expected_length=581),
}


def descriptor(name: str, **overrides) -> DatasetDescriptor:
    """Built-in descriptor by name, optionally with fields replaced."""
    try:
        base = BUILTIN[name]
    except KeyError:
        if "path" not in overrides:
            raise ConfigurationError(
                f"unknown dataset {name!r}; built-ins are {sorted(BUILTIN)}") from None
        base = DatasetDescriptor(name, None)
    return replace(base, **overrides) if overrides else base


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def load_dataset(desc: DatasetDescriptor) -> TimeSeries:
    """Read, checksum, length-check and transform a dataset.

    A checksum mismatch is an error; a length mismatch only warns, since
    vendors occasionally revise series.
    """
    path = desc.resolve_path()
    if desc.sha256 is not None:
        digest = _sha256(path)
        if digest != desc.sha256:
            raise ConfigurationError(f"{path}: sha256 {digest} does not match the descriptor")
    ts = read_csv(path, desc.name)
    if desc.expected_length is not None and len(ts) != desc.expected_length:
        warnings.warn(f"dataset {desc.name!r} has {len(ts)} points, expected "
                      f"{desc.expected_length}", stacklevel=2)
    return apply_transform(ts, desc.transform)
