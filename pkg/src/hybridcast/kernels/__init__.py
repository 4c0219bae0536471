"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``HYBRIDCAST_DISABLE_NUMBA`` is
unset (or ``0``). Set ``HYBRIDCAST_DISABLE_NUMBA=1`` to force the numpy path.
Both backends stay importable through :func:`backend` for comparison.
"""
import importlib
import os

import numpy as np

from . import _numpy

_KERNELS = (
    "trailing_mean",
    "arma_residuals",
    "local_extrema",
    "zero_crossings",
    "mlp_loss_grad",
    "mlp_train_adam",
)


def _numba_requested():
    flag = os.environ.get("HYBRIDCAST_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


def _load_numba():
    try:
        return importlib.import_module("hybridcast.kernels._numba")
    except ImportError:
        return None


_numba = _load_numba() if _numba_requested() else None
USE_NUMBA = _numba is not None
_active = _numba if USE_NUMBA else _numpy


def backend(name=None):
    """Return the kernel module for ``"numba"`` or ``"numpy"`` (default: active)."""
    if name is None:
        return _active
    if name == "numpy":
        return _numpy
    if name == "numba":
        mod = _numba if _numba is not None else _load_numba()
        if mod is None:
            raise ImportError("numba backend is not available")
        return mod
    raise ValueError(f"unknown backend {name!r}")


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def trailing_mean(y, m):
    return _active.trailing_mean(_f64(y), int(m))


def arma_residuals(w, intercept, ar, ma):
    return _active.arma_residuals(_f64(w), float(intercept), _f64(ar), _f64(ma))


def local_extrema(x):
    return _active.local_extrema(_f64(x))


def zero_crossings(x):
    return int(_active.zero_crossings(_f64(x)))


def mlp_loss_grad(X, y, W, b, v, c):
    return _active.mlp_loss_grad(_f64(X), _f64(y), _f64(W), _f64(b), _f64(v), float(c))


def mlp_train_adam(X, y, Xv, yv, W, b, v, c, lr, beta1, beta2, eps, max_epochs, patience):
    return _active.mlp_train_adam(
        _f64(X), _f64(y), _f64(Xv), _f64(yv), _f64(W), _f64(b), _f64(v), float(c),
        float(lr), float(beta1), float(beta2), float(eps), int(max_epochs), int(patience),
    )


__all__ = ["USE_NUMBA", "backend", *_KERNELS]
