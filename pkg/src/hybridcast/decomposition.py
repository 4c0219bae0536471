"""Series decomposition: trailing moving-average split and empirical mode
decomposition (EMD) by cubic-spline envelope sifting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import (BoundsError, ConfigurationError, DegenerateInputError,
                     SearchExhaustedError)
from .series import as_array
from .stats import adf_test, kurtosis


@dataclass(frozen=True)
class MaDecomposition:
    """``linear[k] + residual[k] == y[k + offset]`` where ``offset = m - 1``."""

    m: int
    linear: np.ndarray
    residual: np.ndarray

    @property
    def offset(self):
        return self.m - 1

    def padded(self):
        """Linear and residual parts on the input's index, NaN where undefined."""
        n = self.linear.shape[0] + self.offset
        lin = np.full(n, np.nan)
        res = np.full(n, np.nan)
        lin[self.offset:] = self.linear
        res[self.offset:] = self.residual
        return lin, res


def ma_filter(series, m: int) -> MaDecomposition:
    """Split into a trailing ``m``-point mean and the remainder."""
    y = as_array(series)
    if not 1 <= m <= y.shape[0]:
        raise BoundsError(f"filter length must be in [1, {y.shape[0]}], got {m}")
    lin = y.copy() if m == 1 else kernels.trailing_mean(y, m)
    return MaDecomposition(m, lin, y[m - 1:] - lin)


def _check_m_max(n, m_max):
    if m_max is None:
        m_max = (n - 1) // 2
    if m_max < 2:
        raise BoundsError("m_max must be at least 2")
    if m_max >= n / 2:
        raise BoundsError(f"m_max must be below half the series length ({n / 2}), got {m_max}")
    return m_max


def find_ma_length_adf(series, p_threshold: float = 0.05, m_max: int | None = None,
                       autolag: str = "t-stat"):
    """Smallest ``m`` in ``2..m_max`` whose linear part rejects a unit root.

    Returns ``(m, p_value)``.
    """
    y = as_array(series)
    m_max = _check_m_max(y.shape[0], m_max)
    best = (np.inf, None)
    for m in range(2, m_max + 1):
        lin = ma_filter(y, m).linear
        try:
            p = adf_test(lin, autolag=autolag).p_value
        except DegenerateInputError:
            continue
        if p < best[0]:
            best = (p, m)
        if p < p_threshold:
            return m, p
    raise SearchExhaustedError(
        f"no filter length in 2..{m_max} reached ADF p < {p_threshold}; best p={best[0]:.4g} at m={best[1]}",
        best_value=best[0], best_candidate=best[1])


def find_ma_length_kurtosis(series, m_max: int | None = None, target: float = 3.0) -> int:
    """``m`` in ``2..m_max`` whose linear part has kurtosis closest to ``target``."""
    y = as_array(series)
    m_max = _check_m_max(y.shape[0], m_max)
    best = None
    for m in range(2, m_max + 1):
        try:
            gap = abs(kurtosis(ma_filter(y, m).linear) - target)
        except DegenerateInputError:
            continue
        if best is None or gap < best[0]:
            best = (gap, m)
    if best is None:
        raise DegenerateInputError("every candidate filter length gave a zero-variance linear part")
    return best[1]


@dataclass(frozen=True)
class EmdConfig:
    sd_threshold: float = 0.2
    max_sift_iters: int = 100
    max_imfs: int = 16
    boundary: str = "mirror"
    mirror_extrema: int = 2

    def __post_init__(self):
        if not 0 < self.sd_threshold <= 1:
            raise ConfigurationError("sd_threshold must lie in (0, 1]")
        if self.max_sift_iters < 1 or self.max_imfs < 0:
            raise ConfigurationError("max_sift_iters must be >= 1 and max_imfs >= 0")
        if self.boundary != "mirror":
            raise ConfigurationError("only mirror boundary extension is supported")


@dataclass(frozen=True)
class EmdResult:
    imfs: list
    residue: np.ndarray
    sift_counts: list = field(default_factory=list)

    @property
    def components(self):
        """IMFs followed by the residue."""
        return [*self.imfs, self.residue]

    def reconstruct(self):
        out = self.residue.copy()
        for imf in self.imfs:
            out = out + imf
        return out


def _mirror(idx, vals, n, k):
    # reflect the k extrema nearest each end about the first and last sample
    left = -idx[:k][::-1]
    right = 2 * (n - 1) - idx[-k:][::-1]
    return (np.concatenate((left, idx, right)),
            np.concatenate((vals[:k][::-1], vals, vals[-k:][::-1])))


def _envelope_mean(h, cfg):
    maxima, minima = kernels.local_extrema(h)
    if maxima.shape[0] < 1 or minima.shape[0] < 1 or maxima.shape[0] + minima.shape[0] < 2:
        return None
    n = h.shape[0]
    t = np.arange(n)
    k = cfg.mirror_extrema
    xu, yu = _mirror(maxima, h[maxima], n, k)
    xl, yl = _mirror(minima, h[minima], n, k)
    try:
        upper = CubicSpline(xu, yu)(t)
        lower = CubicSpline(xl, yl)(t)
    except ValueError:
        return None
    return 0.5 * (upper + lower)


def is_imf(h) -> bool:
    """Extrema and zero-crossing counts differ by at most one."""
    mx, mn = kernels.local_extrema(h)
    return abs(mx.shape[0] + mn.shape[0] - kernels.zero_crossings(h)) <= 1


def _sift(x, cfg):
    h = x
    count = 0
    for count in range(1, cfg.max_sift_iters + 1):
        mean = _envelope_mean(h, cfg)
        if mean is None:
            return (None, count) if count == 1 else (h, count - 1)
        nxt = h - mean
        sd = float(np.sum((h - nxt) ** 2) / max(np.sum(h ** 2), 1e-300))
        h = nxt
        if sd < cfg.sd_threshold and is_imf(h):
            break
    return h, count


def emd(series, config: EmdConfig = EmdConfig()) -> EmdResult:
    """Empirical mode decomposition.

    Each IMF is sifted until the normalised squared change between
    successive sifts drops below ``sd_threshold`` and the candidate satisfies
    the IMF extrema/zero-crossing condition, or ``max_sift_iters`` is hit.
    Extraction stops when the residue has fewer than two extrema, its range
    is negligible next to the input's, or ``max_imfs`` IMFs exist. The residue is the input minus all IMFs, so the
    components sum back to the input.
    """
    y = as_array(series)
    if y.shape[0] < 8:
        raise BoundsError("EMD needs at least 8 points")
    if np.ptp(y) == 0.0:
        raise DegenerateInputError("EMD needs a nonconstant series")
    residue = y.copy()
    imfs, counts = [], []
    floor = 1e-10 * float(np.ptp(y))
    while len(imfs) < config.max_imfs:
        mx, mn = kernels.local_extrema(residue)
        if mx.shape[0] + mn.shape[0] < 2 or np.ptp(residue) <= floor:
            break
        imf, n_sift = _sift(residue, config)
        if imf is None:
            break
        residue = residue - imf
        if np.ptp(residue) <= floor:
            # the sift swallowed the last oscillation; keep the rounding dust in the IMF
            imf = imf + residue
            residue = np.zeros_like(residue)
        imfs.append(imf)
        counts.append(n_sift)
    return EmdResult(imfs, residue, counts)
