"""Kernel density scores and the densest-core filter used before profiling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_2d, check_index
from .exceptions import ConfigError, InsufficientDataError

BANDWIDTH_FLOOR = 1e-6
DEFAULT_FRACTION = 0.2
_CHUNK = 512


@dataclass(frozen=True)
class DensityConfig:
    """``fraction`` is the share of each subset kept (the density threshold)."""

    fraction: float = DEFAULT_FRACTION
    bandwidth_rule: str = "scott"

    def __post_init__(self):
        if not (0 < self.fraction <= 1):
            raise ConfigError(f"density fraction must lie in (0, 1], got {self.fraction}")
        if self.bandwidth_rule != "scott":
            raise ConfigError(f"unsupported bandwidth rule {self.bandwidth_rule!r}")


def scott_bandwidth(X):
    """Per-dimension Scott bandwidth ``std_j * n**(-1/(m+4))``, floored."""
    n, m = X.shape
    sd = X.std(axis=0, ddof=1)
    return np.maximum(sd * n ** (-1.0 / (m + 4)), BANDWIDTH_FLOOR)


def kde(sample, points, bandwidth=None):
    """Product-Gaussian KDE fitted on ``sample`` and evaluated at ``points``."""
    sample = as_2d(sample)
    points = as_2d(points, sample.shape[1])
    h = scott_bandwidth(sample) if bandwidth is None else np.asarray(bandwidth, dtype=np.float64)
    n, m = sample.shape
    norm = n * np.prod(h) * (2 * np.pi) ** (m / 2)
    Zs = sample / h
    out = np.empty(points.shape[0])
    for start in range(0, points.shape[0], _CHUNK):
        Zp = points[start:start + _CHUNK] / h
        sq = ((Zp[:, None, :] - Zs[None, :, :]) ** 2).sum(axis=2)
        out[start:start + _CHUNK] = np.exp(-0.5 * sq).sum(axis=1) / norm
    return out


def _subset(data, idx):
    X = data.numeric if hasattr(data, "numeric") else as_2d(data)
    idx = np.arange(X.shape[0]) if idx is None else check_index(idx, X.shape[0])
    return X[idx], idx


def density_scores(data, idx=None):
    """KDE density of each tuple in ``idx`` under the KDE fitted on ``idx``.

    Naive O(n^2) evaluation with a product Gaussian kernel and per-dimension
    Scott bandwidth.
    """
    X, idx = _subset(data, idx)
    if X.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 tuples for density estimation, got {X.shape[0]}")
    return kde(X, X)


def keep_count(fraction, size):
    """``min(max(2, ceil(fraction*size)), size)``; ceil is robust to 0.7*10 style noise."""
    k = math.ceil(fraction * size - 1e-9)
    return min(max(2, k), size)


def filter_densest(data, idx=None, fraction=DEFAULT_FRACTION):
    """Keep the densest ``fraction`` of ``idx``.

    Tuples are ordered by descending density with ties going to the lower
    original index; the first ``keep_count(fraction, len(idx))`` are
    returned in that order.
    """
    if isinstance(fraction, DensityConfig):
        fraction = fraction.fraction
    DensityConfig(fraction)
    _, idx = _subset(data, idx)
    if idx.size == 0:
        raise InsufficientDataError("cannot filter an empty subset")
    if idx.size == 1:
        return idx.copy()
    scores = density_scores(data, idx)
    order = np.lexsort((idx, -scores))
    return idx[order[:keep_count(fraction, idx.size)]]
