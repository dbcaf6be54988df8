"""Synthetic two-group data with label drift between groups.

Each group is a pair of Gaussian class clusters.  Majority positives and
negatives sit at ``+s*a`` and ``-s*a`` with ``a = (1, 1)/sqrt(2)``.

* ``orthogonal`` -- minority positives/negatives sit at ``c + s*b`` and
  ``c - s*b`` with ``b = (1, -1)/sqrt(2)``, orthogonal to ``a``, around a
  centroid ``c = -minority_shift * a``.  The shift places the minority on
  the majority's negative side, so one linear boundary fitted mostly to
  the majority under-selects the minority.  With ``minority_shift = 0``
  the first attribute alone separates the labels of both groups.
* ``aligned`` -- minority clusters coincide with the majority's (control).

Dimensions beyond the second are pure noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .dataset import Dataset
from .exceptions import ConfigError


@dataclass(frozen=True)
class SynthConfig:
    n_major: int = 8000
    n_minor: int = 3000
    dims: int = 2
    separation: float = 2.0
    noise_sd: float = 0.6
    drift_mode: str = "orthogonal"
    minority_shift: float = 6.0
    seed: int = 0

    def __post_init__(self):
        if self.n_major < 4 or self.n_minor < 4:
            raise ConfigError("each group needs at least 4 tuples")
        if self.dims < 2:
            raise ConfigError("dims must be at least 2")
        if not (self.separation > 0 and self.noise_sd > 0):
            raise ConfigError("separation and noise_sd must be positive")
        if self.minority_shift < 0:
            raise ConfigError("minority_shift must be non-negative")
        if self.drift_mode not in ("orthogonal", "aligned"):
            raise ConfigError(f"unknown drift mode {self.drift_mode!r}")
        if self.seed < 0:
            raise ConfigError("seed must be unsigned")


def cluster_centers(cfg):
    """``{(group, label): center}`` in the first two dimensions."""
    a = np.array([1.0, 1.0]) / np.sqrt(2)
    s = cfg.separation
    centers = {(0, 1): s * a, (0, 0): -s * a}
    if cfg.drift_mode == "aligned":
        centers[(1, 1)], centers[(1, 0)] = s * a, -s * a
    else:
        b = np.array([1.0, -1.0]) / np.sqrt(2)
        c = -cfg.minority_shift * a
        centers[(1, 1)], centers[(1, 0)] = c + s * b, c - s * b
    return centers


def generate_frame(cfg=None):
    """Raw (unnormalized) data as a DataFrame with columns X1..Xd, group, label."""
    cfg = cfg or SynthConfig()
    rng = np.random.default_rng(cfg.seed)
    centers = cluster_centers(cfg)
    blocks, groups, labels = [], [], []
    for g, size in ((0, cfg.n_major), (1, cfg.n_minor)):
        n_pos = size // 2
        for c, count in ((1, n_pos), (0, size - n_pos)):
            mean = np.zeros(cfg.dims)
            mean[:2] = centers[(g, c)]
            blocks.append(rng.normal(mean, cfg.noise_sd, size=(count, cfg.dims)))
            groups.append(np.full(count, g))
            labels.append(np.full(count, c))
    frame = pd.DataFrame(np.vstack(blocks), columns=[f"X{j + 1}" for j in range(cfg.dims)])
    frame["group"] = np.concatenate(groups)
    frame["label"] = np.concatenate(labels)
    return frame


def generate(cfg=None):
    """Generate and preprocess a synthetic :class:`Dataset`."""
    cfg = cfg or SynthConfig()
    frame = generate_frame(cfg)
    names = tuple(f"X{j + 1}" for j in range(cfg.dims))
    d = Dataset.from_arrays(frame[list(names)].to_numpy(), frame["label"].to_numpy(),
                            frame["group"].to_numpy(), numeric_names=names)
    return Dataset(d.numeric, d.features, d.labels, d.groups, d.weights,
                   d.numeric_names, d.feature_names, (), frame)
