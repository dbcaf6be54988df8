"""Conformance-guided reweighing.

Every training tuple first gets a balance weight that makes group and label
independent.  Each (group, label) cell is then profiled on its densest core;
tuples of a targeted cell that satisfy all of that cell's constraints
receive an additive boost (``alpha_u`` for the minority cell, ``alpha_w``
for the majority cell).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_2d, check_binary, check_index
from .conformance import profile_cells
from .dataset import partition_by_group_label
from .density import DensityConfig
from .exceptions import ConfigError, InsufficientGroupDataError
from .learner import LearnerConfig, train
from .metrics import evaluate

TARGETS = ("disparate_impact", "eq_odds_fnr", "eq_odds_fpr")
DEFAULT_ALPHA_GRID = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0)


@dataclass(frozen=True)
class ConfairConfig:
    alpha_u: float = 0.0
    alpha_w: float = 0.0
    target: str = "disparate_impact"
    density_cfg: DensityConfig = field(default_factory=DensityConfig)

    def __post_init__(self):
        for name in ("alpha_u", "alpha_w"):
            a = getattr(self, name)
            if not (np.isfinite(a) and a >= 0):
                raise ConfigError(f"{name} must be finite and non-negative, got {a}")
        if self.target not in TARGETS:
            raise ConfigError(f"unknown target {self.target!r}; expected one of {TARGETS}")


@dataclass(frozen=True, eq=False)
class WeightAssignment:
    """Weights for the tuples in ``index`` (same order), with their decomposition.

    ``boosted_cells`` maps each boosted ``(group, label)`` cell to its alpha.
    """

    index: np.ndarray
    weights: np.ndarray
    base: np.ndarray
    boost: np.ndarray
    conforming: np.ndarray
    boosted_cells: dict


def boosted_cells(minority_rate, majority_rate, alpha_u, alpha_w, target):
    """Decide which (group, label) cells get which boost.

    For disparate impact the boost goes against the observed label skew:
    when the minority's positive rate does not exceed the majority's,
    minority positives get ``alpha_u`` and majority negatives ``alpha_w``;
    otherwise the mirrored cells.  The equalized-odds targets boost a single
    minority cell.
    """
    if target == "eq_odds_fnr":
        return {(1, 1): alpha_u}
    if target == "eq_odds_fpr":
        return {(1, 0): alpha_u}
    if minority_rate <= majority_rate:
        return {(1, 1): alpha_u, (0, 0): alpha_w}
    return {(1, 0): alpha_u, (0, 1): alpha_w}


class ConfairReweigher(BaseEstimator):
    """Estimator computing conformance-boosted training weights.

    ``fit(X, y, groups)`` takes the normalized numerical attributes; after
    fitting, ``weights_`` holds the weights and :meth:`weights_for` recomputes
    them for other alphas without profiling again.
    """

    def __init__(self, alpha_u=0.0, alpha_w=0.0, target="disparate_impact", density_fraction=0.2):
        self.alpha_u = alpha_u
        self.alpha_w = alpha_w
        self.target = target
        self.density_fraction = density_fraction

    def fit(self, X, y, groups):
        X = as_2d(X)
        y = check_binary(y, "y")
        groups = check_binary(groups, "groups")
        ConfairConfig(self.alpha_u, self.alpha_w, self.target, DensityConfig(self.density_fraction))
        cells = partition_by_group_label((groups, y))
        for cell, members in cells.items():
            if members.size == 0:
                raise InsufficientGroupDataError(
                    f"training cell (group={cell[0]}, label={cell[1]}) is empty", cell)
        n = y.size
        base = np.empty(n)
        for (g, c), members in cells.items():
            label_count = cells[(0, c)].size + cells[(1, c)].size
            group_count = cells[(g, 0)].size + cells[(g, 1)].size
            base[members] = (label_count / n) * (group_count / members.size)

        # A single-tuple cell has no covariance to profile; its envelope is
        # the tuple itself, which trivially conforms to it.
        conforming = np.zeros(n, dtype=bool)
        profiled = [m for m in cells.values() if m.size >= 2]
        for m in cells.values():
            if m.size == 1:
                conforming[m] = True
        data = _ArrayData(X, groups, y)
        idx = np.sort(np.concatenate(profiled)) if profiled else np.empty(0, dtype=np.intp)
        profiles = profile_cells(data, idx, self.density_fraction)
        for cell, (cs, _) in profiles.items():
            members = cells[cell]
            conforming[members] = cs.violation(X[members]) == 0

        rate = {g: cells[(g, 1)].size / (cells[(g, 0)].size + cells[(g, 1)].size) for g in (0, 1)}
        self.base_weights_ = base
        self.conforming_ = conforming
        self.constraint_sets_ = {cell: cs for cell, (cs, _) in profiles.items()}
        self.profiled_index_ = {cell: kept for cell, (_, kept) in profiles.items()}
        self.positive_rate_ = rate
        self.cell_masks_ = {cell: np.isin(np.arange(n), members) for cell, members in cells.items()}
        self.assignment_ = self.assign(self.alpha_u, self.alpha_w)
        self.weights_ = self.assignment_.weights
        return self

    def assign(self, alpha_u, alpha_w):
        ConfairConfig(alpha_u, alpha_w, self.target)
        cells = boosted_cells(self.positive_rate_[1], self.positive_rate_[0], alpha_u, alpha_w, self.target)
        boost = np.zeros_like(self.base_weights_)
        for cell, alpha in cells.items():
            boost[self.cell_masks_[cell] & self.conforming_] += alpha
        n = boost.size
        return WeightAssignment(np.arange(n), self.base_weights_ + boost, self.base_weights_.copy(),
                                boost, self.conforming_.copy(), cells)

    def weights_for(self, alpha_u, alpha_w):
        return self.assign(alpha_u, alpha_w).weights


@dataclass(frozen=True)
class _ArrayData:
    """Adapter giving raw arrays the ``numeric``/``groups``/``labels`` interface."""

    numeric: np.ndarray
    groups: np.ndarray
    labels: np.ndarray

    @property
    def n(self):
        return self.labels.size


def _fit_reweigher(d, train_idx, cfg):
    return ConfairReweigher(cfg.alpha_u, cfg.alpha_w, cfg.target, cfg.density_cfg.fraction).fit(
        d.numeric[train_idx], d.labels[train_idx], d.groups[train_idx])


def assign_weights(d, train_idx, cfg=None):
    """Weights for the training tuples ``train_idx`` (aligned with it)."""
    cfg = cfg or ConfairConfig()
    train_idx = check_index(train_idx, d.n)
    cells = partition_by_group_label(d, train_idx)
    for cell, members in cells.items():
        if members.size == 0:
            raise InsufficientGroupDataError(
                f"training cell (group={cell[0]}, label={cell[1]}) is empty", cell)
    a = _fit_reweigher(d, train_idx, cfg).assignment_
    return WeightAssignment(train_idx.copy(), a.weights, a.base, a.boost, a.conforming, a.boosted_cells)


def _objective(report, target):
    rates = report.group_rates
    if target == "eq_odds_fnr":
        return -abs(rates["U"].fnr - rates["W"].fnr)
    if target == "eq_odds_fpr":
        return -abs(rates["U"].fpr - rates["W"].fpr)
    return report.di_star


def alpha_sweep(d, splits, learner_cfg=None, density_cfg=None, grid=DEFAULT_ALPHA_GRID,
                target="disparate_impact", eval_idx=None):
    """Train one model per ``alpha_u`` in ``grid`` (``alpha_w = alpha_u / 2``).

    Returns a list of ``(alpha_u, model, report)`` evaluated on ``eval_idx``
    (the validation split by default).  Profiling runs once for all alphas.
    """
    grid = [float(a) for a in grid]
    if not grid:
        raise ConfigError("alpha grid is empty")
    if any(not (np.isfinite(a) and a >= 0) for a in grid):
        raise ConfigError("alpha grid values must be finite and non-negative")
    density_cfg = density_cfg or DensityConfig()
    eval_idx = splits.validation if eval_idx is None else check_index(eval_idx, d.n)
    rw = _fit_reweigher(d, splits.train, ConfairConfig(0.0, 0.0, target, density_cfg))
    results = []
    for alpha_u in grid:
        weights = rw.weights_for(alpha_u, alpha_u / 2)
        model = train(d, splits.train, weights, learner_cfg)
        preds = model.predict(d.features[eval_idx])
        report = evaluate(d.labels[eval_idx], preds, d.groups[eval_idx],
                          metadata={"alpha_u": alpha_u, "alpha_w": alpha_u / 2})
        results.append((alpha_u, model, report))
    return results


def tune_alpha(d, splits, learner_cfg=None, density_cfg=None, grid=DEFAULT_ALPHA_GRID,
               target="disparate_impact"):
    """Pick ``alpha_u`` on the validation split.

    Maximizes validation DI* (or minimizes the FNR / FPR gap for the
    equalized-odds targets); ties go to the higher validation BalAcc, then the
    smaller ``alpha_u``.
    """
    density_cfg = density_cfg or DensityConfig()
    sweep = alpha_sweep(d, splits, learner_cfg, density_cfg, grid, target)
    best = max(sweep, key=lambda r: (_objective(r[2], target), r[2].bal_acc, -r[0]))
    alpha_u = best[0]
    alpha_w = 0.0 if target != "disparate_impact" else alpha_u / 2
    return ConfairConfig(alpha_u, alpha_w, target, density_cfg)


def confair_fit(d, splits, learner_cfg=None, cfg=None):
    """Train the single ConFair model on the training split with fixed alphas."""
    cfg = cfg or ConfairConfig()
    assignment = assign_weights(d, splits.train, cfg)
    return train(d, splits.train, assignment.weights, learner_cfg or LearnerConfig())


__all__ = [
    "ConfairConfig", "ConfairReweigher", "WeightAssignment", "DEFAULT_ALPHA_GRID",
    "alpha_sweep", "assign_weights", "boosted_cells", "confair_fit", "tune_alpha",
]
