"""Conformance-routed model splitting.

One model is trained per group.  Each (group, label) training cell is
profiled into a constraint set; a serving tuple is routed to the majority
model only when its lowest violation over the majority's sets is strictly
below its lowest violation over the minority's sets.  Routing reads the
numerical attributes alone, never the group flag.
"""

from __future__ import annotations

import json

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import conformance, learner
from ._validation import as_2d, check_binary
from .conformance import min_violation, profile_cells
from .density import DensityConfig
from .exceptions import InsufficientGroupDataError
from .learner import LearnerConfig, tune_l2


class _Cells:
    def __init__(self, numeric, groups, labels):
        self.numeric, self.groups, self.labels = numeric, groups, labels
        self.n = labels.size


class DiffairClassifier(ClassifierMixin, BaseEstimator):
    """Per-group models with constraint-based routing.

    Parameters
    ----------
    routing_columns : int or sequence of int, optional
        Columns of ``X`` used for profiling and routing.  An int ``m`` means
        the first ``m`` columns (the numeric block of a Dataset's features);
        None means all columns.
    density_fraction : float or None
        Share of each cell kept before deriving its constraints; None
        profiles whole cells.
    learner_cfg : LearnerConfig, optional
    """

    def __init__(self, routing_columns=None, density_fraction=0.2, learner_cfg=None):
        self.routing_columns = routing_columns
        self.density_fraction = density_fraction
        self.learner_cfg = learner_cfg

    def _routing(self, X):
        if self.routing_columns is None:
            return X
        if isinstance(self.routing_columns, (int, np.integer)):
            return X[:, :self.routing_columns]
        return X[:, list(self.routing_columns)]

    def fit(self, X, y, groups, eval_set=None):
        """Profile cells, train one model per group.

        ``eval_set=(X_val, y_val, groups_val)`` enables per-group ``l2``
        tuning by validation BalAcc.
        """
        X = as_2d(X)
        y = check_binary(y, "y")
        groups = check_binary(groups, "groups")
        cfg = self.learner_cfg or LearnerConfig()
        for g in (0, 1):
            for c in (0, 1):
                size = int(((groups == g) & (y == c)).sum())
                if size < 2:
                    raise InsufficientGroupDataError(
                        f"training cell (group={g}, label={c}) has {size} tuple(s); need at least 2",
                        (g, c))
        profiles = profile_cells(_Cells(self._routing(X), groups, y), None, self.density_fraction)
        self.c_w_ = tuple(profiles[(0, c)][0] for c in (0, 1))
        self.c_u_ = tuple(profiles[(1, c)][0] for c in (0, 1))

        models = []
        for g in (0, 1):
            mask = groups == g
            if eval_set is not None:
                X_val, y_val, g_val = eval_set
                X_val = as_2d(X_val, X.shape[1])
                vmask = check_binary(g_val, "groups") == g
                model = tune_l2(X[mask], y[mask], X_val[vmask], np.asarray(y_val)[vmask], cfg)
            else:
                model = learner.make_learner(cfg).fit(X[mask], y[mask])
            models.append(model)
        self.f_w_, self.f_u_ = models
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def violations(self, X):
        """Lowest majority and minority violations of each row."""
        check_is_fitted(self, "c_u_")
        R = self._routing(as_2d(X, self.n_features_in_))
        v_w, _ = min_violation(self.c_w_, R)
        v_u, _ = min_violation(self.c_u_, R)
        return v_w, v_u

    def route(self, X):
        """1 where the minority model serves the row (ties included)."""
        v_w, v_u = self.violations(X)
        return (~(v_w < v_u)).astype(np.int8)

    def predict(self, X):
        X = as_2d(X, getattr(self, "n_features_in_", None))
        use_u = self.route(X).astype(bool)
        out = self.f_w_.predict(X)
        if use_u.any():
            out[use_u] = self.f_u_.predict(X[use_u])
        return out


def fit(d, splits, density_cfg=None, learner_cfg=None):
    """Fit on a Dataset's training split, tuning ``l2`` on its validation split."""
    density_cfg = density_cfg or DensityConfig()
    tr, va = splits.train, splits.validation
    return DiffairClassifier(d.m, density_cfg.fraction, learner_cfg).fit(
        d.features[tr], d.labels[tr], d.groups[tr],
        eval_set=(d.features[va], d.labels[va], d.groups[va]))


def predict(model, tuple_numeric, tuple_features):
    """Route on ``tuple_numeric`` and predict from ``tuple_features``.

    Accepts a single tuple (returns an int) or matrices (returns an array).
    """
    single = np.ndim(tuple_features) == 1
    X = as_2d(tuple_features, model.n_features_in_)
    N = as_2d(tuple_numeric)
    v_w, _ = min_violation(model.c_w_, N)
    v_u, _ = min_violation(model.c_u_, N)
    use_u = ~(v_w < v_u)
    out = model.f_w_.predict(X)
    if use_u.any():
        out[use_u] = model.f_u_.predict(X[use_u])
    return int(out[0]) if single else out


def to_dict(model):
    check_is_fitted(model, "c_u_")
    return {
        "kind": "diffair",
        "routing_columns": model.routing_columns if not isinstance(model.routing_columns, np.integer)
        else int(model.routing_columns),
        "density_fraction": model.density_fraction,
        "f_w": learner.model_to_dict(model.f_w_),
        "f_u": learner.model_to_dict(model.f_u_),
        "c_w": [conformance.constraint_set_to_dict(cs) for cs in model.c_w_],
        "c_u": [conformance.constraint_set_to_dict(cs) for cs in model.c_u_],
    }


def from_dict(doc):
    rc = doc["routing_columns"]
    model = DiffairClassifier(rc if rc is None or isinstance(rc, int) else tuple(rc), doc["density_fraction"])
    model.f_w_ = learner.model_from_dict(doc["f_w"])
    model.f_u_ = learner.model_from_dict(doc["f_u"])
    model.c_w_ = tuple(conformance.constraint_set_from_dict(c) for c in doc["c_w"])
    model.c_u_ = tuple(conformance.constraint_set_from_dict(c) for c in doc["c_u"])
    model.n_features_in_ = model.f_w_.n_features_in_
    model.classes_ = np.array([0, 1])
    return model


def dumps(model):
    return json.dumps(to_dict(model))


def loads(text):
    return from_dict(json.loads(text))
