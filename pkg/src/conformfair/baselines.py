"""Reference strategies: no intervention, KAM reweighing, group-dispatched MultiModel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_2d, check_binary, check_index
from .dataset import partition_by_group_label
from .exceptions import DegenerateLabelsError, InsufficientGroupDataError
from .learner import make_learner, train


def kam_weights(d, train_idx):
    """Kamiran-Calders weights ``|G| |Y=c| / (|D| |G_c|)``, aligned with ``train_idx``.

    Under these weights group membership and label are independent in the
    weighted training data.
    """
    train_idx = check_index(train_idx, d.n)
    cells = partition_by_group_label(d, train_idx)
    for cell, members in cells.items():
        if members.size == 0:
            raise InsufficientGroupDataError(f"cell (group={cell[0]}, label={cell[1]}) is empty", cell)
    n = train_idx.size
    group_size = {g: cells[(g, 0)].size + cells[(g, 1)].size for g in (0, 1)}
    label_size = {c: cells[(0, c)].size + cells[(1, c)].size for c in (0, 1)}
    g, y = d.groups[train_idx], d.labels[train_idx]
    w = np.empty(n)
    for (gv, yv), members in cells.items():
        w[(g == gv) & (y == yv)] = (group_size[gv] * label_size[yv]) / (n * members.size)
    return w


class KamReweigher(BaseEstimator):
    """Estimator form of :func:`kam_weights` over ``(y, groups)`` arrays."""

    def fit(self, X, y, groups):
        y = check_binary(y, "y")
        groups = check_binary(groups, "groups")
        self.weights_ = kam_weights(_Cells(groups, y), np.arange(y.size))
        return self


@dataclass(frozen=True)
class _Cells:
    """Minimal stand-in exposing ``groups``/``labels``/``n`` like a Dataset."""

    groups: np.ndarray
    labels: np.ndarray

    @property
    def n(self):
        return self.labels.size


def no_intervention_fit(d, splits, learner_cfg=None):
    """Unit-weight model trained on the training split."""
    return train(d, splits.train, None, learner_cfg)


class MultiModelClassifier(ClassifierMixin, BaseEstimator):
    """One model per group; serving tuples are dispatched on their group flag."""

    def __init__(self, learner_cfg=None):
        self.learner_cfg = learner_cfg

    def fit(self, X, y, groups):
        X = as_2d(X)
        y = check_binary(y, "y")
        groups = check_binary(groups, "groups")
        models = []
        for g in (0, 1):
            mask = groups == g
            if np.unique(y[mask]).size < 2:
                raise DegenerateLabelsError(f"group {g} training data lacks one of the labels")
            models.append(make_learner(self.learner_cfg).fit(X[mask], y[mask]))
        self.f_w_, self.f_u_ = models
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X, groups):
        check_is_fitted(self, "f_u_")
        X = as_2d(X, self.n_features_in_)
        groups = check_binary(groups, "groups")
        out = self.f_w_.predict(X)
        minority = groups == 1
        if minority.any():
            out[minority] = self.f_u_.predict(X[minority])
        return out


@dataclass(frozen=True)
class MultiModelPair:
    f_w: object
    f_u: object
    group_spec: object = None


def multimodel_fit(d, splits, learner_cfg=None, group_spec=None):
    est = MultiModelClassifier(learner_cfg).fit(
        d.features[splits.train], d.labels[splits.train], d.groups[splits.train])
    return MultiModelPair(est.f_w_, est.f_u_, group_spec)


def multimodel_predict(pair, features, groups):
    """Predict with the minority model where ``groups == 1``, else the majority model."""
    single = np.ndim(features) == 1
    X = as_2d(features)
    groups = np.atleast_1d(check_binary(groups, "groups"))
    out = pair.f_w.predict(X)
    minority = groups == 1
    if minority.any():
        out[minority] = pair.f_u.predict(X[minority])
    return int(out[0]) if single else out
