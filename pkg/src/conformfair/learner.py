"""Deterministic weighted binary classifiers.

Two self-contained learners stand in for the black-box models the
interventions feed: a logistic regression fitted by fixed-step full-batch
gradient descent, and a boosted ensemble of decision stumps.  Both accept
``sample_weight`` and are invariant to rescaling it, and a tuple with weight
zero is dropped before fitting, so it has no effect at all.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_2d, check_index, check_weights
from .exceptions import ConfigError, DegenerateLabelsError, ShapeError

L2_GRID = (1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class LearnerConfig:
    kind: str = "logistic"
    l2: float = 1e-3
    max_iters: int = 2000
    step: float = 0.5
    tol: float = 1e-7
    rounds: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("logistic", "stump_ensemble"):
            raise ConfigError(f"unknown learner kind {self.kind!r}")
        if self.l2 < 0 or self.max_iters < 1 or self.step <= 0 or self.tol <= 0 or self.rounds < 1:
            raise ConfigError(f"learner config out of range: {self}")
        if self.seed < 0:
            raise ConfigError("seed must be unsigned")

    def replace(self, **changes):
        return LearnerConfig(**{**asdict(self), **changes})


def _prepare_fit(X, y, sample_weight):
    X = as_2d(X)
    y = np.asarray(y).ravel()
    if y.shape[0] != X.shape[0]:
        raise ShapeError("X and y have different numbers of rows")
    if not np.isin(y, (0, 1)).all():
        raise DegenerateLabelsError("labels must be binary 0/1")
    w = np.ones(X.shape[0]) if sample_weight is None else check_weights(sample_weight, X.shape[0])
    keep = w > 0
    X, y, w = X[keep], y[keep].astype(np.float64), w[keep]
    if X.shape[0] < 2 or np.unique(y).size < 2:
        raise DegenerateLabelsError("training data must contain both labels")
    return X, y, w / w.sum()


class LogisticClassifier(ClassifierMixin, BaseEstimator):
    """L2-regularized logistic regression fitted by full-batch gradient descent.

    Minimizes ``sum_i w_i * logloss_i / sum_i w_i + l2 * ||coef||^2`` (the
    intercept is not penalized) from a zero start with a fixed step,
    stopping after ``max_iters`` steps or once the gradient norm drops
    below ``tol``.
    """

    def __init__(self, l2=1e-3, max_iters=2000, step=0.5, tol=1e-7):
        self.l2 = l2
        self.max_iters = max_iters
        self.step = step
        self.tol = tol

    @staticmethod
    def loss(theta, X, y, w, l2):
        """Objective at ``theta = (coef..., intercept)``; ``w`` must sum to one."""
        coef, b = theta[:-1], theta[-1]
        z = X @ coef + b
        return w @ (np.logaddexp(0.0, z) - y * z) + l2 * (coef @ coef)

    @staticmethod
    def gradient(theta, X, y, w, l2):
        coef, b = theta[:-1], theta[-1]
        r = w * (expit(X @ coef + b) - y)
        grad = np.empty_like(theta)
        grad[:-1] = X.T @ r + 2.0 * l2 * coef
        grad[-1] = r.sum()
        return grad

    def fit(self, X, y, sample_weight=None):
        X, y, w = _prepare_fit(X, y, sample_weight)
        theta = np.zeros(X.shape[1] + 1)
        n_iter = 0
        for n_iter in range(1, self.max_iters + 1):
            grad = self.gradient(theta, X, y, w, self.l2)
            if np.linalg.norm(grad) < self.tol:
                break
            theta -= self.step * grad
        self.coef_ = theta[:-1].copy()
        self.intercept_ = float(theta[-1])
        self.n_iter_ = n_iter
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        return as_2d(X, self.n_features_in_) @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack([1 - p, p])

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(np.int8)


def _best_stump(X, y, w):
    """Weighted-error-minimizing stump over all features and midpoints.

    A stump ``(feature, threshold, polarity)`` predicts 1 when
    ``x > threshold`` for polarity +1 and when ``x <= threshold`` for -1.
    Returns ``(error, feature, threshold, polarity)``.
    """
    best = (np.inf, 0, 0.0, 1)
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        x, yy, ww = X[order, j], y[order], w[order]
        pos = np.concatenate([[0.0], np.cumsum(ww * yy)])
        neg = np.concatenate([[0.0], np.cumsum(ww * (1 - yy))])
        # candidate split after position i: left = first i tuples
        cut = np.concatenate([[0], np.flatnonzero(np.diff(x) > 0) + 1])
        err_plus = pos[cut] + (neg[-1] - neg[cut])
        err_minus = neg[cut] + (pos[-1] - pos[cut])
        thresholds = np.where(cut == 0, x[0] - 1.0, 0.5 * (x[cut - 1] + x[np.minimum(cut, len(x) - 1)]))
        for err, polarity in ((err_plus, 1), (err_minus, -1)):
            i = int(np.argmin(err))
            if err[i] < best[0]:
                best = (float(err[i]), j, float(thresholds[i]), polarity)
    return best


def stump_predict(feature, threshold, polarity, X):
    x = as_2d(X)[:, feature]
    return (x > threshold) if polarity > 0 else (x <= threshold)


class StumpEnsembleClassifier(ClassifierMixin, BaseEstimator):
    """Discrete AdaBoost over decision stumps.

    Each round picks the stump with the lowest weighted error, gives it the
    vote ``0.5 * log((1 - err) / err)`` and reweights the tuples
    multiplicatively.  Prediction is a weighted majority vote, ties to 1.
    """

    def __init__(self, rounds=50, seed=0):
        self.rounds = rounds
        self.seed = seed

    def fit(self, X, y, sample_weight=None):
        X, y, w = _prepare_fit(X, y, sample_weight)
        sign = 2 * y - 1
        stumps = []
        for _ in range(self.rounds):
            err, j, thr, pol = _best_stump(X, y, w)
            err = min(max(err, 1e-10), 1 - 1e-10)
            if err >= 0.5:
                break
            vote = 0.5 * np.log((1 - err) / err)
            stumps.append((j, thr, pol, float(vote)))
            h = 2 * stump_predict(j, thr, pol, X).astype(np.float64) - 1
            w = w * np.exp(-vote * sign * h)
            w = w / w.sum()
            if err <= 1e-10:
                break
        if not stumps:
            # nothing beats chance: fall back to the weighted majority class
            majority = 1 if w @ y >= 0.5 else 0
            stumps.append((0, -np.inf if majority else np.inf, 1, 1.0))
        self.stumps_ = stumps
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "stumps_")
        X = as_2d(X, self.n_features_in_)
        score = np.zeros(X.shape[0])
        for j, thr, pol, vote in self.stumps_:
            score += vote * (2 * stump_predict(j, thr, pol, X).astype(np.float64) - 1)
        return score

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(np.int8)


def make_learner(cfg=None):
    cfg = cfg or LearnerConfig()
    if cfg.kind == "logistic":
        return LogisticClassifier(l2=cfg.l2, max_iters=cfg.max_iters, step=cfg.step, tol=cfg.tol)
    return StumpEnsembleClassifier(rounds=cfg.rounds, seed=cfg.seed)


def train(d, idx, weights=None, cfg=None):
    """Fit a learner on rows ``idx`` of a dataset's features.

    ``weights`` is aligned with ``idx``; unit weights when omitted.
    """
    idx = check_index(idx, d.n)
    if idx.size < 2:
        raise DegenerateLabelsError("need at least 2 training tuples")
    return make_learner(cfg).fit(d.features[idx], d.labels[idx], weights)


def predict(model, features):
    return model.predict(features)


def balanced_accuracy(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    pos, neg = y_true == 1, y_true == 0
    tpr = (y_pred[pos] == 1).mean() if pos.any() else 0.0
    tnr = (y_pred[neg] == 0).mean() if neg.any() else 0.0
    return float((tpr + tnr) / 2)


def tune_l2(X, y, X_val, y_val, cfg=None, sample_weight=None, grid=L2_GRID):
    """Fit one model per ``l2`` in ``grid`` and keep the best validation BalAcc.

    Ties keep the earlier grid value.  Stump ensembles ignore ``l2`` and are
    fitted once.
    """
    cfg = cfg or LearnerConfig()
    if cfg.kind != "logistic" or len(y_val) == 0:
        return make_learner(cfg).fit(X, y, sample_weight)
    best, best_score = None, -np.inf
    for l2 in grid:
        model = make_learner(cfg.replace(l2=l2)).fit(X, y, sample_weight)
        score = balanced_accuracy(y_val, model.predict(X_val))
        if score > best_score:
            best, best_score = model, score
    return best


# -- serialization -----------------------------------------------------------

def model_to_dict(model):
    if isinstance(model, LogisticClassifier):
        return {"kind": "logistic", "params": model.get_params(),
                "coef": model.coef_.tolist(), "intercept": model.intercept_,
                "n_iter": model.n_iter_, "feature_count": model.n_features_in_}
    if isinstance(model, StumpEnsembleClassifier):
        return {"kind": "stump_ensemble", "params": model.get_params(),
                "stumps": [list(s) for s in model.stumps_],
                "feature_count": model.n_features_in_}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc):
    if doc["kind"] == "logistic":
        model = LogisticClassifier(**doc["params"])
        model.coef_ = np.asarray(doc["coef"], dtype=np.float64)
        model.intercept_ = float(doc["intercept"])
        model.n_iter_ = doc["n_iter"]
    elif doc["kind"] == "stump_ensemble":
        model = StumpEnsembleClassifier(**doc["params"])
        model.stumps_ = [(int(j), float(t), int(p), float(v)) for j, t, p, v in doc["stumps"]]
    else:
        raise ValueError(f"unknown model kind {doc['kind']!r}")
    model.n_features_in_ = doc["feature_count"]
    model.classes_ = np.array([0, 1])
    return model


def dumps(model):
    return json.dumps(model_to_dict(model))


def loads(text):
    return model_from_dict(json.loads(text))
