"""Conformance constraints: bounded linear projections over numerical attributes.

A :class:`ConstraintSet` is derived from a tuple subset by projecting onto
every eigenvector of the subset's covariance matrix and recording the
observed range of each projection.  The violation of a tuple is graded as

    sum_i q_i * (1 - exp(-dist_i / sigma_i))

where ``dist_i`` is how far the tuple's projection falls outside the
``i``-th bounds, ``sigma_i`` the projection's standard deviation on the
profiled subset, and ``q_i`` an importance weight that favours
low-variance projections.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_2d, check_index
from .exceptions import EmptyFamilyError, InsufficientDataError, NumericalError

SCALE_FLOOR = 1e-9
# Keeps the highest-variance projection from dropping out of the sum, so a
# violation of 0 still means every bound holds.
IMPORTANCE_FLOOR = 1e-6
PSD_TOLERANCE = 1e-9


def project(X, coeffs):
    """Project rows of ``X`` onto each row of ``coeffs``.

    Accumulates column by column with elementwise operations so that a
    tuple's projection is bit-identical whether it is evaluated alone or as
    part of a larger matrix; bounds derived from a subset therefore contain
    every tuple of that subset exactly.
    """
    X = np.asarray(X, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    out = np.zeros((X.shape[0], coeffs.shape[0]))
    for j in range(coeffs.shape[1]):
        out += X[:, j:j + 1] * coeffs[:, j]
    return out


@dataclass(frozen=True)
class Constraint:
    """``lower <= coeffs . x <= upper`` with its scale and importance."""

    coeffs: tuple
    lower: float
    upper: float
    scale: float
    importance: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.lower <= self.upper:
            raise ValueError("constraint lower bound exceeds upper bound")
        if not self.scale > 0:
            raise ValueError("constraint scale must be positive")
        if not 0 <= self.importance <= 1:
            raise ValueError("constraint importance must lie in [0, 1]")

    def violation(self, X):
        """Unweighted violation ``1 - exp(-dist/scale)`` per row."""
        F = project(as_2d(X, len(self.coeffs)), [self.coeffs])[:, 0]
        dist = np.maximum(0.0, np.maximum(F - self.upper, self.lower - F))
        return -np.expm1(-dist / self.scale)


@dataclass(frozen=True)
class ConstraintSet:
    """A conjunction of constraints derived from one profiled subset.

    ``source`` tags the subset, conventionally ``(group, label)``.
    """

    constraints: tuple
    source: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.source is not None:
            object.__setattr__(self, "source", tuple(self.source))

    @property
    def n_attributes(self):
        return len(self.constraints[0].coeffs)

    @property
    def coeffs(self):
        return np.array([c.coeffs for c in self.constraints])

    @property
    def lower(self):
        return np.array([c.lower for c in self.constraints])

    @property
    def upper(self):
        return np.array([c.upper for c in self.constraints])

    @property
    def scale(self):
        return np.array([c.scale for c in self.constraints])

    @property
    def importance(self):
        return np.array([c.importance for c in self.constraints])

    def distances(self, X):
        X = as_2d(X, self.n_attributes)
        F = project(X, self.coeffs)
        return np.maximum(0.0, np.maximum(F - self.upper, self.lower - F))

    def violation(self, X):
        """Weighted violation of each row of ``X`` (a float for a 1-D input)."""
        single = np.ndim(X) == 1
        per = -np.expm1(-self.distances(X) / self.scale)
        v = per @ self.importance
        return float(v[0]) if single else v

    def satisfies(self, X):
        """Boolean semantics: every bound holds."""
        return (self.distances(X) == 0).all(axis=1)


def _subset_matrix(data, idx):
    if hasattr(data, "numeric"):
        X = data.numeric
        if idx is not None:
            X = X[check_index(idx, X.shape[0])]
        return X
    X = as_2d(data)
    return X if idx is None else X[check_index(idx, X.shape[0])]


def _eigenbasis(X):
    cov = np.cov(X, rowvar=False, bias=True)
    cov = np.atleast_2d(cov)
    if not np.isfinite(cov).all():
        raise NumericalError("covariance has non-finite entries")
    cov = 0.5 * (cov + cov.T)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals.min() < -PSD_TOLERANCE * max(1.0, abs(eigvals.max())):
        raise NumericalError("covariance is not positive semi-definite")
    vectors = eigvecs.T.copy()
    for v in vectors:
        pivot = np.argmax(np.abs(v))
        if v[pivot] < 0:
            v *= -1.0
        v /= np.linalg.norm(v)
    order = sorted(range(len(eigvals)), key=lambda i: (eigvals[i], tuple(vectors[i])))
    return vectors[order]


def raw_importance(scales):
    """Shifted importance ``1 - (s - min s) / (max s - min s)``, floored."""
    scales = np.asarray(scales, dtype=np.float64)
    lo, hi = scales.min(), scales.max()
    if hi > lo:
        q = 1.0 - (scales - lo) / (hi - lo)
    else:
        q = np.ones_like(scales)
    return np.maximum(q, IMPORTANCE_FLOOR)


def derive_ccs(data, idx=None, source=None):
    """Derive the conformance constraint set of a tuple subset.

    Parameters
    ----------
    data : Dataset or array-like of shape (n, m)
        Normalized numerical attributes (a Dataset contributes ``numeric``).
    idx : array-like of int, optional
        Rows to profile; all rows when omitted.
    source : tuple, optional
        Tag stored on the result, usually ``(group, label)``.

    Returns
    -------
    ConstraintSet
        One constraint per covariance eigenvector, ordered by increasing
        variance.  Bounds are the observed min/max of each projection.
    """
    X = _subset_matrix(data, idx)
    if X.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 tuples to derive constraints, got {X.shape[0]}")
    if X.shape[1] < 1:
        raise InsufficientDataError("no numerical attributes to profile")
    vectors = _eigenbasis(X)
    F = project(X, vectors)
    scales = np.maximum(F.std(axis=0), SCALE_FLOOR)
    q = raw_importance(scales)
    q = q / q.sum()
    constraints = [
        Constraint(tuple(vectors[i]), float(F[:, i].min()), float(F[:, i].max()),
                   float(scales[i]), float(q[i]))
        for i in range(len(vectors))
    ]
    return ConstraintSet(tuple(constraints), source)


def violation(cs, t):
    """Violation of tuple(s) ``t`` against a constraint set."""
    return cs.violation(t)


def min_violation(family, t):
    """Lowest violation over a family of constraint sets and its index.

    For a single tuple returns ``(value, index)``; for a matrix returns two
    arrays.  Ties go to the lowest index.
    """
    family = list(family)
    if not family:
        raise EmptyFamilyError("constraint family is empty")
    single = np.ndim(t) == 1
    V = np.column_stack([cs.violation(as_2d(t)) for cs in family])
    best = np.argmin(V, axis=1)
    values = V[np.arange(V.shape[0]), best]
    if single:
        return float(values[0]), int(best[0])
    return values, best


class ConformanceProfiler(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`derive_ccs`.

    ``fit`` profiles ``X`` (optionally only its densest fraction) and
    ``transform`` returns each row's violation as a single column.
    """

    def __init__(self, density_fraction=None):
        self.density_fraction = density_fraction

    def fit(self, X, y=None):
        X = as_2d(X)
        idx = np.arange(X.shape[0])
        if self.density_fraction is not None:
            from .density import filter_densest

            idx = filter_densest(X, idx, self.density_fraction)
        self.constraint_set_ = derive_ccs(X, idx)
        self.profiled_index_ = idx
        self.n_features_in_ = X.shape[1]
        return self

    def score_samples(self, X):
        check_is_fitted(self, "constraint_set_")
        return self.constraint_set_.violation(as_2d(X, self.n_features_in_))

    def transform(self, X):
        return self.score_samples(X)[:, np.newaxis]


# -- serialization -----------------------------------------------------------

def constraint_set_to_dict(cs):
    return {
        "source": None if cs.source is None else list(cs.source),
        "constraints": [
            {"coeffs": list(c.coeffs), "lower": c.lower, "upper": c.upper,
             "scale": c.scale, "importance": c.importance}
            for c in cs.constraints
        ],
    }


def constraint_set_from_dict(doc):
    source = doc.get("source")
    return ConstraintSet(
        tuple(Constraint(tuple(c["coeffs"]), c["lower"], c["upper"], c["scale"], c["importance"])
              for c in doc["constraints"]),
        None if source is None else tuple(source),
    )


def dumps(sets):
    """Serialize constraint sets to a JSON document (floats round-trip exactly)."""
    return json.dumps({"constraint_sets": [constraint_set_to_dict(cs) for cs in sets]}, indent=2)


def loads(text):
    return [constraint_set_from_dict(d) for d in json.loads(text)["constraint_sets"]]


def profile_cells(d, idx=None, fraction=None):
    """Profile every (group, label) cell of ``idx``.

    Each cell is reduced to its densest ``fraction`` (skipped when
    ``fraction`` is None) before deriving constraints.  Returns a dict
    ``(group, label) -> (ConstraintSet, profiled_index)``; empty cells are
    omitted and cells with fewer than 2 tuples raise.
    """
    from .dataset import partition_by_group_label
    from .density import filter_densest
    from .exceptions import InsufficientGroupDataError

    out = {}
    for cell, members in partition_by_group_label(d, idx).items():
        if members.size == 0:
            continue
        if members.size < 2:
            raise InsufficientGroupDataError(
                f"cell (group={cell[0]}, label={cell[1]}) has {members.size} tuple(s); need at least 2",
                cell)
        kept = members if fraction is None else filter_densest(d, members, fraction)
        out[cell] = (derive_ccs(d, kept, source=cell), kept)
    return out
