"""Tabular data model: schema-driven CSV ingestion, preprocessing and splits.

A :class:`Dataset` keeps two views of the same tuples:

* ``numeric`` -- the numerical attributes, min-max normalized to [0, 1].
  Conformance constraints and density estimates read only this view.
* ``features`` -- ``numeric`` followed by one-hot encoded categoricals
  (and, optionally, the group flag).  Learners read this view.  The first
  ``m`` columns of ``features`` are always ``numeric``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ._validation import check_binary, check_index
from .exceptions import (
    DatasetTooSmallError,
    EmptyDatasetError,
    SchemaError,
    UnsupportedMulticlassError,
)

KINDS = ("numerical", "categorical", "group", "label", "ignore")

TRAIN_FRACTION = 0.70
VALIDATION_FRACTION = 0.15


@dataclass(frozen=True)
class Column:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")


def validate_schema(schema):
    """Check the schema invariants and return it as a tuple of columns."""
    schema = tuple(c if isinstance(c, Column) else Column(*c) for c in schema)
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate column names in schema")
    kinds = [c.kind for c in schema]
    if kinds.count("group") != 1:
        raise SchemaError("schema needs exactly one column of kind 'group'")
    if kinds.count("label") != 1:
        raise SchemaError("schema needs exactly one column of kind 'label'")
    if kinds.count("numerical") < 2:
        raise SchemaError("schema needs at least two numerical columns")
    return schema


def parse_schema(text):
    """Parse ``"X1:numerical,X2:numerical,race:group,y:label"``."""
    columns = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, kind = item.rpartition(":")
        if not sep:
            raise SchemaError(f"schema entry {item!r} is not name:kind")
        columns.append(Column(name.strip(), kind.strip()))
    return validate_schema(columns)


@dataclass(frozen=True)
class GroupSpec:
    """Binary group mapping: tuples whose group value is listed are minority (1)."""

    column: str
    minority_values: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        values = self.minority_values
        if isinstance(values, str):
            values = [values]
        object.__setattr__(self, "minority_values", frozenset(str(v) for v in values))

    def map(self, values):
        values = pd.Series(values).astype(str).str.strip()
        return values.isin(self.minority_values).to_numpy().astype(np.int8)


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def minmax_normalize(X):
    """Column-wise min-max scaling to [0, 1]; constant columns become 0."""
    X = np.asarray(X, dtype=np.float64)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    out = np.zeros_like(X)
    varying = span > 0
    out[:, varying] = (X[:, varying] - lo[varying]) / span[varying]
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable preprocessed dataset.

    Attributes
    ----------
    numeric : ndarray of shape (n, m)
        Normalized numerical attributes.
    features : ndarray of shape (n, p)
        Learner input; ``features[:, :m] == numeric``.
    labels, groups : ndarray of shape (n,)
        Binary label and group flag (1 = minority).
    weights : ndarray of shape (n,)
    """

    numeric: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    groups: np.ndarray
    weights: np.ndarray
    numeric_names: tuple
    feature_names: tuple
    schema: tuple = ()
    frame: pd.DataFrame | None = None

    def __post_init__(self):
        n = self.numeric.shape[0]
        for name in ("features", "labels", "groups", "weights"):
            if getattr(self, name).shape[0] != n:
                raise SchemaError(f"{name} has {getattr(self, name).shape[0]} rows, expected {n}")
        if self.frame is not None and len(self.frame) != n:
            raise SchemaError("raw frame row count differs from n")
        if (self.numeric < 0).any() or (self.numeric > 1).any():
            raise SchemaError("numeric cells must lie in [0, 1]")
        m = self.numeric.shape[1]
        if not np.array_equal(self.features[:, :m], self.numeric):
            raise SchemaError("features must start with the numeric block")
        if (self.weights < 0).any():
            raise SchemaError("weights must be non-negative")
        for name in ("numeric", "features", "labels", "groups", "weights"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))

    @property
    def n(self):
        return self.numeric.shape[0]

    @property
    def m(self):
        return self.numeric.shape[1]

    def with_weights(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        return Dataset(self.numeric, self.features, self.labels, self.groups, w,
                       self.numeric_names, self.feature_names, self.schema, self.frame)

    @classmethod
    def from_arrays(cls, numeric, labels, groups, *, categorical=None,
                    numeric_names=None, normalize=True, include_group=False,
                    weights=None):
        """Build a dataset from in-memory arrays.

        ``categorical`` is an optional (n, k) array of raw categorical values
        which is one-hot encoded after the numeric block.
        """
        numeric = np.asarray(numeric, dtype=np.float64)
        if numeric.ndim != 2:
            raise SchemaError("numeric must be a 2-D array")
        n, m = numeric.shape
        if n == 0:
            raise EmptyDatasetError("dataset has no rows")
        if normalize:
            numeric = minmax_normalize(numeric)
        labels = check_binary(labels, "labels")
        groups = check_binary(groups, "groups")
        if numeric_names is None:
            numeric_names = tuple(f"X{j + 1}" for j in range(m))
        blocks, names = [numeric], list(numeric_names)
        if categorical is not None:
            cat = pd.DataFrame(np.asarray(categorical, dtype=object).reshape(n, -1))
            cat.columns = [f"c{j}" for j in range(cat.shape[1])]
            onehot = pd.get_dummies(cat.astype(str), dtype=np.float64)
            blocks.append(onehot.to_numpy())
            names.extend(onehot.columns)
        if include_group:
            blocks.append(groups[:, None].astype(np.float64))
            names.append("group")
        w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
        return cls(numeric, np.hstack(blocks), labels, groups, w,
                   tuple(numeric_names), tuple(names))


def _map_labels(values, positive_label):
    distinct = sorted(set(values))
    if len(distinct) > 2:
        raise UnsupportedMulticlassError(
            f"label column has {len(distinct)} distinct values; only binary labels are supported")
    if positive_label is not None:
        return (values == str(positive_label)).to_numpy().astype(np.int8)
    if set(distinct) <= {"0", "1"}:
        return (values == "1").to_numpy().astype(np.int8)
    if set(distinct) <= {"false", "true", "False", "True"}:
        return values.str.lower().eq("true").to_numpy().astype(np.int8)
    # arbitrary text labels: the lexicographically larger value is positive
    return (values == distinct[-1]).to_numpy().astype(np.int8)


def load_csv(path, schema, group_spec, *, positive_label=None, include_group=False):
    """Read a CSV file and preprocess it into a :class:`Dataset`.

    Rows with an empty cell in any non-ignored column are dropped, numerical
    columns are min-max normalized, categorical columns are one-hot encoded
    (every category kept), and the group and label columns are mapped to
    {0, 1}.  The group column is excluded from ``features`` unless
    ``include_group`` is set.
    """
    schema = validate_schema(schema)
    raw = pd.read_csv(path, dtype=str, keep_default_na=True, skipinitialspace=False)
    raw.columns = [c.strip() for c in raw.columns]
    missing = [c.name for c in schema if c.name not in raw.columns]
    if missing:
        raise SchemaError(f"missing column(s) in {path}: {missing}")
    group_col = next(c.name for c in schema if c.kind == "group")
    if group_spec.column != group_col:
        raise SchemaError(f"group spec column {group_spec.column!r} is not the schema's group column")

    used = [c.name for c in schema if c.kind != "ignore"]
    frame = raw.copy()
    for name in used:
        frame[name] = frame[name].str.strip().replace("", np.nan)
    frame = frame.dropna(subset=used).reset_index(drop=True)
    if frame.empty:
        raise EmptyDatasetError(f"no complete rows left in {path}")

    num_cols = [c.name for c in schema if c.kind == "numerical"]
    cat_cols = [c.name for c in schema if c.kind == "categorical"]
    label_col = next(c.name for c in schema if c.kind == "label")
    try:
        numeric = frame[num_cols].astype(np.float64).to_numpy()
    except ValueError as exc:
        raise SchemaError(f"non-numeric value in a numerical column: {exc}") from None
    labels = _map_labels(frame[label_col], positive_label)
    groups = group_spec.map(frame[group_col])
    categorical = frame[cat_cols].to_numpy() if cat_cols else None

    d = Dataset.from_arrays(numeric, labels, groups, categorical=categorical,
                            numeric_names=tuple(num_cols), include_group=include_group)
    feature_names = list(d.feature_names)
    if cat_cols:
        # restore the real column names on the one-hot block
        onehot = pd.get_dummies(frame[cat_cols].astype(str), dtype=np.float64)
        feature_names[len(num_cols):len(num_cols) + onehot.shape[1]] = list(onehot.columns)
    return Dataset(d.numeric, d.features, d.labels, d.groups, d.weights,
                   tuple(num_cols), tuple(feature_names), schema, frame)


def infer_schema(path, group_col="group", label_col="label"):
    """Schema from a CSV header: numeric-looking columns are numerical, the rest categorical."""
    raw = pd.read_csv(path, dtype=str)
    raw.columns = [c.strip() for c in raw.columns]
    for col in (group_col, label_col):
        if col not in raw.columns:
            raise SchemaError(f"column {col!r} not found in {path}")
    columns = []
    for name in raw.columns:
        if name == group_col:
            kind = "group"
        elif name == label_col:
            kind = "label"
        else:
            values = raw[name].dropna().str.strip()
            kind = "numerical" if pd.to_numeric(values, errors="coerce").notna().all() else "categorical"
        columns.append(Column(name, kind))
    return validate_schema(columns)


@dataclass(frozen=True, eq=False)
class SplitIndices:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    seed: int

    def __post_init__(self):
        for name in ("train", "validation", "test"):
            object.__setattr__(self, name, _readonly(np.asarray(getattr(self, name), dtype=np.intp)))


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def split(d, seed):
    """Shuffle-split into train / validation / test (70 / 15 / 15).

    The shuffle uses ``numpy.random.default_rng(seed)`` (PCG64); sizes are
    ``round(0.70 n)``, ``round(0.15 n)`` and the remainder.  No
    stratification is applied.  Each part is returned sorted.
    """
    n = d.n if isinstance(d, Dataset) else int(d)
    if n < 10:
        raise DatasetTooSmallError(f"need at least 10 tuples to split, got {n}")
    if seed < 0:
        raise ValueError("seed must be unsigned")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = _round_half_up(TRAIN_FRACTION * n)
    n_val = _round_half_up(VALIDATION_FRACTION * n)
    return SplitIndices(np.sort(perm[:n_train]),
                        np.sort(perm[n_train:n_train + n_val]),
                        np.sort(perm[n_train + n_val:]), seed)


def partition_by_group_label(d, idx=None):
    """Split ``idx`` into the four (group, label) cells.

    Returns a dict keyed by ``(group, label)`` with keys ``(0, 0)``, ``(0, 1)``,
    ``(1, 0)`` and ``(1, 1)``; cells may be empty.
    """
    groups, labels = (d.groups, d.labels) if hasattr(d, "groups") else d
    idx = np.arange(len(groups)) if idx is None else check_index(idx, len(groups))
    g, y = groups[idx], labels[idx]
    return {(gv, yv): idx[(g == gv) & (y == yv)] for gv in (0, 1) for yv in (0, 1)}
