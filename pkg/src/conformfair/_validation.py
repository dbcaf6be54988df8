"""Small input-validation helpers used across the package."""

import numpy as np

from .exceptions import InvalidWeightError, ShapeError


def check_index(idx, n):
    idx = np.asarray(idx, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"index list out of range [0, {n})")
    return idx


def check_binary(values, name):
    values = np.asarray(values).ravel()
    if values.size and not np.isin(values, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0/1 values")
    return values.astype(np.int8)


def check_same_length(**arrays):
    lengths = {k: len(v) for k, v in arrays.items()}
    if len(set(lengths.values())) > 1:
        raise ShapeError(f"length mismatch: {lengths}")


def check_weights(weights, n):
    """Validate a per-tuple weight vector: finite, non-negative, positive sum."""
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape[0] != n:
        raise ShapeError(f"expected {n} weights, got {w.shape[0]}")
    if not np.isfinite(w).all():
        raise InvalidWeightError("weights must be finite")
    if (w < 0).any():
        raise InvalidWeightError("weights must be non-negative")
    if not w.sum() > 0:
        raise InvalidWeightError("weights must have a positive sum")
    return w


def as_2d(X, n_columns=None, name="X"):
    """Coerce to a float64 matrix; a 1-D input is treated as one row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.ndim != 2:
        raise ShapeError(f"{name} must be 1-D or 2-D")
    if n_columns is not None and X.shape[1] != n_columns:
        raise ShapeError(f"{name} has {X.shape[1]} columns, expected {n_columns}")
    return X
