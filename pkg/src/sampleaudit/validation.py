"""Input validation helpers shared by the estimator API."""

from __future__ import annotations

import numpy as np

from .dataset import Dataset, ValueDomain


def as_value_array(X, name: str = "X") -> np.ndarray:
    """Coerce to a 1-D finite float64 array, flattening higher-rank input."""
    v = np.asarray(X, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def as_signal(X, name: str = "X") -> np.ndarray:
    """Coerce to a 1-D finite float64 signal without flattening 2-D input."""
    v = np.asarray(X, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D signal, got shape {v.shape}")
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def as_boolean_rolls(X, name: str = "X") -> Dataset:
    """Coerce to a boolean-domain dataset of piano rolls.

    Accepts a boolean-domain Dataset, or an array of shape
    (n, rows, cols) whose values are exactly 0 or 1.
    """
    if isinstance(X, Dataset):
        if X.domain.kind != "boolean":
            raise ValueError(f"{name} must have a boolean domain, got {X.domain.kind!r}")
        return X
    v = np.asarray(X)
    if v.ndim != 3:
        raise ValueError(f"{name} must have shape (n_samples, rows, cols), got {v.shape}")
    if not np.all((v == 0) | (v == 1)):
        raise ValueError(f"{name} must contain only 0/1 values")
    return Dataset(v.astype(np.float32), ValueDomain("boolean", 2))
