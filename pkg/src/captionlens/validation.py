"""Input validation helpers used by the estimators and snapshot operations."""

from __future__ import annotations

import numpy as np

from captionlens.errors import DataError


def as_float_matrix(X, *, dtype=np.float64, min_rows: int = 1) -> np.ndarray:
    """Coerce ``X`` to a 2-D float array, rejecting NaN/inf entries."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim != 2:
        raise DataError(f"expected a 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < min_rows:
        raise DataError(f"need at least {min_rows} rows, got {arr.shape[0]}")
    if arr.shape[1] < 1:
        raise DataError("need at least one feature column")
    if not np.isfinite(arr).all():
        raise DataError("input contains NaN or infinite values")
    return arr


def as_float_vector(v, *, dtype=np.float64) -> np.ndarray:
    """Coerce ``v`` to a finite 1-D float array."""
    arr = np.asarray(v, dtype=dtype)
    if arr.ndim != 1:
        raise DataError(f"expected a 1-D vector, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise DataError("vector contains NaN or infinite values")
    return arr


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise DataError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise DataError(f"{name} must be >= 1, got {value}")
    return int(value)
