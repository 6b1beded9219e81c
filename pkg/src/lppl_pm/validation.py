"""Input coercion shared by the estimator wrappers and the CLI."""
import numbers

import numpy as np

from .exceptions import DataError
from .series import TimeSeries, to_ordinal

DEFAULT_START = "2000-01-01"


def check_series(X, start=DEFAULT_START):
    """Return ``X`` as a :class:`TimeSeries`.

    Accepts a TimeSeries, or a 1-D (or single-column 2-D) array of values
    that gets consecutive days from ``start``.
    """
    if isinstance(X, TimeSeries):
        return X
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise DataError(f"expected a 1-D series, got shape {arr.shape}")
    if arr.size == 0:
        raise DataError("series is empty")
    return TimeSeries.from_start(to_ordinal(start), arr)


def check_values(X):
    """Finite 1-D float array (sign unrestricted)."""
    if isinstance(X, TimeSeries):
        return np.asarray(X.values, dtype=np.float64)
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise DataError(f"expected a non-empty 1-D series, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError("series contains non-finite values")
    return arr


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_interval(pair, name, cast=float):
    try:
        lo, hi = (cast(v) for v in pair)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name} must be a pair of numbers, got {pair!r}") from exc
    if not lo < hi:
        raise ValueError(f"{name} must satisfy lo < hi, got {pair!r}")
    return lo, hi
