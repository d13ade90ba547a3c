"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import ConfigurationError


def check_bounds(lower, upper):
    """Return ``(lower, upper)`` as finite float arrays with ``lower < upper``.

    Raises ConfigurationError naming the first offending variable index.
    """
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    if lower.shape != upper.shape:
        raise ConfigurationError(
            f"bounds length mismatch: {lower.size} lower vs {upper.size} upper"
        )
    if lower.size == 0:
        raise ConfigurationError("problem has no decision variables")
    for i, (lo, hi) in enumerate(zip(lower, upper)):
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ConfigurationError(f"variable {i}: bounds must be finite, got [{lo}, {hi}]")
        if lo >= hi:
            raise ConfigurationError(f"variable {i}: lower bound {lo} is not below upper bound {hi}")
    return lower, upper


def check_points(X, dimension):
    """Coerce ``X`` to a 2-D float array with ``dimension`` columns.

    A single vector is promoted to one row.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    X = check_array(X, dtype=float, ensure_all_finite=False)
    if X.shape[1] != dimension:
        raise ConfigurationError(
            f"dimension mismatch: expected {dimension} variables, got {X.shape[1]}"
        )
    return X


def check_in_bounds(x, lower, upper):
    x = np.asarray(x, dtype=float)
    if np.any(x < lower) or np.any(x > upper):
        raise ConfigurationError(f"point {x.tolist()} lies outside the problem bounds")
    return x


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(value, name, low=None, high=None, include_low=True, include_high=True):
    """Check a real scalar against an optional interval."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigurationError(f"{name} must be finite, got {value}")
    if low is not None and (value < low or (value == low and not include_low)):
        raise ConfigurationError(f"{name}={value} is below the allowed range")
    if high is not None and (value > high or (value == high and not include_high)):
        raise ConfigurationError(f"{name}={value} is above the allowed range")
    return value
