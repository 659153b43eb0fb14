"""Finite-dimensional real inner-product space.

Vectors are 1-D ``float64`` numpy arrays. The helpers here validate shape and
finiteness once at the boundary; hot loops elsewhere use numpy directly.
"""

import math

import numpy as np

from .exceptions import DimensionError


def vector(coords):
    """Build a validated vector from a sequence of reals.

    Raises
    ------
    ValueError
        If ``coords`` is empty, not one-dimensional, or has non-finite entries.
    """
    x = np.array(coords, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"vector needs a non-empty 1-D coordinate list, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector coordinates must be finite")
    return x


def zeros(dim):
    if dim < 1:
        raise ValueError("dimension must be positive")
    return np.zeros(dim)


def _check_dims(x, y):
    if x.shape != y.shape:
        raise DimensionError(f"incompatible operands: dim {x.size} vs dim {y.size}")


def inner(x, y):
    """Euclidean scalar product."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_dims(x, y)
    return float(np.dot(x, y))


def norm(x):
    # hypot rescales, so tiny or huge entries neither underflow nor overflow
    return math.hypot(*np.asarray(x, dtype=np.float64).ravel().tolist())


def combine(a, x, b, y):
    """Return ``a*x + b*y``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_dims(x, y)
    return a * x + b * y


def parse_vector(text):
    """Parse whitespace-separated decimal literals, e.g. ``"2 0"``."""
    parts = text.split()
    if not parts:
        raise ValueError("empty vector literal")
    try:
        return vector([float(p) for p in parts])
    except ValueError as exc:
        raise ValueError(f"bad vector literal {text!r}: {exc}") from None


def format_vector(x):
    return " ".join(repr(float(v)) for v in x)
