"""Input validation helpers shared by the estimators and the harness."""

from __future__ import annotations

import math
import numbers

import numpy as np
from sklearn.utils.validation import check_scalar

from .errors import DomainError


def check_amplitude(a, name="a"):
    """Return ``a`` as a float, raising :class:`DomainError` unless 0 <= a <= 1."""
    if isinstance(a, bool) or not isinstance(a, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(a).__name__}")
    a = float(a)
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"{name}={a!r} is outside [0, 1]")
    return a


def check_amplitudes(a, name="amplitudes"):
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def check_angle(phi, name="phi"):
    phi = float(phi)
    if not (0.0 <= phi <= math.pi / 2):
        raise DomainError(f"{name}={phi!r} is outside [0, pi/2]")
    return phi


def check_int(value, name, min_val=None):
    """Thin wrapper over sklearn's ``check_scalar`` that also rejects bools."""
    if isinstance(value, bool):
        raise TypeError(f"{name} must be an int, got bool")
    if isinstance(value, np.integer):
        value = int(value)
    return check_scalar(value, name, numbers.Integral, min_val=min_val)
