"""
Log-gamma, digamma and trigamma for positive real arguments.

All three use the same scheme: shift the argument upward with the
recurrence until it reaches SHIFT_THRESHOLD, then evaluate the asymptotic
(Stirling / de Moivre) series. Functions accept scalars or numpy arrays and
return the same shape.
"""

import math
from typing import Union

import numpy as np

from core.errors import DomainError

ArrayLike = Union[float, np.ndarray]

SHIFT_THRESHOLD = 10.0
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli-number coefficients B_2n / (2n (2n-1)) for the log-gamma series
_LGAMMA_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

# B_2n / (2n), for digamma
_DIGAMMA_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

# B_2n, for trigamma
_TRIGAMMA_COEFFS = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def _as_positive(x: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: argument must be finite, got {x!r}")
    if np.any(arr <= 0.0):
        raise DomainError(f"{name}: argument must be > 0, got {x!r}")
    return arr


def _like_input(x: ArrayLike, value: np.ndarray) -> ArrayLike:
    if np.ndim(x) == 0:
        return float(value)
    return value


def _shifted(arr: np.ndarray, term):
    """Accumulate term(x) over the upward shifts; returns (shifted x, sum)."""
    acc = np.zeros_like(arr)
    current = arr.copy()
    while True:
        mask = current < SHIFT_THRESHOLD
        if not np.any(mask):
            return current, acc
        acc = acc + np.where(mask, term(current), 0.0)
        current = np.where(mask, current + 1.0, current)


def log_gamma(x: ArrayLike) -> ArrayLike:
    """ln Γ(x) for x > 0."""
    arr = _as_positive(x, "log_gamma")
    z, log_prod = _shifted(arr, np.log)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for coeff in reversed(_LGAMMA_COEFFS):
        series = series * inv2 + coeff
    value = (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + series * inv
    return _like_input(x, value - log_prod)


def digamma(x: ArrayLike) -> ArrayLike:
    """ψ(x) = d/dx ln Γ(x) for x > 0."""
    arr = _as_positive(x, "digamma")
    z, harmonic = _shifted(arr, lambda t: 1.0 / t)
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for coeff in reversed(_DIGAMMA_COEFFS):
        series = series * inv2 + coeff
    value = np.log(z) - 0.5 / z - series * inv2
    return _like_input(x, value - harmonic)


def trigamma(x: ArrayLike) -> ArrayLike:
    """ψ₁(x) = d/dx ψ(x) for x > 0; positive and decreasing."""
    arr = _as_positive(x, "trigamma")
    z, squares = _shifted(arr, lambda t: 1.0 / (t * t))
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for coeff in reversed(_TRIGAMMA_COEFFS):
        series = series * inv2 + coeff
    value = inv + 0.5 * inv2 + series * inv2 * inv
    return _like_input(x, value + squares)


def log_beta_multi(a: ArrayLike) -> ArrayLike:
    """
    Log of the multivariate beta function B(a) = ∏Γ(a_i) / Γ(Σa_i).

    The last axis holds the arguments; leading axes are batch axes.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] == 0:
        raise DomainError("log_beta_multi: need at least one argument")
    arr = _as_positive(arr, "log_beta_multi")
    value = np.sum(log_gamma(arr), axis=-1) - log_gamma(np.sum(arr, axis=-1))
    if np.ndim(value) == 0:
        return float(value)
    return value
