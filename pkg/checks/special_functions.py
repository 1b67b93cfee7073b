import math

import numpy as np

from core import special_fn
from core.checks import Measurement

GOLDEN_TOL = 1e-12
RECURRENCE_TOL = 1e-12
DERIVATIVE_TOL = 1e-6

RECURRENCE_GRID = np.logspace(-3, 5, 200)
DERIVATIVE_GRID = np.logspace(math.log10(0.5), 5, 40)

GOLDEN = (
    ("log_gamma(1)", lambda: special_fn.log_gamma(1.0), 0.0),
    ("log_gamma(2)", lambda: special_fn.log_gamma(2.0), 0.0),
    ("log_gamma(5)", lambda: special_fn.log_gamma(5.0), math.log(24.0)),
    ("log_gamma(0.5)", lambda: special_fn.log_gamma(0.5), 0.5 * math.log(math.pi)),
    ("digamma(1)", lambda: special_fn.digamma(1.0), -0.5772156649015329),
    ("digamma(0.5)", lambda: special_fn.digamma(0.5), -1.9635100260214235),
    ("trigamma(1)", lambda: special_fn.trigamma(1.0), math.pi ** 2 / 6.0),
    ("trigamma(2)", lambda: special_fn.trigamma(2.0), math.pi ** 2 / 6.0 - 1.0),
    ("trigamma(0.5)", lambda: special_fn.trigamma(0.5), math.pi ** 2 / 2.0),
    ("log_beta(1,1)", lambda: special_fn.log_beta_multi([1.0, 1.0]), 0.0),
    ("log_beta(1,1,1)", lambda: special_fn.log_beta_multi([1.0, 1.0, 1.0]), -math.log(2.0)),
    ("log_beta(2,1)", lambda: special_fn.log_beta_multi([2.0, 1.0]), -math.log(2.0)),
)


def golden_values() -> Measurement:
    worst, where = 0.0, ""
    for name, fn, expected in GOLDEN:
        err = abs(fn() - expected)
        if not err <= worst:
            worst, where = err, name
    return Measurement(worst, GOLDEN_TOL, f"worst at {where}" if where else "")


def recurrences() -> Measurement:
    """ψ(x+1) = ψ(x) + 1/x and ψ₁(x+1) = ψ₁(x) - 1/x², relative to max(1, |shift|)."""
    x = RECURRENCE_GRID
    inv = 1.0 / x
    psi_err = np.abs(special_fn.digamma(x + 1.0) - special_fn.digamma(x) - inv)
    psi_err /= np.maximum(1.0, inv)
    tri_err = np.abs(special_fn.trigamma(x + 1.0) - special_fn.trigamma(x) + inv * inv)
    tri_err /= np.maximum(1.0, inv * inv)
    worst = max(float(np.max(psi_err)), float(np.max(tri_err)))
    return Measurement(worst, RECURRENCE_TOL)


def _central(fn, x):
    h = 1e-5 * np.maximum(1.0, x)
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def derivatives() -> Measurement:
    """digamma against the numerical derivative of log_gamma, trigamma against digamma's."""
    x = DERIVATIVE_GRID
    psi_err = np.abs(special_fn.digamma(x) - _central(special_fn.log_gamma, x))
    tri_err = np.abs(special_fn.trigamma(x) - _central(special_fn.digamma, x))
    worst = max(float(np.max(psi_err)), float(np.max(tri_err)))
    return Measurement(worst, DERIVATIVE_TOL)


def trigamma_shape() -> Measurement:
    values = special_fn.trigamma(RECURRENCE_GRID)
    violations = int(np.sum(values <= 0.0)) + int(np.sum(np.diff(values) >= 0.0))
    return Measurement(violations, 0, "positive and strictly decreasing")


def register_checks(registry):
    registry.register("special_fn.golden", golden_values,
                      "Closed-form values of lnΓ, ψ, ψ₁ and ln B")
    registry.register("special_fn.recurrences", recurrences,
                      "Upward recurrences of ψ and ψ₁ on x in [1e-3, 1e5]")
    registry.register("special_fn.derivatives", derivatives,
                      "ψ and ψ₁ match central differences of lnΓ and ψ")
    registry.register("special_fn.trigamma_shape", trigamma_shape,
                      "ψ₁ is positive and strictly decreasing")
