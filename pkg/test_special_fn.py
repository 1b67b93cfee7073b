import math

import numpy as np
import pytest
from scipy import special as sp

from core import special_fn
from core.errors import DomainError

GRID = np.logspace(-3, 5, 400)


def test_log_gamma_known_values():
    assert special_fn.log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert special_fn.log_gamma(2.0) == pytest.approx(0.0, abs=1e-14)
    assert special_fn.log_gamma(5.0) == pytest.approx(3.1780538303, abs=1e-10)
    assert special_fn.log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-13)


def test_log_gamma_matches_reference_on_wide_range():
    x = np.logspace(-3, 6, 500)
    ours = special_fn.log_gamma(x)
    ref = sp.gammaln(x)
    small = np.abs(ref) <= 1.0
    assert np.max(np.abs(ours - ref)[small]) <= 1e-12
    assert np.max((np.abs(ours - ref) / np.abs(ref))[~small]) <= 1e-13


def test_digamma_known_values():
    assert special_fn.digamma(1.0) == pytest.approx(-0.5772156649, abs=1e-10)
    assert special_fn.digamma(0.5) == pytest.approx(-1.9635100260, abs=1e-10)
    assert special_fn.digamma(2.0) - special_fn.digamma(1.0) == pytest.approx(1.0, abs=1e-14)


def test_digamma_matches_reference():
    np.testing.assert_allclose(special_fn.digamma(GRID), sp.digamma(GRID), rtol=1e-12, atol=1e-12)


def test_trigamma_known_values():
    assert special_fn.trigamma(1.0) == pytest.approx(1.6449340668, abs=1e-10)
    assert special_fn.trigamma(2.0) == pytest.approx(0.6449340668, abs=1e-10)
    for x in (0.1, 1.0, 10.0, 1000.0):
        assert special_fn.trigamma(x) > 0


def test_trigamma_matches_reference():
    np.testing.assert_allclose(special_fn.trigamma(GRID), sp.polygamma(1, GRID), rtol=1e-12)


def test_recurrences_hold():
    inv = 1.0 / GRID
    psi_gap = special_fn.digamma(GRID + 1.0) - special_fn.digamma(GRID) - inv
    tri_gap = special_fn.trigamma(GRID + 1.0) - special_fn.trigamma(GRID) + inv * inv
    assert np.max(np.abs(psi_gap) / np.maximum(1.0, inv)) <= 1e-12
    assert np.max(np.abs(tri_gap) / np.maximum(1.0, inv * inv)) <= 1e-12


def test_trigamma_strictly_decreasing():
    values = special_fn.trigamma(GRID)
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


@pytest.mark.parametrize("x", [0.5, 1.0, 3.7, 42.0, 1e4])
def test_derivative_consistency(x):
    h = 1e-5 * max(1.0, x)
    fd_psi = (special_fn.log_gamma(x + h) - special_fn.log_gamma(x - h)) / (2 * h)
    fd_tri = (special_fn.digamma(x + h) - special_fn.digamma(x - h)) / (2 * h)
    assert abs(special_fn.digamma(x) - fd_psi) <= 1e-6
    assert abs(special_fn.trigamma(x) - fd_tri) <= 1e-6


@pytest.mark.parametrize("fn", [special_fn.log_gamma, special_fn.digamma, special_fn.trigamma])
@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_domain_errors(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)


def test_domain_error_in_array_argument():
    with pytest.raises(DomainError):
        special_fn.digamma(np.array([1.0, 2.0, -0.5]))


def test_shapes_follow_input():
    assert isinstance(special_fn.digamma(3.0), float)
    out = special_fn.trigamma(np.ones((2, 3)))
    assert out.shape == (2, 3)


def test_log_beta_multi():
    assert special_fn.log_beta_multi([1.0, 1.0]) == pytest.approx(0.0, abs=1e-14)
    assert special_fn.log_beta_multi([1.0, 1.0, 1.0]) == pytest.approx(-0.6931471806, abs=1e-10)
    assert special_fn.log_beta_multi([2.0, 1.0]) == pytest.approx(-0.6931471806, abs=1e-10)
    a = np.array([[0.3, 2.5, 7.0], [1.5, 1.5, 1.5]])
    ref = sp.gammaln(a).sum(axis=1) - sp.gammaln(a.sum(axis=1))
    np.testing.assert_allclose(special_fn.log_beta_multi(a), ref, rtol=1e-12, atol=1e-12)


def test_log_beta_multi_errors():
    with pytest.raises(DomainError):
        special_fn.log_beta_multi([])
    with pytest.raises(DomainError):
        special_fn.log_beta_multi([1.0, 0.0])
