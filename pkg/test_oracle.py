import math

import numpy as np
import pytest

from core import gdd, loss, oracle
from core.errors import DomainError
from core.gdd import GddParams
from core.hyperdomain import Partition


def test_mean_of_flat_gdd():
    flat = GddParams.flat(Partition.singletons(3))
    n_se = oracle.comparison_sigmas(3)
    for k in range(3):
        est = oracle.mc_expectation(flat, f"mean_{k}", n=200_000, seed=k)
        assert est.contains(1.0 / 3.0, n_se)


def test_log_p_of_dirichlet():
    p = GddParams.of([2.0, 1.0, 1.0], [0.0, 0.0, 0.0], Partition.singletons(3))
    est = oracle.mc_expectation(p, "log_p_0", n=200_000, seed=1)
    assert est.contains(-5.0 / 6.0)
    assert gdd.expected_log_singleton(p, 0) == pytest.approx(-5.0 / 6.0, abs=1e-12)


def test_grouped_expectations_agree(table_params):
    n_se = oracle.comparison_sigmas(4)
    groups = gdd.expected_log_groups(table_params)
    for j in range(2):
        est = oracle.mc_expectation(table_params, f"log_group_{j}", seed=j)
        assert est.contains(groups[j], n_se)
    est = oracle.mc_expectation(table_params, "neg_log_pdf", seed=5)
    assert est.contains(gdd.entropy(table_params), n_se)
    est = oracle.mc_expectation(table_params, "log_ratio_to_flat", seed=6)
    assert est.contains(gdd.kl_to_flat(table_params), n_se)


def test_estimates_are_deterministic(table_params):
    a = oracle.mc_expectation(table_params, "mean_0", n=5000, seed=42)
    b = oracle.mc_expectation(table_params, "mean_0", n=5000, seed=42)
    c = oracle.mc_expectation(table_params, "mean_0", n=5000, seed=43)
    assert a == b
    assert a != c
    assert a.n == 5000 and a.std_error > 0


def test_comparison_sigmas_grow_with_the_family():
    assert oracle.comparison_sigmas(1) == pytest.approx(3.0, abs=1e-9)
    assert oracle.comparison_sigmas(300) == pytest.approx(4.44, abs=0.03)
    assert oracle.comparison_sigmas(10) < oracle.comparison_sigmas(100)
    with pytest.raises(DomainError):
        oracle.comparison_sigmas(0)


def test_tolerance_is_pure_standard_errors():
    est = oracle.McEstimate(mean=0.0, std_error=1e-3, n=200_000)
    assert est.tolerance() == pytest.approx(3e-3)
    assert est.contains(2.9e-3)
    assert not est.contains(3.1e-3)
    assert est.contains(4.2e-3, oracle.comparison_sigmas(300))


def test_mc_preconditions(table_params):
    with pytest.raises(DomainError):
        oracle.mc_expectation(table_params, "mean_0", n=999)
    with pytest.raises(DomainError):
        oracle.mc_expectation(table_params, "median_0", n=1000)
    with pytest.raises(DomainError):
        oracle.mc_expectation(table_params, "mean_7", n=1000)
    with pytest.raises(DomainError):
        oracle.mc_expectation(table_params, "pce", n=1000)


def test_finite_diff_of_quadratic():
    grad = oracle.finite_diff(lambda v: 0.5 * float(np.dot(v, v)), [1.0, 2.0])
    np.testing.assert_allclose(grad, [1.0, 2.0], atol=1e-8)


def test_finite_diff_of_constant():
    np.testing.assert_array_equal(oracle.finite_diff(lambda v: 3.0, [0.5, -2.0, 7.0]), 0.0)


def test_finite_diff_names_bad_coordinate():
    with pytest.raises(DomainError, match="coordinate 1"):
        oracle.finite_diff(lambda v: math.log(v[1]) if v[1] > 0 else float("nan"), [1.0, 1e-6])


def test_finite_diff_against_upce_gradient(rng, two_groups):
    p = GddParams(rng.uniform(0.6, 4.0, size=3), np.array([0.0, 1.5]), two_groups)

    def f(alpha):
        return loss.upce(GddParams(alpha, p.c, two_groups), [0, 0, 1])

    fd = oracle.finite_diff(f, p.alpha)
    analytic = loss.grad_total(p, [0, 0, 1], lam=0.0).d_alpha
    assert np.linalg.norm(fd - analytic) <= 1e-5 * np.linalg.norm(analytic)


def test_quadrature():
    two = Partition.singletons(2)
    assert oracle.simplex_quadrature(GddParams.flat(two)) == pytest.approx(1.0, abs=1e-4)
    assert oracle.simplex_quadrature(GddParams.of([2.0, 1.0], [0, 0], two)) == pytest.approx(
        1.0, abs=1e-6
    )


def test_quadrature_on_grouped_params(table_params):
    assert oracle.simplex_quadrature(table_params) == pytest.approx(1.0, abs=1e-2)


def test_quadrature_rejects_large_domains(default_partition):
    with pytest.raises(DomainError):
        oracle.simplex_quadrature(GddParams.flat(default_partition))


def test_random_partition_shape(rng):
    for _ in range(30):
        k = int(rng.integers(2, 6))
        partition = oracle.random_partition(rng, k)
        assert 2 <= partition.eta <= 3
        assert sorted(i for g in partition.groups for i in g) == list(range(k))
