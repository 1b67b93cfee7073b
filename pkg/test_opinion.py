import numpy as np
import pytest

from core import opinion
from core.errors import DomainError
from core.hyperdomain import Composite, Partition, Singleton
from core.opinion import FocalFamily


@pytest.fixture
def power_set():
    return FocalFamily.reduced_power_set(3)


def test_reduced_power_set_order(power_set):
    assert [sorted(s) for s in power_set.sets] == [[0], [1], [2], [0, 1], [0, 2], [1, 2]]


def test_vagueness_dominated_row(power_set):
    op = opinion.opinion_from_evidence([3, 0, 0, 0, 0, 24], 3)
    np.testing.assert_allclose(op.beliefs, [0.1, 0, 0, 0, 0, 0.8], atol=1e-15)
    assert opinion.vacuity(op) == pytest.approx(0.1, abs=1e-12)
    assert opinion.vagueness(op, power_set) == pytest.approx(0.8, abs=1e-12)
    assert opinion.dissonance(op, power_set) == pytest.approx(0.2, abs=1e-6)


def test_conflict_row(power_set):
    op = opinion.opinion_from_evidence([3, 12, 12, 0, 0, 0], 3)
    np.testing.assert_allclose(op.beliefs, [0.1, 0.4, 0.4, 0, 0, 0], atol=1e-15)
    assert opinion.vacuity(op) == pytest.approx(0.1, abs=1e-12)
    assert opinion.vagueness(op, power_set) == pytest.approx(0.0, abs=1e-12)
    assert opinion.dissonance(op, power_set) == pytest.approx(0.744, abs=1e-6)


def test_no_evidence_is_fully_vacuous(power_set):
    op = opinion.opinion_from_evidence(np.zeros(6), 3)
    assert opinion.vacuity(op) == 1.0
    assert opinion.vagueness(op, power_set) == 0.0
    assert opinion.dissonance(op, power_set) == 0.0


def test_single_focal_mass_has_no_dissonance(power_set):
    op = opinion.opinion_from_evidence([0, 50, 0, 0, 0, 0], 3)
    assert opinion.dissonance(op, power_set) == 0.0


def test_measures_stay_in_unit_interval(power_set, rng):
    for _ in range(50):
        op = opinion.opinion_from_evidence(rng.exponential(5.0, size=6), 3)
        assert 0.0 <= opinion.vacuity(op) <= 1.0
        assert 0.0 <= opinion.vagueness(op, power_set) <= 1.0
        assert opinion.dissonance(op, power_set) >= 0.0


def test_negative_evidence_rejected():
    with pytest.raises(DomainError):
        opinion.opinion_from_evidence([1, -1, 0], 3)


def test_unnormalized_opinion_rejected():
    with pytest.raises(DomainError):
        opinion.HyperOpinion(np.array([0.5, 0.5]), 0.2)


def test_family_validation():
    with pytest.raises(DomainError):
        FocalFamily.of(3, [[0], [0, 1, 2]])
    with pytest.raises(DomainError):
        FocalFamily.of(3, [[0], [0]])
    with pytest.raises(DomainError):
        FocalFamily.of(3, [[3]])


def test_family_from_partition(default_partition):
    family = FocalFamily.from_partition(default_partition)
    assert len(family) == 8
    assert family.sets[6] == frozenset({1, 2})
    assert family.sets[7] == frozenset({4, 5})


def test_argmax_evidence(two_groups):
    assert opinion.argmax_evidence([3, 0, 0, 24], two_groups) == Composite(1, (1, 2))
    assert opinion.argmax_evidence([3, 12, 12, 0], two_groups) == Singleton(1)
    assert opinion.argmax_evidence([0, 0, 0, 0], two_groups) == Singleton(0)


def test_argmax_evidence_errors(two_groups):
    with pytest.raises(DomainError):
        opinion.argmax_evidence([], two_groups)
    with pytest.raises(DomainError):
        opinion.argmax_evidence([1, 2, 3], two_groups)


def test_kind_to_set():
    assert opinion.kind_to_set(Singleton(2)) == frozenset({2})
    assert opinion.kind_to_set(Composite(1, (1, 2))) == frozenset({1, 2})
    partition = Partition.checked(2, [[0], [1]])
    assert opinion.argmax_evidence([1.0, 1.0], partition) == Singleton(0)


def test_opinions_are_normalized(rng):
    for _ in range(1000):
        k = int(rng.integers(2, 7))
        width = int(rng.integers(k, 2 * k + 1))
        evidence = rng.exponential(rng.uniform(0.01, 100.0), size=width)
        evidence[rng.random(width) < 0.3] = 0.0
        op = opinion.opinion_from_evidence(evidence, k)
        assert op.u + op.beliefs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(op.beliefs >= 0) and op.u > 0


def test_argmax_evidence_ignores_positive_scaling(default_partition, rng):
    for _ in range(200):
        evidence = rng.exponential(3.0, size=default_partition.head_width)
        for scale in (1e-3, 0.5, 7.0, 1e4):
            assert opinion.argmax_evidence(scale * evidence, default_partition) == (
                opinion.argmax_evidence(evidence, default_partition)
            )


def test_dissonance_ignores_relabeling(power_set, rng):
    for _ in range(100):
        evidence = rng.exponential(5.0, size=len(power_set))
        op = opinion.opinion_from_evidence(evidence, 3)
        expected = opinion.dissonance(op, power_set)

        perm = rng.permutation(3)
        renamed = FocalFamily(3, tuple(frozenset(int(perm[i]) for i in s) for s in power_set.sets))
        assert opinion.dissonance(op, renamed) == pytest.approx(expected, rel=1e-12, abs=1e-15)

        order = rng.permutation(len(power_set))
        shuffled = FocalFamily(3, tuple(power_set.sets[i] for i in order))
        reordered = opinion.opinion_from_evidence(evidence[order], 3)
        assert opinion.dissonance(reordered, shuffled) == pytest.approx(expected, rel=1e-12,
                                                                        abs=1e-15)


def test_vagueness_and_vacuity_share_the_unit_mass(power_set, rng):
    for _ in range(500):
        op = opinion.opinion_from_evidence(rng.exponential(4.0, size=len(power_set)), 3)
        assert opinion.vagueness(op, power_set) + opinion.vacuity(op) <= 1.0 + 1e-12


def test_singleton_family_has_no_vagueness(rng):
    family = FocalFamily.of(4, [[0], [1], [2], [3]])
    for _ in range(100):
        op = opinion.opinion_from_evidence(rng.exponential(4.0, size=4), 4)
        assert opinion.vagueness(op, family) == 0.0
