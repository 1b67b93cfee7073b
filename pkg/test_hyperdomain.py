import numpy as np
import pytest

from core.errors import DomainError, InvalidLabelError, PartitionError
from core.hyperdomain import (
    Composite,
    Partition,
    Singleton,
    containing_group,
    encode_labels,
    label_kind,
    label_set,
    validate,
)


def test_valid_partition_reports_nothing(two_groups):
    assert validate(two_groups) is None
    assert two_groups.eta == 2
    assert two_groups.composite_groups == (1,)
    assert two_groups.m == 1
    assert two_groups.head_width == 4


def test_overlap_is_reported():
    report = validate(Partition(3, ((0, 1), (1, 2))))
    assert report is not None and report.startswith("overlap")


def test_incomplete_cover_is_reported():
    report = validate(Partition(3, ((0,), (1,))))
    assert report is not None and report.startswith("incomplete cover")


@pytest.mark.parametrize("groups", [((0,), ()), ((0,), (1, 5)), ((0, 1, 2),)])
def test_other_violations(groups):
    assert validate(Partition(3, groups)) is not None


def test_checked_raises_with_report():
    with pytest.raises(PartitionError, match="overlap"):
        Partition.checked(3, [[0, 1], [1, 2]])


def test_membership_and_group_of(default_partition):
    assert default_partition.group_of.tolist() == [0, 1, 1, 2, 3, 3]
    assert default_partition.membership.shape == (4, 6)
    assert default_partition.membership.sum() == 6
    assert default_partition.indicator(3).tolist() == [0, 0, 0, 0, 1, 1]


def test_label_kind(two_groups):
    assert label_kind([0, 0, 1], two_groups) == Singleton(2)
    assert label_kind([1, 0, 0], two_groups) == Singleton(0)
    assert label_kind([0, 1, 1], two_groups) == Composite(1, (1, 2))


@pytest.mark.parametrize("y", [[1, 1, 0], [0, 0, 0], [1, 1, 1], [0, 2, 0], [1, 0]])
def test_invalid_labels(two_groups, y):
    with pytest.raises(InvalidLabelError):
        label_kind(y, two_groups)


def test_containing_group(two_groups):
    assert containing_group(2, two_groups) == 1
    assert containing_group(0, two_groups) == 0
    with pytest.raises(DomainError):
        containing_group(3, two_groups)


def test_encode_labels(default_partition):
    targets = encode_labels(
        [[0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 1], [1, 0, 0, 0, 0, 0]], default_partition
    )
    assert targets.group.tolist() == [1, 3, 0]
    assert targets.singleton.tolist() == [2, -1, 0]
    assert targets.is_singleton.tolist() == [True, False, True]
    assert len(targets.take(np.array([0, 2]))) == 2


def test_round_trip_through_dict(default_partition):
    assert Partition.from_dict(default_partition.to_dict()) == default_partition
    with pytest.raises(PartitionError):
        Partition.from_dict({"groups": [[0]]})
    with pytest.raises(PartitionError):
        Partition.from_dict({"k": 1, "groups": [["a"]]})


def test_label_set():
    assert label_set([0, 1, 1]) == frozenset({1, 2})
