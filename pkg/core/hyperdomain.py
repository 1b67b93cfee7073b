"""
Class domain, its partition into groups, and binary label vectors.

Indices are 0-based: classes are 0..K-1 and groups are numbered in the order
they were given. Groups with two or more members are "composite" groups and
the only ones that receive composite evidence.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import DomainError, InvalidLabelError, PartitionError


@dataclass(frozen=True)
class Partition:
    k: int
    groups: Tuple[Tuple[int, ...], ...]

    @classmethod
    def checked(cls, k: int, groups: Sequence[Sequence[int]]) -> "Partition":
        """Build a partition and raise PartitionError if it is invalid."""
        partition = cls(int(k), tuple(tuple(int(i) for i in g) for g in groups))
        report = validate(partition)
        if report is not None:
            raise PartitionError(report)
        return partition

    @classmethod
    def singletons(cls, k: int) -> "Partition":
        return cls(int(k), tuple((i,) for i in range(k)))

    @property
    def eta(self) -> int:
        return len(self.groups)

    @cached_property
    def composite_groups(self) -> Tuple[int, ...]:
        """Indices of groups with at least two members, in partition order."""
        return tuple(j for j, g in enumerate(self.groups) if len(g) >= 2)

    @property
    def m(self) -> int:
        return len(self.composite_groups)

    @property
    def head_width(self) -> int:
        return self.k + self.m

    @cached_property
    def group_of(self) -> np.ndarray:
        """group_of[k] is the index of the group containing class k."""
        out = np.empty(self.k, dtype=np.int64)
        for j, g in enumerate(self.groups):
            out[list(g)] = j
        return out

    @cached_property
    def membership(self) -> np.ndarray:
        """(η, K) 0/1 matrix; row j is the indicator of group j."""
        mat = np.zeros((self.eta, self.k))
        for j, g in enumerate(self.groups):
            mat[j, list(g)] = 1.0
        return mat

    def indicator(self, j: int) -> np.ndarray:
        return self.membership[j].astype(np.int64)

    def to_dict(self) -> dict:
        return {"k": self.k, "groups": [list(g) for g in self.groups]}

    @classmethod
    def from_dict(cls, data: dict) -> "Partition":
        try:
            return cls.checked(data["k"], data["groups"])
        except (KeyError, TypeError, ValueError) as e:
            raise PartitionError(f"malformed domain description: {e}")


@dataclass(frozen=True)
class Singleton:
    index: int


@dataclass(frozen=True)
class Composite:
    group: int
    members: Tuple[int, ...]


LabelKind = Union[Singleton, Composite]


def validate(partition: Partition) -> Optional[str]:
    """Return None when the partition is valid, else the first violation."""
    k = partition.k
    if k < 1:
        return f"domain size must be >= 1, got {k}"
    if not partition.groups:
        return "partition has no groups"
    seen = {}
    for j, group in enumerate(partition.groups):
        if not group:
            return f"group {j} is empty"
        for idx in group:
            if idx < 0 or idx >= k:
                return f"group {j} contains out-of-range class {idx}"
            if idx in seen:
                return f"overlap: class {idx} appears in groups {seen[idx]} and {j}"
            seen[idx] = j
    missing = [i for i in range(k) if i not in seen]
    if missing:
        return f"incomplete cover: classes {missing} are in no group"
    if k >= 2 and len(partition.groups) == 1:
        return "a single group covering the whole domain is not a composite set"
    return None


def containing_group(k: int, partition: Partition) -> int:
    if k < 0 or k >= partition.k:
        raise DomainError(f"class index {k} out of range 0..{partition.k - 1}")
    return int(partition.group_of[k])


def as_label(bits: Sequence[int], partition: Partition) -> np.ndarray:
    y = np.asarray(bits)
    if y.shape != (partition.k,):
        raise InvalidLabelError(f"label must have length {partition.k}, got shape {y.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise InvalidLabelError(f"label must be binary, got {list(bits)}")
    return y.astype(np.int64)


def label_kind(y: Sequence[int], partition: Partition) -> LabelKind:
    bits = as_label(y, partition)
    support = tuple(int(i) for i in np.flatnonzero(bits))
    if not support:
        raise InvalidLabelError("label has no bit set")
    if len(support) == 1:
        return Singleton(support[0])
    j = int(partition.group_of[support[0]])
    if set(partition.groups[j]) != set(support):
        raise InvalidLabelError(f"label support {list(support)} matches no group")
    return Composite(j, tuple(partition.groups[j]))


def label_set(y: Sequence[int]) -> frozenset:
    return frozenset(int(i) for i in np.flatnonzero(np.asarray(y)))


@dataclass(frozen=True)
class LabelTargets:
    """
    Array encoding of a batch of labels.

    group[i] is the ground-truth group (IC, or the group containing IS);
    singleton[i] is IS for singleton labels and -1 for composite ones.
    """

    group: np.ndarray
    singleton: np.ndarray

    @property
    def is_singleton(self) -> np.ndarray:
        return self.singleton >= 0

    def __len__(self) -> int:
        return len(self.group)

    def take(self, idx) -> "LabelTargets":
        return LabelTargets(self.group[idx], self.singleton[idx])


def encode_labels(labels: Sequence[Sequence[int]], partition: Partition) -> LabelTargets:
    group = np.empty(len(labels), dtype=np.int64)
    singleton = np.full(len(labels), -1, dtype=np.int64)
    for i, y in enumerate(labels):
        kind = label_kind(y, partition)
        if isinstance(kind, Singleton):
            singleton[i] = kind.index
            group[i] = partition.group_of[kind.index]
        else:
            group[i] = kind.group
    return LabelTargets(group, singleton)


def singleton_label(k: int, partition: Partition) -> List[int]:
    bits = [0] * partition.k
    bits[k] = 1
    return bits
