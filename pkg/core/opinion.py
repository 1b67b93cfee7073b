"""
Hyper-opinions over an explicit family of focal sets, and the evidential
uncertainty measures computed from them (vacuity, vagueness, dissonance).
"""

import itertools
from dataclasses import dataclass
from typing import FrozenSet, Sequence, Tuple

import numpy as np

from core.errors import DomainError
from core.hyperdomain import Composite, LabelKind, Partition, Singleton

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class FocalFamily:
    k: int
    sets: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        full = frozenset(range(self.k))
        for s in self.sets:
            if not s or s == full:
                raise DomainError(f"focal set {sorted(s)} must be non-empty and proper")
            if not s <= full:
                raise DomainError(f"focal set {sorted(s)} leaves the domain 0..{self.k - 1}")
        if len(set(self.sets)) != len(self.sets):
            raise DomainError("focal sets must be distinct")

    @classmethod
    def of(cls, k: int, sets: Sequence[Sequence[int]]) -> "FocalFamily":
        return cls(k, tuple(frozenset(s) for s in sets))

    @classmethod
    def reduced_power_set(cls, k: int) -> "FocalFamily":
        """Every non-empty proper subset, ordered by size then lexicographically."""
        sets = []
        for size in range(1, k):
            sets.extend(frozenset(c) for c in itertools.combinations(range(k), size))
        return cls(k, tuple(sets))

    @classmethod
    def from_partition(cls, partition: Partition) -> "FocalFamily":
        """Singletons followed by the composite groups, matching the network head."""
        sets = [frozenset((i,)) for i in range(partition.k)]
        sets.extend(frozenset(partition.groups[j]) for j in partition.composite_groups)
        return cls(partition.k, tuple(sets))

    def __len__(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class HyperOpinion:
    beliefs: np.ndarray
    u: float

    def __post_init__(self):
        total = self.u + float(np.sum(self.beliefs))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"beliefs and uncertainty sum to {total}, expected 1")


def opinion_from_evidence(e: Sequence[float], k: int) -> HyperOpinion:
    evidence = np.asarray(e, dtype=np.float64)
    if np.any(evidence < 0) or not np.all(np.isfinite(evidence)):
        raise DomainError(f"evidence must be finite and non-negative, got {list(evidence)}")
    total = float(np.sum(evidence)) + k
    return HyperOpinion(beliefs=evidence / total, u=k / total)


def vacuity(op: HyperOpinion) -> float:
    return float(op.u)


def vagueness(op: HyperOpinion, family: FocalFamily) -> float:
    composite = np.array([len(s) >= 2 for s in family.sets], dtype=bool)
    return float(np.sum(op.beliefs[composite]))


def _balance(b_other: float, b_self: float) -> float:
    denom = b_other + b_self
    if denom <= 0.0:
        return 0.0
    return 1.0 - abs(b_other - b_self) / denom


def dissonance(op: HyperOpinion, family: FocalFamily) -> float:
    """
    Balanced conflict between focal sets, weighted by the size of their
    symmetric difference. A set whose weighted neighbourhood carries no
    belief contributes nothing.
    """
    b = op.beliefs
    n = len(family)
    total = 0.0
    for i in range(n):
        if b[i] <= 0.0:
            continue
        weighted = 0.0
        balanced = 0.0
        for j in range(n):
            if j == i or b[j] <= 0.0:
                continue
            d = len(family.sets[i] ^ family.sets[j])
            weighted += d * b[j]
            balanced += d * b[j] * _balance(b[j], b[i])
        if weighted > 0.0:
            total += b[i] * balanced / weighted
    return total


def argmax_evidence(e: Sequence[float], partition: Partition) -> LabelKind:
    """
    Set prediction from the largest evidence entry. The first K entries are
    singletons, the rest the composite groups in partition order; the lowest
    index wins a tie.
    """
    evidence = np.asarray(e, dtype=np.float64)
    if evidence.size == 0:
        raise DomainError("argmax_evidence: empty evidence vector")
    if evidence.shape != (partition.head_width,):
        raise DomainError(
            f"evidence has length {evidence.size}, expected {partition.head_width}"
        )
    top = int(np.argmax(evidence))
    if top < partition.k:
        return Singleton(top)
    j = partition.composite_groups[top - partition.k]
    return Composite(j, tuple(partition.groups[j]))


def kind_to_set(kind: LabelKind) -> FrozenSet[int]:
    if isinstance(kind, Singleton):
        return frozenset((kind.index,))
    return frozenset(kind.members)
