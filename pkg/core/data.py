"""
Synthetic composite-label datasets and their JSONL files.

Each class is an isotropic Gaussian cluster with its mean on a circle. A
sample whose class belongs to a composite group is, with probability rho,
"blurred": redrawn around the group centroid with inflated spread, and
labelled with the whole group instead of its class.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.errors import DatasetFormatError, DomainError, HennError
from core.hyperdomain import LabelTargets, Partition, encode_labels, label_kind

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class Sample:
    features: Tuple[float, ...]
    label: Tuple[int, ...]


@dataclass
class DatasetSpec:
    partition: Partition
    d: int = 2
    radius: float = 8.0
    std: float = 1.0
    rho: float = 0.5
    blur: float = 2.0
    counts: Dict[str, int] = field(default_factory=lambda: {"train": 2000, "val": 500, "test": 500})
    seed: int = 0

    def __post_init__(self):
        if self.partition.k < 1:
            raise DomainError("dataset needs at least one class")
        if self.d < 2:
            raise DomainError(f"feature dimension must be >= 2, got {self.d}")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho}")
        if self.blur < 1.0:
            raise DomainError(f"blur multiplier must be >= 1, got {self.blur}")
        if self.std <= 0:
            raise DomainError(f"within-class std must be > 0, got {self.std}")
        if any(n < 0 for n in self.counts.values()):
            raise DomainError(f"split sizes must be >= 0, got {self.counts}")


def class_means(spec: DatasetSpec) -> np.ndarray:
    k = spec.partition.k
    angles = 2.0 * np.pi * np.arange(k) / k
    means = np.zeros((k, spec.d))
    means[:, 0] = spec.radius * np.cos(angles)
    means[:, 1] = spec.radius * np.sin(angles)
    return means


def _generate_split(spec: DatasetSpec, n: int, rng: np.random.Generator) -> List[Sample]:
    part = spec.partition
    means = class_means(spec)
    centroids = part.membership @ means / part.membership.sum(axis=1, keepdims=True)
    composite = np.zeros(part.eta, dtype=bool)
    composite[list(part.composite_groups)] = True

    classes = rng.integers(part.k, size=n)
    coins = rng.random(n)
    noise = rng.standard_normal((n, spec.d))

    samples = []
    for cls, coin, eps in zip(classes, coins, noise):
        j = part.group_of[cls]
        if composite[j] and coin < spec.rho:
            x = centroids[j] + spec.blur * spec.std * eps
            y = part.indicator(j)
        else:
            x = means[cls] + spec.std * eps
            y = np.zeros(part.k, dtype=np.int64)
            y[cls] = 1
        samples.append(Sample(tuple(float(v) for v in x), tuple(int(b) for b in y)))
    return samples


def generate(spec: DatasetSpec) -> Dict[str, List[Sample]]:
    streams = np.random.SeedSequence(spec.seed).spawn(len(SPLITS))
    return {
        split: _generate_split(spec, spec.counts.get(split, 0), np.random.default_rng(stream))
        for split, stream in zip(SPLITS, streams)
    }


def write_jsonl(samples: Sequence[Sample], path: str) -> None:
    dir_path = os.path.dirname(path)
    if dir_path:
        os.makedirs(dir_path, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            f.write(json.dumps({"x": list(s.features), "y": list(s.label)}) + "\n")


def _binary_label(values) -> Tuple[int, ...]:
    bits = []
    for b in values:
        if isinstance(b, bool) or (isinstance(b, (int, float)) and b in (0, 1)):
            bits.append(int(b))
        else:
            raise ValueError(f"label entries must be 0 or 1, got {b!r}")
    return tuple(bits)


def read_jsonl(path: str, partition: Partition) -> List[Sample]:
    samples = []
    width = None
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise DatasetFormatError(f"{path}: not valid UTF-8 ({e.reason})", line=lineno)
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                x = tuple(float(v) for v in record["x"])
                y = _binary_label(record["y"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise DatasetFormatError(f"{path}: malformed record ({e})", line=lineno)
            if width is None:
                width = len(x)
            elif len(x) != width:
                raise DatasetFormatError(
                    f"{path}: feature vector has length {len(x)}, expected {width}", line=lineno
                )
            try:
                label_kind(y, partition)
            except HennError as e:
                raise DatasetFormatError(f"{path}: invalid label {list(y)} ({e})", line=lineno)
            samples.append(Sample(x, y))
    return samples


def write_domain(partition: Partition, path: str) -> None:
    dir_path = os.path.dirname(path)
    if dir_path:
        os.makedirs(dir_path, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(partition.to_dict(), f)


def read_domain(path: str) -> Partition:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(f"{path}: {e}", line=e.lineno)
        except UnicodeDecodeError as e:
            raise DatasetFormatError(f"{path}: not valid UTF-8 ({e.reason})")
    return Partition.from_dict(data)


def to_arrays(samples: Sequence[Sample], partition: Partition) -> Tuple[np.ndarray, LabelTargets]:
    x = np.array([s.features for s in samples], dtype=np.float64)
    return x, encode_labels([s.label for s in samples], partition)


def composite_count(samples: Sequence[Sample]) -> int:
    return sum(1 for s in samples if sum(s.label) > 1)


def write_dataset(splits: Dict[str, List[Sample]], partition: Partition, data_dir: str) -> None:
    for split, samples in splits.items():
        path = os.path.join(data_dir, f"{split}.jsonl")
        write_jsonl(samples, path)
        logging.info(f"Wrote {len(samples)} samples ({composite_count(samples)} composite) to {path}")
    write_domain(partition, os.path.join(data_dir, "domain.json"))
