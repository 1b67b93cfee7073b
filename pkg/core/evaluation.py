"""
Set-prediction metrics (Jaccard), projected accuracy, AUROC of uncertainty
scores, and the non-zero evidence ratios.
"""

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from core.errors import DomainError
from core.hyperdomain import Partition

UNCERTAINTY_SCORES = ("vagueness", "vacuity", "dissonance")


@dataclass
class PredictionRecord:
    truth: FrozenSet[int]
    set_pred: FrozenSet[int]
    singleton_pred: int
    scores: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.truth or not self.set_pred:
            raise DomainError("truth and predicted sets must be non-empty")


def jaccard(y: Iterable[int], yhat: Iterable[int]) -> float:
    a, b = set(y), set(yhat)
    if not a or not b:
        raise DomainError("jaccard needs two non-empty sets")
    return len(a & b) / len(a | b)


def _require(records: Sequence[PredictionRecord], name: str):
    if not records:
        raise DomainError(f"{name} needs at least one record")


def over_js(records: Sequence[PredictionRecord]) -> float:
    _require(records, "over_js")
    return float(np.mean([jaccard(r.truth, r.set_pred) for r in records]))


def comp_js(records: Sequence[PredictionRecord]) -> Optional[float]:
    """Mean Jaccard over records predicted as composite; None if there are none."""
    composite = [r for r in records if len(r.set_pred) > 1]
    if not composite:
        return None
    return float(np.mean([jaccard(r.truth, r.set_pred) for r in composite]))


def accuracy(records: Sequence[PredictionRecord]) -> float:
    """A singleton prediction is correct when it belongs to the truth set."""
    _require(records, "accuracy")
    return float(np.mean([r.singleton_pred in r.truth for r in records]))


def set_accuracy(records: Sequence[PredictionRecord]) -> float:
    _require(records, "set_accuracy")
    return float(np.mean([r.set_pred == r.truth for r in records]))


def auroc(positive_scores: Sequence[float], negative_scores: Sequence[float]) -> float:
    """P(pos > neg) + ½·P(pos = neg), via average ranks (Mann–Whitney U)."""
    pos = np.asarray(positive_scores, dtype=np.float64)
    neg = np.asarray(negative_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise DomainError("auroc needs non-empty positive and negative scores")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = np.sum(ranks[: pos.size]) - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def score_auroc(records: Sequence[PredictionRecord], score: str) -> Optional[float]:
    """AUROC of a score for composite-labelled (positive) vs singleton-labelled samples."""
    pos = [r.scores[score] for r in records if len(r.truth) > 1]
    neg = [r.scores[score] for r in records if len(r.truth) == 1]
    if not pos or not neg:
        return None
    return auroc(pos, neg)


def nonzero_ratios(evidence: np.ndarray, partition: Partition,
                   gamma: float = 1e-4) -> Dict[str, float]:
    """
    Fraction of samples whose mean singleton evidence (resp. mean composite
    evidence) is at least gamma.
    """
    ev = np.atleast_2d(np.asarray(evidence, dtype=np.float64))
    singleton_mean = ev[:, : partition.k].mean(axis=1)
    ratios = {"nz_sngl": float(np.mean(singleton_mean >= gamma))}
    if partition.m:
        composite_mean = ev[:, partition.k :].mean(axis=1)
        ratios["nz_comp"] = float(np.mean(composite_mean >= gamma))
    else:
        ratios["nz_comp"] = 0.0
    return ratios


def summarize(records: Sequence[PredictionRecord]) -> Dict[str, Optional[float]]:
    metrics = {
        "over_js": over_js(records),
        "comp_js": comp_js(records),
        "acc": accuracy(records),
        "set_acc": set_accuracy(records),
        "n": len(records),
        "n_composite_pred": sum(1 for r in records if len(r.set_pred) > 1),
    }
    for score in UNCERTAINTY_SCORES:
        metrics[f"auroc_{score}"] = score_auroc(records, score)
    return metrics


def format_report(metrics: Dict[str, Optional[float]]) -> str:
    """Flat key: value block; undefined metrics print as 0.0 and are flagged."""
    lines = []
    for key, value in metrics.items():
        if value is None:
            lines.append(f"{key}: 0.0")
            lines.append(f"{key}_undefined: true")
        elif isinstance(value, float):
            lines.append(f"{key}: {value:.6f}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def report_json(metrics: Dict[str, Optional[float]]) -> str:
    return json.dumps(metrics, indent=2, sort_keys=True) + "\n"


def mean_std(values: List[float]) -> Dict[str, float]:
    arr = np.asarray(values, dtype=np.float64)
    return {"mean": float(arr.mean()), "std": float(arr.std())}
