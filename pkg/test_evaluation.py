import json

import numpy as np
import pytest

from core import evaluation
from core.errors import DomainError
from core.evaluation import PredictionRecord


def rec(truth, pred, single=None, **scores):
    single = min(pred) if single is None else single
    return PredictionRecord(frozenset(truth), frozenset(pred), single, scores)


def test_jaccard():
    assert evaluation.jaccard({1, 2}, {1, 2}) == 1.0
    assert evaluation.jaccard({1, 2}, {1}) == 0.5
    assert evaluation.jaccard({0}, {1, 2}) == 0.0
    assert evaluation.jaccard({0, 3}, {3, 4}) == evaluation.jaccard({3, 4}, {0, 3})
    with pytest.raises(DomainError):
        evaluation.jaccard(set(), {1})


def test_over_js():
    assert evaluation.over_js([rec({1}, {1}), rec({1, 2}, {1, 2})]) == 1.0
    assert evaluation.over_js([rec({1}, {1}), rec({1, 2}, {1})]) == 0.75
    assert evaluation.over_js([rec({0}, {1}), rec({2}, {3})]) == 0.0
    with pytest.raises(DomainError):
        evaluation.over_js([])


def test_comp_js():
    assert evaluation.comp_js([rec({1}, {1})]) is None
    assert evaluation.comp_js([rec({1, 2}, {1, 2})]) == 1.0
    assert evaluation.comp_js([rec({1}, {1, 2}), rec({3}, {0})]) == 0.5


def test_comp_js_equals_over_js_when_all_predictions_are_composite():
    records = [rec({1}, {1, 2}), rec({1, 2}, {1, 2}), rec({4, 5}, {3, 4})]
    assert evaluation.comp_js(records) == pytest.approx(evaluation.over_js(records))


def test_accuracy_uses_membership():
    assert evaluation.accuracy([rec({1, 2}, {1, 2}, single=2)]) == 1.0
    assert evaluation.accuracy([rec({0}, {0}, single=0)]) == 1.0
    assert evaluation.accuracy([rec({0}, {1}, single=1)]) == 0.0


def test_set_accuracy():
    records = [rec({1, 2}, {1, 2}), rec({1, 2}, {1}), rec({3}, {3})]
    assert evaluation.set_accuracy(records) == pytest.approx(2 / 3)


def test_record_rejects_empty_sets():
    with pytest.raises(DomainError):
        PredictionRecord(frozenset(), frozenset({1}), 1)


def test_auroc_examples():
    assert evaluation.auroc([0.9, 0.8], [0.1, 0.2]) == 1.0
    assert evaluation.auroc([0.3, 0.3], [0.3]) == 0.5
    assert evaluation.auroc([0.9, 0.4], [0.5]) == 0.5
    with pytest.raises(DomainError):
        evaluation.auroc([], [0.1])


def test_auroc_matches_pair_counting(rng):
    pos = np.round(rng.normal(0.5, 1.0, size=40), 1)
    neg = np.round(rng.normal(0.0, 1.0, size=30), 1)
    wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
    assert evaluation.auroc(pos, neg) == pytest.approx(wins / (len(pos) * len(neg)))
    assert evaluation.auroc(pos, neg) + evaluation.auroc(neg, pos) == pytest.approx(1.0)


def test_score_auroc_uses_composite_truth_as_positive():
    records = [
        rec({1, 2}, {1, 2}, vagueness=0.9),
        rec({4, 5}, {4}, vagueness=0.7),
        rec({0}, {0}, vagueness=0.1),
        rec({3}, {3}, vagueness=0.2),
    ]
    assert evaluation.score_auroc(records, "vagueness") == 1.0
    assert evaluation.score_auroc(records[2:], "vagueness") is None


def test_nonzero_ratios(default_partition):
    evidence = np.array([
        [1.0, 0, 0, 0, 0, 0, 0.0, 0.0],
        [0.0, 0, 0, 0, 0, 0, 2.0, 0.0],
        [0.0, 0, 0, 0, 0, 0, 0.0, 0.0],
        [1.0, 1, 1, 1, 1, 1, 1.0, 1.0],
    ])
    ratios = evaluation.nonzero_ratios(evidence, default_partition, gamma=1e-4)
    assert ratios == {"nz_sngl": 0.5, "nz_comp": 0.5}


def test_summarize_and_reports():
    records = [
        rec({1}, {1}, vagueness=0.1, vacuity=0.2, dissonance=0.3),
        rec({1, 2}, {1}, vagueness=0.8, vacuity=0.1, dissonance=0.3),
    ]
    metrics = evaluation.summarize(records)
    assert metrics["comp_js"] is None
    assert metrics["n"] == 2 and metrics["n_composite_pred"] == 0
    assert metrics["auroc_vagueness"] == 1.0
    assert metrics["auroc_vacuity"] == 0.0
    assert metrics["auroc_dissonance"] == 0.5
    text = evaluation.format_report(metrics)
    assert "comp_js: 0.0\n" in text
    assert "comp_js_undefined: true" in text
    assert json.loads(evaluation.report_json(metrics))["comp_js"] is None


def test_mean_std():
    assert evaluation.mean_std([1.0, 3.0]) == {"mean": 2.0, "std": 1.0}
