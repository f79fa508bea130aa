from __future__ import annotations

import math

import numpy as np
import pytest

from rationale_metrics.evalmetrics import (
    classification_metrics,
    cohen_kappa,
    fleiss_kappa,
    grouped_classification,
    judgments_to_cohen_pairs,
    judgments_to_fleiss_items,
    length_stats,
    token_count,
)
from rationale_metrics.permtest import correlate
from rationale_metrics.records import JudgmentRecord, PredictionRecord


def _pred(pred, gold, model="m", setup="s"):
    return PredictionRecord(input_id="i", model_id=model, setup_id=setup,
                            pred=pred, gold=gold)


def _preds_from_confusion(tp, fn, tn, fp):
    return ([_pred(1, 1)] * tp + [_pred(0, 1)] * fn
            + [_pred(0, 0)] * tn + [_pred(1, 0)] * fp)


def test_perfect_predictions():
    m = classification_metrics(_preds_from_confusion(tp=3, fn=0, tn=3, fp=0))
    assert m.balanced_accuracy == m.precision == m.recall == m.f1 == 1.0


def test_all_positive_on_balanced_set():
    m = classification_metrics(_preds_from_confusion(tp=4, fn=0, tn=0, fp=4))
    assert m.balanced_accuracy == 0.5
    assert m.recall == 1.0


def test_hand_confusion_case():
    m = classification_metrics(_preds_from_confusion(tp=3, fn=1, tn=2, fp=2))
    assert math.isclose(m.recall, 0.75)
    assert math.isclose(m.balanced_accuracy, 0.625)
    assert math.isclose(m.precision, 0.6)
    assert math.isclose(m.f1, 2.0 / 3.0)


def test_undefined_ratios_reported_absent():
    # no positive predictions: precision undefined, not zero
    m = classification_metrics(_preds_from_confusion(tp=0, fn=2, tn=2, fp=0))
    assert m.precision is None
    assert "precision" in m.absent
    # no positive gold: recall and balanced accuracy undefined
    m = classification_metrics(_preds_from_confusion(tp=0, fn=0, tn=2, fp=1))
    assert m.recall is None
    assert m.balanced_accuracy is None
    assert "balanced_accuracy" in m.absent


def test_order_invariance():
    preds = _preds_from_confusion(tp=3, fn=1, tn=2, fp=2)
    rng = np.random.default_rng(0)
    shuffled = [preds[i] for i in rng.permutation(len(preds))]
    a, b = classification_metrics(preds), classification_metrics(shuffled)
    assert (a.balanced_accuracy, a.precision, a.recall, a.f1) == \
        (b.balanced_accuracy, b.precision, b.recall, b.f1)


def test_class_symmetry_of_balanced_accuracy():
    preds = _preds_from_confusion(tp=5, fn=2, tn=3, fp=4)
    swapped = [_pred(1 - p.pred, 1 - p.gold) for p in preds]
    assert classification_metrics(preds).balanced_accuracy == \
        classification_metrics(swapped).balanced_accuracy


def test_grouped_classification():
    preds = [_pred(1, 1, model="a"), _pred(0, 0, model="a"),
             _pred(1, 0, model="b"), _pred(0, 1, model="b")]
    groups = grouped_classification(preds, ["model_id"])
    assert groups[("a",)].balanced_accuracy == 1.0
    assert groups[("b",)].balanced_accuracy == 0.0


def test_empty_predictions_rejected():
    with pytest.raises(ValueError):
        classification_metrics([])


# --- Fleiss ------------------------------------------------------------------------

def test_fleiss_all_agree():
    items = [[3, 0], [0, 3], [3, 0]]
    res = fleiss_kappa(items)
    assert res.kappa == 1.0
    assert res.observed_agreement == 1.0


def test_fleiss_hand_worked_example():
    # votes (3 yes) and (1 yes, 2 no): P1 = 1, P2 = 1/3, Pbar = 2/3, Pe = 5/9
    res = fleiss_kappa([[0, 3], [2, 1]])
    assert math.isclose(res.observed_agreement, 2.0 / 3.0, abs_tol=1e-15)
    assert math.isclose(res.expected_agreement, 5.0 / 9.0, abs_tol=1e-15)
    assert math.isclose(res.kappa, 0.25, abs_tol=1e-12)


def test_fleiss_unanimous_single_category():
    res = fleiss_kappa([[3, 0], [3, 0]])
    assert res.kappa == 1.0


def test_fleiss_null_simulation():
    n_items, n_raters = 2000, 3
    rng = np.random.default_rng(31)

    def draw(r):
        yes = r.binomial(n_raters, 0.5, size=n_items)
        return fleiss_kappa([[n_raters - y, y] for y in yes]).kappa

    kappas = [draw(np.random.default_rng(100 + i)) for i in range(60)]
    se = float(np.std(kappas, ddof=1))
    assert abs(draw(rng)) <= 3 * se


def test_fleiss_unequal_rater_counts_rejected():
    with pytest.raises(ValueError, match="ratings"):
        fleiss_kappa([[2, 1], [1, 1]])


# --- Cohen -------------------------------------------------------------------------

def test_cohen_identical_raters():
    res = cohen_kappa([1, 0, 1, 0], [1, 0, 1, 0])
    assert res.kappa == 1.0


def test_cohen_identical_even_when_pe_one():
    res = cohen_kappa([1, 1, 1], [1, 1, 1])
    assert res.expected_agreement == 1.0
    assert res.kappa == 1.0


def test_cohen_hand_worked_example():
    res = cohen_kappa([1, 1, 1, 0], [1, 1, 0, 0])
    assert res.observed_agreement == 0.75
    assert res.expected_agreement == 0.5
    assert math.isclose(res.kappa, 0.5, abs_tol=1e-12)


def test_cohen_symmetry():
    a = [1, 0, 1, 1, 0, 0, 1]
    b = [1, 1, 0, 1, 0, 1, 0]
    assert cohen_kappa(a, b).kappa == cohen_kappa(b, a).kappa


def test_cohen_null_simulation():
    n = 10_000
    rng = np.random.default_rng(37)
    a = rng.integers(0, 2, size=n).tolist()
    b = rng.integers(0, 2, size=n).tolist()
    res = cohen_kappa(a, b)
    # asymptotic null SE for binary balanced marginals: sqrt(po(1-po))/((1-pe) sqrt(n))
    se = math.sqrt(0.25) / (0.5 * math.sqrt(n))
    assert abs(res.kappa) <= 3 * se


def test_cohen_length_mismatch():
    with pytest.raises(ValueError):
        cohen_kappa([1, 0], [1])


# --- lengths -----------------------------------------------------------------------

def test_token_count_whitespace_rule():
    assert token_count("a b  c") == 3
    assert token_count("") == 0
    assert token_count("  leading and\ttabs\nnewlines  ") == 4


def test_length_stats_missing_counted():
    stats = length_stats(["one two", None, "three"])
    assert stats.per_text == (2, 1)
    assert stats.n_missing == 1
    assert math.isclose(stats.avg_tokens, 1.5)


def test_length_accuracy_correlation_vs_oracle():
    # seven source groups with average lengths and synthetic accuracies
    rng = np.random.default_rng(41)
    avg_lengths = []
    for _ in range(7):
        texts = [" ".join(["w"] * int(rng.integers(5, 50))) for _ in range(10)]
        avg_lengths.append(length_stats(texts).avg_tokens)
    accuracies = (0.3 + 0.004 * np.asarray(avg_lengths)
                  + rng.normal(scale=0.02, size=7)).tolist()
    res = correlate(avg_lengths, accuracies, permutations=199, seed=0)
    assert math.isclose(res.pearson_r, float(np.corrcoef(avg_lengths, accuracies)[0, 1]),
                        abs_tol=1e-12)


# --- judgment adapters ----------------------------------------------------------------

def _judgment(item, rater, value, metric="consistency", model="m"):
    return JudgmentRecord(item_id=item, model_id=model, metric=metric,
                          rater_id=rater, value=value)


def test_judgments_to_fleiss_items():
    judgments = [
        _judgment("i1", "r1", 1), _judgment("i1", "r2", 1), _judgment("i1", "r3", 1),
        _judgment("i2", "r1", 1), _judgment("i2", "r2", 0), _judgment("i2", "r3", 0),
    ]
    items = judgments_to_fleiss_items(judgments)["consistency"]
    assert items == [[0, 3], [2, 1]]
    assert math.isclose(fleiss_kappa(items).kappa, 0.25, abs_tol=1e-12)


def test_judgments_to_cohen_pairs():
    judgments = [
        _judgment("i1", "r1", 1), _judgment("i1", "r2", 1),
        _judgment("i2", "r1", 0), _judgment("i2", "r2", 1),
    ]
    a, b = judgments_to_cohen_pairs(judgments)["consistency"]
    assert a == [1, 0] and b == [1, 1]


def test_judgments_cohen_requires_two_raters():
    judgments = [_judgment("i1", "r1", 1), _judgment("i1", "r2", 1),
                 _judgment("i1", "r3", 0)]
    with pytest.raises(ValueError, match="exactly 2"):
        judgments_to_cohen_pairs(judgments)
