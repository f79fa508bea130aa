"""Classification, inter-rater agreement, and rationale length statistics.

Undefined ratios (zero denominators) surface as ``None`` plus a reason rather
than silently becoming 0, so aggregates stay honest on degenerate slices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .records import JudgmentRecord, PredictionRecord


@dataclass(frozen=True, slots=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(slots=True)
class ClassificationMetrics:
    confusion: ConfusionCounts
    balanced_accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    absent: dict[str, str]


@dataclass(frozen=True, slots=True)
class AgreementResult:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    n_items: int
    n_raters: int


@dataclass(slots=True)
class LengthStats:
    avg_tokens: float
    per_text: tuple[int, ...]
    n_missing: int


def confusion_counts(preds: Sequence[PredictionRecord]) -> ConfusionCounts:
    tp = fp = tn = fn = 0
    for rec in preds:
        if rec.gold == 1:
            if rec.pred == 1:
                tp += 1
            else:
                fn += 1
        else:
            if rec.pred == 1:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def classification_metrics(preds: Sequence[PredictionRecord]) -> ClassificationMetrics:
    """Balanced accuracy, precision, recall, F1 with explicit absent-value reasons."""
    if not preds:
        raise ValueError("no prediction records")
    c = confusion_counts(preds)
    absent: dict[str, str] = {}

    tpr = c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else None
    tnr = c.tn / (c.tn + c.fp) if c.tn + c.fp > 0 else None
    if tpr is None:
        absent["recall"] = "no positive gold labels"
    if tpr is None or tnr is None:
        absent["balanced_accuracy"] = "one gold class is empty"
    balanced = (tpr + tnr) / 2 if tpr is not None and tnr is not None else None

    if c.tp + c.fp > 0:
        precision = c.tp / (c.tp + c.fp)
    else:
        precision = None
        absent["precision"] = "no positive predictions"

    if precision is None or tpr is None:
        f1 = None
        absent["f1"] = "precision or recall undefined"
    elif precision + tpr == 0.0:
        f1 = None
        absent["f1"] = "precision and recall both zero"
    else:
        f1 = 2 * precision * tpr / (precision + tpr)

    return ClassificationMetrics(confusion=c, balanced_accuracy=balanced,
                                 precision=precision, recall=tpr, f1=f1, absent=absent)


def grouped_classification(preds: Sequence[PredictionRecord],
                           group_by: Sequence[str]) -> dict[tuple, ClassificationMetrics]:
    """Metrics per group key (attribute names), keys in sorted order."""
    buckets: dict[tuple, list[PredictionRecord]] = {}
    for rec in preds:
        key = tuple(getattr(rec, name) for name in group_by)
        buckets.setdefault(key, []).append(rec)
    return {key: classification_metrics(buckets[key]) for key in sorted(buckets)}


def fleiss_kappa(items: Sequence[Sequence[int]]) -> AgreementResult:
    """Fleiss' kappa from per-item category counts (equal rater totals required)."""
    if not items:
        raise ValueError("no items")
    n_raters = sum(items[0])
    if n_raters < 2:
        raise ValueError(f"need >= 2 raters per item, got {n_raters}")
    n_cats = len(items[0])
    p_i = []
    cat_totals = [0.0] * n_cats
    for idx, counts in enumerate(items):
        if len(counts) != n_cats:
            raise ValueError(f"item {idx} has {len(counts)} categories, expected {n_cats}")
        if sum(counts) != n_raters:
            raise ValueError(f"item {idx} has {sum(counts)} ratings, expected {n_raters}")
        p_i.append((sum(c * c for c in counts) - n_raters) / (n_raters * (n_raters - 1)))
        for j, c in enumerate(counts):
            cat_totals[j] += c
    p_bar = sum(p_i) / len(items)
    p_j = [t / (len(items) * n_raters) for t in cat_totals]
    p_e = sum(p * p for p in p_j)
    if p_e >= 1.0:
        kappa = 1.0 if p_bar >= 1.0 else 0.0
    else:
        kappa = (p_bar - p_e) / (1.0 - p_e)
    return AgreementResult(kappa=kappa, observed_agreement=p_bar, expected_agreement=p_e,
                           n_items=len(items), n_raters=n_raters)


def cohen_kappa(a: Sequence, b: Sequence) -> AgreementResult:
    """Cohen's kappa between two raters; identical raters score 1 even when p_e = 1."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("no rated items")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    counts_a = Counter(a)
    counts_b = Counter(b)
    p_e = sum(counts_a[c] * counts_b.get(c, 0) for c in counts_a) / (n * n)
    if p_e >= 1.0:
        kappa = 1.0 if p_o >= 1.0 else 0.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return AgreementResult(kappa=kappa, observed_agreement=p_o, expected_agreement=p_e,
                           n_items=n, n_raters=2)


def token_count(text: str) -> int:
    """Tokens are maximal runs of non-whitespace characters."""
    return len(text.split())


def length_stats(texts: Iterable[str | None]) -> LengthStats:
    """Average token count over present texts; missing entries are counted, not scored."""
    counts = []
    missing = 0
    for text in texts:
        if text is None:
            missing += 1
        else:
            counts.append(token_count(text))
    avg = sum(counts) / len(counts) if counts else float("nan")
    return LengthStats(avg_tokens=avg, per_text=tuple(counts), n_missing=missing)


def judgments_to_fleiss_items(judgments: Sequence[JudgmentRecord]) -> dict[str, list[list[int]]]:
    """Per metric: per-item [count_of_0, count_of_1] over raters, item order sorted."""
    per_metric: dict[str, dict[str, list[int]]] = {}
    for rec in judgments:
        items = per_metric.setdefault(rec.metric, {})
        counts = items.setdefault(rec.item_id, [0, 0])
        counts[rec.value] += 1
    return {metric: [items[item_id] for item_id in sorted(items)]
            for metric, items in sorted(per_metric.items())}


def judgments_to_cohen_pairs(judgments: Sequence[JudgmentRecord]) -> dict[str, tuple[list[int], list[int]]]:
    """Per metric: the two raters' aligned label lists (exactly two raters required)."""
    per_metric: dict[str, dict[str, dict[str, int]]] = {}
    for rec in judgments:
        per_metric.setdefault(rec.metric, {}).setdefault(rec.item_id, {})[rec.rater_id] = rec.value
    out = {}
    for metric, items in sorted(per_metric.items()):
        raters = sorted({r for votes in items.values() for r in votes})
        if len(raters) != 2:
            raise ValueError(f"Cohen's kappa needs exactly 2 raters for metric '{metric}', got {len(raters)}")
        a, b = [], []
        for item_id in sorted(items):
            votes = items[item_id]
            if raters[0] in votes and raters[1] in votes:
                a.append(votes[raters[0]])
                b.append(votes[raters[1]])
        out[metric] = (a, b)
    return out
