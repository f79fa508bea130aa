"""Faithfulness score aggregation and alignment with human pairwise preferences.

Consistency and groundedness arrive as ingested binary judgments; sensitivity
is the log-probability drop after a counterfactual edit, binarized at a strict
zero.  Alignment compares per-model metric values against pairwise preference
rates: directional accuracy over model pairs plus correlation of metric deltas
with preference rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .permtest import CorrelationResult, correlate
from .records import JudgmentRecord, PredictionRecord, PreferenceRecord


@dataclass(frozen=True, slots=True)
class SensitivityResult:
    delta: float
    score: int


@dataclass(slots=True)
class TableCell:
    mean: float
    count: int


@dataclass(slots=True)
class FaithfulnessTable:
    cells: dict[tuple[str, str, str], TableCell]
    skipped_predictions: int

    def row_keys(self) -> list[tuple[str, str]]:
        return sorted({(m, s) for (m, s, _) in self.cells})


@dataclass(slots=True)
class PreferenceSummary:
    models: tuple[str, ...]
    win_rate: dict[str, float]
    judgment_counts: dict[str, int]
    pair_rates: dict[tuple[str, str], float]
    pair_counts: dict[tuple[str, str], int]


@dataclass(slots=True)
class PairPoint:
    pair_id: str
    model_a: str
    model_b: str
    delta_metric: float
    preference_rate: float


@dataclass(slots=True)
class AlignmentResult:
    pairwise_accuracy: float | None
    pairs_scored: int
    metric_ties: int
    preference_ties: int
    correlation: CorrelationResult | None
    correlation_note: str
    points: list[PairPoint]


def sensitivity(logp_orig: float, logp_edit: float) -> SensitivityResult:
    """Confidence drop after the edit; scores 1 only for a strictly positive drop."""
    for name, value in (("logp_orig", logp_orig), ("logp_edit", logp_edit)):
        if not math.isfinite(value) or value > 0.0:
            raise ValueError(f"{name} must be finite and <= 0, got {value}")
    delta = logp_orig - logp_edit
    return SensitivityResult(delta=delta, score=1 if delta > 0.0 else 0)


def faithfulness_table(judgments: Sequence[JudgmentRecord],
                       predictions: Sequence[PredictionRecord]) -> FaithfulnessTable:
    """Mean binary score per (model, setup, metric) cell.

    Judgments carry no setup and land under setup ''.  Sensitivity cells come
    from predictions with both log-probabilities; records missing either are
    skipped and counted.
    """
    sums: dict[tuple[str, str, str], list[float]] = {}

    def add(key: tuple[str, str, str], value: float) -> None:
        acc = sums.setdefault(key, [0.0, 0])
        acc[0] += value
        acc[1] += 1

    for rec in judgments:
        add((rec.model_id, "", rec.metric), float(rec.value))
    skipped = 0
    for rec in predictions:
        if rec.logp_orig is None or rec.logp_edit is None:
            skipped += 1
            continue
        add((rec.model_id, rec.setup_id, "sensitivity"),
            float(sensitivity(rec.logp_orig, rec.logp_edit).score))

    cells = {key: TableCell(mean=acc[0] / acc[1], count=acc[1])
             for key, acc in sorted(sums.items())}
    return FaithfulnessTable(cells=cells, skipped_predictions=skipped)


def preference_summary(prefs: Sequence[PreferenceRecord]) -> PreferenceSummary:
    """Win rates per model and preference rates per ordered pair."""
    if not prefs:
        raise ValueError("no preference records")
    wins: dict[str, int] = {}
    totals: dict[str, int] = {}
    pair_wins: dict[tuple[str, str], int] = {}
    pair_totals: dict[tuple[str, str], int] = {}
    for rec in prefs:
        winner = rec.model_a if rec.winner == "A" else rec.model_b
        for model in (rec.model_a, rec.model_b):
            totals[model] = totals.get(model, 0) + 1
        wins[winner] = wins.get(winner, 0) + 1
        key = tuple(sorted((rec.model_a, rec.model_b)))
        pair_totals[key] = pair_totals.get(key, 0) + 1
        if winner == key[0]:
            pair_wins[key] = pair_wins.get(key, 0) + 1

    models = tuple(sorted(totals))
    win_rate = {m: wins.get(m, 0) / totals[m] for m in models}
    pair_rates: dict[tuple[str, str], float] = {}
    pair_counts: dict[tuple[str, str], int] = {}
    for key in sorted(pair_totals):
        rate_first = pair_wins.get(key, 0) / pair_totals[key]
        pair_rates[key] = rate_first
        pair_rates[(key[1], key[0])] = 1.0 - rate_first
        pair_counts[key] = pair_totals[key]
        pair_counts[(key[1], key[0])] = pair_totals[key]
    return PreferenceSummary(models=models, win_rate=win_rate,
                             judgment_counts=dict(sorted(totals.items())),
                             pair_rates=pair_rates, pair_counts=pair_counts)


def majority_rates(summary: PreferenceSummary) -> dict[tuple[str, str], float]:
    """Pair rates collapsed to {0, 0.5, 1} majority outcomes."""
    out = {}
    for key, rate in summary.pair_rates.items():
        out[key] = 0.5 if rate == 0.5 else (1.0 if rate > 0.5 else 0.0)
    return out


def metric_preference_alignment(prefs: Sequence[PreferenceRecord],
                                scores: Mapping[str, float],
                                corr_permutations: int = 9999,
                                seed: int = 0,
                                rate_mode: str = "raw") -> AlignmentResult:
    """Directional pairwise accuracy and delta-vs-rate correlation for one metric.

    Pairs are oriented with the lexicographically first model as A (delta =
    score_A - score_B, rate = preference rate for A).  Metric ties and 50/50
    preference splits are excluded from the accuracy denominator and counted.
    """
    if rate_mode not in ("raw", "majority"):
        raise ValueError(f"rate_mode must be 'raw' or 'majority', got {rate_mode!r}")
    summary = preference_summary(prefs)
    missing = [m for m in summary.models if m not in scores]
    if missing:
        raise ValueError(f"no metric value for compared models: {missing}")
    rates = summary.pair_rates if rate_mode == "raw" else majority_rates(summary)

    unordered = sorted({key for key in summary.pair_rates if key[0] < key[1]})
    points: list[PairPoint] = []
    correct = 0
    scored = 0
    metric_ties = 0
    pref_ties = 0
    for a, b in unordered:
        delta = scores[a] - scores[b]
        rate = rates[(a, b)]
        points.append(PairPoint(pair_id=f"{a}|{b}", model_a=a, model_b=b,
                                delta_metric=delta, preference_rate=rate))
        if delta == 0.0:
            metric_ties += 1
            continue
        if rate == 0.5:
            pref_ties += 1
            continue
        scored += 1
        if (delta > 0.0) == (rate > 0.5):
            correct += 1

    accuracy = correct / scored if scored else None
    correlation = None
    note = ""
    deltas = [p.delta_metric for p in points]
    rate_vals = [p.preference_rate for p in points]
    try:
        correlation = correlate(deltas, rate_vals, permutations=corr_permutations, seed=seed)
    except ValueError as exc:
        note = str(exc)
    return AlignmentResult(pairwise_accuracy=accuracy, pairs_scored=scored,
                           metric_ties=metric_ties, preference_ties=pref_ties,
                           correlation=correlation, correlation_note=note, points=points)
