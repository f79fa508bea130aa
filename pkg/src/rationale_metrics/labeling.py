"""Annotator-aware label reconstruction and message-disjoint splitting.

Raw 0-10 scores are converted to per-annotator binary votes against that
annotator's own quartiles (scores inside [q1, q3] abstain), votes are
aggregated under a 75% supermajority rule, and the labeled pairs are split by
message so no message appears in both splits while the positive rates stay
balanced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .records import AnnotationRecord, AnnotatorProfile, LabeledPair
from .util import derived_rng

SUPERMAJORITY = 0.75
DEFAULT_MIN_VOTES = 2
DEFAULT_MAX_ATTEMPTS = 1000


@dataclass(slots=True)
class SplitResult:
    train: list[LabeledPair]
    test: list[LabeledPair]
    train_messages: frozenset[str]
    test_messages: frozenset[str]
    train_positive_rate: float
    test_positive_rate: float
    balance_gap: float
    balanced: bool
    attempts: int


@dataclass(slots=True)
class ReconstructionStats:
    n_scores: int
    n_pairs_seen: int
    n_labeled: int
    n_discarded_no_majority: int
    n_discarded_few_votes: int


def annotator_profiles(records: Sequence[AnnotationRecord],
                       quartile_method: str = "linear") -> list[AnnotatorProfile]:
    """Per-annotator first/third quartiles over all of that annotator's scores."""
    scores: dict[str, list[float]] = {}
    for rec in records:
        scores.setdefault(rec.annotator_id, []).append(rec.score)
    profiles = []
    for annotator_id in sorted(scores):
        vals = np.asarray(scores[annotator_id], dtype=float)
        if vals.size == 0:
            raise ValueError(f"annotator '{annotator_id}' has no scores")
        q1, q3 = np.quantile(vals, [0.25, 0.75], method=quartile_method)
        profiles.append(AnnotatorProfile(annotator_id=annotator_id, q1=float(q1),
                                         q3=float(q3), n_scores=int(vals.size)))
    return profiles


def binary_vote(score: float, profile: AnnotatorProfile) -> int | None:
    """1 above q3, 0 below q1, abstain inside [q1, q3] (strict inequalities)."""
    if score > profile.q3:
        return 1
    if score < profile.q1:
        return 0
    return None


def aggregate_label(votes: Sequence[int], min_votes: int = DEFAULT_MIN_VOTES) -> int | None:
    """75% supermajority over collected votes; None when discarded."""
    n = len(votes)
    if n < min_votes:
        return None
    positive = sum(votes)
    if positive / n >= SUPERMAJORITY:
        return 1
    if (n - positive) / n >= SUPERMAJORITY:
        return 0
    return None


def reconstruct_pairs(records: Sequence[AnnotationRecord],
                      quartile_method: str = "linear",
                      min_votes: int = DEFAULT_MIN_VOTES,
                      ) -> tuple[list[LabeledPair], list[AnnotatorProfile], ReconstructionStats]:
    """Full vote-and-aggregate pass; returns labeled pairs in first-seen order."""
    profiles = annotator_profiles(records, quartile_method)
    by_annotator = {p.annotator_id: p for p in profiles}

    pair_votes: dict[str, list[int]] = {}
    pair_message: dict[str, str] = {}
    for rec in records:
        pair_message.setdefault(rec.pair_id, rec.message_id)
        vote = binary_vote(rec.score, by_annotator[rec.annotator_id])
        if vote is not None:
            pair_votes.setdefault(rec.pair_id, []).append(vote)
        else:
            pair_votes.setdefault(rec.pair_id, [])

    pairs: list[LabeledPair] = []
    no_majority = 0
    few_votes = 0
    for pair_id, votes in pair_votes.items():
        label = aggregate_label(votes, min_votes=min_votes)
        if label is None:
            if len(votes) < min_votes:
                few_votes += 1
            else:
                no_majority += 1
            continue
        pairs.append(LabeledPair(
            pair_id=pair_id,
            message_id=pair_message[pair_id],
            label=label,
            votes_persuasive=sum(votes),
            votes_unpersuasive=len(votes) - sum(votes),
        ))
    stats = ReconstructionStats(
        n_scores=len(records),
        n_pairs_seen=len(pair_votes),
        n_labeled=len(pairs),
        n_discarded_no_majority=no_majority,
        n_discarded_few_votes=few_votes,
    )
    return pairs, profiles, stats


def _positive_rate(pairs: list[LabeledPair]) -> float:
    if not pairs:
        return math.nan
    return sum(p.label for p in pairs) / len(pairs)


def message_disjoint_split(pairs: Sequence[LabeledPair], test_fraction: float,
                           balance_tolerance: float = 0.05, seed: int = 0,
                           max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> SplitResult:
    """Randomized greedy assignment of whole messages, retried until balanced.

    Deterministic given the seed.  When no attempt reaches the tolerance (or a
    side ends up empty), the best assignment found is returned with
    ``balanced=False``.
    """
    if not pairs:
        raise ValueError("cannot split an empty pair list")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")

    by_message: dict[str, list[LabeledPair]] = {}
    for pair in pairs:
        by_message.setdefault(pair.message_id, []).append(pair)
    messages = sorted(by_message)
    target_test = test_fraction * len(pairs)

    best: SplitResult | None = None
    for attempt in range(1, max_attempts + 1):
        rng = derived_rng(seed, attempt)
        order = [messages[i] for i in rng.permutation(len(messages))]
        test_msgs: list[str] = []
        train_msgs: list[str] = []
        test_count = 0
        for msg in order:
            if test_count < target_test:
                test_msgs.append(msg)
                test_count += len(by_message[msg])
            else:
                train_msgs.append(msg)
        train = [p for m in sorted(train_msgs) for p in by_message[m]]
        test = [p for m in sorted(test_msgs) for p in by_message[m]]
        rate_train = _positive_rate(train)
        rate_test = _positive_rate(test)
        gap = abs(rate_train - rate_test) if train and test else math.inf
        result = SplitResult(
            train=train, test=test,
            train_messages=frozenset(train_msgs), test_messages=frozenset(test_msgs),
            train_positive_rate=rate_train, test_positive_rate=rate_test,
            balance_gap=gap, balanced=gap <= balance_tolerance, attempts=attempt,
        )
        if result.balanced:
            return result
        if best is None or gap < best.balance_gap:
            best = result
    assert best is not None
    return best
