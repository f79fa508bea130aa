"""Deterministic synthetic dataset for demos and end-to-end pipeline tests.

Everything is derived from a single seed through fixed-tag RNG streams, so the
emitted record files are byte-stable across runs and platforms.
"""

from __future__ import annotations

import json
from pathlib import Path

from .records import (
    AnnotationRecord,
    JudgmentRecord,
    PredictionRecord,
    PreferenceRecord,
    RationaleRecord,
    emit_records,
)
from .util import derived_rng

SOURCES = ("short", "long", "description", "visual_element",
           "visual_elements", "balanced", "counter_elements")
GENERATORS = ("gen-a", "gen-b")
BACKENDS = {"emb-a": 6, "emb-b": 5}
MODELS = ("stu-a-base", "stu-a-sft", "stu-a-grpo",
          "stu-b-base", "stu-b-sft", "stu-b-grpo")
MODEL_QUALITY = {m: 0.45 + 0.09 * i for i, m in enumerate(MODELS)}

_TAG_ANNOT, _TAG_RAT, _TAG_PRED, _TAG_JUDGE, _TAG_PREF = range(5)


def make_annotations(seed: int, n_messages: int = 16, pairs_per_message: int = 3,
                     n_annotators: int = 5) -> list[AnnotationRecord]:
    rng = derived_rng(seed, _TAG_ANNOT)
    offsets = rng.uniform(-2.0, 2.0, size=n_annotators)
    records = []
    for msg in range(n_messages):
        for idx in range(pairs_per_message):
            pair_id = f"pair-{msg:02d}-{idx}"
            quality = rng.uniform(0.0, 1.0)
            for a in range(n_annotators):
                raw = 10.0 * quality + offsets[a] + rng.normal(scale=1.0)
                score = min(10.0, max(0.0, raw))
                records.append(AnnotationRecord(
                    pair_id=pair_id, message_id=f"msg-{msg:02d}",
                    annotator_id=f"ann-{a}", score=round(score, 3)))
    return records


def make_rationales(seed: int, n_inputs: int = 20) -> list[RationaleRecord]:
    rng = derived_rng(seed, _TAG_RAT)
    records = []
    for backend, dim in BACKENDS.items():
        centers = {s: rng.normal(size=dim) for s in SOURCES}
        for gen in GENERATORS:
            for i in range(n_inputs):
                input_id = f"{gen}-x{i:02d}"
                base = rng.normal(size=dim)
                label = int(rng.random() < 0.5)
                for source in SOURCES:
                    emb = base + 0.6 * centers[source] + 0.15 * rng.normal(size=dim)
                    n_words = int(rng.integers(8, 30))
                    text = " ".join(f"w{rng.integers(0, 50)}" for _ in range(n_words))
                    records.append(RationaleRecord(
                        input_id=input_id, source_id=source, generator_id=gen,
                        label=label, backend_id=backend,
                        embedding=tuple(round(float(v), 6) for v in emb),
                        text=text))
    return records


def make_predictions(seed: int, items_per_model: int = 40) -> list[PredictionRecord]:
    rng = derived_rng(seed, _TAG_PRED)
    records = []
    for model in MODELS:
        quality = MODEL_QUALITY[model]
        for i in range(items_per_model):
            gold = int(rng.random() < 0.5)
            pred = gold if rng.random() < quality + 0.25 else 1 - gold
            logp_orig = round(float(-rng.uniform(0.05, 2.0)), 6)
            if rng.random() < 0.1:
                logp_edit = None  # edit pipeline failed for this item
            else:
                drop = rng.normal(loc=quality - 0.35, scale=0.5)
                logp_edit = round(min(0.0, logp_orig - drop), 6)
            records.append(PredictionRecord(
                input_id=f"item-{i:03d}", model_id=model, setup_id="",
                pred=pred, gold=gold, logp_orig=logp_orig, logp_edit=logp_edit))
    return records


def make_judgments(seed: int, items_per_model: int = 30, n_raters: int = 3) -> list[JudgmentRecord]:
    rng = derived_rng(seed, _TAG_JUDGE)
    records = []
    for model in MODELS:
        quality = MODEL_QUALITY[model]
        for metric, shift in (("consistency", 0.35), ("groundedness", 0.1)):
            for i in range(items_per_model):
                item_id = f"{model}-j{i:03d}"
                lean = min(0.98, quality + shift)
                for r in range(n_raters):
                    value = int(rng.random() < lean)
                    records.append(JudgmentRecord(
                        item_id=item_id, model_id=model, metric=metric,
                        rater_id=f"r{r}", value=value))
    return records


def make_preferences(seed: int, judgments_per_pair: int = 10) -> list[PreferenceRecord]:
    rng = derived_rng(seed, _TAG_PREF)
    records = []
    pairs = [(a, b) for i, a in enumerate(MODELS) for b in MODELS[i + 1:]]
    for a, b in pairs:
        p_a = 0.5 + (MODEL_QUALITY[a] - MODEL_QUALITY[b])
        for j in range(judgments_per_pair):
            winner = "A" if rng.random() < p_a else "B"
            records.append(PreferenceRecord(
                item_id=f"{a}|{b}|{j:02d}", model_a=a, model_b=b,
                rater_id=f"r{j % 3}", winner=winner))
    return records


def write_demo_dataset(out_dir: str | Path, seed: int = 7) -> dict[str, Path]:
    """Write the five record files plus a family map and a config file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "annotations": emit_records(make_annotations(seed), out / "annotations.jsonl"),
        "rationales": emit_records(make_rationales(seed), out / "rationales.jsonl"),
        "predictions": emit_records(make_predictions(seed), out / "predictions.jsonl"),
        "judgments": emit_records(make_judgments(seed), out / "judgments.jsonl"),
        "preferences": emit_records(make_preferences(seed), out / "preferences.jsonl"),
    }
    family_map = {m: m.split("-")[1] for m in MODELS}
    family_path = out / "family_map.json"
    family_path.write_text(json.dumps(family_map, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["family_map"] = family_path
    config = {
        "seed": seed, "alpha": 1.0, "tau": 0.95, "permutations": 199,
        "draws": 5, "budgets": [1, 2, 3, 4, 5], "quartile_method": "linear",
        "min_votes": 2, "corr_permutations": 999,
    }
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["config"] = config_path
    return paths
