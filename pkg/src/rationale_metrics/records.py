"""Line-delimited record schemas and the validated load/emit/grouping layer.

Every analysis consumes one of the record types below.  Files are UTF-8 JSON
lines, one self-describing record per line.  The emitter writes a canonical
form (fixed field order, compact separators, shortest round-trip floats, absent
optionals omitted) so that ``emit(load(f))`` is byte-identical to a canonically
formatted ``f``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

VALID_METRICS = ("consistency", "groundedness")
VALID_WINNERS = ("A", "B")


class RecordError(ValueError):
    """Validation failure while loading or constructing records.

    Carries enough context (path, line number, field) to point at the
    offending input line.
    """

    def __init__(self, message: str, *, path: str | None = None,
                 line: int | None = None, field: str | None = None) -> None:
        self.path = path
        self.line = line
        self.field = field
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        if prefix:
            prefix += ": "
        if field is not None:
            message = f"field '{field}': {message}"
        super().__init__(prefix + message)


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    pair_id: str
    message_id: str
    annotator_id: str
    score: float


@dataclass(frozen=True, slots=True)
class AnnotatorProfile:
    annotator_id: str
    q1: float
    q3: float
    n_scores: int


@dataclass(frozen=True, slots=True)
class LabeledPair:
    pair_id: str
    message_id: str
    label: int
    votes_persuasive: int
    votes_unpersuasive: int


@dataclass(frozen=True, slots=True)
class RationaleRecord:
    input_id: str
    source_id: str
    generator_id: str
    label: int
    backend_id: str
    embedding: tuple[float, ...]
    text: str | None = None


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    input_id: str
    model_id: str
    setup_id: str
    pred: int
    gold: int
    logp_orig: float | None = None
    logp_edit: float | None = None


@dataclass(frozen=True, slots=True)
class JudgmentRecord:
    item_id: str
    model_id: str
    metric: str
    rater_id: str
    value: int


@dataclass(frozen=True, slots=True)
class PreferenceRecord:
    item_id: str
    model_a: str
    model_b: str
    rater_id: str
    winner: str


@dataclass(eq=False, slots=True)
class EmbeddingGroup:
    """All rationale embeddings for one (input_id, backend_id).

    ``matrix`` rows align with ``source_ids``; members are kept in a stable
    order (source_id, arrival index) so grouping does not depend on input
    line order beyond ties within a source.
    """

    input_id: str
    backend_id: str
    source_ids: tuple[str, ...]
    matrix: np.ndarray

    @property
    def m(self) -> int:
        return len(self.source_ids)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])


def _req(obj: Mapping, name: str, kind, *, path, line):
    if name not in obj:
        raise RecordError("missing required field", path=path, line=line, field=name)
    value = obj[name]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise RecordError(f"expected a number, got {value!r}", path=path, line=line, field=name)
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise RecordError(f"expected an integer, got {value!r}", path=path, line=line, field=name)
        return value
    if kind is str:
        if not isinstance(value, str) or not value:
            raise RecordError(f"expected a non-empty string, got {value!r}", path=path, line=line, field=name)
        return value
    raise AssertionError(kind)


def _opt_logp(obj: Mapping, name: str, *, path, line) -> float | None:
    if name not in obj or obj[name] is None:
        return None
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RecordError(f"expected a number, got {value!r}", path=path, line=line, field=name)
    value = float(value)
    if not math.isfinite(value) or value > 0.0:
        raise RecordError(f"log-probability must be finite and <= 0, got {value}", path=path, line=line, field=name)
    return value


def _binary(obj: Mapping, name: str, *, path, line) -> int:
    value = _req(obj, name, int, path=path, line=line)
    if value not in (0, 1):
        raise RecordError(f"expected 0 or 1, got {value}", path=path, line=line, field=name)
    return value


def _parse_annotation(obj, *, path, line) -> AnnotationRecord:
    score = _req(obj, "score", float, path=path, line=line)
    if not math.isfinite(score) or not 0.0 <= score <= 10.0:
        raise RecordError(f"score must be within [0, 10], got {score}", path=path, line=line, field="score")
    return AnnotationRecord(
        pair_id=_req(obj, "pair_id", str, path=path, line=line),
        message_id=_req(obj, "message_id", str, path=path, line=line),
        annotator_id=_req(obj, "annotator_id", str, path=path, line=line),
        score=score,
    )


def _parse_pair(obj, *, path, line) -> LabeledPair:
    votes_p = _req(obj, "votes_persuasive", int, path=path, line=line)
    votes_u = _req(obj, "votes_unpersuasive", int, path=path, line=line)
    if votes_p < 0 or votes_u < 0 or votes_p + votes_u < 1:
        raise RecordError("vote counts must be nonnegative with total >= 1", path=path, line=line, field="votes_persuasive")
    return LabeledPair(
        pair_id=_req(obj, "pair_id", str, path=path, line=line),
        message_id=_req(obj, "message_id", str, path=path, line=line),
        label=_binary(obj, "label", path=path, line=line),
        votes_persuasive=votes_p,
        votes_unpersuasive=votes_u,
    )


def _parse_rationale(obj, *, path, line) -> RationaleRecord:
    raw = obj.get("embedding")
    if not isinstance(raw, list) or len(raw) < 1:
        raise RecordError("expected a non-empty array of reals", path=path, line=line, field="embedding")
    emb = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(float(v)):
            raise RecordError(f"embedding entries must be finite reals, got {v!r}", path=path, line=line, field="embedding")
        emb.append(float(v))
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise RecordError(f"expected a string, got {text!r}", path=path, line=line, field="text")
    return RationaleRecord(
        input_id=_req(obj, "input_id", str, path=path, line=line),
        source_id=_req(obj, "source_id", str, path=path, line=line),
        generator_id=_req(obj, "generator_id", str, path=path, line=line),
        label=_binary(obj, "label", path=path, line=line),
        backend_id=_req(obj, "backend_id", str, path=path, line=line),
        embedding=tuple(emb),
        text=text,
    )


def _parse_prediction(obj, *, path, line) -> PredictionRecord:
    setup = obj.get("setup_id", "")
    if not isinstance(setup, str):
        raise RecordError(f"expected a string, got {setup!r}", path=path, line=line, field="setup_id")
    return PredictionRecord(
        input_id=_req(obj, "input_id", str, path=path, line=line),
        model_id=_req(obj, "model_id", str, path=path, line=line),
        setup_id=setup,
        pred=_binary(obj, "pred", path=path, line=line),
        gold=_binary(obj, "gold", path=path, line=line),
        logp_orig=_opt_logp(obj, "logp_orig", path=path, line=line),
        logp_edit=_opt_logp(obj, "logp_edit", path=path, line=line),
    )


def _parse_judgment(obj, *, path, line) -> JudgmentRecord:
    metric = _req(obj, "metric", str, path=path, line=line)
    if metric not in VALID_METRICS:
        raise RecordError(f"metric must be one of {VALID_METRICS}, got {metric!r}", path=path, line=line, field="metric")
    return JudgmentRecord(
        item_id=_req(obj, "item_id", str, path=path, line=line),
        model_id=_req(obj, "model_id", str, path=path, line=line),
        metric=metric,
        rater_id=_req(obj, "rater_id", str, path=path, line=line),
        value=_binary(obj, "value", path=path, line=line),
    )


def _parse_preference(obj, *, path, line) -> PreferenceRecord:
    winner = _req(obj, "winner", str, path=path, line=line)
    if winner not in VALID_WINNERS:
        raise RecordError(f"winner must be 'A' or 'B', got {winner!r}", path=path, line=line, field="winner")
    model_a = _req(obj, "model_a", str, path=path, line=line)
    model_b = _req(obj, "model_b", str, path=path, line=line)
    if model_a == model_b:
        raise RecordError("model_a and model_b must differ", path=path, line=line, field="model_b")
    return PreferenceRecord(
        item_id=_req(obj, "item_id", str, path=path, line=line),
        model_a=model_a,
        model_b=model_b,
        rater_id=_req(obj, "rater_id", str, path=path, line=line),
        winner=winner,
    )


# canonical field order per schema; optionals last, omitted when absent
SCHEMAS = {
    "annotations": (AnnotationRecord, _parse_annotation),
    "pairs": (LabeledPair, _parse_pair),
    "rationales": (RationaleRecord, _parse_rationale),
    "predictions": (PredictionRecord, _parse_prediction),
    "judgments": (JudgmentRecord, _parse_judgment),
    "preferences": (PreferenceRecord, _parse_preference),
}

_FIELD_ORDER = {
    "annotations": ("pair_id", "message_id", "annotator_id", "score"),
    "pairs": ("pair_id", "message_id", "label", "votes_persuasive", "votes_unpersuasive"),
    "rationales": ("input_id", "source_id", "generator_id", "label", "backend_id", "embedding", "text"),
    "predictions": ("input_id", "model_id", "setup_id", "pred", "gold", "logp_orig", "logp_edit"),
    "judgments": ("item_id", "model_id", "metric", "rater_id", "value"),
    "preferences": ("item_id", "model_a", "model_b", "rater_id", "winner"),
}

_TYPE_TO_SCHEMA = {cls: name for name, (cls, _) in SCHEMAS.items()}


def _file_level_checks(records: list, schema: str, path) -> None:
    if schema == "annotations":
        seen: dict[tuple[str, str], int] = {}
        for i, rec in enumerate(records, start=1):
            key = (rec.pair_id, rec.annotator_id)
            if key in seen:
                raise RecordError(
                    f"duplicate (pair_id, annotator_id) = {key}; first seen on line {seen[key]}",
                    path=path, line=i, field="pair_id",
                )
            seen[key] = i
    elif schema == "rationales":
        dims: dict[str, tuple[int, int]] = {}
        for i, rec in enumerate(records, start=1):
            d = len(rec.embedding)
            if rec.backend_id in dims:
                d0, first_line = dims[rec.backend_id]
                if d != d0:
                    raise RecordError(
                        f"embedding dimension {d} does not match dimension {d0} "
                        f"of backend '{rec.backend_id}' (line {first_line})",
                        path=path, line=i, field="embedding",
                    )
            else:
                dims[rec.backend_id] = (d, i)


def load_records(path: str | Path, schema: str):
    """Load and validate one record file; returns records in file order."""
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema '{schema}'; expected one of {sorted(SCHEMAS)}")
    path = Path(path)
    if not path.is_file():
        raise RecordError(f"input file not found: {path}")
    _, parse = SCHEMAS[schema]
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise RecordError(f"malformed JSON line: {exc.msg}", path=str(path), line=line_no) from exc
            if not isinstance(obj, dict):
                raise RecordError("expected a JSON object", path=str(path), line=line_no)
            records.append(parse(obj, path=str(path), line=line_no))
    _file_level_checks(records, schema, str(path))
    return records


def record_to_obj(record) -> dict:
    """Record as a dict in canonical field order, optionals omitted when absent."""
    schema = _TYPE_TO_SCHEMA[type(record)]
    out = {}
    for name in _FIELD_ORDER[schema]:
        value = getattr(record, name)
        if value is None:
            continue
        if name == "embedding":
            value = list(value)
        out[name] = value
    return out


def records_to_lines(records: Iterable) -> str:
    return "".join(json.dumps(record_to_obj(r), separators=(",", ":")) + "\n" for r in records)


def emit_records(records: Iterable, path: str | Path) -> Path:
    """Write records in canonical line-delimited form."""
    path = Path(path)
    path.write_text(records_to_lines(records), encoding="utf-8")
    return path


def group_embeddings(records: Sequence[RationaleRecord]) -> dict[tuple[str, str], EmbeddingGroup]:
    """Group rationales by (input_id, backend_id) with stable member order."""
    buckets: dict[tuple[str, str], list[tuple[str, int, tuple[float, ...]]]] = {}
    for idx, rec in enumerate(records):
        key = (rec.input_id, rec.backend_id)
        buckets.setdefault(key, []).append((rec.source_id, idx, rec.embedding))
    groups: dict[tuple[str, str], EmbeddingGroup] = {}
    for key in sorted(buckets):
        members = sorted(buckets[key], key=lambda t: (t[0], t[1]))
        matrix = np.array([m[2] for m in members], dtype=float)
        groups[key] = EmbeddingGroup(
            input_id=key[0],
            backend_id=key[1],
            source_ids=tuple(m[0] for m in members),
            matrix=matrix,
        )
    return groups
