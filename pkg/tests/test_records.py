from __future__ import annotations

import numpy as np
import pytest

from rationale_metrics.records import (
    RationaleRecord,
    RecordError,
    emit_records,
    group_embeddings,
    load_records,
    records_to_lines,
)


def _write(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_annotations_in_order(tmp_path):
    path = _write(tmp_path, "ann.jsonl", [
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a1","score":3.5}',
        '{"pair_id":"p2","message_id":"m1","annotator_id":"a1","score":9}',
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a2","score":0}',
    ])
    records = load_records(path, "annotations")
    assert [r.pair_id for r in records] == ["p1", "p2", "p1"]
    assert records[1].score == 9.0


def test_score_out_of_range_names_line_and_field(tmp_path):
    path = _write(tmp_path, "ann.jsonl", [
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a1","score":3.5}',
        '{"pair_id":"p2","message_id":"m1","annotator_id":"a1","score":11}',
    ])
    with pytest.raises(RecordError) as err:
        load_records(path, "annotations")
    assert err.value.line == 2
    assert err.value.field == "score"


def test_malformed_line_reports_line_number(tmp_path):
    path = _write(tmp_path, "ann.jsonl", [
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a1","score":3.5}',
        "{not json",
    ])
    with pytest.raises(RecordError) as err:
        load_records(path, "annotations")
    assert err.value.line == 2


def test_duplicate_pair_annotator_rejected(tmp_path):
    path = _write(tmp_path, "ann.jsonl", [
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a1","score":1}',
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a1","score":2}',
    ])
    with pytest.raises(RecordError, match="duplicate"):
        load_records(path, "annotations")


def test_embedding_dim_mismatch_within_backend(tmp_path):
    path = _write(tmp_path, "rat.jsonl", [
        '{"input_id":"x","source_id":"s1","generator_id":"g","label":1,"backend_id":"b","embedding":[1,2,3,4]}',
        '{"input_id":"x","source_id":"s2","generator_id":"g","label":1,"backend_id":"b","embedding":[1,2,3,4,5]}',
    ])
    with pytest.raises(RecordError, match="dimension"):
        load_records(path, "rationales")


def test_dim_mismatch_across_backends_allowed(tmp_path):
    path = _write(tmp_path, "rat.jsonl", [
        '{"input_id":"x","source_id":"s1","generator_id":"g","label":1,"backend_id":"b1","embedding":[1,2,3,4]}',
        '{"input_id":"x","source_id":"s2","generator_id":"g","label":1,"backend_id":"b2","embedding":[1,2,3,4,5]}',
    ])
    assert len(load_records(path, "rationales")) == 2


def test_missing_file_error_names_path(tmp_path):
    with pytest.raises(RecordError, match="nowhere.jsonl"):
        load_records(tmp_path / "nowhere.jsonl", "annotations")


def test_logp_validation(tmp_path):
    path = _write(tmp_path, "pred.jsonl", [
        '{"input_id":"i","model_id":"m","setup_id":"s","pred":1,"gold":0,"logp_orig":0.5}',
    ])
    with pytest.raises(RecordError, match="logp_orig"):
        load_records(path, "predictions")


def test_preference_same_models_rejected(tmp_path):
    path = _write(tmp_path, "pref.jsonl", [
        '{"item_id":"i","model_a":"m","model_b":"m","rater_id":"r","winner":"A"}',
    ])
    with pytest.raises(RecordError, match="differ"):
        load_records(path, "preferences")


def test_round_trip_is_byte_identical(tmp_path):
    records = [
        RationaleRecord(input_id="x1", source_id="s1", generator_id="g", label=1,
                        backend_id="b", embedding=(0.1, -2.5, 1e-7), text="why it works"),
        RationaleRecord(input_id="x1", source_id="s2", generator_id="g", label=0,
                        backend_id="b", embedding=(1.0, 2.0, 3.0)),
    ]
    path = emit_records(records, tmp_path / "rat.jsonl")
    first = path.read_bytes()
    reloaded = load_records(path, "rationales")
    assert reloaded == records
    again = emit_records(reloaded, tmp_path / "rat2.jsonl").read_bytes()
    assert again == first


def test_round_trip_canonicalizes_field_order_and_floats(tmp_path):
    # scrambled field order and integer-typed score normalize to canonical form
    path = _write(tmp_path, "ann.jsonl", [
        '{"score":7,"annotator_id":"a1","pair_id":"p1","message_id":"m1"}',
    ])
    records = load_records(path, "annotations")
    assert records_to_lines(records) == (
        '{"pair_id":"p1","message_id":"m1","annotator_id":"a1","score":7.0}\n')


def _rationale(input_id, source, backend, vec, idx=0):
    return RationaleRecord(input_id=input_id, source_id=source, generator_id="g",
                           label=1, backend_id=backend, embedding=tuple(float(v) for v in vec))


def test_grouping_basic():
    records = [_rationale("x", f"s{i}", "b", [i, 0.0]) for i in range(7)]
    groups = group_embeddings(records)
    assert set(groups) == {("x", "b")}
    assert groups[("x", "b")].m == 7

    two_backends = records + [_rationale("x", "s0", "b2", [1.0, 1.0])]
    assert len(group_embeddings(two_backends)) == 2

    assert group_embeddings([]) == {}


def test_grouping_permutation_invariant():
    rng = np.random.default_rng(3)
    records = []
    for x in range(4):
        for s in range(5):
            records.append(_rationale(f"x{x}", f"s{s}", "b", rng.normal(size=3)))
    base = group_embeddings(records)
    shuffled = [records[i] for i in rng.permutation(len(records))]
    other = group_embeddings(shuffled)
    assert set(base) == set(other)
    for key in base:
        # identical member multisets; order may differ only within a source
        a = sorted(zip(base[key].source_ids, map(tuple, base[key].matrix)))
        b = sorted(zip(other[key].source_ids, map(tuple, other[key].matrix)))
        assert a == b


def test_group_member_order_stable_sort():
    records = [
        _rationale("x", "s2", "b", [2.0, 0.0]),
        _rationale("x", "s1", "b", [1.0, 0.0]),
        _rationale("x", "s1", "b", [1.5, 0.0]),
    ]
    group = group_embeddings(records)[("x", "b")]
    assert group.source_ids == ("s1", "s1", "s2")
    assert group.matrix[:, 0].tolist() == [1.0, 1.5, 2.0]
