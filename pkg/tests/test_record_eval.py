from __future__ import annotations

import pytest

from kgstress.record_eval import (
    BenchmarkSchema,
    CachedOracle,
    FieldSpec,
    OracleUnavailable,
    RecordPair,
    SchemaMismatch,
    as_list,
    bundled_schema,
    evaluate_records,
    format_field_table,
    label_hallucinations,
    prf,
    read_pairs_jsonl,
    write_pairs_jsonl,
)

SCHEMA = BenchmarkSchema("t", (FieldSpec("items"), FieldSpec("born", "date"), FieldSpec("n", "count"),
                               FieldSpec("code", "scalar", "exact", oracle=False)))


class DictOracle:
    def __init__(self, known):
        self.known = known
        self.calls = 0

    def lookup(self, values):
        self.calls += 1
        return {v: v in self.known for v in values}


def test_prf_zero_conventions():
    assert prf(0, 0, 0) == (0.0, 0.0, 0.0)
    assert prf(0, 3, 0) == (0.0, 0.0, 0.0)
    assert prf(2, 2, 0) == pytest.approx((0.5, 1.0, 2 / 3))


def test_as_list():
    assert as_list(None) == []
    assert as_list(3.0) == ["3"]
    assert as_list(["a", None, "", 2]) == ["a", "2"]
    assert as_list(True) == ["true"]


def test_macro_average_over_records():
    pairs = [
        RecordPair("r1", {"items": (["a", "b"], ["a", "b"])}),
        RecordPair("r2", {"items": (["c"], ["x", "y"])}),
    ]
    res = evaluate_records(pairs, SCHEMA).by_field()["items"]
    # record 1 is perfect, record 2 scores 0/0/0; micro-averaging would give 0.5 precision
    assert (res.precision, res.recall, res.f1, res.accuracy) == (0.5, 0.5, 0.5, 0.5)
    assert (res.tp, res.fp, res.fn) == (2, 2, 1)
    assert res.hallucinated == 2


def test_accuracy_is_set_equality():
    pairs = [RecordPair("r", {"items": (["A", "b"], ["b", "a", "a"])})]
    assert evaluate_records(pairs, SCHEMA).by_field()["items"].accuracy == 1.0
    pairs = [RecordPair("r", {"items": (["apples"], ["apple"])})]
    res = evaluate_records(pairs, SCHEMA).by_field()["items"]
    assert res.f1 == 1.0 and res.accuracy == 0.0


def test_typed_scorers():
    pairs = [RecordPair("r", {"born": (["1724-04-22"], ["1724"]), "n": (["12"], ["12.0"]), "code": (["AB1"], ["ab1 "])})]
    by = evaluate_records(pairs, SCHEMA).by_field()
    assert by["born"].tp == 1 and by["n"].tp == 1 and by["code"].tp == 1
    pairs = [RecordPair("r", {"n": (["12"], ["13"]), "code": (["ab1"], ["ab2"])})]
    by = evaluate_records(pairs, SCHEMA).by_field()
    assert by["n"].tp == 0 and by["code"].tp == 0


def test_oracle_splits_false_positives():
    oracle = DictOracle({"y"})
    pairs = [RecordPair("r", {"items": (["a"], ["a", "x", "y"]), "code": (["c"], ["d"])})]
    run = evaluate_records(pairs, SCHEMA, oracle=oracle)
    by = run.by_field()
    assert (by["items"].hallucinated, by["items"].extra_knowledge) == (1, 1)
    assert by["items"].hallucination_rate == pytest.approx(1 / 3)
    assert by["code"].hallucinated == 1  # oracle disabled for this field
    labels = {(v.field, v.generated): v.label for v in run.values}
    assert labels[("items", "y")] == "extra_knowledge" and labels[("items", "a")] == "matched"


def test_cached_oracle_fails_closed(tmp_path):
    path = tmp_path / "oracle.jsonl"
    path.write_text('{"value": "Paris", "known": true}\n', encoding="utf-8")
    oracle = CachedOracle(path, cache_only=True)
    assert oracle.lookup(["paris "]) == {"paris ": True}
    with pytest.raises(OracleUnavailable):
        oracle.lookup(["paris", "atlantis"])
    labels = label_hallucinations(["paris", "atlantis"], oracle)
    assert labels.unverified == ["paris", "atlantis"] and not labels.hallucinated
    pairs = [RecordPair("r", {"items": (["a"], ["atlantis"])})]
    res = evaluate_records(pairs, SCHEMA, oracle=oracle).by_field()["items"]
    assert res.unverified == 1 and res.hallucination_rate == 0.0


def test_cached_oracle_writes_through(tmp_path):
    path = tmp_path / "oracle.jsonl"
    backend = DictOracle({"rome"})
    oracle = CachedOracle(path, backend)
    assert oracle.lookup(["Rome", "Atlantis"]) == {"Rome": True, "Atlantis": False}
    oracle.lookup(["rome"])
    assert backend.calls == 1
    assert len(CachedOracle(path, cache_only=True)) == 2


def test_schema_errors():
    with pytest.raises(SchemaMismatch):
        evaluate_records([RecordPair("r", {"bogus": ([], [])})], SCHEMA)
    with pytest.raises(SchemaMismatch):
        FieldSpec("x", "tensor")
    with pytest.raises(SchemaMismatch):
        BenchmarkSchema.from_dict({"fields": [{"nom": "x"}]})
    with pytest.raises(SchemaMismatch):
        SCHEMA.field("missing")


@pytest.mark.parametrize("name", ["roget", "philosophers", "bibliographic"])
def test_bundled_schemas_round_trip(name):
    s = bundled_schema(name)
    assert BenchmarkSchema.from_dict(s.to_dict()) == s


def test_oracle_defaults_by_type():
    phil = bundled_schema("philosophers")
    assert phil.field("country_of_citizenship").uses_oracle
    assert not phil.field("birth").uses_oracle


def test_pairs_jsonl_round_trip(tmp_path):
    pairs = [RecordPair("r1", {"items": (["a"], ["b", "c"])})]
    write_pairs_jsonl(pairs, tmp_path / "p.jsonl")
    assert read_pairs_jsonl(tmp_path / "p.jsonl") == pairs


def test_table_formatting():
    res = evaluate_records([RecordPair("r", {"items": (["a"], ["a"])})], SCHEMA).fields
    table = format_field_table(res)
    assert "items" in table and "1.000" in table
