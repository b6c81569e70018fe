from __future__ import annotations

import pytest

from kgstress.citations import (
    BibRecord,
    DoiStatus,
    audit,
    bib_field_eval,
    bib_pairs,
    citation_graph,
    citation_key,
    citation_recall,
    concentration,
    doi_histogram,
    read_bib_jsonl,
    validate_doi,
    write_bib_jsonl,
)
from kgstress.graph import EdgeKind, NodeKind
from kgstress.record_eval import RecordPair, SchemaMismatch

from conftest import FIXTURES


@pytest.mark.parametrize(
    "doi, status",
    [
        ("10.1000/xyz123", DoiStatus.VALID),
        ("10.1038/s41586-020-2649-2", DoiStatus.VALID),
        (" 10.12345/abc ", DoiStatus.VALID),
        ("10.123/abc", DoiStatus.BROKEN),
        ("doi:10.1000/xyz", DoiStatus.BROKEN),
        ("10.1000/", DoiStatus.BROKEN),
        ("10.1000/has space", DoiStatus.BROKEN),
        ("", DoiStatus.EMPTY),
        (None, DoiStatus.EMPTY),
    ],
)
def test_validate_doi(doi, status):
    assert validate_doi(doi) is status


def test_doi_histogram():
    assert doi_histogram(["10.1000/a", "bad", None, ""]) == {"Valid": 1, "Broken": 1, "Empty": 2}


def test_citation_key_forms():
    assert citation_key("Smith, John", "Graph  Theory", 1999) == "smith|graph theory|1999"
    assert citation_key("John Smith", "Graph Theory", "1999") == citation_key("Smith, J.", "graph theory", 1999)
    assert citation_key("", "Untitled", None) == "|untitled|"


def test_record_validation_and_round_trip(tmp_path):
    with pytest.raises(ValueError):
        BibRecord("p", year=1200)
    with pytest.raises(ValueError):
        BibRecord("p", times_cited=-1)
    recs = [BibRecord("p1", ["Doe, Jane"], "T", 2001, "10.1000/x", "article", "2001-02", ["c"], ["r"], 4, ["k|t|2000"])]
    write_bib_jsonl(recs, tmp_path / "b.jsonl")
    assert read_bib_jsonl(tmp_path / "b.jsonl") == recs


def test_citation_recall_pooled():
    truth = {"p1": ["smith|graph theory|1999", "doe|networks|2001"], "p2": ["roe|x|2000"], "p3": []}
    gen = {"p1": ["smith|graph theory|1999", "zed|fake|2020"], "p2": [], "p4": ["roe|x|2000"]}
    r = citation_recall(truth, gen)
    assert (r.matched, r.truth_total, r.generated_total) == (1, 3, 2)
    assert r.recall == pytest.approx(1 / 3) and r.omission == pytest.approx(2 / 3)
    assert (r.papers_with_citations, r.papers) == (1, 3)
    assert citation_recall({"p": []}, {}).recall == 1.0


def test_fuzzy_citation_match():
    r = citation_recall({"p": ["smith|graph theory|1999"]}, {"p": ["smith|graph theory.|1999"]})
    assert r.matched == 1


def test_bib_pairs_and_field_eval():
    truth = [BibRecord("p1", pub_type="article", doi="10.1/x", times_cited=3), BibRecord("p2", pub_type="book")]
    gen = [BibRecord("p1", pub_type="Article", doi="10.1/y", times_cited=3)]
    pairs = bib_pairs(truth, gen)
    assert pairs[1].field_values["type"] == (["book"], [])
    by = {f.field: f for f in bib_field_eval(pairs)}
    assert by["type"].f1 == 0.5 and by["doi"].f1 == 0.0 and by["times_cited"].tp == 1
    with pytest.raises(SchemaMismatch):
        bib_field_eval([RecordPair("p", {"abstract": ([], [])})])


def test_citation_graph_merges_cited_papers():
    a = BibRecord("a", ["Smith, J"], "Graph Theory", 1999, citations=["doe|networks|2001"])
    b = BibRecord("b", ["Doe, K"], "Networks", 2001, citations=["smith|graph theory|1999", "roe|x|2000", ""])
    g = citation_graph([a, b])
    assert g.kind_of("doe|networks|2001") is NodeKind.HEAD
    assert g.kind_of("roe|x|2000") is NodeKind.TERM
    assert g.num_nodes == 3 and g.num_edges == 3
    assert all(k is EdgeKind.CITES for _, _, k in g.edge_set())


def test_concentration():
    c = concentration(["a", "a", "b", "", "c"], k=1)
    assert c == {"distinct": 3, "total": 4, "top": [["a", 2]], "top_k_share": 0.5}


def test_fixture_audit():
    truth = read_bib_jsonl(FIXTURES / "bibliographic" / "truth.jsonl")
    gen = read_bib_jsonl(FIXTURES / "bibliographic" / "generated.jsonl")
    result = audit(truth, gen)
    rec = result["citation_recall"]
    assert (rec["truth_total"], rec["generated_total"], rec["matched"]) == (654, 53, 53)
    assert result["doi_status"]["truth"]["Valid"] == 50
    f1 = {f["field"]: f["f1"] for f in result["fields"]}
    assert f1["type"] == pytest.approx(0.70) and f1["doi"] == pytest.approx(0.02)
