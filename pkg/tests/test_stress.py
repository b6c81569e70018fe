from __future__ import annotations

import json
from importlib.resources import files

import jsonschema
import pytest

from kgstress.graph import KnowledgeGraph, NodeKind
from kgstress.graph_io import read_graph
from kgstress.stress import (
    EmptyGeneratedGraph,
    StressConfig,
    StressReport,
    fabrication_rate,
    percentile_ranks,
    run_stress_test,
    structural_alignment,
    upward_mobility,
)

from conftest import FIXTURES
from graph_fixtures import from_edges

SCHEMA = json.loads((files("kgstress") / "data" / "schemas" / "stress_report.schema.json").read_text())


def _pair():
    ref = from_edges("ref", [("a", "b"), ("a", "c"), ("a", "d")])
    llm = from_edges("llm", [("b", "a"), ("b", "c"), ("b", "d"), ("b", "e")])
    return llm, ref


def test_fabrication_rate():
    llm, ref = _pair()
    rate, fabricated = fabrication_rate(llm, ref)
    assert rate == pytest.approx(1 / 5)
    assert fabricated == {"e"}
    with pytest.raises(EmptyGeneratedGraph):
        fabrication_rate(KnowledgeGraph(), ref)


def test_percentile_ranks_average_ties():
    assert percentile_ranks({"a": 1.0, "b": 2.0, "c": 3.0}) == pytest.approx({"a": 1 / 3, "b": 2 / 3, "c": 1.0})
    assert percentile_ranks({"a": 1.0, "b": 1.0}) == {"a": 0.75, "b": 0.75}
    assert percentile_ranks({}) == {}


def test_upward_mobility_by_degree():
    llm, ref = _pair()
    # degree percentiles: ref a=1, b=c=d=0.5; llm b=1, a=c=d=e=0.5
    up = upward_mobility(llm, ref, measure="degree", threshold=0.25, top_fraction=0.1)
    assert [(u.node, u.rank_ref, u.rank_llm, u.delta, u.is_fabrication) for u in up] == [("b", 0.5, 1.0, 0.5, False)]
    up = upward_mobility(llm, ref, measure="degree", threshold=0.25, top_fraction=0.6)
    assert [u.node for u in up] == ["b", "e"]
    assert up[1].rank_ref is None and up[1].is_fabrication and up[1].delta == 0.5
    with pytest.raises(ValueError):
        upward_mobility(llm, ref, threshold=0.0)


def test_structural_alignment_reports_insufficient_overlap():
    a = from_edges("a", [("x", "y")])
    b = from_edges("b", [("x", "z")])
    res = structural_alignment(a, b, ["degree"])
    assert res["degree"].rho is None and res["degree"].error == "InsufficientOverlap"


def test_report_round_trip_and_schema():
    g_ref = read_graph(FIXTURES / "roget" / "truth.graphml")
    g_llm = read_graph(FIXTURES / "roget" / "llm.graphml")
    report = run_stress_test(g_llm, g_ref)
    d = report.to_dict()
    jsonschema.validate(d, SCHEMA)
    again = StressReport.from_json(report.to_json())
    assert again.to_dict() == d
    assert report.num_llm_nodes == 1066
    assert "fabrication" in report.summary().lower()


def test_roget_fixture_values():
    report = run_stress_test(read_graph(FIXTURES / "roget" / "llm.graphml"), read_graph(FIXTURES / "roget" / "truth.graphml"))
    assert len(report.fabricated_nodes) == 1005
    assert report.node_jaccard == pytest.approx(61 / (2708 + 1066 - 61))
    assert report.upward_mobile[0].node == "brown"
    assert report.upward_mobile[0].is_fabrication


def test_stress_is_deterministic():
    llm, ref = _pair()
    assert run_stress_test(llm, ref).to_dict() == run_stress_test(llm.copy(), ref.copy()).to_dict()


def test_empty_reference_graph():
    llm, _ = _pair()
    r = run_stress_test(llm, KnowledgeGraph())
    assert r.fabrication_rate == 1.0 and r.node_jaccard == 0.0
    assert r.community_counts[0] == 0


def test_config_validation():
    with pytest.raises(ValueError):
        StressConfig(mobility_threshold=1.5)
    with pytest.raises(ValueError):
        StressConfig(measures=("closeness",))
    cfg = StressConfig(measures=("eigenvector",))
    r = run_stress_test(*_pair(), cfg)
    assert list(r.rank_correlations) == ["eigenvector"]


def test_report_rejects_unknown_schema_version():
    llm, ref = _pair()
    d = run_stress_test(llm, ref).to_dict()
    d["schema"] = "kgstress.stress_report/0"
    with pytest.raises(ValueError):
        StressReport.from_dict(d)


def test_roget_fixture_structure():
    from kgstress.metrics import pagerank

    g_ref = read_graph(FIXTURES / "roget" / "truth.graphml")
    g_llm = read_graph(FIXTURES / "roget" / "llm.graphml")
    report = run_stress_test(g_llm, g_ref)
    ref_count, llm_count = report.community_counts
    assert abs(ref_count - 29) <= 2 and abs(llm_count - 28) <= 2
    scores = pagerank(g_llm).scores
    top5 = set(sorted(scores, key=lambda k: -scores[k])[:5])
    assert top5 == {"brown", "tawny", "hazel", "chestnut", "mahogany"}


def test_last_to_first_of_ten_moves_by_nine_tenths():
    ref = {f"n{i}": float(i) for i in range(10)}
    llm = dict(ref)
    llm["n0"], llm["n9"] = 9.0, 0.0
    p_ref, p_llm = percentile_ranks(ref), percentile_ranks(llm)
    assert p_llm["n0"] - p_ref["n0"] == pytest.approx(0.9)
