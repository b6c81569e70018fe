from __future__ import annotations

import pytest

from kgstress.graph import (
    EdgeKind,
    EmptyLabel,
    KindConflict,
    KnowledgeGraph,
    MissingEndpoint,
    NodeKind,
    SchemaViolation,
    normalize_label,
)


@pytest.mark.parametrize(
    "raw, expected",
    [("  Brown  ", "brown"), ("Sober\tReality", "sober reality"), ("STRASSE", "strasse"), ("Straße", "strasse"),
     ("café", "café")],
)
def test_normalize_label(raw, expected):
    assert normalize_label(raw) == expected


def test_nodes_merge_on_normalized_label():
    g = KnowledgeGraph()
    assert g.add_node("Hazel ", NodeKind.TERM) == "hazel"
    g.add_node("HAZEL", "Term")
    assert g.num_nodes == 1
    assert "  hazel" in g


def test_kind_conflict_and_empty_label():
    g = KnowledgeGraph()
    g.add_node("x", NodeKind.HEAD)
    with pytest.raises(KindConflict):
        g.add_node("X", NodeKind.TERM)
    with pytest.raises(EmptyLabel):
        g.add_node("   ", NodeKind.TERM)


def test_edges_need_endpoints_and_dedupe_by_kind():
    g = KnowledgeGraph.from_parts([("a", "Head"), ("b", "Head")])
    with pytest.raises(MissingEndpoint):
        g.add_edge("a", "c", EdgeKind.GENERIC)
    g.add_edge("a", "b", EdgeKind.GENERIC)
    g.add_edge("A", "b", EdgeKind.GENERIC)
    g.add_edge("a", "b", EdgeKind.CROSS_REF)
    g.add_edge("b", "a", EdgeKind.GENERIC)
    assert g.num_edges == 3


def test_schema_rules():
    g = KnowledgeGraph(schema_checked=True)
    g.add_node("1. existence", NodeKind.HEAD)
    g.add_node("2. inexistence", NodeKind.HEAD)
    g.add_node("being", NodeKind.TERM)
    g.add_edge("1. existence", "being", EdgeKind.HAS_NOUN)
    g.add_edge("1. existence", "2. inexistence", EdgeKind.CROSS_REF)
    with pytest.raises(SchemaViolation):
        g.add_edge("being", "1. existence", EdgeKind.HAS_VERB)
    with pytest.raises(SchemaViolation):
        g.add_edge("1. existence", "being", EdgeKind.CROSS_REF)

    loose = KnowledgeGraph.from_parts([("h", "Head"), ("t", "Term")], [("t", "h", "HAS_NOUN")])
    with pytest.raises(SchemaViolation):
        loose.check_schema()


def test_copy_is_independent_and_same_as_ignores_name():
    g = KnowledgeGraph.from_parts([("a", "Head"), ("b", "Term")], [("a", "b", "HAS_ADJ")], name="one")
    h = g.copy()
    h.name = "two"
    assert g.same_as(h)
    h.add_node("c", NodeKind.TERM)
    assert not g.same_as(h)
    assert g.num_nodes == 2


def test_sorted_views():
    g = KnowledgeGraph.from_parts([("b", "Term"), ("a", "Head")], [("a", "b", "HAS_NOUN"), ("a", "b", "GENERIC")])
    assert [n for n, _ in g.nodes()] == ["a", "b"]
    assert [e[2] for e in g.edges()] == [EdgeKind.GENERIC, EdgeKind.HAS_NOUN]
    assert g.kind_of(" A ") is NodeKind.HEAD
