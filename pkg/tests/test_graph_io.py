from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgstress.graph import EdgeKind, KnowledgeGraph, NodeKind, normalize_label
from kgstress.graph_io import GraphFormat, ParseError, export_graph, import_graph, read_graph, write_graph

FORMATS = list(GraphFormat)

label_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=12
).filter(lambda s: normalize_label(s) != "")


@st.composite
def graphs(draw):
    labels = draw(st.lists(label_text, min_size=0, max_size=8, unique_by=normalize_label))
    kinds = [draw(st.sampled_from(list(NodeKind))) for _ in labels]
    g = KnowledgeGraph(name="h")
    for lab, kind in zip(labels, kinds):
        g.add_node(lab, kind)
    nodes = sorted(g.node_set())
    if nodes:
        for _ in range(draw(st.integers(0, 12))):
            a = draw(st.sampled_from(nodes))
            b = draw(st.sampled_from(nodes))
            g.add_edge(a, b, draw(st.sampled_from(list(EdgeKind))))
    return g


@settings(max_examples=150, deadline=None)
@given(graphs(), st.sampled_from(FORMATS))
def test_round_trip(g, fmt):
    back = import_graph(export_graph(g, fmt), fmt)
    assert back.same_as(g)


@settings(max_examples=50, deadline=None)
@given(graphs(), st.sampled_from(FORMATS))
def test_export_is_deterministic(g, fmt):
    assert export_graph(g, fmt) == export_graph(g.copy(), fmt)


def test_graphml_is_readable_by_networkx(tmp_path):
    g = KnowledgeGraph.from_parts(
        [("1. existence", "Head"), ("being", "Term"), ("2. inexistence", "Head")],
        [("1. existence", "being", "HAS_NOUN"), ("1. existence", "2. inexistence", "CROSS_REF")],
    )
    path = tmp_path / "g.graphml"
    write_graph(g, path)
    nxg = nx.read_graphml(path)
    assert nxg.number_of_nodes() == 3
    assert nxg.number_of_edges() == 2
    assert read_graph(path).same_as(g)


def test_format_from_path():
    assert GraphFormat.from_path("x.gv") is GraphFormat.DOT
    assert GraphFormat.from_path("X.GRAPHML") is GraphFormat.GRAPHML
    with pytest.raises(ValueError):
        GraphFormat.from_path("graph.csv")


@pytest.mark.parametrize(
    "fmt, text",
    [
        ("jsonl", '{"type": "node", "label": "a", "kind": "Head"}\n{"type": "edge", "src": "a", "dst": "b", "kind": "GENERIC"}\n'),
        ("jsonl", "not json\n"),
        ("jsonl", '{"type": "node", "label": "a", "kind": "Vertex"}\n'),
        ("dot", 'digraph g {\n  "a" [kind="Head"];\n  this is not dot\n}\n'),
        ("graphml", "<graphml><unclosed>"),
    ],
)
def test_malformed_input_raises_parse_error(fmt, text):
    with pytest.raises(ParseError):
        import_graph(text, fmt)


def test_non_utf8_bytes_rejected():
    with pytest.raises(ParseError):
        import_graph(b"\xff\xfe\x00", "jsonl")
