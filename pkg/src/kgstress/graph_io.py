"""GraphML, DOT and JSONL serialization for :class:`KnowledgeGraph`.

All three formats carry the node kind as ``kind`` and the edge kind as
``rel``. Output is sorted so identical graphs export to identical bytes.
"""
from __future__ import annotations

import enum
import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path

from .graph import EdgeKind, KGError, KnowledgeGraph, NodeKind


class GraphFormat(str, enum.Enum):
    GRAPHML = "graphml"
    DOT = "dot"
    JSONL = "jsonl"

    @classmethod
    def from_path(cls, path: str | Path) -> GraphFormat:
        suffix = Path(path).suffix.lower().lstrip(".")
        aliases = {"graphml": cls.GRAPHML, "xml": cls.GRAPHML, "dot": cls.DOT, "gv": cls.DOT, "jsonl": cls.JSONL}
        if suffix not in aliases:
            raise ValueError(f"cannot infer graph format from {path!r}")
        return aliases[suffix]


class ParseError(KGError):
    def __init__(self, message: str, line: int | None = None, position: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {position}" if position is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.position = position


_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def export_graph(graph: KnowledgeGraph, fmt: GraphFormat | str) -> bytes:
    fmt = GraphFormat(fmt)
    if fmt is GraphFormat.GRAPHML:
        return _to_graphml(graph)
    if fmt is GraphFormat.DOT:
        return _to_dot(graph)
    return _to_jsonl(graph)


def import_graph(data: bytes | str, fmt: GraphFormat | str, name: str = "") -> KnowledgeGraph:
    fmt = GraphFormat(fmt)
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from None
    else:
        text = data
    try:
        if fmt is GraphFormat.GRAPHML:
            return _from_graphml(text, name)
        if fmt is GraphFormat.DOT:
            return _from_dot(text, name)
        return _from_jsonl(text, name)
    except ParseError:
        raise
    except KGError as exc:
        raise ParseError(str(exc)) from None


def write_graph(graph: KnowledgeGraph, path: str | Path, fmt: GraphFormat | str | None = None) -> None:
    fmt = GraphFormat(fmt) if fmt else GraphFormat.from_path(path)
    Path(path).write_bytes(export_graph(graph, fmt))


def read_graph(path: str | Path, fmt: GraphFormat | str | None = None) -> KnowledgeGraph:
    fmt = GraphFormat(fmt) if fmt else GraphFormat.from_path(path)
    return import_graph(Path(path).read_bytes(), fmt, name=Path(path).stem)


# -- GraphML -----------------------------------------------------------------

def _to_graphml(graph: KnowledgeGraph) -> bytes:
    root = ET.Element("graphml", xmlns=_GRAPHML_NS)
    ET.SubElement(root, "key", id="kind", attrib={"for": "node", "attr.name": "kind", "attr.type": "string"})
    ET.SubElement(root, "key", id="rel", attrib={"for": "edge", "attr.name": "rel", "attr.type": "string"})
    g = ET.SubElement(root, "graph", id=graph.name or "G", edgedefault="directed")
    for label, kind in graph.nodes():
        node = ET.SubElement(g, "node", id=label)
        ET.SubElement(node, "data", key="kind").text = kind.value
    for src, dst, rel in graph.edges():
        edge = ET.SubElement(g, "edge", source=src, target=dst)
        ET.SubElement(edge, "data", key="rel").text = rel.value
    ET.indent(root)
    return b'<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="utf-8") + b"\n"


def _from_graphml(text: str, name: str) -> KnowledgeGraph:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise ParseError(f"malformed GraphML: {exc.msg}", line, col) from None

    def local(tag: str) -> str:
        return tag.rsplit("}", 1)[-1]

    if local(root.tag) != "graphml":
        raise ParseError("root element is not <graphml>", 1)
    keys = {k.get("id"): k.get("attr.name") for k in root if local(k.tag) == "key"}
    graph_el = next((el for el in root if local(el.tag) == "graph"), None)
    if graph_el is None:
        raise ParseError("no <graph> element")
    g = KnowledgeGraph(name=name or graph_el.get("id", ""))

    def attr(el: ET.Element, wanted: str) -> str | None:
        for d in el:
            if local(d.tag) == "data" and keys.get(d.get("key"), d.get("key")) == wanted:
                return (d.text or "").strip()
        return None

    for el in graph_el:
        if local(el.tag) == "node":
            kind = attr(el, "kind")
            if el.get("id") is None or kind is None:
                raise ParseError("node without id or kind")
            g.add_node(el.get("id"), _node_kind(kind))
    for el in graph_el:
        if local(el.tag) == "edge":
            rel = attr(el, "rel")
            if el.get("source") is None or el.get("target") is None or rel is None:
                raise ParseError("edge without source, target or rel")
            g.add_edge(el.get("source"), el.get("target"), _edge_kind(rel))
    return g


# -- DOT ---------------------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _to_dot(graph: KnowledgeGraph) -> bytes:
    lines = [f"digraph {_quote(graph.name or 'G')} {{"]
    for label, kind in graph.nodes():
        lines.append(f"  {_quote(label)} [kind={_quote(kind.value)}];")
    for src, dst, rel in graph.edges():
        lines.append(f"  {_quote(src)} -> {_quote(dst)} [rel={_quote(rel.value)}];")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


_Q = r'"((?:[^"\\]|\\.)*)"'
_DOT_HEADER = re.compile(r"^\s*digraph\s+(?:" + _Q + r"|(\w+))?\s*\{\s*$")
_DOT_NODE = re.compile(r"^\s*" + _Q + r"\s*\[\s*kind\s*=\s*" + _Q + r"\s*\]\s*;?\s*$")
_DOT_EDGE = re.compile(r"^\s*" + _Q + r"\s*->\s*" + _Q + r"\s*\[\s*rel\s*=\s*" + _Q + r"\s*\]\s*;?\s*$")


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _from_dot(text: str, name: str) -> KnowledgeGraph:
    lines = text.splitlines()
    body = [(i, ln) for i, ln in enumerate(lines, 1) if ln.strip() and not ln.strip().startswith("//")]
    if not body:
        raise ParseError("empty DOT input", 1)
    lineno, first = body[0]
    m = _DOT_HEADER.match(first)
    if not m:
        raise ParseError("expected 'digraph <name> {'", lineno, 1)
    if body[-1][1].strip() != "}":
        raise ParseError("missing closing '}'", body[-1][0])
    g = KnowledgeGraph(name=name or _unquote(m.group(1) or m.group(2) or ""))
    edges = []
    for lineno, ln in body[1:-1]:
        if m := _DOT_NODE.match(ln):
            try:
                g.add_node(_unquote(m.group(1)), _node_kind(_unquote(m.group(2))))
            except KGError as exc:
                raise ParseError(str(exc), lineno) from None
        elif m := _DOT_EDGE.match(ln):
            edges.append((lineno, _unquote(m.group(1)), _unquote(m.group(2)), _unquote(m.group(3))))
        else:
            raise ParseError(f"unrecognized DOT statement {ln.strip()!r}", lineno, len(ln) - len(ln.lstrip()) + 1)
    for lineno, src, dst, rel in edges:
        try:
            g.add_edge(src, dst, _edge_kind(rel))
        except KGError as exc:
            raise ParseError(str(exc), lineno) from None
    return g


# -- JSONL -------------------------------------------------------------------

def _to_jsonl(graph: KnowledgeGraph) -> bytes:
    out = [json.dumps({"node": label, "kind": kind.value}, ensure_ascii=False) for label, kind in graph.nodes()]
    out += [json.dumps({"edge": [s, d, r.value]}, ensure_ascii=False) for s, d, r in graph.edges()]
    return ("\n".join(out) + "\n" if out else "").encode("utf-8")


def _from_jsonl(text: str, name: str) -> KnowledgeGraph:
    g = KnowledgeGraph(name=name)
    edges = []
    for lineno, ln in enumerate(text.splitlines(), 1):
        if not ln.strip():
            continue
        try:
            obj = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno, exc.colno) from None
        if isinstance(obj, dict) and "node" in obj and "kind" in obj:
            try:
                g.add_node(str(obj["node"]), _node_kind(obj["kind"]))
            except KGError as exc:
                raise ParseError(str(exc), lineno) from None
        elif isinstance(obj, dict) and isinstance(obj.get("edge"), list) and len(obj["edge"]) == 3:
            edges.append((lineno, *obj["edge"]))
        else:
            raise ParseError("expected {'node', 'kind'} or {'edge': [src, dst, rel]}", lineno)
    for lineno, src, dst, rel in edges:
        try:
            g.add_edge(str(src), str(dst), _edge_kind(rel))
        except KGError as exc:
            raise ParseError(str(exc), lineno) from None
    return g


def _node_kind(value: object) -> NodeKind:
    try:
        return NodeKind(value)
    except ValueError:
        raise ParseError(f"unknown node kind {value!r}") from None


def _edge_kind(value: object) -> EdgeKind:
    try:
        return EdgeKind(value)
    except ValueError:
        raise ParseError(f"unknown edge kind {value!r}") from None
