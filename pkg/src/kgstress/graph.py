"""Directed typed knowledge graph shared by every analysis in the package."""
from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class KGError(ValueError):
    """Base class for graph model errors."""


class EmptyLabel(KGError):
    pass


class KindConflict(KGError):
    pass


class MissingEndpoint(KGError):
    pass


class SchemaViolation(KGError):
    pass


class NodeKind(str, enum.Enum):
    HEAD = "Head"
    TERM = "Term"


class EdgeKind(str, enum.Enum):
    HAS_NOUN = "HAS_NOUN"
    HAS_VERB = "HAS_VERB"
    HAS_ADJ = "HAS_ADJ"
    HAS_ADV = "HAS_ADV"
    CROSS_REF = "CROSS_REF"
    CITES = "CITES"
    GENERIC = "GENERIC"


HAS_KINDS = frozenset({EdgeKind.HAS_NOUN, EdgeKind.HAS_VERB, EdgeKind.HAS_ADJ, EdgeKind.HAS_ADV})

_WS = re.compile(r"\s+")


def normalize_label(label: str) -> str:
    """Lowercase (Unicode casefold), trim and collapse internal whitespace."""
    label = unicodedata.normalize("NFC", label)
    return _WS.sub(" ", label.casefold()).strip()


Edge = tuple[str, str, EdgeKind]


@dataclass
class KnowledgeGraph:
    """A simple directed graph with typed nodes and typed edges.

    Node identity is the normalized label; the kind is an attribute. Parallel
    edges are allowed only when their kinds differ. With ``schema_checked``
    set, HAS_* edges must run Head -> Term and CROSS_REF edges Head -> Head.
    """

    name: str = ""
    schema_checked: bool = False
    _kinds: dict[str, NodeKind] = field(default_factory=dict, repr=False)
    _edges: set[Edge] = field(default_factory=set, repr=False)

    # -- construction -------------------------------------------------------
    def add_node(self, label: str, kind: NodeKind | str) -> str:
        node = normalize_label(label)
        if not node:
            raise EmptyLabel(f"empty node label {label!r}")
        kind = NodeKind(kind)
        existing = self._kinds.get(node)
        if existing is None:
            self._kinds[node] = kind
        elif existing is not kind:
            raise KindConflict(f"node {node!r} already has kind {existing.value}, not {kind.value}")
        return node

    def add_edge(self, src: str, dst: str, kind: EdgeKind | str) -> None:
        kind = EdgeKind(kind)
        src, dst = normalize_label(src), normalize_label(dst)
        for end in (src, dst):
            if end not in self._kinds:
                raise MissingEndpoint(f"edge endpoint {end!r} is not a node")
        if self.schema_checked:
            self._check_schema(src, dst, kind)
        self._edges.add((src, dst, kind))

    def _check_schema(self, src: str, dst: str, kind: EdgeKind) -> None:
        ks, kd = self._kinds[src], self._kinds[dst]
        if kind in HAS_KINDS and not (ks is NodeKind.HEAD and kd is NodeKind.TERM):
            raise SchemaViolation(f"{kind.value} must connect Head -> Term, got {ks.value} -> {kd.value}")
        if kind is EdgeKind.CROSS_REF and not (ks is NodeKind.HEAD and kd is NodeKind.HEAD):
            raise SchemaViolation(f"CROSS_REF must connect Head -> Head, got {ks.value} -> {kd.value}")

    def check_schema(self) -> None:
        """Validate every edge against the endpoint rules, regardless of the flag."""
        for src, dst, kind in self._edges:
            self._check_schema(src, dst, kind)

    # -- queries ------------------------------------------------------------
    def node_set(self) -> set[str]:
        return set(self._kinds)

    def edge_set(self) -> set[Edge]:
        return set(self._edges)

    def kind_of(self, node: str) -> NodeKind:
        return self._kinds[normalize_label(node)]

    def nodes(self) -> Iterator[tuple[str, NodeKind]]:
        return iter(sorted(self._kinds.items()))

    def edges(self) -> list[Edge]:
        return sorted(self._edges, key=lambda e: (e[0], e[1], e[2].value))

    def __contains__(self, label: object) -> bool:
        return isinstance(label, str) and normalize_label(label) in self._kinds

    @property
    def num_nodes(self) -> int:
        return len(self._kinds)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._kinds)

    def same_as(self, other: KnowledgeGraph) -> bool:
        """Equality of node sets (with kinds) and edge sets; the name is ignored."""
        return self._kinds == other._kinds and self._edges == other._edges

    def copy(self) -> KnowledgeGraph:
        return KnowledgeGraph(self.name, self.schema_checked, dict(self._kinds), set(self._edges))

    @classmethod
    def from_parts(
        cls,
        nodes: Iterable[tuple[str, NodeKind | str]],
        edges: Iterable[tuple[str, str, EdgeKind | str]] = (),
        name: str = "",
        schema_checked: bool = False,
    ) -> KnowledgeGraph:
        g = cls(name=name, schema_checked=schema_checked)
        for label, kind in nodes:
            g.add_node(label, kind)
        for src, dst, kind in edges:
            g.add_edge(src, dst, kind)
        return g
