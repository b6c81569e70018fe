"""Hallucination stress test: fabrication, centrality alignment, communities, upward mobility."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

from .graph import KGError, KnowledgeGraph
from .metrics import (
    InsufficientOverlap,
    Measure,
    RankCorrelation,
    average_ranks,
    centrality,
    jaccard,
    louvain_communities,
    spearman,
)

REPORT_SCHEMA_VERSION = "kgstress.stress_report/1"


class EmptyGeneratedGraph(KGError):
    pass


@dataclass
class StressConfig:
    measures: tuple[str, ...] = ("degree", "betweenness", "pagerank")
    mobility_measure: str = "pagerank"
    mobility_threshold: float = 0.25
    top_fraction: float = 0.1
    damping: float = 0.85
    pagerank_tol: float = 1e-10
    pagerank_max_iter: int = 1000
    louvain_seed: int = 42
    empty_jaccard: float = 1.0

    def __post_init__(self) -> None:
        self.measures = tuple(Measure(m).value for m in self.measures)
        self.mobility_measure = Measure(self.mobility_measure).value
        if not 0.0 < self.mobility_threshold <= 1.0:
            raise ValueError("mobility_threshold must lie in (0, 1]")
        if not 0.0 < self.top_fraction <= 1.0:
            raise ValueError("top_fraction must lie in (0, 1]")


@dataclass
class UpwardNode:
    node: str
    rank_ref: float | None
    rank_llm: float
    delta: float
    is_fabrication: bool


@dataclass
class StressReport:
    fabrication_rate: float
    fabricated_nodes: list[str]
    node_jaccard: float
    edge_jaccard: float
    rank_correlations: dict[str, RankCorrelation]
    modularity_ref: float
    modularity_llm: float
    community_counts: tuple[int, int]
    upward_mobile: list[UpwardNode]
    graph_sizes: dict[str, dict[str, int]] = field(default_factory=dict)
    config: StressConfig = field(default_factory=StressConfig)

    @property
    def num_llm_nodes(self) -> int:
        return self.graph_sizes["llm"]["nodes"]

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA_VERSION,
            "config": asdict(self.config) | {"measures": list(self.config.measures)},
            "graph_sizes": self.graph_sizes,
            "fabrication_rate": self.fabrication_rate,
            "fabricated_nodes": sorted(self.fabricated_nodes),
            "node_jaccard": self.node_jaccard,
            "edge_jaccard": self.edge_jaccard,
            "rank_correlations": {m: rc.to_dict() for m, rc in self.rank_correlations.items()},
            "modularity": {"ref": self.modularity_ref, "llm": self.modularity_llm},
            "community_counts": {"ref": self.community_counts[0], "llm": self.community_counts[1]},
            "upward_mobile": [asdict(u) for u in self.upward_mobile],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: Mapping) -> StressReport:
        if d.get("schema") != REPORT_SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        cfg = dict(d["config"])
        cfg["measures"] = tuple(cfg["measures"])
        return cls(
            fabrication_rate=d["fabrication_rate"],
            fabricated_nodes=list(d["fabricated_nodes"]),
            node_jaccard=d["node_jaccard"],
            edge_jaccard=d["edge_jaccard"],
            rank_correlations={m: RankCorrelation.from_dict(rc) for m, rc in d["rank_correlations"].items()},
            modularity_ref=d["modularity"]["ref"],
            modularity_llm=d["modularity"]["llm"],
            community_counts=(d["community_counts"]["ref"], d["community_counts"]["llm"]),
            upward_mobile=[UpwardNode(**u) for u in d["upward_mobile"]],
            graph_sizes={k: dict(v) for k, v in d["graph_sizes"].items()},
            config=StressConfig(**cfg),
        )

    @classmethod
    def from_json(cls, text: str) -> StressReport:
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        """Plain-text walk through the practitioner checklist."""
        sizes = self.graph_sizes
        lines = [
            "Hallucination stress test",
            "=========================",
            f"1. Reference graph: {sizes['ref']['nodes']} nodes, {sizes['ref']['edges']} edges",
            f"2. Generated graph: {sizes['llm']['nodes']} nodes, {sizes['llm']['edges']} edges",
            f"3. Fabrication rate: {self.fabrication_rate:.3f} "
            f"({len(self.fabricated_nodes)} of {sizes['llm']['nodes']} generated nodes absent from the reference)",
            "4. Centrality rank correlation over shared nodes:",
        ]
        for m, rc in self.rank_correlations.items():
            val = f"rho = {rc.rho:+.3f}" if rc.rho is not None else f"undefined ({rc.error})"
            lines.append(f"     {m:<12} {val}  (n_shared = {rc.n_shared})")
        lines += [
            f"5. Communities (Louvain): ref {self.community_counts[0]} (Q = {self.modularity_ref:.3f}), "
            f"generated {self.community_counts[1]} (Q = {self.modularity_llm:.3f})",
            f"6. Upward mobility ({self.config.mobility_measure}, threshold {self.config.mobility_threshold}): "
            f"{len(self.upward_mobile)} node(s), "
            f"{sum(u.is_fabrication for u in self.upward_mobile)} fabricated",
        ]
        for u in self.upward_mobile[:10]:
            tag = " [FABRICATED]" if u.is_fabrication else ""
            ref = "-" if u.rank_ref is None else f"{u.rank_ref:.3f}"
            lines.append(f"     {u.node}: ref {ref} -> llm {u.rank_llm:.3f}{tag}")
        lines.append(
            f"7. Graph similarity: node Jaccard {self.node_jaccard:.3f}, edge Jaccard {self.edge_jaccard:.3f}"
        )
        return "\n".join(lines) + "\n"


def fabrication_rate(g_llm: KnowledgeGraph, g_ref: KnowledgeGraph) -> tuple[float, set[str]]:
    v_llm = g_llm.node_set()
    if not v_llm:
        raise EmptyGeneratedGraph("generated graph has no nodes")
    fabricated = v_llm - g_ref.node_set()
    return len(fabricated) / len(v_llm), fabricated


def _scores(graph: KnowledgeGraph, measure: str, config: StressConfig) -> dict[str, float]:
    if measure == Measure.PAGERANK.value:
        kwargs = {"damping": config.damping, "tol": config.pagerank_tol, "max_iter": config.pagerank_max_iter}
        return centrality(graph, measure, **kwargs).scores
    return centrality(graph, measure).scores


def structural_alignment(
    g_llm: KnowledgeGraph,
    g_ref: KnowledgeGraph,
    measures: Sequence[str] = ("degree", "betweenness", "pagerank"),
    config: StressConfig | None = None,
    _cache: dict | None = None,
) -> dict[str, RankCorrelation]:
    """Spearman rho per measure, scores computed on each full graph and compared on shared nodes."""
    config = config or StressConfig()
    shared = g_llm.node_set() & g_ref.node_set()
    out: dict[str, RankCorrelation] = {}
    for measure in measures:
        measure = Measure(measure).value
        if len(shared) < 2:
            out[measure] = RankCorrelation(None, len(shared), "InsufficientOverlap")
            continue
        s_llm = _cached_scores(g_llm, "llm", measure, config, _cache)
        s_ref = _cached_scores(g_ref, "ref", measure, config, _cache)
        try:
            out[measure] = spearman({v: s_llm[v] for v in shared}, {v: s_ref[v] for v in shared})
        except InsufficientOverlap:
            out[measure] = RankCorrelation(None, len(shared), "InsufficientOverlap")
    return out


def _cached_scores(graph, side, measure, config, cache):
    if cache is None:
        return _scores(graph, measure, config)
    key = (side, measure)
    if key not in cache:
        cache[key] = _scores(graph, measure, config)
    return cache[key]


def percentile_ranks(scores: Mapping[str, float]) -> dict[str, float]:
    """Average-tie ascending rank divided by n: the most central node gets 1.0."""
    keys = sorted(scores)
    if not keys:
        return {}
    ranks = average_ranks([scores[k] for k in keys])
    n = len(keys)
    return {k: r / n for k, r in zip(keys, ranks)}


def upward_mobility(
    g_llm: KnowledgeGraph,
    g_ref: KnowledgeGraph,
    measure: str = "pagerank",
    threshold: float = 0.25,
    top_fraction: float = 0.1,
    config: StressConfig | None = None,
    _cache: dict | None = None,
) -> list[UpwardNode]:
    """Shared nodes whose percentile rank rises by at least ``threshold``, plus
    every fabricated node in the generated graph's top ``top_fraction``.

    Fabricated nodes carry ``rank_ref=None`` and ``delta`` equal to their
    generated-graph percentile. Sorted by delta descending, then label.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    config = config or StressConfig()
    measure = Measure(measure).value
    if g_llm.num_nodes == 0:
        return []
    p_llm = percentile_ranks(_cached_scores(g_llm, "llm", measure, config, _cache))
    p_ref = percentile_ranks(_cached_scores(g_ref, "ref", measure, config, _cache)) if g_ref.num_nodes else {}
    out = []
    for node, r_llm in p_llm.items():
        if node in p_ref:
            delta = r_llm - p_ref[node]
            if delta >= threshold - 1e-12:
                out.append(UpwardNode(node, p_ref[node], r_llm, delta, False))
        elif r_llm > 1.0 - top_fraction + 1e-12:
            out.append(UpwardNode(node, None, r_llm, r_llm, True))
    out.sort(key=lambda u: (-u.delta, u.node))
    return out


def run_stress_test(
    g_llm: KnowledgeGraph, g_ref: KnowledgeGraph, config: StressConfig | None = None
) -> StressReport:
    config = config or StressConfig()
    rate, fabricated = fabrication_rate(g_llm, g_ref)
    cache: dict = {}
    correlations = structural_alignment(g_llm, g_ref, config.measures, config, cache)
    comm_ref = louvain_communities(g_ref, config.louvain_seed) if g_ref.num_nodes else None
    comm_llm = louvain_communities(g_llm, config.louvain_seed)
    upward = upward_mobility(
        g_llm, g_ref, config.mobility_measure, config.mobility_threshold, config.top_fraction, config, cache
    )
    return StressReport(
        fabrication_rate=rate,
        fabricated_nodes=sorted(fabricated),
        node_jaccard=jaccard(g_llm.node_set(), g_ref.node_set(), config.empty_jaccard),
        edge_jaccard=jaccard(g_llm.edge_set(), g_ref.edge_set(), config.empty_jaccard),
        rank_correlations=correlations,
        modularity_ref=comm_ref.modularity if comm_ref else 0.0,
        modularity_llm=comm_llm.modularity,
        community_counts=(comm_ref.num_communities if comm_ref else 0, comm_llm.num_communities),
        upward_mobile=upward,
        graph_sizes={
            "ref": {"nodes": g_ref.num_nodes, "edges": g_ref.num_edges},
            "llm": {"nodes": g_llm.num_nodes, "edges": g_llm.num_edges},
        },
        config=config,
    )
