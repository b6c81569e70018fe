"""Centrality, community, similarity and rank-correlation measures.

Degree and PageRank follow edge direction. Betweenness, eigenvector
centrality, Louvain and modularity use the undirected simple projection
(edge kinds and direction dropped, self-loops removed).
"""
from __future__ import annotations

import enum
import logging
import math
from collections.abc import Collection, Hashable, Mapping
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import KGError, KnowledgeGraph
from .rng import permutation

logger = logging.getLogger(__name__)


class EmptyGraph(KGError):
    pass


class UncoveredNode(KGError):
    pass


class InsufficientOverlap(KGError):
    pass


class NonConvergence(RuntimeError):
    pass


class Measure(str, enum.Enum):
    DEGREE = "degree"
    BETWEENNESS = "betweenness"
    PAGERANK = "pagerank"
    EIGENVECTOR = "eigenvector"


@dataclass
class CentralityVector:
    measure: Measure
    scores: dict[str, float]
    converged: bool = True
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "scores": dict(sorted(self.scores.items())),
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass
class CommunityPartition:
    assignment: dict[str, int]
    modularity: float

    @property
    def num_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> list[set[str]]:
        groups: dict[int, set[str]] = {}
        for node, c in self.assignment.items():
            groups.setdefault(c, set()).add(node)
        return [groups[c] for c in sorted(groups)]

    def to_dict(self) -> dict:
        return {"assignment": dict(sorted(self.assignment.items())), "modularity": self.modularity}


@dataclass
class RankCorrelation:
    rho: float | None
    n_shared: int
    error: str | None = None

    def to_dict(self) -> dict:
        return {"rho": self.rho, "n_shared": self.n_shared, "error": self.error}

    @classmethod
    def from_dict(cls, d: Mapping) -> RankCorrelation:
        return cls(d["rho"], d["n_shared"], d.get("error"))


# -- projections ---------------------------------------------------------------

@dataclass
class _Indexed:
    labels: list[str]
    index: dict[str, int]
    # undirected simple projection, CSR with sorted neighbours
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    num_undirected_edges: int = 0


def _indexed(graph: KnowledgeGraph) -> _Indexed:
    labels = sorted(graph.node_set())
    index = {lab: i for i, lab in enumerate(labels)}
    pairs = set()
    for s, d, _ in graph.edge_set():
        a, b = index[s], index[d]
        if a != b:
            pairs.add((a, b) if a < b else (b, a))
    nbrs: list[list[int]] = [[] for _ in labels]
    for a, b in pairs:
        nbrs[a].append(b)
        nbrs[b].append(a)
    indptr = np.zeros(len(labels) + 1, dtype=np.int64)
    flat: list[int] = []
    for i, row in enumerate(nbrs):
        row.sort()
        flat.extend(row)
        indptr[i + 1] = len(flat)
    return _Indexed(labels, index, indptr, np.asarray(flat, dtype=np.int64), len(pairs))


def _require_nodes(graph: KnowledgeGraph) -> None:
    if graph.num_nodes == 0:
        raise EmptyGraph("graph has no nodes")


# -- centralities --------------------------------------------------------------

def degree_centrality(graph: KnowledgeGraph, normalized: bool = False) -> CentralityVector:
    """In-degree plus out-degree, counting every typed edge."""
    _require_nodes(graph)
    deg = dict.fromkeys(graph.node_set(), 0)
    for s, d, _ in graph.edge_set():
        deg[s] += 1
        deg[d] += 1
    n = graph.num_nodes
    scale = 1.0 / (n - 1) if normalized and n > 1 else 1.0
    return CentralityVector(Measure.DEGREE, {k: v * scale for k, v in deg.items()})


def betweenness_centrality(graph: KnowledgeGraph, normalized: bool = False) -> CentralityVector:
    """Exact shortest-path betweenness (Brandes) on the undirected projection.

    Unnormalized scores count each unordered pair once, so the middle of the
    path a-b-c scores 1. ``normalized`` divides by (n-1)(n-2)/2.
    """
    _require_nodes(graph)
    ix = _indexed(graph)
    n = len(ix.labels)
    cb = kernels.brandes_betweenness(ix.indptr, ix.indices, n)
    if normalized and n > 2:
        cb = cb / ((n - 1) * (n - 2) / 2.0)
    return CentralityVector(Measure.BETWEENNESS, {lab: float(cb[i]) for i, lab in enumerate(ix.labels)})


def pagerank(
    graph: KnowledgeGraph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 1000
) -> CentralityVector:
    """Power-iteration PageRank over distinct directed (src, dst) pairs.

    Mass on dangling nodes is spread uniformly. Stops once the L1 change
    drops below ``tol``; on hitting ``max_iter`` the last iterate is returned
    with ``converged=False``.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    _require_nodes(graph)
    labels = sorted(graph.node_set())
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    pairs = {(index[s], index[d]) for s, d, _ in graph.edge_set()}
    src = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
    dst = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
    out_deg = np.bincount(src, minlength=n).astype(np.float64)
    dangling = out_deg == 0
    weight = np.zeros(len(pairs)) if len(pairs) == 0 else 1.0 / out_deg[src]

    x = np.full(n, 1.0 / n)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        flow = np.bincount(dst, weights=x[src] * weight, minlength=n)
        x_new = damping * (flow + x[dangling].sum() / n) + (1.0 - damping) / n
        x_new /= x_new.sum()
        change = np.abs(x_new - x).sum()
        x = x_new
        if change < tol:
            converged = True
            break
    if not converged:
        logger.warning("pagerank did not converge in %d iterations", max_iter)
    return CentralityVector(Measure.PAGERANK, {lab: float(x[i]) for i, lab in enumerate(labels)}, converged, it)


def eigenvector_centrality(graph: KnowledgeGraph, tol: float = 1e-10, max_iter: int = 1000) -> CentralityVector:
    """Principal eigenvector of the undirected adjacency, L2-normalized.

    Iterates with A + I so bipartite graphs (stars) do not oscillate; the
    shift leaves the eigenvectors unchanged.
    """
    _require_nodes(graph)
    ix = _indexed(graph)
    n = len(ix.labels)
    rows = np.repeat(np.arange(n), np.diff(ix.indptr))
    x = np.full(n, 1.0 / math.sqrt(n))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        x_new = x + np.bincount(rows, weights=x[ix.indices], minlength=n)
        x_new /= np.linalg.norm(x_new)
        change = np.abs(x_new - x).sum()
        x = x_new
        if change < n * tol:
            converged = True
            break
    if not converged:
        logger.warning("eigenvector centrality did not converge in %d iterations", max_iter)
    return CentralityVector(Measure.EIGENVECTOR, {lab: float(x[i]) for i, lab in enumerate(ix.labels)}, converged, it)


def centrality(graph: KnowledgeGraph, measure: Measure | str, **kwargs) -> CentralityVector:
    measure = Measure(measure)
    if measure is Measure.DEGREE:
        return degree_centrality(graph, **kwargs)
    if measure is Measure.BETWEENNESS:
        return betweenness_centrality(graph, **kwargs)
    if measure is Measure.PAGERANK:
        return pagerank(graph, **kwargs)
    return eigenvector_centrality(graph, **kwargs)


# -- communities ---------------------------------------------------------------

def modularity(graph: KnowledgeGraph, assignment: Mapping[str, Hashable]) -> float:
    """Newman-Girvan Q on the undirected projection. Q is 0 for an edgeless graph."""
    missing = graph.node_set() - set(assignment)
    if missing:
        raise UncoveredNode(f"{len(missing)} node(s) without a community, e.g. {sorted(missing)[0]!r}")
    ix = _indexed(graph)
    m = ix.num_undirected_edges
    if m == 0:
        return 0.0
    internal: dict[Hashable, int] = {}
    degree: dict[Hashable, int] = {}
    for i, lab in enumerate(ix.labels):
        c = assignment[lab]
        degree[c] = degree.get(c, 0) + int(ix.indptr[i + 1] - ix.indptr[i])
        for j in ix.indices[ix.indptr[i]:ix.indptr[i + 1]]:
            if j > i and assignment[ix.labels[j]] == c:
                internal[c] = internal.get(c, 0) + 1
    q = 0.0
    for c in sorted(degree, key=repr):
        q += internal.get(c, 0) / m - (degree[c] / (2 * m)) ** 2
    return q


def louvain_communities(graph: KnowledgeGraph, seed: int = 42) -> CommunityPartition:
    """Louvain modularity optimisation (local moving + aggregation).

    Nodes are visited in sorted-label order permuted by ``seed``. Each node
    moves to the neighbouring community with the largest gain, ties going to
    the first candidate seen, and only if that strictly beats staying put.
    """
    _require_nodes(graph)
    ix = _indexed(graph)
    n = len(ix.labels)
    # level graph: adjacency dicts without self-loops, plus internal loop weight
    adj: list[dict[int, float]] = [{} for _ in range(n)]
    for i in range(n):
        for j in ix.indices[ix.indptr[i]:ix.indptr[i + 1]]:
            adj[i][int(j)] = 1.0
    loops = [0.0] * n
    m = float(ix.num_undirected_edges)
    membership = list(range(n))  # original node -> current level node
    if m == 0:
        return _partition(graph, ix.labels, membership)

    level_seed = seed
    while True:
        comm, moved = _local_moving(adj, loops, m, level_seed)
        level_seed += 1
        if not moved:
            break
        relabel: dict[int, int] = {}
        for c in comm:
            relabel.setdefault(c, len(relabel))
        comm = [relabel[c] for c in comm]
        k = len(relabel)
        new_adj: list[dict[int, float]] = [{} for _ in range(k)]
        new_loops = [0.0] * k
        for i, row in enumerate(adj):
            ci = comm[i]
            new_loops[ci] += loops[i]
            for j, w in row.items():
                cj = comm[j]
                if ci == cj:
                    if i < j:
                        new_loops[ci] += w
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        membership = [comm[c] for c in membership]
        adj, loops = new_adj, new_loops
        if k == len(comm):
            break
    return _partition(graph, ix.labels, membership)


def _local_moving(adj: list[dict[int, float]], loops: list[float], m: float, seed: int) -> tuple[list[int], bool]:
    n = len(adj)
    k = [sum(row.values()) + 2.0 * loops[i] for i, row in enumerate(adj)]
    comm = list(range(n))
    tot = list(k)
    order = permutation(n, seed)
    two_m = 2.0 * m
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            tot[ci] -= k[i]
            links: dict[int, float] = {ci: 0.0}
            for j in sorted(adj[i]):
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + adj[i][j]
            best_c = ci
            best_gain = links[ci] - tot[ci] * k[i] / two_m
            for c, w in links.items():
                gain = w - tot[c] * k[i] / two_m
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += k[i]
            if best_c != ci:
                comm[i] = best_c
                improved = moved_any = True
    return comm, moved_any


def _partition(graph: KnowledgeGraph, labels: list[str], membership: list[int]) -> CommunityPartition:
    relabel: dict[int, int] = {}
    assignment = {}
    for lab, c in zip(labels, membership):
        assignment[lab] = relabel.setdefault(c, len(relabel))
    return CommunityPartition(assignment, modularity(graph, assignment))


# -- set and rank measures -----------------------------------------------------

def jaccard(a: Collection, b: Collection, empty_value: float = 1.0) -> float:
    """|A & B| / |A | B|; two empty sets give ``empty_value``."""
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return empty_value
    return len(a & b) / union


def average_ranks(values: list[float]) -> list[float]:
    """1-based ascending ranks, ties sharing their mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = mean
        i = j + 1
    return ranks


def spearman(xs: Mapping[str, float], ys: Mapping[str, float]) -> RankCorrelation:
    """Spearman rho over the shared keys, with average ranks for ties.

    When either side is constant, rho is 1.0 if the two rank vectors are
    identical and 0.0 otherwise.
    """
    keys = sorted(set(xs) & set(ys))
    if len(keys) < 2:
        raise InsufficientOverlap(f"need at least 2 shared nodes, got {len(keys)}")
    rx = average_ranks([xs[k] for k in keys])
    ry = average_ranks([ys[k] for k in keys])
    if rx == ry:
        return RankCorrelation(1.0, len(keys))
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return RankCorrelation(0.0, len(keys))
    rho = cov / math.sqrt(vx * vy)
    return RankCorrelation(max(-1.0, min(1.0, rho)), len(keys))
