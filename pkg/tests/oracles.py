"""Independent reference computations used by the tests.

Everything here is deliberately naive: exact rational arithmetic, dense
matrices and exhaustive enumeration. None of it imports kgstress internals
beyond the graph container.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from fractions import Fraction

import numpy as np

from kgstress.graph import EdgeKind, KnowledgeGraph, NodeKind


def random_graph(rng: random.Random, max_nodes: int = 12, directed_extra: bool = True) -> KnowledgeGraph:
    """Random typed graph: Head nodes only, GENERIC/CROSS_REF edges, occasional
    antiparallel pairs and parallel typed edges."""
    n = rng.randint(1, max_nodes)
    p = rng.uniform(0.1, 0.6)
    g = KnowledgeGraph(name=f"rand{n}")
    labels = [f"v{i}" for i in range(n)]
    for lab in labels:
        g.add_node(lab, NodeKind.HEAD)
    for a in labels:
        for b in labels:
            if a != b and rng.random() < p / 2:
                g.add_edge(a, b, EdgeKind.GENERIC)
                if directed_extra and rng.random() < 0.1:
                    g.add_edge(a, b, EdgeKind.CROSS_REF)
    return g


def undirected_adjacency(g: KnowledgeGraph) -> dict[str, set[str]]:
    adj = {v: set() for v in g.node_set()}
    for s, d, _ in g.edge_set():
        if s != d:
            adj[s].add(d)
            adj[d].add(s)
    return adj


def _all_shortest_paths(adj: dict[str, set[str]], s: str, t: str) -> list[list[str]]:
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    if t not in dist:
        return []
    paths = []

    def walk(path):
        u = path[-1]
        if u == t:
            paths.append(list(path))
            return
        for w in sorted(adj[u]):
            if dist.get(w) == dist[u] + 1 and dist[w] <= dist[t]:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return paths


def brute_betweenness(g: KnowledgeGraph) -> dict[str, Fraction]:
    """Sum over unordered pairs of the fraction of shortest paths through each interior node."""
    adj = undirected_adjacency(g)
    nodes = sorted(adj)
    cb = {v: Fraction(0) for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        paths = _all_shortest_paths(adj, s, t)
        if not paths:
            continue
        for v in nodes:
            if v in (s, t):
                continue
            through = sum(1 for p in paths if v in p)
            cb[v] += Fraction(through, len(paths))
    return cb


def dense_pagerank(g: KnowledgeGraph, damping: float = 0.85) -> dict[str, float]:
    """Stationary vector of the dense Google matrix, solved as a linear system."""
    nodes = sorted(g.node_set())
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((n, n))
    for s, d, _ in g.edge_set():
        a[idx[d], idx[s]] = 1.0
    out = a.sum(axis=0)
    m = np.zeros((n, n))
    for j in range(n):
        m[:, j] = a[:, j] / out[j] if out[j] else 1.0 / n
    google = damping * m + (1 - damping) / n
    system = np.eye(n) - google
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    x = np.linalg.solve(system, rhs)
    return {v: float(x[idx[v]]) for v in nodes}


def dense_modularity(g: KnowledgeGraph, assignment: dict[str, object]) -> float:
    """Q = 1/2m sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j) with a dense matrix."""
    adj = undirected_adjacency(g)
    nodes = sorted(adj)
    idx = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((len(nodes), len(nodes)))
    for u, nbrs in adj.items():
        for w in nbrs:
            a[idx[u], idx[w]] = 1.0
    two_m = a.sum()
    if two_m == 0:
        return 0.0
    k = a.sum(axis=1)
    same = np.array([[assignment[u] == assignment[w] for w in nodes] for u in nodes], dtype=float)
    return float(((a - np.outer(k, k) / two_m) * same).sum() / two_m)


def set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first, *part[i]]] + part[i + 1:]
        yield [[first], *part]


def best_modularity(g: KnowledgeGraph) -> float:
    nodes = sorted(g.node_set())
    best = -1.0
    for part in set_partitions(nodes):
        assignment = {v: i for i, block in enumerate(part) for v in block}
        best = max(best, dense_modularity(g, assignment))
    return best


def concordance_auc(labels: list[int], scores: list[float]) -> Fraction:
    """All positive-negative pairs: 1 for a correctly ordered pair, 1/2 for a tie."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    twice = 0
    for p in pos:
        for q in neg:
            twice += 2 if p > q else 1 if p == q else 0
    return Fraction(twice, 2 * len(pos) * len(neg))


def is_connected(g: KnowledgeGraph) -> bool:
    adj = undirected_adjacency(g)
    if not adj:
        return False
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)
