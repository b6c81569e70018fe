"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--nodes 2000]

Both backends are imported directly, so one run covers both regardless of
KGSTRESS_PURE_PYTHON. Results are checked for equality before timing.
"""
from __future__ import annotations

import argparse
import random
import statistics
import time

import numpy as np

from kgstress import _pykernels
from kgstress.graph import EdgeKind, KnowledgeGraph, NodeKind
from kgstress.graph_io import read_graph
from kgstress.metrics import _indexed

try:
    from kgstress import _ckernels
except ImportError:
    _ckernels = None


def random_graph(n: int, avg_degree: float, seed: int) -> KnowledgeGraph:
    rng = random.Random(seed)
    g = KnowledgeGraph(name=f"random{n}")
    for i in range(n):
        g.add_node(f"v{i}", NodeKind.TERM)
    for _ in range(int(n * avg_degree / 2)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            g.add_edge(f"v{a}", f"v{b}", EdgeKind.GENERIC)
    return g


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def word_pairs(n: int, seed: int) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    alphabet = "abcdefghijklmnopqrstuvwxyz "
    return [("".join(rng.choice(alphabet) for _ in range(rng.randint(5, 40))),
             "".join(rng.choice(alphabet) for _ in range(rng.randint(5, 40)))) for _ in range(n)]


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--nodes", type=int, default=2000)
    ap.add_argument("--graph", help="GraphML/DOT/JSONL file to use instead of a random graph")
    ap.add_argument("--pairs", type=int, default=5000)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1

    g = read_graph(args.graph) if args.graph else random_graph(args.nodes, 4.0, 1)
    ix = _indexed(g)
    n = len(ix.labels)
    py = _pykernels.brandes_betweenness(ix.indptr, ix.indices, n)
    cy = _ckernels.brandes_betweenness(ix.indptr, ix.indices, n)
    assert np.array_equal(py, cy), "backends disagree on betweenness"

    pairs = word_pairs(args.pairs, 2)
    for s, t in pairs[:200]:
        assert _pykernels.indel_distance(s, t) == _ckernels.indel_distance(s, t)
        assert _pykernels.levenshtein(s, t) == _ckernels.levenshtein(s, t)

    rows = []
    for name, call in [
        (f"betweenness ({n} nodes, {ix.num_undirected_edges} edges)",
         lambda m: m.brandes_betweenness(ix.indptr, ix.indices, n)),
        (f"indel distance ({len(pairs)} pairs)", lambda m: [m.indel_distance(s, t) for s, t in pairs]),
        (f"levenshtein ({len(pairs)} pairs)", lambda m: [m.levenshtein(s, t) for s, t in pairs]),
    ]:
        t_py = best_of(lambda: call(_pykernels), args.repeat)
        t_cy = best_of(lambda: call(_ckernels), args.repeat)
        rows.append((name, t_py, t_cy))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python s':>9}  {'cython s':>9}  {'speed-up':>8}")
    for name, t_py, t_cy in rows:
        print(f"{name:<{width}}  {t_py:9.4f}  {t_cy:9.4f}  {t_py / t_cy:7.1f}x")
    print(f"median speed-up {statistics.median(r[1] / r[2] for r in rows):.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
