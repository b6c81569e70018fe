"""Pure-Python versions of the hot kernels.

Signatures and summation order match ``_ckernels.pyx`` so both backends
return identical floats.
"""
from __future__ import annotations

import numpy as np


def brandes_betweenness(indptr, indices, n: int) -> np.ndarray:
    """Unnormalized betweenness of an undirected CSR graph (each pair counted once)."""
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    cb = [0.0] * n
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            dv = dist[v]
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return np.asarray(cb, dtype=np.float64) / 2.0


def indel_distance(s: str, t: str) -> int:
    """Insertions plus deletions turning ``s`` into ``t`` (|s| + |t| - 2 LCS)."""
    if len(s) < len(t):
        s, t = t, s
    prev = [0] * (len(t) + 1)
    for a in s:
        cur = [0] * (len(t) + 1)
        for j, b in enumerate(t, 1):
            if a == b:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = cur[j - 1] if cur[j - 1] > prev[j] else prev[j]
        prev = cur
    return len(s) + len(t) - 2 * prev[-1]


def levenshtein(s: str, t: str) -> int:
    if len(s) < len(t):
        s, t = t, s
    prev = list(range(len(t) + 1))
    for i, a in enumerate(s, 1):
        cur = [i] + [0] * len(t)
        for j, b in enumerate(t, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b))
        prev = cur
    return prev[-1]
