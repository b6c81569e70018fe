# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def brandes_betweenness(indptr_in, indices_in, Py_ssize_t n):
    cdef cnp.int64_t[::1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef cnp.int64_t[::1] indices = np.ascontiguousarray(indices_in, dtype=np.int64)
    cdef Py_ssize_t m = indices.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef double[::1] cb = out
    cdef double[::1] delta = np.zeros(n, dtype=np.float64)
    cdef double[::1] sigma = np.zeros(n, dtype=np.float64)
    cdef cnp.int64_t[::1] dist = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = np.empty(n, dtype=np.int64)
    # predecessors of w live in pred[pred_start[w] : pred_start[w] + pred_len[w]]
    cdef cnp.int64_t[::1] pred = np.empty(max(m, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] pred_len = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t s, v, w, k, head, tail, i
    cdef cnp.int64_t dv
    cdef double coeff
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
            pred_len[i] = 0
        sigma[s] = 1.0
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    pred[indptr[w] + pred_len[w]] = v
                    pred_len[w] += 1
        # the BFS queue doubles as the visitation stack
        while tail > 0:
            tail -= 1
            w = queue[tail]
            coeff = (1.0 + delta[w]) / sigma[w]
            for k in range(pred_len[w]):
                v = pred[indptr[w] + k]
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return out / 2.0


def indel_distance(str s, str t):
    if len(s) < len(t):
        s, t = t, s
    cdef Py_ssize_t ls = len(s), lt = len(t), i, j
    cdef Py_UCS4 a
    cdef Py_ssize_t *prev = <Py_ssize_t *> malloc((lt + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc((lt + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 *tb = <Py_UCS4 *> malloc((lt + 1) * sizeof(Py_UCS4))
    if prev == NULL or cur == NULL or tb == NULL:
        free(prev); free(cur); free(tb)
        raise MemoryError()
    try:
        for j in range(lt):
            tb[j] = t[j]
        for j in range(lt + 1):
            prev[j] = 0
        for i in range(ls):
            a = s[i]
            cur[0] = 0
            for j in range(1, lt + 1):
                if a == tb[j - 1]:
                    cur[j] = prev[j - 1] + 1
                elif cur[j - 1] > prev[j]:
                    cur[j] = cur[j - 1]
                else:
                    cur[j] = prev[j]
            tmp = prev
            prev = cur
            cur = tmp
        return ls + lt - 2 * prev[lt]
    finally:
        free(prev); free(cur); free(tb)


def levenshtein(str s, str t):
    if len(s) < len(t):
        s, t = t, s
    cdef Py_ssize_t ls = len(s), lt = len(t), i, j, best, cand
    cdef Py_UCS4 a
    cdef Py_ssize_t *prev = <Py_ssize_t *> malloc((lt + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc((lt + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 *tb = <Py_UCS4 *> malloc((lt + 1) * sizeof(Py_UCS4))
    if prev == NULL or cur == NULL or tb == NULL:
        free(prev); free(cur); free(tb)
        raise MemoryError()
    try:
        for j in range(lt):
            tb[j] = t[j]
        for j in range(lt + 1):
            prev[j] = j
        for i in range(1, ls + 1):
            a = s[i - 1]
            cur[0] = i
            for j in range(1, lt + 1):
                best = prev[j] + 1
                cand = cur[j - 1] + 1
                if cand < best:
                    best = cand
                cand = prev[j - 1] + (0 if a == tb[j - 1] else 1)
                if cand < best:
                    best = cand
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        return prev[lt]
    finally:
        free(prev); free(cur); free(tb)
