# distutils: language = c++
"""Compiled hot loops: constrained clique enumeration and cut scans."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND = "cython"


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _popcount(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef void _extend(
    int depth,
    int p,
    const int64_t[:] indptr,
    const int64_t[:] indices,
    vector[vector[int64_t]]& cand,
    int64_t* chosen,
    const int64_t[:] labels,
    int64_t* counts,
    const int64_t[:] quota,
    bint constrained,
    vector[int64_t]& out,
) noexcept:
    cdef vector[int64_t]* pool = &cand[depth]
    cdef vector[int64_t]* nxt
    cdef Py_ssize_t i, a, b, end_a, end_b
    cdef int64_t w, lab, x, y
    cdef int k
    if depth == p:
        for k in range(p):
            out.push_back(chosen[k])
        return
    for i in range(<Py_ssize_t>pool.size()):
        w = pool[0][i]
        if constrained:
            lab = labels[w]
            if counts[lab] >= quota[lab]:
                continue
            counts[lab] += 1
        chosen[depth] = w
        if depth + 1 == p:
            for k in range(p):
                out.push_back(chosen[k])
        else:
            # Intersect the remaining pool (entries after w) with w's forward neighbours.
            nxt = &cand[depth + 1]
            nxt.clear()
            a = i + 1
            end_a = <Py_ssize_t>pool.size()
            b = indptr[w]
            end_b = indptr[w + 1]
            while a < end_a and b < end_b:
                x = pool[0][a]
                y = indices[b]
                if x < y:
                    a += 1
                elif y < x:
                    b += 1
                else:
                    nxt.push_back(x)
                    a += 1
                    b += 1
            if <int>nxt.size() >= p - depth - 1:
                _extend(depth + 1, p, indptr, indices, cand, chosen, labels,
                        counts, quota, constrained, out)
        if constrained:
            counts[labels[w]] -= 1


def list_cliques(indptr, indices, int p, labels=None, quota=None):
    """All p-cliques of a CSR graph as an (k, p) array of increasing rows.

    With ``labels``/``quota`` only cliques holding exactly ``quota[l]``
    nodes of label ``l`` are produced.
    """
    cdef const int64_t[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[:] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef bint constrained = labels is not None
    cdef const int64_t[:] lab
    cdef const int64_t[:] quo
    if constrained:
        lab = np.ascontiguousarray(labels, dtype=np.int64)
        quo = np.ascontiguousarray(quota, dtype=np.int64)
    else:
        lab = np.zeros(1, dtype=np.int64)
        quo = np.zeros(1, dtype=np.int64)
    cdef vector[int64_t] out
    cdef vector[vector[int64_t]] cand
    cand.resize(p + 1)
    cdef int64_t[64] chosen
    cdef int64_t[:] counts_arr = np.zeros(max(1, quo.shape[0]), dtype=np.int64)
    cdef int64_t* counts = &counts_arr[0]
    cdef Py_ssize_t v, j
    cdef int64_t lv
    if p < 1 or p > 64:
        raise ValueError("p must lie in [1, 64]")
    for v in range(n):
        if constrained:
            lv = lab[v]
            if counts[lv] >= quo[lv]:
                continue
            counts[lv] += 1
        chosen[0] = v
        if p == 1:
            out.push_back(v)
        else:
            cand[1].clear()
            for j in range(ip[v], ip[v + 1]):
                if ix[j] > v:
                    cand[1].push_back(ix[j])
            if <int>cand[1].size() >= p - 1:
                _extend(1, p, ip, ix, cand, chosen, lab, counts, quo, constrained, out)
        if constrained:
            counts[lv] -= 1
    res = np.empty(out.size(), dtype=np.int64)
    cdef int64_t[:] rv = res
    for j in range(<Py_ssize_t>out.size()):
        rv[j] = out[j]
    return res.reshape(-1, p)


def sweep_cut(order, indptr, indices, deg_full):
    """Best prefix cut of ``order`` by conductance.

    ``indptr``/``indices`` describe the induced subgraph on local ids,
    ``deg_full`` the loop-mode degrees. Returns ``(size, cut, denom)`` of the
    best prefix, or ``(0, 0, 0)`` when no proper prefix has positive volume.
    """
    cdef const int64_t[:] od = np.ascontiguousarray(order, dtype=np.int64)
    cdef const int64_t[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[:] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const int64_t[:] df = np.ascontiguousarray(deg_full, dtype=np.int64)
    cdef Py_ssize_t k = od.shape[0]
    cdef Py_ssize_t i, j
    cdef int64_t v, total = 0, vol = 0, cut = 0, inside, denom
    cdef int64_t best_cut = 0, best_den = 0, best_size = 0
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mark = np.zeros(k, dtype=np.uint8)
    for i in range(k):
        total += df[i]
    for i in range(k - 1):
        v = od[i]
        inside = 0
        for j in range(ip[v], ip[v + 1]):
            if mark[ix[j]]:
                inside += 1
        cut += (ip[v + 1] - ip[v]) - 2 * inside
        mark[v] = 1
        vol += df[v]
        denom = vol if vol < total - vol else total - vol
        if denom <= 0:
            continue
        if best_den == 0 or cut * best_den < best_cut * denom:
            best_cut = cut
            best_den = denom
            best_size = i + 1
    return best_size, best_cut, best_den


def exact_min_cut(adj_masks, deg_full):
    """Minimum-conductance cut over all nonempty proper subsets (k <= 30).

    Returns ``(mask, cut, denom)``; the mask never contains the last node.
    """
    cdef const uint64_t[:] adj = np.ascontiguousarray(adj_masks, dtype=np.uint64)
    cdef const int64_t[:] df = np.ascontiguousarray(deg_full, dtype=np.int64)
    cdef int k = adj.shape[0]
    cdef int v
    cdef uint64_t s = 0, gray, prev = 0, bit, limit
    cdef int64_t total = 0, vol = 0, cut = 0, denom
    cdef int64_t best_cut = 0, best_den = 0
    cdef uint64_t best_mask = 0
    cdef uint64_t it
    if k < 2:
        raise ValueError("need at least two nodes")
    if k > 30:
        raise ValueError("exact enumeration capped at 30 nodes")
    for v in range(k):
        total += df[v]
    limit = (<uint64_t>1) << (k - 1)
    for it in range(1, limit):
        gray = it ^ (it >> 1)
        bit = gray ^ prev
        v = 0
        while (bit >> v) != 1:
            v += 1
        if gray & bit:
            cut += _popcount(adj[v]) - 2 * _popcount(adj[v] & prev)
            vol += df[v]
        else:
            cut -= _popcount(adj[v]) - 2 * _popcount(adj[v] & gray)
            vol -= df[v]
        prev = gray
        denom = vol if vol < total - vol else total - vol
        if denom <= 0:
            continue
        if best_den == 0 or cut * best_den < best_cut * denom:
            best_cut = cut
            best_den = denom
            best_mask = gray
    return int(best_mask), best_cut, best_den
