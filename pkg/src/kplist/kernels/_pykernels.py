"""Pure-Python versions of the compiled kernels (same signatures, same results)."""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def list_cliques(indptr, indices, p, labels=None, quota=None):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    if p < 1 or p > 64:
        raise ValueError("p must lie in [1, 64]")
    n = len(indptr) - 1
    fwd = [
        [int(w) for w in indices[indptr[v] : indptr[v + 1]] if w > v] for v in range(n)
    ]
    fwd_sets = [set(f) for f in fwd]
    constrained = labels is not None
    lab = [int(x) for x in labels] if constrained else None
    quo = [int(x) for x in quota] if constrained else None
    counts = [0] * (len(quo) if constrained else 1)
    out: list[int] = []
    chosen = [0] * p

    def extend(depth: int, pool: list[int]) -> None:
        for i, w in enumerate(pool):
            if constrained:
                if counts[lab[w]] >= quo[lab[w]]:
                    continue
                counts[lab[w]] += 1
            chosen[depth] = w
            if depth + 1 == p:
                out.extend(chosen)
            else:
                nw = fwd_sets[w]
                nxt = [x for x in pool[i + 1 :] if x in nw]
                if len(nxt) >= p - depth - 1:
                    extend(depth + 1, nxt)
            if constrained:
                counts[lab[w]] -= 1

    for v in range(n):
        if constrained:
            if counts[lab[v]] >= quo[lab[v]]:
                continue
            counts[lab[v]] += 1
        chosen[0] = v
        if p == 1:
            out.append(v)
        elif len(fwd[v]) >= p - 1:
            extend(1, fwd[v])
        if constrained:
            counts[lab[v]] -= 1
    return np.asarray(out, dtype=np.int64).reshape(-1, p)


def sweep_cut(order, indptr, indices, deg_full):
    order = [int(x) for x in order]
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    df = [int(x) for x in deg_full]
    k = len(order)
    total = sum(df)
    mark = [False] * k
    vol = cut = 0
    best = (0, 0, 0)
    for i in range(k - 1):
        v = order[i]
        nbrs = indices[indptr[v] : indptr[v + 1]]
        inside = sum(1 for w in nbrs if mark[w])
        cut += len(nbrs) - 2 * inside
        mark[v] = True
        vol += df[v]
        denom = min(vol, total - vol)
        if denom <= 0:
            continue
        if best[2] == 0 or cut * best[2] < best[1] * denom:
            best = (i + 1, cut, denom)
    return best


def exact_min_cut(adj_masks, deg_full):
    adj = [int(x) for x in adj_masks]
    df = [int(x) for x in deg_full]
    k = len(adj)
    if k < 2:
        raise ValueError("need at least two nodes")
    if k > 30:
        raise ValueError("exact enumeration capped at 30 nodes")
    total = sum(df)
    deg_in = [a.bit_count() if hasattr(a, "bit_count") else bin(a).count("1") for a in adj]
    prev = vol = cut = 0
    best_mask, best_cut, best_den = 0, 0, 0
    for it in range(1, 1 << (k - 1)):
        gray = it ^ (it >> 1)
        bit = gray ^ prev
        v = bit.bit_length() - 1
        if gray & bit:
            cut += deg_in[v] - 2 * bin(adj[v] & prev).count("1")
            vol += df[v]
        else:
            cut -= deg_in[v] - 2 * bin(adj[v] & gray).count("1")
            vol -= df[v]
        prev = gray
        denom = min(vol, total - vol)
        if denom <= 0:
            continue
        if best_den == 0 or cut * best_den < best_cut * denom:
            best_mask, best_cut, best_den = gray, cut, denom
    return best_mask, best_cut, best_den
