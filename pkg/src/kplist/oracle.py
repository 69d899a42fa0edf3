"""Brute-force ground truth for clique listing.

Deliberately independent of the compiled kernels: plain Python sets and a
degeneracy ordering.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from .errors import CapabilityError, InputError
from .graph import Graph

ORACLE_CAP = 4096
NAIVE_CAP = 25

Clique = tuple[int, ...]


def canonical(cliques: Iterable[Iterable[int]]) -> set[Clique]:
    return {tuple(sorted(int(x) for x in c)) for c in cliques}


def degeneracy_order(adj: dict[int, set[int]]) -> list[int]:
    deg = {v: len(nb) for v, nb in adj.items()}
    buckets: dict[int, set[int]] = {}
    for v, d in deg.items():
        buckets.setdefault(d, set()).add(v)
    order, removed = [], set()
    d = 0
    while len(order) < len(adj):
        while not buckets.get(d):
            d += 1
        v = min(buckets[d])
        buckets[d].discard(v)
        order.append(v)
        removed.add(v)
        for w in adj[v]:
            if w not in removed:
                buckets[deg[w]].discard(w)
                deg[w] -= 1
                buckets.setdefault(deg[w], set()).add(w)
        d = max(d - 1, 0)
    return order


def _cliques_in(adj: dict[int, set[int]], p: int) -> set[Clique]:
    order = degeneracy_order(adj)
    rank = {v: i for i, v in enumerate(order)}
    later = {v: {w for w in adj[v] if rank[w] > rank[v]} for v in adj}
    out: set[Clique] = set()

    def grow(chosen: list[int], cand: set[int]) -> None:
        if len(chosen) == p:
            out.add(tuple(sorted(chosen)))
            return
        if len(chosen) + len(cand) < p:
            return
        for w in sorted(cand):
            grow(chosen + [w], cand & later[w])

    for v in order:
        grow([v], set(later[v]))
    return out


def _adjacency(edges: Iterable[tuple[int, int]]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        if u == v:
            continue
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def enumerate_cliques(g: Graph, p: int, cap: int = ORACLE_CAP) -> set[Clique]:
    """Every p-clique of ``g`` as a sorted tuple."""
    if p < 1:
        raise InputError("p must be positive")
    if g.n > cap:
        raise CapabilityError(f"oracle capped at {cap} nodes")
    if p == 1:
        return {(v,) for v in range(g.n)}
    return _cliques_in(_adjacency(g.edge_list()), p)


def naive_cliques(g: Graph, p: int) -> set[Clique]:
    """Try every p-subset; a check on the oracle itself for tiny graphs."""
    if g.n > NAIVE_CAP:
        raise CapabilityError(f"naive enumeration capped at {NAIVE_CAP} nodes")
    es = g.edge_set
    return {
        c
        for c in itertools.combinations(range(g.n), p)
        if all((u, v) in es for u, v in itertools.combinations(c, 2))
    }


def _norm(edges) -> set[tuple[int, int]]:
    return {(u, v) if u < v else (v, u) for u, v in edges}


def qualifying_cliques(inst, p_prime: int, cap: int = ORACLE_CAP) -> set[Clique]:
    """p-cliques with ``p_prime`` nodes in the cluster meeting the three edge conditions.

    ``inst`` needs ``members``, ``e_c``, ``e_bar``, ``e_prime`` (real edges
    only) and ``p``. Inside nodes must be pairwise joined in ``e_c``,
    inside-outside pairs in ``e_bar`` and outside pairs in ``e_prime``.
    """
    p = inst.p
    if not 2 <= p_prime <= p:
        raise InputError("p_prime must lie in [2, p]")
    inside = set(int(x) for x in inst.members)
    if len(inside) > cap:
        raise CapabilityError(f"oracle capped at {cap} nodes")
    e_c, e_bar, e_pr = _norm(inst.e_c), _norm(inst.e_bar), _norm(inst.e_prime)
    adj_c = _adjacency(e for e in e_c if e[0] in inside and e[1] in inside)
    cores = _cliques_in(adj_c, p_prime) if p_prime > 1 else set()
    q = p - p_prime
    if q == 0:
        return cores
    bar_nb: dict[int, set[int]] = {}
    for u, v in e_bar:
        if u in inside and v not in inside:
            bar_nb.setdefault(u, set()).add(v)
        elif v in inside and u not in inside:
            bar_nb.setdefault(v, set()).add(u)
    adj_out = _adjacency(e for e in e_pr if e[0] not in inside and e[1] not in inside)
    out: set[Clique] = set()
    for core in cores:
        common = set.intersection(*(bar_nb.get(v, set()) for v in core))
        if len(common) < q:
            continue
        if q == 1:
            out.update(tuple(sorted(core + (w,))) for w in common)
            continue
        sub = {w: adj_out.get(w, set()) & common for w in common}
        for tail in _cliques_in(sub, q):
            out.add(tuple(sorted(core + tail)))
    return out


def qualifying_all(inst, cap: int = ORACLE_CAP) -> set[Clique]:
    out: set[Clique] = set()
    for pp in range(2, inst.p + 1):
        out |= qualifying_cliques(inst, pp, cap)
    return out


def conductance_by_enumeration(view) -> tuple:
    """Minimum cut conductance by trying every subset with plain fractions."""
    from fractions import Fraction

    from .graph import EXACT_CONDUCTANCE_CAP

    if view.k > EXACT_CONDUCTANCE_CAP:
        raise CapabilityError("enumeration capped at 20 nodes")
    members = view.members.tolist()
    nbrs = {v: view.parent.neighbor_sets[v] & set(members) for v in members}
    deg = dict(zip(members, view.view_degree.tolist()))
    total = sum(deg.values())
    best = None
    for r in range(1, len(members)):
        for side in itertools.combinations(members, r):
            s = set(side)
            vs = sum(deg[v] for v in s)
            den = min(vs, total - vs)
            if den == 0:
                continue
            cut = sum(len(nbrs[v] - s) for v in s)
            val = Fraction(cut, den)
            if best is None or val < best[0]:
                best = (val, side)
    return best
