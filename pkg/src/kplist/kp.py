"""K_p listing for p >= 5: prune, decompose, list per cluster, defer bad edges, repeat."""

from __future__ import annotations

import math

import numpy as np

from .config import Config
from .congest import RoundLedger, exhaustive_learn_many, local_exchange_counts
from .decomp import decompose
from .errors import InputError, InvariantFailure, NonTermination
from .framework import (
    ClaimLog,
    RunResult,
    handle_small_clusters,
    is_low_average,
    iteration_bound,
    prune_low_degree,
    run_constants,
    shrink_check,
)
from .graph import Graph
from .sparse import ListingInstance, list_all


def classify_outside(h: Graph, members: np.ndarray, n: int, p: int) -> tuple[set[int], set[int], set[int]]:
    """Light outside nodes ``S*``, heavy outside nodes, and bad cluster nodes ``S_C``.

    An outside node with at least one cluster neighbour is light when its
    cluster degree is below its outside degree divided by ``n^(1-2/p)``; a
    cluster node is bad when it has more than ``n^(1-2/p)`` light neighbours.
    """
    thr = n ** (1 - 2 / p)
    inside = np.zeros(h.n, dtype=bool)
    inside[members] = True
    deg_c = np.zeros(h.n, dtype=np.int64)
    e = h.edges
    cross = inside[e[:, 0]] != inside[e[:, 1]]
    outer_end = np.where(inside[e[cross, 0]], e[cross, 1], e[cross, 0])
    np.add.at(deg_c, outer_end, 1)
    light, heavy = set(), set()
    for u in np.flatnonzero(deg_c > 0).tolist():
        deg_out = int(h.degree[u]) - int(deg_c[u])
        (light if deg_c[u] < deg_out / thr else heavy).add(u)
    bad = set()
    light_mask = np.zeros(h.n, dtype=bool)
    light_mask[list(light)] = True
    for v in members.tolist():
        if int(light_mask[h.adjacency(v)].sum()) > thr:
            bad.add(v)
    return light, heavy, bad


def gather_cross_edges(
    h: Graph,
    members: np.ndarray,
    light: set[int],
    heavy: set[int],
    bad: set[int],
    n: int,
    p: int,
    ledger: RoundLedger,
    B: int,
    label: str = "kp.gather",
) -> tuple[dict[int, set], set, set]:
    """Deliver outside edges to the cluster; returns holdings, ``E'`` and ``E_bar``.

    Heavy nodes split their outside edges evenly over their cluster
    neighbours, at most ``ceil(n^(1-2/p))`` per neighbour; good cluster nodes learn the
    edges among their light neighbours.
    """
    thr = n ** (1 - 2 / p)
    inside = np.zeros(h.n, dtype=bool)
    inside[members] = True
    holdings: dict[int, set] = {}
    src, dst, cnt = [], [], []
    for u in sorted(heavy):
        nb = h.adjacency(u)
        c_nb = nb[inside[nb]].tolist()
        out_edges = [(min(u, x), max(u, x)) for x in nb[~inside[nb]].tolist()]
        pieces = np.array_split(np.arange(len(out_edges)), len(c_nb))
        if max(len(q) for q in pieces) > math.ceil(thr):
            raise InvariantFailure(f"heavy node {u} cannot split its edges into chunks of {math.ceil(thr)}")
        for w, piece in zip(c_nb, pieces):
            if len(piece) == 0:
                continue
            holdings.setdefault(w, set()).update(out_edges[i] for i in piece.tolist())
            src.append(u)
            dst.append(w)
            cnt.append(len(piece))
    local_exchange_counts(None, src, dst, cnt, label, ledger, B)
    light_arr = np.zeros(h.n, dtype=bool)
    light_arr[list(light)] = True
    targets = {}
    for v in members.tolist():
        if v in bad:
            continue
        nb = h.adjacency(v)
        t = nb[light_arr[nb]].tolist()
        if t:
            targets[v] = t
    learned = exhaustive_learn_many(h, targets, label, ledger, B)
    for v, edges in learned.items():
        if edges:
            holdings.setdefault(v, set()).update(edges)
    e_prime = set().union(*holdings.values()) if holdings else set()
    e = h.edges
    cross = inside[e[:, 0]] != inside[e[:, 1]]
    e_bar = set(map(tuple, e[cross].tolist()))
    return holdings, e_prime, e_bar


def _intra_edges(h: Graph, members: np.ndarray) -> set:
    inside = np.zeros(h.n, dtype=bool)
    inside[members] = True
    e = h.edges
    return set(map(tuple, e[inside[e[:, 0]] & inside[e[:, 1]]].tolist()))


def run(g: Graph, p: int, seed: int = 0, config: Config | None = None) -> RunResult:
    """List every p-clique of ``g`` (p >= 5) with round accounting and claim checks."""
    if p < 5:
        raise InputError("this driver needs p >= 5; use the K4 driver for p = 4")
    cfg = (config or Config()).with_(p=p)
    n = g.n
    ledger = RoundLedger(constants=run_constants(cfg, n))
    claims = ClaimLog(strict=cfg.strict_claims)
    found: set[tuple[int, ...]] = set()
    history: list[dict] = []
    h = g
    limit = iteration_bound(g.m)
    it = 0
    while h.m > 0:
        it += 1
        if it > limit:
            raise NonTermination(f"more than {limit} iterations", history)
        rec = {"iteration": it, "nodes_before": len(h.active_nodes()), "edges_before": h.m}
        nodes_before, edges_before = rec["nodes_before"], h.m

        got, h, pruned, mu = prune_low_degree(h, n, p, ledger, claims, it, "kp.prune", cfg.B)
        found |= got
        rec.update(mu=mu, pruned=len(pruned))
        if h.m == 0:
            rec.update(shrink_check(claims, it, nodes_before, edges_before, h))
            history.append(rec)
            break

        active = h.active_nodes()
        clustering = decompose(h, cfg.phi_for(n), seed + it, cfg, nodes=active)
        ledger.charge("kp.decomp", clustering.charged_rounds)
        rec.update(clusters=len(clustering.clusters), inter_edges=len(clustering.inter_edges))

        got, h, large = handle_small_clusters(h, clustering, n, p, cfg.beta, ledger, claims, it, "kp.small", cfg.B)
        found |= got
        rec["large"] = len(large)
        got, h_next, info = _large_clusters(h, large, n, p, cfg, seed + it, ledger, claims, it, mu, edges_before)
        found |= got
        rec.update(info)
        rec.update(shrink_check(claims, it, nodes_before, edges_before, h_next))
        history.append(rec)
        h = h_next
    return RunResult(found, ledger, claims, history)


def _large_clusters(h, large, n, p, cfg, seed, ledger, claims, it, mu, edges_start):
    found: set[tuple[int, ...]] = set()
    removed: set = set()
    s_sq = 0
    low_edges = 0
    eligible = 0
    children = []
    gather_children = []
    for idx, members in enumerate(large):
        light, heavy, bad = classify_outside(h, members, n, p)
        s_sq += len(bad) ** 2
        sub = ledger.fork()
        holdings, e_prime, e_bar = gather_cross_edges(h, members, light, heavy, bad, n, p, sub, cfg.B)
        gather_children.append((np.concatenate([members, np.array(sorted(light | heavy), dtype=np.int64)]), sub))
        e_c = _intra_edges(h, members)
        if is_low_average(len(e_c), len(members), len(e_prime), n, cfg):
            low_edges += len(e_c)
            continue
        eligible += 1
        inst = ListingInstance(n, members, e_c, e_bar, e_prime, holdings, p, cfg)
        child = ledger.fork()
        child.charge("kp.defer", math.ceil(cfg.kappa_route_for(n)))
        res = list_all(inst, seed * 1009 + idx, child, precondition="full")
        if res.precondition_ok is False:
            raise InvariantFailure(f"cluster {idx} passed the low-average test but fails the average-degree check")
        children.append((members, child))
        found |= res.cliques
        bad_arr = np.zeros(h.n, dtype=bool)
        bad_arr[list(bad)] = True
        for u, v in e_c:
            if not (bad_arr[u] and bad_arr[v]):
                removed.add((u, v))
    ledger.merge_parallel(gather_children)
    ledger.merge_parallel(children)
    if large:
        claims.check("bad_nodes_squared", it, s_sq, 4 / cfg.beta * edges_start)
    if mu >= math.sqrt(n):
        claims.check("low_average_edges", it, low_edges, (1 / cfg.gamma + 1 / cfg.gamma_prime) * edges_start)
    else:
        claims.skip("low_average_edges", it, "average degree below sqrt(n)")
    keep = [e for e in h.edge_list() if e not in removed]
    info = {"eligible": eligible, "low_average_edges": low_edges, "bad_sq": s_sq, "removed": len(removed)}
    return found, Graph(h.n, keep), info
