"""K_4 listing.

Every surviving edge is covered by well-connected clusters: the top-level
decomposition plus repeated decompositions of whatever inter-cluster edges
remain. Each top cluster lists its own K_4s, then three exchanges between
pairs (top cluster ``C``, cover cluster ``C*``) deliver the outside edges
needed for the cross-cluster ones.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import Config
from .congest import RoundLedger, local_exchange_counts
from .decomp import decompose
from .errors import InvariantFailure, NonTermination
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

Edge = tuple[int, int]
Clique = tuple[int, ...]
PHASES = ("prune", "small", "intra", "part1", "part2", "part3")


@dataclass
class CoverCluster:
    """One cluster of the cover with its own edge set, stored on the full id range."""

    index: int
    level: int
    members: np.ndarray
    graph: Graph

    @property
    def degree(self) -> np.ndarray:
        return self.graph.degree

    @cached_property
    def edge_set(self) -> set[Edge]:
        return set(self.graph.edge_list())

    @cached_property
    def mask(self) -> np.ndarray:
        out = np.zeros(self.graph.n, dtype=bool)
        out[self.members] = True
        return out


@dataclass
class Cover:
    """Top clusters, every cover cluster, and the edges no level managed to cover."""

    n: int
    clusters: list[CoverCluster]
    top: list[int]
    residual: set[Edge]
    levels: int
    owner: dict[Edge, int] = field(default_factory=dict)

    @property
    def level_of(self) -> dict[int, int]:
        return {c.index: c.level for c in self.clusters}

    def overlap(self) -> np.ndarray:
        """How many cover clusters each node belongs to."""
        cnt = np.zeros(self.n, dtype=np.int64)
        for c in self.clusters:
            cnt[c.members] += 1
        return cnt


def build_cover(
    h: Graph,
    config: Config | None = None,
    seed: int = 0,
    top: list[np.ndarray] | None = None,
    ledger: RoundLedger | None = None,
    label: str = "k4.cover",
) -> Cover:
    """Cover the edges of ``h`` by clusters from up to ``ceil(4 log2 n)`` decompositions.

    ``top`` gives the first-level clusters; without it ``h`` is decomposed
    and every multi-node cluster is taken. Each further level decomposes
    the edges left uncovered by the previous ones, stopping early when
    nothing is left or a level covers nothing.
    """
    cfg = config or Config()
    led = ledger if ledger is not None else RoundLedger()
    n = h.n
    phi = cfg.phi_for(n)
    if top is None:
        first = decompose(h, phi, seed, cfg, nodes=h.active_nodes())
        led.charge(label, first.charged_rounds)
        top = [c for c in first.clusters if len(c) >= 2]
    clusters: list[CoverCluster] = []
    owner: dict[Edge, int] = {}
    covered = np.zeros(h.m, dtype=bool)
    for members in top:
        c = CoverCluster(len(clusters), 1, np.asarray(members, dtype=np.int64), Graph(n, ()))
        inside = c.mask[h.edges[:, 0]] & c.mask[h.edges[:, 1]]
        covered |= inside
        c.graph = Graph(n, h.edges[inside])
        clusters.append(c)
    top_ids = [c.index for c in clusters]
    pending = h.edges[~covered]
    limit = math.ceil(4 * math.log2(max(n, 2)))
    level = 1
    while len(pending) and level < limit:
        level += 1
        gl = Graph(n, pending)
        dec = decompose(gl, phi, seed + 7919 * level, cfg, nodes=gl.active_nodes())
        led.charge(label, dec.charged_rounds)
        hit = np.zeros(len(gl.edges), dtype=bool)
        for members in dec.clusters:
            if len(members) < 2:
                continue
            mask = np.zeros(n, dtype=bool)
            mask[members] = True
            inside = mask[gl.edges[:, 0]] & mask[gl.edges[:, 1]]
            if not inside.any():
                continue
            hit |= inside
            clusters.append(CoverCluster(len(clusters), level, np.asarray(members, dtype=np.int64), Graph(n, gl.edges[inside])))
        if not hit.any():
            break
        pending = gl.edges[~hit]
    for c in clusters:
        for e in c.edge_set:
            owner[e] = c.index
    cover = Cover(n, clusters, top_ids, set(map(tuple, pending.tolist())), level, owner)
    worst = int(cover.overlap().max(initial=0))
    if worst > cover.levels:
        raise InvariantFailure(f"a node lies in {worst} cover clusters but there are only {cover.levels} levels")
    return cover


def cover_from_parts(h: Graph, top: list, extra: list = ()) -> Cover:
    """A hand-made cover: ``top`` member lists take their induced edges, ``extra`` are ``(members, edges)`` at level 2."""
    n = h.n
    clusters = []
    for members in top:
        members = np.asarray(sorted(members), dtype=np.int64)
        mask = np.zeros(n, dtype=bool)
        mask[members] = True
        clusters.append(CoverCluster(len(clusters), 1, members, Graph(n, h.edges[mask[h.edges[:, 0]] & mask[h.edges[:, 1]]])))
    for members, edges in extra:
        clusters.append(CoverCluster(len(clusters), 2, np.asarray(sorted(members), dtype=np.int64), Graph(n, edges)))
    owner = {e: c.index for c in clusters for e in c.edge_set}
    residual = set(h.edge_list()) - set(owner)
    return Cover(n, clusters, list(range(len(top))), residual, 2 if extra else 1, owner)


def _count_into(h: Graph, mask: np.ndarray) -> np.ndarray:
    """Per node, the number of its neighbours inside ``mask``."""
    e = h.edges
    out = np.zeros(h.n, dtype=np.int64)
    np.add.at(out, e[:, 0], mask[e[:, 1]].astype(np.int64))
    np.add.at(out, e[:, 1], mask[e[:, 0]].astype(np.int64))
    return out


def cross_sets(h: Graph, c: CoverCluster, cstar: CoverCluster, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``(S*, S_bad)`` for the pair: light nodes of ``C*`` seen from ``C``, and the nodes of ``C`` with many of them.

    A node of ``C*`` outside ``C`` is light when it has at least one
    neighbour in ``C`` and fewer than ``deg_{C*}(u) / sqrt(n)`` of them. A
    node of ``C`` outside ``C*`` is bad when more than ``sqrt(n)`` of its
    neighbours are light.
    """
    n = h.n if n is None else n
    root = math.sqrt(n)
    deg_c = _count_into(h, c.mask)
    light = cstar.mask & ~c.mask & (deg_c >= 1) & (deg_c * root < cstar.degree)
    deg_light = _count_into(h, light)
    bad = c.mask & ~cstar.mask & (deg_light > root)
    return np.flatnonzero(light), np.flatnonzero(bad)


class _Pairs:
    def __init__(self, h: Graph, cover: Cover):
        self.h = h
        self.cover = cover
        self._cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def __call__(self, ci: int, cj: int) -> tuple[np.ndarray, np.ndarray]:
        key = (ci, cj)
        if key not in self._cache:
            cl = self.cover.clusters
            self._cache[key] = cross_sets(self.h, cl[ci], cl[cj])
        return self._cache[key]


def canonical_case(clique: Clique, cover: Cover, tops: list[int], pairs: _Pairs) -> str | None:
    """The phase responsible for ``clique`` under the case split, or ``None`` if no listed top cluster owns it."""
    for ci in tops:
        c = cover.clusters[ci]
        inside = [v for v in clique if c.mask[v]]
        if len(inside) == 4:
            return "intra"
        if len(inside) == 3:
            return "part1"
        if len(inside) != 2:
            continue
        v3, v4 = (v for v in clique if not c.mask[v])
        cj = cover.owner.get((v3, v4))
        if cj is None:
            continue
        light, bad = pairs(ci, cj)
        if v3 not in light or v4 not in light:
            return "part1"
        if inside[0] not in bad or inside[1] not in bad:
            return "part2"
        return "part3"
    return None


def _crossing(h: Graph, mask: np.ndarray) -> set[Edge]:
    e = h.edges
    return set(map(tuple, e[mask[e[:, 0]] != mask[e[:, 1]]].tolist()))


@dataclass
class _IterationState:
    found: dict[Clique, set[str]] = field(default_factory=dict)
    deferred: set[int] = field(default_factory=set)

    def record(self, cliques, phase: str) -> None:
        for c in cliques:
            self.found.setdefault(c, set()).add(phase)


def _listing_round(
    h: Graph,
    cover: Cover,
    candidates: list[int],
    holdings: dict[int, dict[int, set[Edge]]],
    phase: str,
    cfg: Config,
    seed: int,
    ledger: RoundLedger,
    state: _IterationState,
) -> int:
    """Low-average test and listing for each candidate top cluster; returns the deferred edge count."""
    n = h.n
    ledger.charge(f"k4.{phase}", math.ceil(cfg.kappa_route_for(n)))
    low_edges = 0
    children = []
    for ci in candidates:
        c = cover.clusters[ci]
        hold = holdings.get(ci, {})
        e_prime = set().union(*hold.values()) if hold else set()
        if is_low_average(c.graph.m, len(c.members), len(e_prime), n, cfg):
            state.deferred.add(ci)
            low_edges += c.graph.m
            continue
        inst = ListingInstance(n, c.members, c.edge_set, _crossing(h, c.mask), e_prime, hold, 4, cfg)
        child = ledger.fork()
        res = list_all(inst, seed * 1009 + ci, child, precondition="full", prefix=f"k4.{phase}.")
        if res.precondition_ok is False:
            raise InvariantFailure(f"cluster {ci} passed the low-average test but fails the average-degree check")
        state.record(res.cliques, phase)
        children.append((c.members, child))
    ledger.merge_parallel(children)
    return low_edges


def _part1(h, cover, pairs, candidates, cfg, seed, ledger, state) -> int:
    n = h.n
    chunk_cap = math.ceil(math.sqrt(n))
    holdings: dict[int, dict[int, set[Edge]]] = {}
    traffic: Counter = Counter()
    for ci in candidates:
        c = cover.clusters[ci]
        deg_c = _count_into(h, c.mask)
        hold = holdings.setdefault(ci, {})
        for cs in cover.clusters:
            if cs.index == ci:
                continue
            light, _ = pairs(ci, cs.index)
            send = cs.mask & ~c.mask & (deg_c >= 1)
            send[light] = False
            for u in np.flatnonzero(send).tolist():
                nb = cs.graph.adjacency(u)
                nb = nb[~c.mask[nb]]
                if len(nb) == 0:
                    continue
                out = [(min(u, x), max(u, x)) for x in nb.tolist()]
                hn = h.adjacency(u)
                c_nb = hn[c.mask[hn]].tolist()
                pieces = np.array_split(np.arange(len(out)), len(c_nb))
                if max(len(q) for q in pieces) > chunk_cap:
                    raise InvariantFailure(f"node {u} of cover cluster {cs.index} needs chunks above {chunk_cap}")
                for w, piece in zip(c_nb, pieces):
                    if len(piece):
                        hold.setdefault(w, set()).update(out[i] for i in piece.tolist())
                        traffic[(u, w)] += len(piece)
    _charge(traffic, "k4.part1", ledger, cfg.B)
    return _listing_round(h, cover, candidates, holdings, "part1", cfg, seed, ledger, state)


def _part2(h, cover, pairs, candidates, cfg, seed, ledger, state) -> int:
    holdings: dict[int, dict[int, set[Edge]]] = {}
    ask: Counter = Counter()
    for ci in candidates:
        c = cover.clusters[ci]
        hold = holdings.setdefault(ci, {})
        for cs in cover.clusters:
            if cs.index == ci:
                continue
            light, bad = pairs(ci, cs.index)
            if len(light) == 0:
                continue
            light_mask = np.zeros(h.n, dtype=bool)
            light_mask[light] = True
            learners = c.mask.copy()
            learners[bad] = False
            nbs_of = cs.graph.neighbor_sets
            for u in np.flatnonzero(learners).tolist():
                nb = h.adjacency(u)
                t = set(nb[light_mask[nb]].tolist())
                if not t:
                    continue
                for x in t:
                    ask[(u, x)] += len(t)
                got = {(x, y) for x in t for y in nbs_of[x] & t if x < y}
                if got:
                    hold.setdefault(u, set()).update(got)
    _charge(ask, "k4.part2", ledger, cfg.B)
    _charge(Counter({(x, u): k for (u, x), k in ask.items()}), "k4.part2", ledger, cfg.B)
    return _listing_round(h, cover, candidates, holdings, "part2", cfg, seed, ledger, state)


def _part3(h, cover, pairs, sources, cfg, seed, ledger, claims, it, state) -> None:
    n = h.n
    root = math.sqrt(n)
    hold: dict[int, dict[int, set[Edge]]] = {}
    bar: dict[int, set[Edge]] = {}
    received: dict[int, Counter] = {}
    worst_bad: Counter = Counter()
    for ci in sources:
        for cs in cover.clusters:
            if cs.index == ci:
                continue
            light, bad = pairs(ci, cs.index)
            if len(bad) == 0:
                continue
            worst_bad[cs.index] = max(worst_bad[cs.index], len(bad))
            light_mask = np.zeros(n, dtype=bool)
            light_mask[light] = True
            bad_mask = np.zeros(n, dtype=bool)
            bad_mask[bad] = True
            traffic: Counter = Counter()
            for u in bad.tolist():
                nb = h.adjacency(u)
                dests = nb[light_mask[nb]].tolist()
                bar.setdefault(cs.index, set()).update((min(u, x), max(u, x)) for x in dests)
                inner = nb[bad_mask[nb]].tolist()
                if not inner:
                    continue
                edges = [(min(u, v), max(u, v)) for v in inner]
                for x, piece in zip(dests, np.array_split(np.arange(len(edges)), len(dests))):
                    if len(piece):
                        hold.setdefault(cs.index, {}).setdefault(x, set()).update(edges[i] for i in piece.tolist())
                        traffic[(u, x)] += len(piece)
                        received.setdefault(cs.index, Counter())[x] += len(piece)
            _charge(traffic, f"k4.part3[C={ci},C*={cs.index}]", ledger, cfg.B)
    children = []
    for cj in sorted(bar):
        cs = cover.clusters[cj]
        e_bar = bar[cj]
        bar_count = Counter(u if cs.mask[u] else v for u, v in e_bar)
        deg = cs.degree
        w = max(bar_count, key=lambda v: (bar_count[v] / max(deg[v], 1), -v))
        claims.check(
            "crossing_incidence", it, bar_count[w], cfg.crossing_incidence_const * deg[w],
            detail=f"C*={cj} node={w}",
        )
        recv = received.get(cj, Counter())
        if recv:
            w = max(recv, key=lambda v: (recv[v] / max(deg[v], 1), -v))
            claims.check(
                "received_volume", it, recv[w], cfg.received_volume_const * root * deg[w],
                detail=f"C*={cj} node={w}",
            )
        avg = cs.graph.m / len(cs.members)
        claims.check(
            "cover_average_degree", it, cfg.cover_degree_const * worst_bad[cj], avg, detail=f"C*={cj}"
        )
        w = min(bar_count, key=lambda v: (deg[v], v))
        claims.check("crossing_node_degree", it, root, deg[w], detail=f"C*={cj} node={w}")
        mine = hold.get(cj, {})
        e_prime = set().union(*mine.values()) if mine else set()
        inst = ListingInstance(n, cs.members, cs.edge_set, e_bar, e_prime, mine, 4, cfg, check_caps=False)
        child = ledger.fork()
        res = list_all(inst, seed * 1013 + cj, child, precondition="restricted", prefix="k4.part3.")
        state.record(res.cliques, "part3")
        children.append((cs.members, child))
    ledger.merge_parallel(children)


def _charge(traffic: Counter, label: str, ledger: RoundLedger, B: int) -> None:
    if not traffic:
        return
    keys = sorted(traffic)
    local_exchange_counts(
        None, [k[0] for k in keys], [k[1] for k in keys], [traffic[k] for k in keys], label, ledger, B
    )


def _residual_guard(h: Graph, residual: set[Edge], ledger: RoundLedger, B: int) -> np.ndarray:
    """Nodes that see an uncovered edge between two of their neighbours.

    Each endpoint of an uncovered edge tells all its neighbours about it;
    a flagged node keeps its cluster edges for the next iteration.
    """
    flagged = np.zeros(h.n, dtype=bool)
    if not residual:
        return flagged
    deg_r = Counter()
    for u, v in residual:
        deg_r[u] += 1
        deg_r[v] += 1
    traffic = Counter()
    for x, k in deg_r.items():
        for w in h.adjacency(x).tolist():
            traffic[(x, w)] += k
    _charge(traffic, "k4.cover", ledger, B)
    nbs = h.neighbor_sets
    for v in range(h.n):
        nv = nbs[v]
        if any(a in nv and b in nv for a, b in residual):
            flagged[v] = True
    return flagged


def cross_cluster_listing(
    h: Graph,
    cover: Cover,
    cfg: Config | None = None,
    seed: int = 0,
    ledger: RoundLedger | None = None,
    claims: ClaimLog | None = None,
    it: int = 1,
    mu: float = 0.0,
    edges_start: int | None = None,
) -> tuple[dict[Clique, set[str]], Graph, dict]:
    """Intra listing plus the three exchanges on a built cover.

    Returns the cliques with the phases that found them, the graph left for
    the next iteration and a summary.
    """
    cfg = (cfg or Config()).with_(p=4)
    ledger = ledger if ledger is not None else RoundLedger()
    claims = claims if claims is not None else ClaimLog(cfg.strict_claims)
    edges_start = h.m if edges_start is None else edges_start
    n = h.n
    state = _IterationState()
    pairs = _Pairs(h, cover)
    tops = list(cover.top)

    children = []
    for ci in tops:
        c = cover.clusters[ci]
        inst = ListingInstance(n, c.members, c.edge_set, set(), set(), {}, 4, cfg)
        child = ledger.fork()
        res = list_all(inst, seed * 1009 + ci, child, precondition="unchecked", prefix="k4.intra.")
        state.record(res.cliques, "intra")
        children.append((c.members, child))
    ledger.merge_parallel(children)

    low = _part1(h, cover, pairs, tops, cfg, seed, ledger, state)
    alive = [ci for ci in tops if ci not in state.deferred]
    low += _part2(h, cover, pairs, alive, cfg, seed, ledger, state)
    alive = [ci for ci in tops if ci not in state.deferred]
    _part3(h, cover, pairs, alive, cfg, seed, ledger, claims, it, state)

    if mu >= math.sqrt(n):
        claims.check("low_average_edges", it, low, (1 / cfg.gamma + 1 / cfg.gamma_prime) * edges_start)
    else:
        claims.skip("low_average_edges", it, "average degree below sqrt(n)")

    mismatched = 0
    for clique, phases in state.found.items():
        case = canonical_case(clique, cover, alive, pairs)
        if case is not None and case not in phases:
            mismatched += 1
    claims.check("case_attribution", it, mismatched, 0, detail=f"{len(state.found)} cliques")

    flagged = _residual_guard(h, cover.residual, ledger, cfg.B)
    removed: set[Edge] = set()
    for ci in alive:
        for u, v in cover.clusters[ci].edge_set:
            if not (flagged[u] or flagged[v]):
                removed.add((u, v))
    info = {
        "top": len(tops),
        "cover_clusters": len(cover.clusters),
        "cover_levels": cover.levels,
        "residual": len(cover.residual),
        "deferred": len(state.deferred),
        "low_average_edges": low,
        "removed": len(removed),
    }
    return state.found, h.without_edges(removed), info


def run(g: Graph, seed: int = 0, config: Config | None = None) -> RunResult:
    """List every 4-clique of ``g`` with round accounting and claim checks."""
    cfg = (config or Config()).with_(p=4)
    p = 4
    n = g.n
    ledger = RoundLedger(constants=run_constants(cfg, n))
    claims = ClaimLog(strict=cfg.strict_claims)
    found: set[Clique] = set()
    tags: dict[Clique, str] = {}
    history: list[dict] = []

    def keep(cliques, phase):
        for c in cliques:
            found.add(c)
            tags.setdefault(c, phase)

    h = g
    limit = iteration_bound(g.m)
    it = 0
    while h.m > 0:
        it += 1
        if it > limit:
            raise NonTermination(f"more than {limit} iterations", history)
        nodes_before, edges_before = len(h.active_nodes()), h.m
        rec = {"iteration": it, "nodes_before": nodes_before, "edges_before": edges_before}

        got, h, pruned, mu = prune_low_degree(h, n, p, ledger, claims, it, "k4.prune", cfg.B)
        keep(got, "prune")
        rec.update(mu=mu, pruned=len(pruned))
        if h.m == 0:
            rec.update(shrink_check(claims, it, nodes_before, edges_before, h))
            history.append(rec)
            break

        clustering = decompose(h, cfg.phi_for(n), seed + it, cfg, nodes=h.active_nodes())
        ledger.charge("k4.decomp", clustering.charged_rounds)
        rec.update(clusters=len(clustering.clusters), inter_edges=len(clustering.inter_edges))
        got, h, large = handle_small_clusters(h, clustering, n, p, cfg.beta, ledger, claims, it, "k4.small", cfg.B)
        keep(got, "small")
        rec["large"] = len(large)

        h_next = h
        if large:
            claims.check("top_cluster_count", it, len(large), math.sqrt(n) / cfg.beta)
            cover = build_cover(h, cfg, seed + it, top=large, ledger=ledger)
            claims.check("cover_overlap", it, int(cover.overlap().max(initial=0)), cover.levels)
            by_phase, h_next, info = cross_cluster_listing(h, cover, cfg, seed + it, ledger, claims, it, mu, edges_before)
            for c, phases in by_phase.items():
                keep([c], next(ph for ph in PHASES if ph in phases))
            rec.update(info)
        rec.update(shrink_check(claims, it, nodes_before, edges_before, h_next))
        history.append(rec)
        h = h_next
    return RunResult(found, ledger, claims, history, tags)
