"""Sparsity-aware K_p listing inside one well-connected cluster.

A cluster ``C = (V_C, E_C)`` lists every p-clique that has ``p'`` >= 2 nodes
in ``V_C`` joined by ``E_C``, its remaining nodes outside joined to the
inside by ``e_bar`` and among themselves by ``e_prime``. The outside edges
arrive as per-node holdings. All communication goes through the routing
contract of :mod:`kplist.routing`.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .config import Config
from .congest import RoundLedger, exhaustive_learn_many
from .errors import InputError, InvariantFailure, ProtocolViolation, StatisticalFailure
from .graph import Graph
from .partition import (
    BoundsReport,
    PartitionSpec,
    TwoSidedPartition,
    hashed_choice,
    verify_bounds_edges,
)
from .routing import RoutingBatch, route

Edge = tuple[int, int]


def _norm(edges: Iterable) -> set[Edge]:
    return {(int(u), int(v)) if u < v else (int(v), int(u)) for u, v in edges}


def _edge_array(edges) -> np.ndarray:
    arr = np.array(sorted(edges), dtype=np.int64)
    return arr.reshape(-1, 2)


@dataclass
class ListingInstance:
    """One cluster's listing task.

    ``holdings`` maps cluster members to the outside edges they initially
    hold; an edge held twice is kept by its lowest-id holder.
    """

    n: int
    members: np.ndarray
    e_c: set[Edge]
    e_bar: set[Edge]
    e_prime: set[Edge]
    holdings: dict[int, set[Edge]]
    p: int
    config: Config = field(default_factory=Config)
    check_caps: bool = True

    def __post_init__(self):
        self.members = np.unique(np.asarray(list(self.members), dtype=np.int64))
        if self.p < 3:
            raise InputError("p must be at least 3")
        inside = np.zeros(self.n, dtype=bool)
        if len(self.members) and (self.members[0] < 0 or self.members[-1] >= self.n):
            raise InputError("cluster member outside 0..n-1")
        inside[self.members] = True
        self.inside = inside
        self.e_c = _norm(self.e_c)
        self.e_bar = _norm(self.e_bar)
        self.e_prime = _norm(self.e_prime)
        for u, v in self.e_c:
            if not (inside[u] and inside[v]):
                raise InputError(f"cluster edge {(u, v)} leaves the cluster")
        for u, v in self.e_bar:
            if inside[u] == inside[v]:
                raise InputError(f"edge {(u, v)} does not cross the cluster boundary")
        for u, v in self.e_prime:
            if inside[u] or inside[v]:
                raise InputError(f"outside edge {(u, v)} touches the cluster")
        held: dict[Edge, int] = {}
        for h in sorted(self.holdings):
            if not inside[h]:
                raise InputError(f"holder {h} is not a cluster member")
            for e in _norm(self.holdings[h]):
                held.setdefault(e, h)
        if set(held) != self.e_prime:
            raise InputError("holdings must cover exactly the outside edge set")
        self.holdings = {}
        for e, h in held.items():
            self.holdings.setdefault(h, set()).add(e)
        deg = Counter()
        for u, v in self.e_c:
            deg[u] += 1
            deg[v] += 1
        self.deg_c = np.zeros(self.n, dtype=np.int64)
        for v, d in deg.items():
            self.deg_c[v] = d
        bar = Counter()
        for u, v in self.e_bar:
            bar[u if inside[u] else v] += 1
        self.bar_count = bar
        if self.check_caps:
            self.check_invariants()

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def m(self) -> int:
        return len(self.e_c)

    @property
    def key(self) -> tuple:
        return tuple(self.members.tolist())

    def check_invariants(self) -> None:
        cfg = self.config
        poly = cfg.polylog(self.n)
        hold_unit = cfg.kappa_prime * self.n ** (1 - 2 / self.p) * poly
        for u in self.members.tolist():
            d = int(self.deg_c[u])
            if self.bar_count.get(u, 0) > cfg.kappa_bar * d * poly:
                raise ProtocolViolation(
                    f"node {u} is incident to {self.bar_count[u]} crossing edges, cap {cfg.kappa_bar * d * poly:.1f}"
                )
            if len(self.holdings.get(u, ())) > hold_unit * d:
                raise ProtocolViolation(f"node {u} holds {len(self.holdings[u])} outside edges, cap {hold_unit * d:.1f}")

    def qualifies(self, clique: Iterable[int]) -> bool:
        c = sorted(int(x) for x in clique)
        if len(c) != self.p or any(x >= self.n for x in c):
            return False
        if sum(1 for x in c if self.inside[x]) < 2:
            return False
        for u, v in itertools.combinations(c, 2):
            iu, iv = self.inside[u], self.inside[v]
            pool = self.e_c if iu and iv else self.e_prime if not (iu or iv) else self.e_bar
            if (u, v) not in pool:
                return False
        return True


@dataclass
class Classes:
    delta: Fraction
    k_v: dict[int, Fraction]
    vclass: dict[int, int]
    c_prime: np.ndarray
    helpers: dict[int, list[int]]
    rep: dict[int, int]


@dataclass
class Partitions:
    a: int
    b: int
    k_labels: dict[int, int]
    v_labels: dict[int, int]
    outside: np.ndarray
    report: BoundsReport
    attempts: int


@dataclass
class SparseResult:
    cliques: set[tuple[int, ...]]
    path: str
    dummies: int = 0
    precondition: str = "unchecked"
    precondition_ok: bool | None = None
    precondition_detail: dict = field(default_factory=dict)
    a: int | None = None
    b: int | None = None
    partitions: dict[int, Partitions] = field(default_factory=dict)
    per_pprime: dict[int, int] = field(default_factory=dict)
    max_load: float = 0.0
    tuple_check: dict = field(default_factory=dict)


def check_precondition(inst: ListingInstance, mode: str) -> tuple[bool | None, dict]:
    """Average-degree conditions, full or restricted to crossing-edge endpoints."""
    cfg = inst.config
    n = inst.n
    if mode == "unchecked":
        return None, {}
    k = max(inst.k, 1)
    avg = inst.m / k
    if mode == "full":
        need_a = cfg.avg_degree_const * len(inst.e_prime) / n
        need_b = cfg.avg_degree_const * math.sqrt(n)
        detail = {"avg": avg, "vs_outside": need_a, "vs_sqrt_n": need_b}
        return bool(avg >= need_a and avg >= need_b), detail
    if mode == "restricted":
        touched = sorted(inst.bar_count)
        need = cfg.avg_degree_const * math.sqrt(n)
        worst = min((int(inst.deg_c[u]) for u in touched), default=None)
        detail = {"min_deg_of_crossing_nodes": worst, "need": need}
        return bool(worst is None or worst >= need), detail
    raise InputError(f"unknown precondition mode {mode!r}")


def precheck_and_fallbacks(inst: ListingInstance) -> tuple[str, int]:
    """``("smallK", 0)`` when the cluster is tiny, else the path and number of dummy edges."""
    if inst.k < inst.n ** (1 - 2 / inst.p):
        return "smallK", 0
    dummies = inst.m if len(inst.e_prime) < inst.m else 0
    return ("padded" if dummies else "normal"), dummies


def _make_dummies(inst: ListingInstance, count: int) -> tuple[list[Edge], dict[Edge, int]]:
    # A matching on fresh virtual ids: it has no triangles and no crossing edges.
    edges, holder = [], {}
    for i, (u, _) in enumerate(sorted(inst.e_c)[:count]):
        e = (inst.n + 2 * i, inst.n + 2 * i + 1)
        edges.append(e)
        holder[e] = u
    return edges, holder


def compute_classes_and_helpers(inst: ListingInstance) -> Classes:
    k, m = inst.k, inst.m
    if k < 2 or m < 1:
        raise InputError("classes need at least two nodes and one cluster edge")
    ratio = Fraction(2 * m, k)
    t = ratio.numerator.bit_length() - ratio.denominator.bit_length()
    if Fraction(2) ** t > ratio:
        t -= 1
    if Fraction(2) ** (t + 1) <= ratio:
        t += 1
    delta = Fraction(2) ** t
    k_v, vclass = {}, {}
    for v in inst.members.tolist():
        kv = Fraction(int(inst.deg_c[v])) / delta
        k_v[v] = kv
        if kv < Fraction(1, 2):
            vclass[v] = 0
        else:
            i = kv.numerator.bit_length() - kv.denominator.bit_length()
            if Fraction(2) ** i > kv:
                i -= 1
            vclass[v] = i + 2
    c_prime = np.array([v for v in inst.members.tolist() if vclass[v] >= 1], dtype=np.int64)
    rest = [v for v in inst.members.tolist() if vclass[v] == 0]
    helpers: dict[int, list[int]] = {int(v): [] for v in c_prime}
    pos = 0
    for v in c_prime.tolist():
        cap = 2 ** (vclass[v] + 1)
        take = rest[pos : pos + cap]
        helpers[v].extend(take)
        pos += len(take)
        if pos >= len(rest):
            break
    if pos < len(rest):
        raise InvariantFailure("helper capacity of the high-class nodes does not cover the rest")
    rep = {int(v): int(v) for v in c_prime}
    for v, hs in helpers.items():
        for h in hs:
            rep[h] = v
    return Classes(delta, k_v, vclass, c_prime, helpers, rep)


def class_arithmetic(inst: ListingInstance, cl: Classes) -> dict:
    total_deg = int(inst.deg_c[inst.members].sum())
    cp_deg = int(inst.deg_c[cl.c_prime].sum())
    two_k = sum(2 * cl.k_v[v] for v in cl.c_prime.tolist())
    return {
        "sum_2kv": two_k,
        "k": inst.k,
        "cprime_deg": cp_deg,
        "total_deg": total_deg,
        "ok": two_k >= inst.k and 2 * cp_deg >= total_deg,
    }


class _Router:
    """Builds load-checked routing batches for one cluster and charges them."""

    def __init__(self, inst: ListingInstance, ledger: RoundLedger, prefix: str):
        self.inst = inst
        self.ledger = ledger
        self.prefix = prefix
        self.cap = inst.config.load_cap(inst.n, inst.p)
        self.max_load = 0.0

    def send(self, src: np.ndarray, dst: np.ndarray, label: str) -> None:
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        keep = src != dst
        src, dst = src[keep], dst[keep]
        inst = self.inst
        batch = RoutingBatch(inst.members, inst.deg_c[inst.members], 0.0, src, dst, key=inst.key)
        if len(src) == 0:
            return
        load = _fast_load(batch)
        if load > self.cap:
            raise ProtocolViolation(f"{label}: routing load {load:.2f} exceeds cap {self.cap:.2f}")
        batch.L = load
        self.max_load = max(self.max_load, load)
        route(batch, self.prefix + label, self.ledger, inst.n, inst.config, deliver=False)


def _fast_load(batch: RoutingBatch) -> float:
    sent, recv = batch.local_counts()
    worst = np.maximum(sent, recv)
    busy = worst > 0
    if np.any(busy & (batch.deg_c == 0)):
        v = int(batch.members[np.flatnonzero(busy & (batch.deg_c == 0))[0]])
        raise ProtocolViolation(f"node {v} has no cluster edges but must route messages")
    if not busy.any():
        return 0.0
    return float(np.max(worst[busy] / batch.deg_c[busy]))


def build_partitions(
    inst: ListingInstance,
    m_prime: int,
    outside: np.ndarray,
    seed: int,
    all_edges: np.ndarray,
    n_total: int,
) -> Partitions:
    """Choose a and b, split the cluster by hashing and the outside by a shared permutation."""
    k, m, p = inst.k, inst.m, inst.p
    b = max(2, round((k * m_prime / m) ** (1 / p)))
    a = max(2, round(math.sqrt(k) * b ** (1 - p / 2)))
    a = min(a, b)
    lg = math.log(inst.n)
    m1 = max(m, 20 * a * k * lg, 400 * a * a * lg * lg)
    m2 = max(m_prime, 20 * b * inst.n * lg, 400 * b * b * lg * lg)
    m12 = max(len(inst.e_bar), 20 * a * k * lg, 20 * a * inst.n * lg, 400 * a * a * lg * lg)
    spec = PartitionSpec(inst.members, outside, a, b, m1, m2, m12, inst.n)
    for attempt in range(inst.config.partition_retries):
        s = seed + attempt
        k_lab = hashed_choice(s, 0, inst.members, a)
        perm = np.random.default_rng(s).permutation(outside)
        v_lab = np.empty(len(outside), dtype=np.int64)
        for j, block in enumerate(np.array_split(np.arange(len(outside)), b)):
            v_lab[block] = j
        order = np.argsort(perm)
        two = TwoSidedPartition(inst.members, perm[order], k_lab, v_lab[order], a, b, s)
        report = verify_bounds_edges(all_edges, spec, two, n_total)
        if report.ok:
            return Partitions(
                a,
                b,
                dict(zip(inst.members.tolist(), k_lab.tolist())),
                dict(zip(two.V2.tolist(), two.labels2.tolist())),
                outside,
                report,
                attempt + 1,
            )
    raise StatisticalFailure(f"partition bounds failed {inst.config.partition_retries} times")


def reshuffle_targets(total: int, weights: Mapping[int, Fraction]) -> dict[int, int]:
    """Largest-remainder split of ``total`` proportional to ``weights`` (ties by id)."""
    nodes = sorted(weights)
    wsum = sum(weights.values())
    if total == 0 or wsum == 0:
        return {v: 0 for v in nodes}
    exact = {v: Fraction(total) * weights[v] / wsum for v in nodes}
    base = {v: math.floor(exact[v]) for v in nodes}
    left = total - sum(base.values())
    order = sorted(nodes, key=lambda v: (-(exact[v] - base[v]), v))
    for v in order[:left]:
        base[v] += 1
    return base


def reshuffle_Eprime(
    holdings: Mapping[int, list[Edge]],
    cl: Classes,
) -> tuple[dict[int, list[Edge]], np.ndarray, np.ndarray]:
    """Move outside edges so each high-class node holds its proportional share.

    Returns the new holdings and the (src, dst) arrays of moved edges.
    """
    total = sum(len(h) for h in holdings.values())
    weights = {int(v): cl.k_v[int(v)] for v in cl.c_prime.tolist()}
    target = reshuffle_targets(total, weights)
    new = {v: list(holdings.get(v, [])) for v in target}
    surplus: list[tuple[int, Edge]] = []
    for v in sorted(new):
        extra = len(new[v]) - target[v]
        if extra > 0:
            moved = new[v][target[v] :]
            del new[v][target[v] :]
            surplus.extend((v, e) for e in moved)
    src, dst = [], []
    it = iter(surplus)
    for v in sorted(new):
        need = target[v] - len(new[v])
        for _ in range(need):
            s, e = next(it)
            new[v].append(e)
            src.append(s)
            dst.append(v)
    return new, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)


def tuple_space(a: int, b: int, p: int, p_prime: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every multiset of p' cluster parts paired with a multiset of p-p' outside parts."""
    ks = list(itertools.combinations_with_replacement(range(a), p_prime))
    vs = list(itertools.combinations_with_replacement(range(b), p - p_prime))
    return [(x, y) for x in ks for y in vs]


def assign_tuples(tuples: list, cl: Classes) -> dict[int, list]:
    """Deal tuples to the high-class nodes in id order, each up to ``ceil(T k_v / sum k)``."""
    nodes = cl.c_prime.tolist()
    ksum = sum(cl.k_v[v] for v in nodes)
    T = len(tuples)
    out: dict[int, list] = {v: [] for v in nodes}
    pos = 0
    for v in nodes:
        quota = math.ceil(Fraction(T) * cl.k_v[v] / ksum)
        out[v] = tuples[pos : pos + quota]
        pos += quota
        if pos >= T:
            break
    if pos < T:
        raise InvariantFailure("tuple quotas do not cover the tuple space")
    return out


def _pairs_of(labels: tuple[int, ...]) -> list[tuple[int, int]]:
    cnt = Counter(labels)
    keys = sorted(cnt)
    out = []
    for i, x in enumerate(keys):
        if cnt[x] >= 2:
            out.append((x, x))
        for y in keys[i + 1 :]:
            out.append((x, y))
    return out


def list_for_pprime(
    inst: ListingInstance,
    p_prime: int,
    parts: Partitions,
    owner_of_tuple: dict[int, list],
    edges: np.ndarray,
    holder: np.ndarray,
    router: _Router,
) -> set[tuple[int, ...]]:
    """Ship each part-pair's edges to the owners that need them, then list locally.

    ``edges`` holds every known edge (cluster, crossing and outside, dummies
    included) with ``holder`` the high-class node that currently has it.
    """
    a, b = parts.a, parts.b
    nl = a + b
    max_id = int(edges.max()) + 1 if len(edges) else inst.n
    label = np.full(max(max_id, inst.n), -1, dtype=np.int64)
    for v, j in parts.k_labels.items():
        label[v] = j
    for v, j in parts.v_labels.items():
        label[v] = a + j
    lu, lv = label[edges[:, 0]], label[edges[:, 1]]
    lo, hi = np.minimum(lu, lv), np.maximum(lu, lv)
    key = lo * nl + hi
    order = np.argsort(key, kind="stable")
    skey = key[order]
    sedges = edges[order]
    sholder = holder[order]
    bounds = np.searchsorted(skey, np.arange(nl * nl + 1))

    def bucket(x: int, y: int) -> slice:
        kk = x * nl + y
        return slice(bounds[kk], bounds[kk + 1])

    dests: dict[int, set[int]] = {}
    for owner, tuples in owner_of_tuple.items():
        for ks, vs in tuples:
            labs = tuple(ks) + tuple(a + j for j in vs)
            for x, y in _pairs_of(labs):
                dests.setdefault(x * nl + y, set()).add(owner)
    src_parts, dst_parts = [], []
    for kk, owners in sorted(dests.items()):
        s = slice(bounds[kk], bounds[kk + 1])
        cnt = s.stop - s.start
        if cnt == 0:
            continue
        own = np.array(sorted(owners), dtype=np.int64)
        src_parts.append(np.repeat(sholder[s], len(own)))
        dst_parts.append(np.tile(own, cnt))
    if src_parts:
        router.send(np.concatenate(src_parts), np.concatenate(dst_parts), f"sl.list.p'={p_prime}")

    found: set[tuple[int, ...]] = set()
    for owner, tuples in owner_of_tuple.items():
        for ks, vs in tuples:
            labs = tuple(ks) + tuple(a + j for j in vs)
            chunks = [sedges[bucket(x, y)] for x, y in _pairs_of(labs)]
            chunks = [c for c in chunks if len(c)]
            if not chunks:
                continue
            local_edges = np.concatenate(chunks)
            nodes = np.unique(local_edges)
            idx = np.searchsorted(nodes, local_edges)
            quota_count = Counter(labs)
            distinct = sorted(quota_count)
            lab_local = np.searchsorted(np.array(distinct), label[nodes])
            quota = np.array([quota_count[x] for x in distinct], dtype=np.int64)
            g_local = Graph(len(nodes), idx)
            rows = kernels.list_cliques(g_local.indptr, g_local.indices, inst.p, lab_local, quota)
            for row in rows:
                found.add(tuple(sorted(nodes[row].tolist())))
    return found


def _small_k(inst: ListingInstance, ledger: RoundLedger, prefix: str) -> set[tuple[int, ...]]:
    comm = Graph(inst.n, list(inst.e_c | inst.e_bar))
    know = Graph(inst.n, list(inst.e_c | inst.e_bar | inst.e_prime))
    targets = {v: comm.adjacency(v).tolist() for v in inst.members.tolist()}
    learned = exhaustive_learn_many(comm, targets, prefix + "sl.fallback", ledger, inst.config.B, know)
    found: set[tuple[int, ...]] = set()
    for v, edges in learned.items():
        nb = np.array(sorted(targets[v]), dtype=np.int64)
        if len(nb) < inst.p - 1:
            continue
        idx = np.searchsorted(nb, np.array(sorted(edges), dtype=np.int64).reshape(-1, 2))
        local = Graph(len(nb), idx)
        for row in kernels.list_cliques(local.indptr, local.indices, inst.p - 1):
            c = tuple(sorted(nb[row].tolist() + [v]))
            if inst.qualifies(c):
                found.add(c)
    return found


def list_all(
    inst: ListingInstance,
    seed: int = 0,
    ledger: RoundLedger | None = None,
    precondition: str = "full",
    prefix: str = "",
) -> SparseResult:
    """Run every ``p' = 2..p`` and return the union of qualifying cliques found."""
    led = ledger if ledger is not None else RoundLedger()
    cfg = inst.config
    pre_ok, pre_detail = check_precondition(inst, precondition)
    path, ndummy = precheck_and_fallbacks(inst)
    result = SparseResult(set(), path, ndummy, precondition, pre_ok, pre_detail)
    if inst.m == 0:
        result.path = "empty"
        return result
    if path == "smallK":
        result.cliques = _small_k(inst, led, prefix)
        return result

    router = _Router(inst, led, prefix)
    n = inst.n
    # initialization: aggregate k, m, m' and delta, then absorb helpers
    led.charge(prefix + "sl.init", math.ceil(cfg.kappa_route_for(n)))
    cl = compute_classes_and_helpers(inst)
    arith = class_arithmetic(inst, cl)
    if not arith["ok"]:
        raise InvariantFailure(f"class arithmetic failed: {arith}")
    src, dst = [], []
    for v, hs in cl.helpers.items():
        for h in hs:
            c = int(inst.deg_c[h]) + inst.bar_count.get(h, 0) + len(inst.holdings.get(h, ()))
            src.extend([h] * c)
            dst.extend([v] * c)
    router.send(np.array(src), np.array(dst), "sl.init")

    dummy_edges, dummy_holder = _make_dummies(inst, ndummy)
    hold: dict[int, list[Edge]] = {}
    for h in sorted(inst.holdings):
        hold.setdefault(cl.rep[h], []).extend(sorted(inst.holdings[h]))
    for e in dummy_edges:
        hold.setdefault(cl.rep[dummy_holder[e]], []).append(e)
    m_prime = len(inst.e_prime) + len(dummy_edges)
    n_total = n + 2 * len(dummy_edges)
    outside = np.concatenate(
        [np.flatnonzero(~inst.inside), np.arange(n, n_total, dtype=np.int64)]
    )

    # reshuffle before partitioning so the holdings are balanced once
    new_hold, rs, rd = reshuffle_Eprime(hold, cl)
    router.send(rs, rd, "sl.reshuffle")
    for v in cl.c_prime.tolist():
        cap = 4 * Fraction(m_prime) * cl.k_v[v] / inst.k
        if len(new_hold.get(v, ())) > cap:
            raise InvariantFailure(f"node {v} holds more than its reshuffle cap")

    ec = _edge_array(inst.e_c)
    eb = _edge_array(inst.e_bar)
    ep_items = [(e, v) for v in sorted(new_hold) for e in new_hold[v]]
    ep = np.array([e for e, _ in ep_items], dtype=np.int64).reshape(-1, 2)
    rep_arr = np.zeros(n, dtype=np.int64)
    for v, r in cl.rep.items():
        rep_arr[v] = r
    inside_end = np.where(inst.inside[eb[:, 0]], eb[:, 0], eb[:, 1]) if len(eb) else np.empty(0, dtype=np.int64)
    edges = np.concatenate([ec, eb, ep])
    holder = np.concatenate(
        [rep_arr[ec[:, 0]], rep_arr[inside_end], np.array([v for _, v in ep_items], dtype=np.int64)]
    )

    parts = build_partitions(inst, m_prime, outside, seed, edges, n_total)
    led.charge(prefix + "sl.partition", 1, 2 * inst.m, 2 * inst.m)
    led.charge(
        prefix + "sl.partition",
        math.ceil(math.sqrt(n)) * math.ceil(math.log2(max(len(cl.c_prime), 2)) + 1),
    )
    result.a, result.b = parts.a, parts.b
    result.partitions[0] = parts

    for pp in range(2, inst.p + 1):
        tuples = tuple_space(parts.a, parts.b, inst.p, pp)
        owners = assign_tuples(tuples, cl)
        counts = {v: len(t) for v, t in owners.items()}
        over = [v for v, c in counts.items() if c > max(4 * cl.k_v[v], 1)]
        result.tuple_check[pp] = {"tuples": len(tuples), "over_4kv": over}
        found = list_for_pprime(inst, pp, parts, owners, edges, holder, router)
        result.per_pprime[pp] = len(found)
        result.cliques |= found
    result.max_load = router.max_load
    return result
