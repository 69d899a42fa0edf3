"""Steps shared by the p >= 5 and p = 4 drivers: pruning, small clusters, claim log."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .config import Config
from .congest import RoundLedger, exhaustive_learn_many
from .decomp import Clustering
from .errors import ClaimViolation
from .graph import Graph

CLAIM_FIELDS = ("claim", "iteration", "holds", "lhs", "rhs", "applicable", "detail")


@dataclass
class ClaimCheck:
    claim: str
    iteration: int
    holds: bool
    lhs: float
    rhs: float
    applicable: bool = True
    detail: str = ""


@dataclass
class ClaimLog:
    """Every quantitative check made during a run; ``strict`` raises on the first failure."""

    strict: bool = True
    records: list[ClaimCheck] = field(default_factory=list)

    def check(self, claim: str, iteration: int, lhs: float, rhs: float, holds: bool | None = None, detail: str = "") -> bool:
        ok = bool(lhs <= rhs) if holds is None else bool(holds)
        self.records.append(ClaimCheck(claim, iteration, ok, float(lhs), float(rhs), True, detail))
        if not ok and self.strict:
            raise ClaimViolation(f"{claim} failed at iteration {iteration}: {lhs} vs {rhs} {detail}".strip())
        return ok

    def skip(self, claim: str, iteration: int, detail: str = "") -> None:
        self.records.append(ClaimCheck(claim, iteration, True, 0.0, 0.0, False, detail))

    def failures(self) -> list[ClaimCheck]:
        return [r for r in self.records if r.applicable and not r.holds]

    @property
    def ok(self) -> bool:
        return not self.failures()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CLAIM_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in self.records:
            w.writerow(asdict(r))
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())


@dataclass
class RunResult:
    """Output of a full listing run."""

    cliques: set[tuple[int, ...]]
    ledger: RoundLedger
    claims: ClaimLog
    iterations: list[dict]
    tags: dict[tuple[int, ...], str] = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return self.ledger.total_rounds


def cliques_through(v: int, nbrs: np.ndarray, learned, p: int) -> set[tuple[int, ...]]:
    """p-cliques containing ``v`` given its sorted neighbours and the edges among them."""
    if len(nbrs) < p - 1:
        return set()
    arr = np.array(sorted(learned), dtype=np.int64).reshape(-1, 2)
    idx = np.searchsorted(nbrs, arr)
    local = Graph(len(nbrs), idx)
    rows = kernels.list_cliques(local.indptr, local.indices, p - 1)
    return {tuple(sorted(nbrs[r].tolist() + [v])) for r in rows}


def drop_nodes(h: Graph, nodes) -> Graph:
    mask = np.zeros(h.n, dtype=bool)
    mask[np.asarray(list(nodes), dtype=np.int64)] = True
    e = h.edges
    return Graph(h.n, e[~(mask[e[:, 0]] | mask[e[:, 1]])])


def drop_edges(h: Graph, removed: set) -> Graph:
    if not removed:
        return h
    keep = [e for e in h.edge_list() if e not in removed]
    return Graph(h.n, keep)


def learn_and_list(
    h: Graph,
    nodes: list[int],
    p: int,
    label: str,
    ledger: RoundLedger,
    B: int,
) -> tuple[set[tuple[int, ...]], int]:
    """Each node learns the edges among its neighbours and lists its cliques; returns rounds."""
    before = ledger.total_rounds
    targets = {v: h.adjacency(v).tolist() for v in nodes}
    learned = exhaustive_learn_many(h, targets, label, ledger, B)
    found: set[tuple[int, ...]] = set()
    for v, edges in learned.items():
        found |= cliques_through(v, np.asarray(targets[v], dtype=np.int64), edges, p)
    return found, ledger.total_rounds - before


def prune_low_degree(
    h: Graph,
    n: int,
    p: int,
    ledger: RoundLedger,
    claims: ClaimLog,
    iteration: int,
    label: str,
    B: int = 1,
) -> tuple[set[tuple[int, ...]], Graph, list[int], float]:
    """Nodes of degree at most 2 sqrt(n) list their cliques and leave the graph.

    Returns the cliques, the remaining graph, the pruned nodes and the
    average degree over non-isolated nodes measured beforehand.
    """
    active = h.active_nodes()
    mu = 2 * h.m / len(active) if len(active) else 0.0
    thr = 2 * math.sqrt(n)
    low = [int(v) for v in active if h.degree[v] <= thr]
    found, rounds = learn_and_list(h, low, p, label, ledger, B)
    claims.check("prune_rounds", iteration, rounds, 2 * math.ceil(thr / B))
    if mu < math.sqrt(n) and len(active):
        claims.check("prune_halves_nodes", iteration, len(active) / 2, len(low), detail=f"mu={mu:.2f}")
    else:
        claims.skip("prune_halves_nodes", iteration, "average degree at least sqrt(n)")
    return found, drop_nodes(h, low) if low else h, low, mu


def handle_small_clusters(
    h: Graph,
    clustering: Clustering,
    n: int,
    p: int,
    beta: float,
    ledger: RoundLedger,
    claims: ClaimLog,
    iteration: int,
    label: str,
    B: int = 1,
) -> tuple[set[tuple[int, ...]], Graph, list[np.ndarray]]:
    """Clusters of 2 to ``beta n^(1-2/p)`` nodes list exhaustively and are removed.

    Singleton clusters stay: their edges are inter-cluster and remain in the
    graph for later iterations. Returns the large clusters as well.
    """
    size_floor = beta * n ** (1 - 2 / p)
    small, large = [], []
    for c in clustering.clusters:
        if len(c) < 2:
            continue
        (small if len(c) < size_floor else large).append(c)
    members = [int(v) for c in small for v in c.tolist()]
    found, rounds = learn_and_list(h, members, p, label, ledger, B)
    if members:
        bound = 2 * math.ceil(clustering.dilution * size_floor / B)
        claims.check("small_cluster_rounds", iteration, rounds, bound)
    return found, drop_nodes(h, members) if members else h, large


def shrink_check(claims: ClaimLog, iteration: int, nodes_before: int, edges_before: int, h_next: Graph) -> dict:
    nodes_after = len(h_next.active_nodes())
    ok = nodes_after <= nodes_before / 2 or h_next.m <= edges_before / 2
    claims.check(
        "halving",
        iteration,
        h_next.m / max(edges_before, 1),
        0.5,
        holds=ok,
        detail=f"nodes {nodes_before}->{nodes_after}, edges {edges_before}->{h_next.m}",
    )
    return {"nodes_after": nodes_after, "edges_after": h_next.m, "halved": ok}


def iteration_bound(m: int) -> int:
    return math.ceil(4 * math.log2(max(m, 2)))


def is_low_average(m_c: int, k: int, m_prime: int, n: int, cfg: Config) -> bool:
    """A cluster whose average degree is small against its outside edges or against sqrt(n)."""
    avg = m_c / k
    return avg <= m_prime / (cfg.gamma * n) or avg < math.sqrt(n) / cfg.gamma_prime


def run_constants(cfg: Config, n: int) -> dict:
    return {
        **cfg.to_dict(),
        "n": n,
        "kappa_route_n": cfg.kappa_route_for(n),
        "t_route_pre_n": cfg.t_route_pre(n),
        "t_decomp_n": cfg.t_decomp(n),
        "phi_n": cfg.phi_for(n),
    }
