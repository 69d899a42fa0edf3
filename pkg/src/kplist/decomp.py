"""Centralized (epsilon, phi) expander decomposition with certified output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import Config
from .errors import InputError, ValidationFailure
from .graph import EXACT_CONDUCTANCE_CAP, ClusterView, Graph, graph_conductance


@dataclass
class Clustering:
    """Disjoint clusters over the participating nodes plus the cut edges ``E_r``.

    ``certificates[i]`` is the loop-mode conductance found for cluster ``i``
    (exact up to 20 nodes, best sweep or singleton cut above), or ``None``
    for singletons. ``dilution`` bounds ``deg(v) / deg_C(v)`` on multi-node
    clusters.
    """

    n: int
    clusters: list[np.ndarray]
    inter_edges: set[tuple[int, int]]
    phi_target: float
    certificates: list[Fraction | None]
    lower_bounds: list[float | None]
    dilution: float
    charged_rounds: int = 0
    m_participating: int = 0
    cluster_of: np.ndarray = field(init=False)

    def __post_init__(self):
        self.cluster_of = np.full(self.n, -1, dtype=np.int64)
        for i, c in enumerate(self.clusters):
            self.cluster_of[c] = i

    @property
    def achieved_epsilon(self) -> Fraction:
        if self.m_participating == 0:
            return Fraction(0)
        return Fraction(len(self.inter_edges), self.m_participating)

    @property
    def achieved_phi(self) -> Fraction | None:
        vals = [c for c in self.certificates if c is not None]
        return min(vals) if vals else None

    def intra_edges(self, g: Graph) -> list[set[tuple[int, int]]]:
        out: list[set] = [set() for _ in self.clusters]
        for u, v in g.edge_list():
            cu, cv = self.cluster_of[u], self.cluster_of[v]
            if cu >= 0 and cu == cv:
                out[cu].add((u, v))
        return out

    def multi_node(self) -> list[int]:
        return [i for i, c in enumerate(self.clusters) if len(c) >= 2]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "clusters": [c.tolist() for c in self.clusters],
            "inter_edges": sorted(self.inter_edges),
            "phi_target": self.phi_target,
            "certificates": [None if c is None else [c.numerator, c.denominator] for c in self.certificates],
            "lower_bounds": self.lower_bounds,
            "dilution": self.dilution,
            "charged_rounds": self.charged_rounds,
            "m_participating": self.m_participating,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Clustering:
        return cls(
            n=d["n"],
            clusters=[np.asarray(c, dtype=np.int64) for c in d["clusters"]],
            inter_edges={tuple(e) for e in d["inter_edges"]},
            phi_target=d["phi_target"],
            certificates=[None if c is None else Fraction(*c) for c in d["certificates"]],
            lower_bounds=d["lower_bounds"],
            dilution=d["dilution"],
            charged_rounds=d["charged_rounds"],
            m_participating=d["m_participating"],
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> Clustering:
        return cls.from_dict(json.loads(Path(path).read_text()))


def _best_cut(view: ClusterView, seed: int) -> tuple[Fraction, tuple[int, ...], float | None]:
    """Lowest loop-mode conductance over the certified cut family of the view."""
    if view.k <= EXACT_CONDUCTANCE_CAP:
        res = graph_conductance(view, "exact")
        return res.value, res.cut, None
    res = graph_conductance(view, "sweep", seed)
    best, side = res.value, res.cut
    # singletons are cheap to add to the family
    total = view.total_volume()
    den = np.minimum(view.view_degree, total - view.view_degree)
    for i in np.flatnonzero(den > 0).tolist():
        val = Fraction(int(view.deg_inside[i]), int(den[i]))
        if best is None or val < best:
            best, side = val, (int(view.members[i]),)
    return best, side, res.lower_bound


def _cut_edges(g: Graph, side: set, part: np.ndarray) -> set[tuple[int, int]]:
    out = set()
    members = set(part.tolist())
    for u in side:
        for w in g.neighbor_sets[u]:
            if w in members and w not in side:
                out.add((u, w) if u < w else (w, u))
    return out


def decompose(
    g: Graph,
    target_phi: float | None = None,
    seed: int = 0,
    config: Config | None = None,
    nodes=None,
) -> Clustering:
    """Recursive cut refinement until every part certifies ``target_phi``.

    Disconnected parts are split into components, any node keeping less than
    a ``target_phi`` fraction of its degree inside its part is split off, and
    any cut below ``target_phi`` (exact on small parts, sweep otherwise) is
    removed with its edges moved to ``E_r``.
    """
    cfg = config or Config()
    phi = cfg.phi_for(g.n) if target_phi is None else float(target_phi)
    if not 0 < phi < 1:
        raise InputError("target_phi must lie in (0, 1)")
    part0 = np.arange(g.n, dtype=np.int64) if nodes is None else np.unique(np.asarray(list(nodes), dtype=np.int64))
    pset = set(part0.tolist())
    m_part = sum(1 for u, v in g.edge_list() if u in pset and v in pset)
    deg = g.degree
    inter: set[tuple[int, int]] = set()
    done: list[tuple[np.ndarray, Fraction | None, float | None]] = []
    stack = [part0]
    while stack:
        part = stack.pop()
        if len(part) <= 1:
            done.append((part, None, None))
            continue
        view = ClusterView(g, part, "loop")
        comps = view.components()
        if len(comps) > 1:
            stack.extend(reversed(comps))
            continue
        low = view.deg_inside < phi * deg[part]
        if low.any():
            for v in part[low].tolist():
                inter |= _cut_edges(g, {v}, part)
                done.append((np.array([v], dtype=np.int64), None, None))
            stack.append(part[~low])
            continue
        value, side, lower = _best_cut(view, seed)
        if value is not None and value < phi:
            s = set(side)
            inter |= _cut_edges(g, s, part)
            inside = np.isin(part, np.fromiter(s, dtype=np.int64))
            stack.append(part[~inside])
            stack.append(part[inside])
            continue
        done.append((part, value, lower))
    done.sort(key=lambda t: int(t[0][0]) if len(t[0]) else -1)
    return Clustering(
        n=g.n,
        clusters=[d[0] for d in done],
        inter_edges=inter,
        phi_target=phi,
        certificates=[d[1] for d in done],
        lower_bounds=[d[2] for d in done],
        dilution=1.0 / phi,
        charged_rounds=cfg.t_decomp(g.n),
        m_participating=m_part,
    )


def clustering_from_parts(g: Graph, parts, phi_target: float = 0.0, seed: int = 0) -> Clustering:
    """Wrap a hand-built partition, computing ``E_r`` and per-cluster certificates."""
    clusters = [np.unique(np.asarray(list(p), dtype=np.int64)) for p in parts]
    label = np.full(g.n, -1, dtype=np.int64)
    for i, c in enumerate(clusters):
        if np.any(label[c] >= 0):
            raise InputError("clusters overlap")
        label[c] = i
    inter, m_part = set(), 0
    for u, v in g.edge_list():
        if label[u] >= 0 and label[v] >= 0:
            m_part += 1
            if label[u] != label[v]:
                inter.add((u, v))
    certs, lows, dil = [], [], 1.0
    for c in clusters:
        if len(c) < 2:
            certs.append(None)
            lows.append(None)
            continue
        view = ClusterView(g, c, "loop")
        value, _, lower = _best_cut(view, seed)
        certs.append(value)
        lows.append(lower)
        inside = view.deg_inside
        if np.any(inside == 0):
            dil = float("inf")
        else:
            dil = max(dil, float(np.max(g.degree[c] / inside)))
    return Clustering(g.n, clusters, inter, phi_target, certs, lows, dil, 0, m_part)


@dataclass
class DecompositionReport:
    ok: bool
    epsilon: Fraction
    epsilon_target: float
    phi: Fraction | None
    failures: list[str]
    witnesses: list

    def raise_if_failed(self) -> None:
        if not self.ok:
            raise ValidationFailure("; ".join(self.failures), self.witnesses)


def validate_decomposition(
    g: Graph,
    clustering: Clustering,
    epsilon_target: float,
    seed: int = 0,
    strict: bool = False,
) -> DecompositionReport:
    """Re-check partition, edge conservation, conductance, epsilon and dilution."""
    failures: list[str] = []
    witnesses: list = []
    label = np.full(g.n, -1, dtype=np.int64)
    for i, c in enumerate(clustering.clusters):
        if np.any(label[c] >= 0):
            failures.append(f"cluster {i} overlaps another cluster")
            witnesses.append(("overlap", i))
        label[c] = i
    expected_inter = set()
    m_part = 0
    for u, v in g.edge_list():
        if label[u] >= 0 and label[v] >= 0:
            m_part += 1
            if label[u] != label[v]:
                expected_inter.add((u, v))
    if expected_inter != clustering.inter_edges:
        bad = sorted(expected_inter ^ clustering.inter_edges)[:5]
        failures.append("inter-cluster edge set does not match the clusters")
        witnesses.append(("edges", bad))
    eps = Fraction(len(expected_inter), m_part) if m_part else Fraction(0)
    if eps > Fraction(epsilon_target).limit_denominator(10**9):
        failures.append(f"epsilon {eps} exceeds target {epsilon_target}")
        witnesses.append(("epsilon", float(eps)))
    floor = clustering.achieved_phi
    for i in clustering.multi_node():
        c = clustering.clusters[i]
        view = ClusterView(g, c, "loop")
        value, side, _ = _best_cut(view, seed)
        if floor is not None and value is not None and value < floor:
            failures.append(f"cluster {i} has a cut of conductance {value} below {floor}")
            witnesses.append(("cut", i, side))
        need = g.degree[c] / clustering.dilution
        short = c[view.deg_inside < need - 1e-9]
        if len(short):
            failures.append(f"cluster {i} has nodes keeping too few neighbours inside")
            witnesses.append(("dilution", i, short.tolist()))
    report = DecompositionReport(not failures, eps, epsilon_target, floor, failures, witnesses)
    if strict:
        report.raise_if_failed()
    return report
