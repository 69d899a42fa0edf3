"""Seeded graph families for experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import Graph

FAMILIES = (
    "erdos-renyi",
    "random-regular",
    "planted-clique-overlay",
    "two-expanders-bridged",
    "barbell",
    "cycle",
    "complete",
)


@dataclass
class Generated:
    graph: Graph
    planted: list[tuple[int, ...]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _er_edges(rng: np.random.Generator, nodes: np.ndarray, prob: float) -> np.ndarray:
    k = len(nodes)
    iu, ju = np.triu_indices(k, 1)
    keep = rng.random(len(iu)) < prob
    return np.stack([nodes[iu[keep]], nodes[ju[keep]]], axis=1)


def erdos_renyi(n: int, p_edge: float, seed: int = 0) -> Graph:
    if n < 0 or not 0 <= p_edge <= 1:
        raise InputError("need n >= 0 and p_edge in [0, 1]")
    rng = np.random.default_rng(seed)
    return Graph(n, _er_edges(rng, np.arange(n), p_edge))


def random_regular(n: int, d: int, seed: int = 0, attempts: int = 200) -> Graph:
    """Near-uniform d-regular simple graph by sequential stub pairing (restart when stuck)."""
    if d < 0 or d >= max(n, 1) or (n * d) % 2:
        raise InputError(f"no simple {d}-regular graph on {n} nodes")
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        edges = _pair_stubs(rng, n, d)
        if edges is not None:
            return Graph(n, edges)
    raise InputError(f"stub pairing got stuck {attempts} times for n={n}, d={d}")


def _pair_stubs(rng: np.random.Generator, n: int, d: int) -> list[tuple[int, int]] | None:
    stubs = np.repeat(np.arange(n), d).tolist()
    seen: set[tuple[int, int]] = set()
    while stubs:
        for _ in range(100):
            i, j = rng.choice(len(stubs), 2, replace=False).tolist()
            u, v = sorted((stubs[i], stubs[j]))
            if u != v and (u, v) not in seen:
                break
        else:
            return None
        seen.add((u, v))
        for k in sorted((i, j), reverse=True):
            stubs[k] = stubs[-1]
            stubs.pop()
    return sorted(seen)


def two_expanders_bridged(n: int, p_in: float = 0.5, bridges: int = 1, p_cross: float = 0.0, seed: int = 0) -> Graph:
    """Two dense random halves joined by ``bridges`` random edges plus optional sparse crossing."""
    if n < 2:
        raise InputError("need at least two nodes")
    rng = np.random.default_rng(seed)
    half = n // 2
    left, right = np.arange(half), np.arange(half, n)
    edges = [_er_edges(rng, left, p_in), _er_edges(rng, right, p_in)]
    if bridges:
        edges.append(np.stack([rng.choice(left, bridges), rng.choice(right, bridges)], axis=1))
    if p_cross > 0:
        mask = rng.random((half, n - half)) < p_cross
        a, b = np.nonzero(mask)
        edges.append(np.stack([left[a], right[b]], axis=1))
    return Graph(n, np.concatenate(edges))


def barbell(n: int) -> Graph:
    """Two cliques on ``n // 2`` and ``n - n // 2`` nodes joined by one edge."""
    if n < 2:
        raise InputError("need at least two nodes")
    half = n // 2
    e = [(i, j) for i in range(half) for j in range(i + 1, half)]
    e += [(i, j) for i in range(half, n) for j in range(i + 1, n)]
    e.append((half - 1, half))
    return Graph(n, e)


def planted_clique_overlay(base: Graph, cliques, seed: int = 0) -> Generated:
    """Add cliques on top of ``base``; entries are explicit node lists or sizes to draw at random."""
    rng = np.random.default_rng(seed)
    planted = []
    extra = []
    for c in cliques:
        if isinstance(c, (int, np.integer)):
            if c > base.n:
                raise InputError("planted clique larger than the graph")
            nodes = sorted(rng.choice(base.n, int(c), replace=False).tolist())
        else:
            nodes = sorted(int(x) for x in c)
        if len(set(nodes)) != len(nodes) or (nodes and (nodes[0] < 0 or nodes[-1] >= base.n)):
            raise InputError(f"bad planted clique {nodes}")
        planted.append(tuple(nodes))
        extra += [(nodes[i], nodes[j]) for i in range(len(nodes)) for j in range(i + 1, len(nodes))]
    edges = np.concatenate([base.edges, np.array(extra, dtype=np.int64).reshape(-1, 2)])
    return Generated(Graph(base.n, edges), planted)


def generate(family: str, params: dict, seed: int = 0) -> Generated:
    """Build a graph of the given family; ``params`` are the family's keyword arguments.

    ``erdos-renyi`` also accepts ``avg_degree`` in place of ``p_edge``.

    ``planted-clique-overlay`` takes ``base`` (a nested family/params dict)
    and ``cliques`` (sizes or node lists).
    """
    params = dict(params)
    if family == "erdos-renyi":
        n = params.pop("n")
        if "avg_degree" in params:
            if "p_edge" in params:
                raise InputError("give p_edge or avg_degree, not both")
            p_edge = min(1.0, params.pop("avg_degree") / max(n - 1, 1))
        else:
            p_edge = params.pop("p_edge")
        g = erdos_renyi(n, p_edge, seed)
    elif family == "random-regular":
        g = random_regular(params.pop("n"), params.pop("d"), seed)
    elif family == "two-expanders-bridged":
        g = two_expanders_bridged(
            params.pop("n"), params.pop("p_in", 0.5), params.pop("bridges", 1), params.pop("p_cross", 0.0), seed
        )
    elif family == "barbell":
        g = barbell(params.pop("n"))
    elif family == "cycle":
        g = Graph.cycle(params.pop("n"))
    elif family == "complete":
        g = Graph.complete(params.pop("n"))
    elif family == "planted-clique-overlay":
        base = params.pop("base")
        inner = generate(base["family"], base.get("params", {}), seed)
        out = planted_clique_overlay(inner.graph, params.pop("cliques"), seed + 1)
        if params:
            raise InputError(f"unknown parameters {sorted(params)}")
        out.meta = {"family": family, "seed": seed}
        return out
    else:
        raise InputError(f"unknown family {family!r}; choose from {FAMILIES}")
    if params:
        raise InputError(f"unknown parameters {sorted(params)}")
    return Generated(g, [], {"family": family, "seed": seed})
