"""Simple undirected graphs, cluster views, conductance and lazy-walk mixing."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from . import kernels
from .errors import CapabilityError, InputError, StructuralError

EXACT_CONDUCTANCE_CAP = 20
DENSE_MIXING_CAP = 4096
DENSE_EIGEN_CAP = 2048
MC_WALKS_PER_START = 64


def _normalize_edges(n: int, edges) -> np.ndarray:
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if arr.min() < 0 or arr.max() >= n:
        raise InputError(f"edge endpoint outside 0..{n - 1}")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise InputError("self loops are not allowed")
    arr = np.sort(arr, axis=1)
    keys = np.unique(arr[:, 0] * n + arr[:, 1])
    return np.stack([keys // n, keys % n], axis=1)


class Graph:
    """Immutable simple undirected graph on nodes ``0..n-1``.

    Edges are stored once as rows ``(u, v)`` with ``u < v`` in lexicographic
    order; adjacency is a CSR structure with sorted neighbour lists.
    """

    __slots__ = ("n", "edges", "indptr", "indices", "degree", "__dict__")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise InputError("node count must be non-negative")
        self.n = int(n)
        self.edges = _normalize_edges(self.n, edges)
        self.edges.setflags(write=False)
        both = np.concatenate([self.edges, self.edges[:, ::-1]]) if len(self.edges) else self.edges
        order = np.lexsort((both[:, 1], both[:, 0])) if len(both) else np.empty(0, dtype=np.int64)
        both = both[order]
        self.degree = np.bincount(both[:, 0], minlength=self.n).astype(np.int64) if len(both) else np.zeros(self.n, dtype=np.int64)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degree, out=self.indptr[1:])
        self.indices = both[:, 1].copy() if len(both) else np.empty(0, dtype=np.int64)
        for arr in (self.degree, self.indptr, self.indices):
            arr.setflags(write=False)

    @classmethod
    def complete(cls, n: int) -> Graph:
        iu = np.triu_indices(n, 1)
        return cls(n, np.stack(iu, axis=1))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    @property
    def avg_degree(self) -> float:
        return 2 * self.m / self.n if self.n else 0.0

    def check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InputError(f"unknown node id {v}")

    def adjacency(self, v: int) -> np.ndarray:
        self.check_node(v)
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @cached_property
    def neighbor_sets(self) -> list[frozenset]:
        return [
            frozenset(self.indices[self.indptr[v] : self.indptr[v + 1]].tolist())
            for v in range(self.n)
        ]

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(map(tuple, self.edges.tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u] if 0 <= u < self.n else False

    def edge_list(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]

    def active_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.degree > 0)

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> Graph:
        drop = set(removed)
        return Graph(self.n, [e for e in self.edge_list() if e not in drop])

    def restricted_to(self, keep: Iterable[tuple[int, int]]) -> Graph:
        return Graph(self.n, list(keep))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))


def _as_node_set(g: Graph, S) -> frozenset:
    s = frozenset(int(x) for x in S)
    for v in s:
        g.check_node(v)
    return s


def deg_in(g: Graph, v: int, S) -> int:
    """Number of neighbours of ``v`` inside ``S``."""
    g.check_node(v)
    s = _as_node_set(g, S)
    return len(g.neighbor_sets[v] & s)


def edges_between(g: Graph, S, S2) -> set[tuple[int, int]]:
    """Edges with one endpoint in ``S`` and the other in ``S2`` (each once)."""
    a = _as_node_set(g, S)
    b = _as_node_set(g, S2)
    out = set()
    for u in a:
        for w in g.neighbor_sets[u] & b:
            out.add((u, w) if u < w else (w, u))
    return out


class ClusterView:
    """The graph ``G[S]`` (mode ``"induced"``) or ``G{S}`` (mode ``"loop"``).

    In loop mode every member keeps its parent degree: the edges leaving
    ``S`` are replaced by self loops, each counting one toward the degree.
    """

    def __init__(self, parent: Graph, members, mode: str = "induced"):
        if mode not in ("induced", "loop"):
            raise InputError(f"unknown view mode {mode!r}")
        self.parent = parent
        self.mode = mode
        self.members = np.array(sorted(_as_node_set(parent, members)), dtype=np.int64)
        self.k = len(self.members)
        local = np.full(parent.n, -1, dtype=np.int64)
        local[self.members] = np.arange(self.k)
        self.local = local
        rows, cols = [], []
        for i, v in enumerate(self.members.tolist()):
            nb = local[parent.adjacency(v)]
            nb = nb[nb >= 0]
            rows.append(np.full(len(nb), i, dtype=np.int64))
            cols.append(nb)
        if self.k:
            r = np.concatenate(rows)
            c = np.concatenate(cols)
        else:
            r = c = np.empty(0, dtype=np.int64)
        self.deg_inside = np.bincount(r, minlength=self.k).astype(np.int64)
        self.indptr = np.zeros(self.k + 1, dtype=np.int64)
        np.cumsum(self.deg_inside, out=self.indptr[1:])
        self.indices = c  # rows were produced in order, neighbour lists already sorted
        parent_deg = parent.degree[self.members] if self.k else np.zeros(0, dtype=np.int64)
        self.self_loops = parent_deg - self.deg_inside if mode == "loop" else np.zeros(self.k, dtype=np.int64)
        self.view_degree = self.deg_inside + self.self_loops

    @property
    def m_inside(self) -> int:
        return int(self.deg_inside.sum()) // 2

    def volume(self, U) -> int:
        idx = self._local_ids(U)
        return int(self.view_degree[idx].sum())

    def total_volume(self) -> int:
        return int(self.view_degree.sum())

    def _local_ids(self, U) -> np.ndarray:
        ids = np.array(sorted(int(x) for x in U), dtype=np.int64)
        if len(ids) and (ids.min() < 0 or ids.max() >= self.parent.n or np.any(self.local[ids] < 0)):
            raise InputError("set contains nodes outside the view")
        return self.local[ids]

    def boundary_size(self, S) -> int:
        idx = self._local_ids(S)
        mark = np.zeros(self.k, dtype=bool)
        mark[idx] = True
        cut = 0
        for i in idx.tolist():
            nb = self.indices[self.indptr[i] : self.indptr[i + 1]]
            cut += int((~mark[nb]).sum())
        return cut

    def local_adjacency_masks(self) -> np.ndarray:
        masks = np.zeros(self.k, dtype=np.uint64)
        for i in range(self.k):
            m = 0
            for j in self.indices[self.indptr[i] : self.indptr[i + 1]].tolist():
                m |= 1 << j
            masks[i] = m
        return masks

    def is_connected(self) -> bool:
        if self.k <= 1:
            return True
        seen = np.zeros(self.k, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            i = stack.pop()
            for j in self.indices[self.indptr[i] : self.indptr[i + 1]].tolist():
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        return bool(seen.all())

    def components(self) -> list[np.ndarray]:
        """Connected components of the induced edges, as arrays of parent ids."""
        label = np.full(self.k, -1, dtype=np.int64)
        comps = []
        for s in range(self.k):
            if label[s] >= 0:
                continue
            label[s] = len(comps)
            stack, members = [s], [s]
            while stack:
                i = stack.pop()
                for j in self.indices[self.indptr[i] : self.indptr[i + 1]].tolist():
                    if label[j] < 0:
                        label[j] = len(comps)
                        stack.append(j)
                        members.append(j)
            comps.append(self.members[np.sort(np.array(members, dtype=np.int64))])
        return comps

    def normalized_adjacency(self) -> np.ndarray:
        """Dense ``D^{-1/2} A D^{-1/2}`` with loops on the diagonal."""
        A = np.zeros((self.k, self.k))
        for i in range(self.k):
            A[i, self.indices[self.indptr[i] : self.indptr[i + 1]]] = 1.0
        A[np.diag_indices(self.k)] += self.self_loops
        d = self.view_degree.astype(float)
        inv = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 0.0)
        return A * inv[:, None] * inv[None, :]

    def walk_matrix(self) -> np.ndarray:
        """Dense lazy-walk transition matrix (rows sum to one)."""
        A = np.zeros((self.k, self.k))
        for i in range(self.k):
            A[i, self.indices[self.indptr[i] : self.indptr[i + 1]]] = 1.0
        A[np.diag_indices(self.k)] += self.self_loops
        d = self.view_degree.astype(float)
        P = np.eye(self.k) * 0.5
        nz = d > 0
        P[nz] += 0.5 * A[nz] / d[nz, None]
        for i in np.flatnonzero(~nz):
            P[i] = 0.0
            P[i, i] = 1.0
        return P


def cut_conductance(view: ClusterView, S) -> Fraction:
    """``|boundary(S)| / min(vol(S), vol(rest))`` inside the view, exactly."""
    s = _as_node_set(view.parent, S)
    if not s or len(s) >= view.k:
        raise InputError("cut side must be a nonempty proper subset of the view")
    cut = view.boundary_size(s)
    vs = view.volume(s)
    denom = min(vs, view.total_volume() - vs)
    if denom == 0:
        raise StructuralError("cut has a zero-volume side")
    return Fraction(cut, denom)


@dataclass(frozen=True)
class ConductanceResult:
    """``value`` is exact for method ``"exact"`` and the best sweep cut otherwise."""

    value: Fraction | None
    method: str
    cut: tuple[int, ...]
    lower_bound: float | None = None


def second_eigenvector(view: ClusterView, seed: int = 0) -> tuple[np.ndarray, float]:
    """Second eigenvector of the loop-mode normalized adjacency and its eigenvalue."""
    if view.k <= DENSE_EIGEN_CAP:
        vals, vecs = np.linalg.eigh(view.normalized_adjacency())
        return vecs[:, -2], float(vals[-2])
    return _power_second(view, seed)


def _power_second(view: ClusterView, seed: int, iters: int = 3000) -> tuple[np.ndarray, float]:
    # Fixed-iteration power method on (I + N) / 2 with the top eigenvector deflated.
    from scipy import sparse

    k = view.k
    r = np.repeat(np.arange(k), np.diff(view.indptr))
    A = sparse.csr_matrix((np.ones(len(view.indices)), (r, view.indices)), shape=(k, k))
    A = A + sparse.diags(view.self_loops.astype(float))
    d = view.view_degree.astype(float)
    inv = np.where(d > 0, 1.0 / np.sqrt(np.maximum(d, 1.0)), 0.0)
    N = sparse.diags(inv) @ A @ sparse.diags(inv)
    top = np.sqrt(d)
    top /= np.linalg.norm(top)
    x = np.random.default_rng(seed).standard_normal(k)
    for _ in range(iters):
        x -= top * (top @ x)
        x = 0.5 * (x + N @ x)
        x /= np.linalg.norm(x)
    x -= top * (top @ x)
    x /= np.linalg.norm(x)
    lam = float(x @ (N @ x))
    return x, lam


def sweep_order(view: ClusterView, seed: int = 0) -> tuple[np.ndarray, float]:
    vec, lam = second_eigenvector(view, seed)
    d = np.maximum(view.view_degree.astype(float), 1.0)
    return np.argsort(vec / np.sqrt(d), kind="stable"), lam


def _sweep_orders(view: ClusterView, seed: int) -> tuple[list[np.ndarray], float]:
    """Sweep orders for every basis vector of the second eigenspace (dense case).

    When the second eigenvalue is repeated, any vector of its eigenspace is
    "the" second eigenvector, and a single arbitrary one can miss the best cut.
    """
    if view.k > DENSE_EIGEN_CAP:
        order, lam = sweep_order(view, seed)
        return [order], lam
    vals, vecs = np.linalg.eigh(view.normalized_adjacency())
    lam = float(vals[-2])
    d = np.maximum(view.view_degree.astype(float), 1.0)
    picks = [j for j in range(len(vals) - 1) if abs(vals[j] - lam) <= 1e-9]
    return [np.argsort(vecs[:, j] / np.sqrt(d), kind="stable") for j in reversed(picks)], lam


def graph_conductance(view: ClusterView, method: str = "exact", seed: int = 0) -> ConductanceResult:
    """Conductance of the view: exact minimum, or sweep upper plus Cheeger lower bound."""
    if view.k < 2:
        raise InputError("conductance needs at least two nodes")
    if method == "exact":
        if view.k > EXACT_CONDUCTANCE_CAP:
            raise CapabilityError(f"exact conductance capped at {EXACT_CONDUCTANCE_CAP} nodes")
        mask, cut, den = kernels.exact_min_cut(view.local_adjacency_masks(), view.view_degree)
        if den == 0:
            return ConductanceResult(None, "exact", ())
        side = tuple(int(view.members[i]) for i in range(view.k) if (mask >> i) & 1)
        return ConductanceResult(Fraction(int(cut), int(den)), "exact", side)
    if method == "sweep":
        orders, lam = _sweep_orders(view, seed)
        lower = max(0.0, (1.0 - lam) / 2.0)
        best = None
        for order in orders:
            size, cut, den = kernels.sweep_cut(order, view.indptr, view.indices, view.view_degree)
            if den and (best is None or Fraction(int(cut), int(den)) < Fraction(int(best[1]), int(best[2]))):
                best = (size, cut, den, order)
        if best is None:
            return ConductanceResult(None, "sweep", (), lower)
        size, cut, den, order = best
        side = tuple(sorted(int(view.members[i]) for i in order[:size]))
        return ConductanceResult(Fraction(int(cut), int(den)), "sweep", side, lower)
    raise InputError(f"unknown conductance method {method!r}")


def estimate_mixing_time(
    view: ClusterView, tolerance: float = 0.25, max_steps: int = 1_000_000, seed: int = 0
) -> int:
    """Smallest t with the lazy walk from every start within ``tolerance`` TV of stationary."""
    if not 0 < tolerance < 0.5:
        raise InputError("tolerance must lie in (0, 1/2)")
    if view.k <= 1:
        return 0
    if not view.is_connected():
        raise StructuralError("mixing time is undefined on a disconnected view")
    pi = view.view_degree / view.view_degree.sum()
    if view.k <= DENSE_MIXING_CAP:
        P = view.walk_matrix()
        M = np.eye(view.k)
        for t in range(1, max_steps + 1):
            M = M @ P
            if 0.5 * np.abs(M - pi[None, :]).sum(axis=1).max() <= tolerance:
                return t
        raise CapabilityError("mixing time exceeds max_steps")
    return _mixing_monte_carlo(view, pi, tolerance, max_steps, seed)


def _mixing_monte_carlo(view, pi, tolerance, max_steps, seed) -> int:
    rng = np.random.default_rng(seed)
    k = view.k
    pos = np.repeat(np.arange(k), MC_WALKS_PER_START)
    starts = pos.copy()
    deg = view.view_degree
    for t in range(1, max_steps + 1):
        move = rng.random(len(pos)) < 0.5
        r = (rng.random(len(pos)) * deg[pos]).astype(np.int64)
        inside = r < view.deg_inside[pos]
        step = move & inside
        pos = pos.copy()
        pos[step] = view.indices[view.indptr[pos[step]] + r[step]]
        worst = 0.0
        for s in range(k):
            emp = np.bincount(pos[starts == s], minlength=k) / MC_WALKS_PER_START
            worst = max(worst, 0.5 * np.abs(emp - pi).sum())
            if worst > tolerance:
                break
        if worst <= tolerance:
            return t
    raise CapabilityError("mixing time exceeds max_steps")


def read_edgelist(path) -> tuple[Graph, dict]:
    """Read ``u v`` lines (``#`` comments). A first line ``#! {json}`` carries n and metadata."""
    meta: dict = {}
    edges = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read edge list {path}: {exc.strerror}") from exc
    for lineno, line in enumerate(text.splitlines()):
        s = line.strip()
        if lineno == 0 and s.startswith("#!"):
            meta = json.loads(s[2:])
            continue
        s = s.split("#", 1)[0].strip()
        if not s:
            continue
        parts = s.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno + 1}: expected 'u v'")
        edges.append((int(parts[0]), int(parts[1])))
    n = int(meta["n"]) if "n" in meta else (max((max(e) for e in edges), default=-1) + 1)
    return Graph(n, edges), meta


def write_edgelist(g: Graph, path, meta: dict | None = None) -> None:
    header = dict(meta or {})
    header["n"] = g.n
    lines = ["#! " + json.dumps(header, sort_keys=True)]
    lines += [f"{u} {v}" for u, v in g.edge_list()]
    Path(path).write_text("\n".join(lines) + "\n")


def log2n(n: int) -> float:
    return math.log2(max(n, 2))
