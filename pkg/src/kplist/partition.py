"""Random two-sided node partition and its edge-count bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import Graph

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SIDE = np.uint64(0xD1B54A32D192ED03)


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Vectorised splitmix64 finaliser (wrapping uint64 arithmetic)."""
    z = np.asarray(x, dtype=np.uint64) + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def hashed_choice(seed: int, side: int, nodes: np.ndarray, parts: int) -> np.ndarray:
    """Uniform part in ``[0, parts)`` per node, a pure function of (seed, side, node)."""
    nodes = np.asarray(nodes, dtype=np.int64)
    if parts < 1:
        raise InputError("parts must be positive")
    with np.errstate(over="ignore"):
        key = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)) ^ (np.uint64(side + 1) * _SIDE)
        h = splitmix64(nodes.astype(np.uint64) ^ key)
    return (((h >> np.uint64(32)) * np.uint64(parts)) >> np.uint64(32)).astype(np.int64)


@dataclass(frozen=True)
class PartitionSpec:
    V1: np.ndarray
    V2: np.ndarray
    a: int
    b: int
    m1: float
    m2: float
    m12: float
    n_bar: float

    def __post_init__(self):
        object.__setattr__(self, "V1", np.unique(np.asarray(self.V1, dtype=np.int64)))
        object.__setattr__(self, "V2", np.unique(np.asarray(self.V2, dtype=np.int64)))
        if self.a < 1 or self.b < 1 or self.a > self.b:
            raise InputError("need 1 <= a <= b")
        if self.n_bar <= 1:
            raise InputError("n_bar must exceed 1")
        if len(np.intersect1d(self.V1, self.V2)):
            raise InputError("V1 and V2 must be disjoint")

    @property
    def log_n(self) -> float:
        return math.log(self.n_bar)


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs >= self.rhs - 1e-9 * max(1.0, abs(self.rhs))


@dataclass(frozen=True)
class ConditionReport:
    inequalities: tuple[Inequality, ...]

    @property
    def ok(self) -> bool:
        return all(i.ok for i in self.inequalities)

    def failed(self) -> list[str]:
        return [i.name for i in self.inequalities if not i.ok]


def check_conditions(spec: PartitionSpec) -> ConditionReport:
    """The seven lower-bound inequalities on m1, m2, m12 (natural log of n_bar)."""
    lg = spec.log_n
    a, b = spec.a, spec.b
    n1, n2 = len(spec.V1), len(spec.V2)
    return ConditionReport(
        (
            Inequality("a1", spec.m1, 20 * a * n1 * lg),
            Inequality("a2", spec.m1, 400 * a * a * lg * lg),
            Inequality("b1", spec.m2, 20 * b * n2 * lg),
            Inequality("b2", spec.m2, 400 * b * b * lg * lg),
            Inequality("c1", spec.m12, 20 * a * n1 * lg),
            Inequality("c2", spec.m12, 20 * a * n2 * lg),
            Inequality("c3", spec.m12, 400 * a * a * lg * lg),
        )
    )


@dataclass(frozen=True)
class TwoSidedPartition:
    """``labels1[i]`` is the part of ``V1[i]``; likewise for side two."""

    V1: np.ndarray
    V2: np.ndarray
    labels1: np.ndarray
    labels2: np.ndarray
    a: int
    b: int
    seed: int

    def parts1(self) -> list[np.ndarray]:
        return [self.V1[self.labels1 == j] for j in range(self.a)]

    def parts2(self) -> list[np.ndarray]:
        return [self.V2[self.labels2 == j] for j in range(self.b)]

    def label_map(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Dense arrays of length ``n`` mapping node -> part (or -1)."""
        l1 = np.full(n, -1, dtype=np.int64)
        l2 = np.full(n, -1, dtype=np.int64)
        l1[self.V1] = self.labels1
        l2[self.V2] = self.labels2
        return l1, l2


def sample_partition(spec: PartitionSpec, seed: int) -> TwoSidedPartition:
    return TwoSidedPartition(
        spec.V1,
        spec.V2,
        hashed_choice(seed, 0, spec.V1, spec.a),
        hashed_choice(seed, 1, spec.V2, spec.b),
        spec.a,
        spec.b,
        seed,
    )


@dataclass(frozen=True)
class BoundsReport:
    max1: int
    max2: int
    max12: int
    bound1: float
    bound2: float
    bound12: float
    cross_balanced: float

    @property
    def ok1(self) -> bool:
        return self.max1 <= self.bound1

    @property
    def ok2(self) -> bool:
        return self.max2 <= self.bound2

    @property
    def ok12(self) -> bool:
        return self.max12 <= self.bound12

    @property
    def ok(self) -> bool:
        return self.ok1 and self.ok2 and self.ok12

    def row(self, seed: int) -> dict:
        return {
            "seed": seed,
            "max1": self.max1,
            "max2": self.max2,
            "max12": self.max12,
            "bound1": self.bound1,
            "bound2": self.bound2,
            "bound12": self.bound12,
            "ok1": self.ok1,
            "ok2": self.ok2,
            "ok12": self.ok12,
        }


def _pair_max(lu: np.ndarray, lv: np.ndarray, rows: int, cols: int, symmetric: bool) -> int:
    if len(lu) == 0:
        return 0
    if symmetric:
        lu, lv = np.minimum(lu, lv), np.maximum(lu, lv)
    return int(np.bincount(lu * cols + lv, minlength=rows * cols).max())


def verify_bounds_edges(edges: np.ndarray, spec: PartitionSpec, part: TwoSidedPartition, n: int) -> BoundsReport:
    """Max edge count over part pairs against 24 m1/a^2, 24 m2/b^2 and 8 m12/a^2."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    l1, l2 = part.label_map(n)
    u, v = e[:, 0], e[:, 1]
    in1 = (l1[u] >= 0) & (l1[v] >= 0)
    in2 = (l2[u] >= 0) & (l2[v] >= 0)
    x12 = (l1[u] >= 0) & (l2[v] >= 0)
    x21 = (l2[u] >= 0) & (l1[v] >= 0)
    c_side1 = np.concatenate([l1[u[x12]], l1[v[x21]]])
    c_side2 = np.concatenate([l2[v[x12]], l2[u[x21]]])
    a, b = spec.a, spec.b
    return BoundsReport(
        _pair_max(l1[u[in1]], l1[v[in1]], a, a, True),
        _pair_max(l2[u[in2]], l2[v[in2]], b, b, True),
        _pair_max(c_side1, c_side2, a, b, False),
        24 * spec.m1 / a**2,
        24 * spec.m2 / b**2,
        8 * spec.m12 / a**2,
        spec.m12 / (a * b),
    )


def verify_bounds(g: Graph, spec: PartitionSpec, part: TwoSidedPartition) -> BoundsReport:
    return verify_bounds_edges(g.edges, spec, part, g.n)


def conforming_spec(g: Graph, V1, a: int, b: int, n_bar: float | None = None) -> PartitionSpec:
    """A spec over ``g`` whose edge budgets are the actual counts raised to the smallest values the conditions allow."""
    n = g.n
    n_bar = float(n if n_bar is None else n_bar)
    in1 = np.zeros(n, dtype=bool)
    in1[np.asarray(list(V1), dtype=np.int64)] = True
    V1 = np.flatnonzero(in1)
    V2 = np.flatnonzero(~in1)
    e = g.edges
    s = in1[e[:, 0]].astype(int) + in1[e[:, 1]].astype(int)
    e1, e12, e2 = int((s == 2).sum()), int((s == 1).sum()), int((s == 0).sum())
    lg = math.log(n_bar)
    n1, n2 = len(V1), len(V2)
    m1 = max(e1, 20 * a * n1 * lg, 400 * a * a * lg * lg)
    m2 = max(e2, 20 * b * n2 * lg, 400 * b * b * lg * lg)
    m12 = max(e12, 20 * a * n1 * lg, 20 * a * n2 * lg, 400 * a * a * lg * lg)
    return PartitionSpec(V1, V2, a, b, m1, m2, m12, n_bar)
