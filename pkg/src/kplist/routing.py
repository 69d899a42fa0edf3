"""Load-checked message delivery inside a cluster, charged by the routing cost model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import Config
from .congest import RoundLedger
from .errors import InputError, ProtocolViolation
from .graph import ClusterView, Graph


@dataclass
class RoutingBatch:
    """Messages ``src[i] -> dst[i]`` carrying ``payload[i]`` (rows of up to W words).

    ``deg_c`` maps each cluster member to its degree inside the cluster; the
    batch may only be routed if every node sends and receives at most
    ``ceil(L * deg_c(v))`` messages.
    """

    members: np.ndarray
    deg_c: np.ndarray
    L: float
    src: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    dst: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    payload: np.ndarray | None = None
    key: object = None

    def __post_init__(self):
        self.members = np.asarray(self.members, dtype=np.int64)
        self.deg_c = np.asarray(self.deg_c, dtype=np.int64)
        self.src = np.asarray(self.src, dtype=np.int64)
        self.dst = np.asarray(self.dst, dtype=np.int64)
        if len(self.members) != len(self.deg_c):
            raise InputError("deg_c must give one degree per member")
        if len(self.src) != len(self.dst):
            raise InputError("src and dst lengths differ")
        if self.payload is not None and len(self.payload) != len(self.src):
            raise InputError("payload length differs from message count")
        if self.L < 0:
            raise InputError("load factor must be non-negative")
        if self.key is None:
            self.key = tuple(self.members.tolist())

    @classmethod
    def for_cluster(cls, g: Graph, members, L: float, src=(), dst=(), payload=None) -> RoutingBatch:
        view = ClusterView(g, members)
        return cls(view.members, view.deg_inside, L, src, dst, payload)

    @classmethod
    def from_messages(cls, g: Graph, members, L: float, messages) -> RoutingBatch:
        msgs = list(messages)
        src = [m[0] for m in msgs]
        dst = [m[1] for m in msgs]
        payload = np.array([m[2] for m in msgs], dtype=object) if msgs else None
        return cls.for_cluster(g, members, L, src, dst, payload)

    def __len__(self) -> int:
        return len(self.src)

    def local_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-member send and receive counts (members in sorted order)."""
        pos = np.searchsorted(self.members, self.src)
        pos2 = np.searchsorted(self.members, self.dst)
        k = len(self.members)
        for arr, ids in ((pos, self.src), (pos2, self.dst)):
            if len(ids) and (np.any(arr >= k) or np.any(self.members[np.minimum(arr, k - 1)] != ids)):
                raise InputError("message endpoint outside the cluster")
        return np.bincount(pos, minlength=k), np.bincount(pos2, minlength=k)


def compute_load(batch: RoutingBatch) -> Fraction:
    """Smallest L with every node's send and receive count at most ``L * deg_C(v)``."""
    if len(batch) == 0:
        return Fraction(0)
    sent, recv = batch.local_counts()
    worst = Fraction(0)
    for i in np.flatnonzero((sent > 0) | (recv > 0)).tolist():
        d = int(batch.deg_c[i])
        c = max(int(sent[i]), int(recv[i]))
        if d == 0:
            raise ProtocolViolation(f"node {int(batch.members[i])} has no cluster edges but {c} messages")
        worst = max(worst, Fraction(c, d))
    return worst


def check_load(batch: RoutingBatch) -> None:
    if len(batch) == 0:
        return
    sent, recv = batch.local_counts()
    cap = np.ceil(batch.L * batch.deg_c.astype(float) - 1e-9).astype(np.int64)
    over = np.flatnonzero((sent > cap) | (recv > cap))
    if len(over):
        i = int(over[0])
        v = int(batch.members[i])
        raise ProtocolViolation(
            f"node {v} overloaded: sends {int(sent[i])}, receives {int(recv[i])}, cap {int(cap[i])} "
            f"(L={batch.L}, deg_C={int(batch.deg_c[i])})",
        )


def routing_cost(L: float, n: int, config: Config) -> int:
    return math.ceil(math.ceil(L - 1e-12) * config.kappa_route_for(n) - 1e-9) if L > 0 else 0


def route(
    batch: RoutingBatch,
    label: str,
    ledger: RoundLedger,
    n: int,
    config: Config | None = None,
    deliver: bool = True,
) -> dict[int, list] | None:
    """Check the load bound, charge ``ceil(L) * kappa_route(n)`` and deliver.

    Self-addressed messages are delivered without network cost. The first
    batch on a cluster also pays the one-time preprocessing charge.
    """
    cfg = config or Config()
    check_load(batch)
    if batch.key not in ledger.preprocessed:
        ledger.preprocessed.add(batch.key)
        ledger.charge(label + ".pre", cfg.t_route_pre(n))
    remote = batch.src != batch.dst
    cnt = int(remote.sum())
    if cnt:
        ledger.charge(label, routing_cost(batch.L, n, cfg), cnt, cnt)
        ledger.count_traffic(batch.src[remote], batch.dst[remote], np.ones(cnt, dtype=np.int64))
    if not deliver:
        return None
    inbox: dict[int, list] = {}
    order = np.argsort(batch.dst, kind="stable")
    for i in order.tolist():
        item = (int(batch.src[i]), None if batch.payload is None else batch.payload[i])
        inbox.setdefault(int(batch.dst[i]), []).append(item)
    return inbox
