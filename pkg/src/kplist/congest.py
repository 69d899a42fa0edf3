"""Synchronous CONGEST round engine and the round/message ledger.

Load is counted per directed edge: a round lets each endpoint push up to
``B`` messages toward the other, so "every node sends one message to each
neighbour" costs a single round.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, InvariantFailure, ProtocolViolation
from .graph import Graph

LEDGER_FIELDS = ("phase", "rounds", "msgs_sent", "msgs_received", "max_edge_load")


@dataclass(frozen=True, slots=True)
class Message:
    """Up to ``W`` words (node ids) plus a small tag that rides for free."""

    payload: tuple[int, ...]
    tag: int = 0

    @property
    def size(self) -> int:
        return len(self.payload)


@dataclass
class PhaseStats:
    rounds: int = 0
    msgs_sent: int = 0
    msgs_received: int = 0
    max_edge_load: int = 0


@dataclass
class RoundLedger:
    """Per-phase round costs plus per-node message counters.

    ``preprocessed`` records clusters that already paid the one-time routing
    setup; forks share it so the charge happens once per run.
    """

    phases: dict[str, PhaseStats] = field(default_factory=dict)
    node_sent: Counter = field(default_factory=Counter)
    node_received: Counter = field(default_factory=Counter)
    constants: dict = field(default_factory=dict)
    preprocessed: set = field(default_factory=set)

    @property
    def total_rounds(self) -> int:
        return sum(s.rounds for s in self.phases.values())

    @property
    def per_phase(self) -> dict[str, int]:
        return {k: s.rounds for k, s in self.phases.items()}

    def charge(
        self,
        label: str,
        rounds: int,
        sent: int = 0,
        received: int = 0,
        edge_load: int = 0,
    ) -> None:
        if rounds < 0 or sent < 0 or received < 0:
            raise InvariantFailure("ledger counters must not decrease")
        st = self.phases.setdefault(label, PhaseStats())
        st.rounds += int(rounds)
        st.msgs_sent += int(sent)
        st.msgs_received += int(received)
        st.max_edge_load = max(st.max_edge_load, int(edge_load))

    def count_traffic(self, senders: np.ndarray, receivers: np.ndarray, counts: np.ndarray) -> None:
        for u, c in _grouped(senders, counts):
            self.node_sent[u] += c
        for v, c in _grouped(receivers, counts):
            self.node_received[v] += c

    def fork(self) -> RoundLedger:
        """Empty child ledger for a sub-computation run in parallel with others."""
        return RoundLedger(constants=self.constants, preprocessed=self.preprocessed)

    def merge_parallel(self, children: Iterable[tuple[Iterable[int], RoundLedger]]) -> None:
        """Fold child ledgers that ran side by side, phase label by phase label."""
        children = [(np.unique(np.asarray(list(p), dtype=np.int64)), c) for p, c in children]
        labels: list[str] = []
        for _, child in children:
            for lab in child.phases:
                if lab not in labels:
                    labels.append(lab)
        for lab in labels:
            groups = [(p, c.phases[lab].rounds) for p, c in children if lab in c.phases]
            stats = [c.phases[lab] for _, c in children if lab in c.phases]
            self.charge(
                lab,
                parallel_compose(groups),
                sum(s.msgs_sent for s in stats),
                sum(s.msgs_received for s in stats),
                max(s.max_edge_load for s in stats),
            )
        for _, child in children:
            self.node_sent.update(child.node_sent)
            self.node_received.update(child.node_received)

    def merge_sequential(self, child: RoundLedger) -> None:
        for lab, s in child.phases.items():
            self.charge(lab, s.rounds, s.msgs_sent, s.msgs_received, s.max_edge_load)
        self.node_sent.update(child.node_sent)
        self.node_received.update(child.node_received)

    def check_conservation(self) -> None:
        for lab, s in self.phases.items():
            if s.msgs_sent != s.msgs_received:
                raise InvariantFailure(f"phase {lab}: sent {s.msgs_sent} != received {s.msgs_received}")

    def rows(self) -> list[dict]:
        return [{"phase": k, **asdict(s)} for k, s in self.phases.items()]

    def to_dict(self) -> dict:
        return {
            "total_rounds": self.total_rounds,
            "phases": {k: asdict(s) for k, s in self.phases.items()},
            "constants": self.constants,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=LEDGER_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows())
        return buf.getvalue()

    def write(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        (d / "ledger.json").write_text(self.to_json())
        (d / "ledger.csv").write_text(self.to_csv())


def _grouped(keys: np.ndarray, counts: np.ndarray):
    if len(keys) == 0:
        return []
    uk, inv = np.unique(keys, return_inverse=True)
    tot = np.bincount(inv, weights=counts).astype(np.int64)
    return zip(uk.tolist(), tot.tolist())


def parallel_compose(groups: Iterable[tuple[Iterable[int], int]]) -> int:
    """Max over nodes of the summed cost of the groups containing that node."""
    load: Counter = Counter()
    for participants, rounds in groups:
        if rounds <= 0:
            continue
        for v in set(int(x) for x in np.asarray(list(participants) if not isinstance(participants, np.ndarray) else participants).ravel()):
            load[v] += int(rounds)
    return max(load.values(), default=0)


def local_exchange(
    g: Graph,
    outbox: Mapping[int, Mapping[int, list[Message]]],
    label: str,
    ledger: RoundLedger,
    W: int = 2,
    B: int = 1,
) -> dict[int, list[tuple[int, Message]]]:
    """Deliver neighbour-addressed messages; charge ``ceil(max directed edge load / B)``."""
    inbox: dict[int, list[tuple[int, Message]]] = {}
    us, vs, cs = [], [], []
    for u in sorted(outbox):
        for v in sorted(outbox[u]):
            msgs = outbox[u][v]
            if not msgs:
                continue
            if not g.has_edge(u, v):
                raise ProtocolViolation(f"message from {u} to {v} does not follow an edge")
            for msg in msgs:
                if msg.size > W:
                    raise ProtocolViolation(f"message of {msg.size} words exceeds budget W={W}")
            us.append(u)
            vs.append(v)
            cs.append(len(msgs))
    if not cs:
        return inbox
    # Queue drained B messages at a time per directed edge, in senders' id order.
    schedule: dict[int, list[tuple[int, Message]]] = {}
    for u in sorted(outbox):
        for v in sorted(outbox[u]):
            for i, msg in enumerate(outbox[u][v]):
                schedule.setdefault(i // B, []).append((u, v, msg))
    for r in sorted(schedule):
        per_edge = Counter((u, v) for u, v, _ in schedule[r])
        if max(per_edge.values()) > B:
            raise InvariantFailure(f"round {r} exceeds bandwidth")
        for u, v, msg in schedule[r]:
            inbox.setdefault(v, []).append((u, msg))
    _charge_loads(ledger, label, np.array(us), np.array(vs), np.array(cs), B)
    return inbox


def local_exchange_counts(
    g: Graph | None,
    senders,
    receivers,
    counts,
    label: str,
    ledger: RoundLedger,
    B: int = 1,
) -> int:
    """Charge a bulk exchange given only per-directed-edge message counts.

    Pass ``g=None`` to skip the edge check when the caller built the pairs
    from the graph itself.
    """
    us = np.asarray(senders, dtype=np.int64)
    vs = np.asarray(receivers, dtype=np.int64)
    cs = np.asarray(counts, dtype=np.int64)
    keep = cs > 0
    us, vs, cs = us[keep], vs[keep], cs[keep]
    if len(cs) == 0:
        return 0
    if g is not None:
        for u, v in zip(us.tolist(), vs.tolist()):
            if not g.has_edge(u, v):
                raise ProtocolViolation(f"message from {u} to {v} does not follow an edge")
    return _charge_loads(ledger, label, us, vs, cs, B)


def _charge_loads(ledger, label, us, vs, cs, B) -> int:
    keys = us * (max(int(us.max()), int(vs.max())) + 1) + vs
    _, inv = np.unique(keys, return_inverse=True)
    per_edge = np.bincount(inv, weights=cs).astype(np.int64)
    worst = int(per_edge.max())
    rounds = math.ceil(worst / B)
    total = int(cs.sum())
    ledger.charge(label, rounds, total, total, min(worst, B))
    ledger.count_traffic(us, vs, cs)
    return rounds


def exhaustive_neighborhood_learn(
    g: Graph,
    v: int,
    T: Iterable[int],
    label: str,
    ledger: RoundLedger,
    W: int = 2,
    B: int = 1,
) -> set[tuple[int, int]]:
    """``v`` learns every edge inside ``T`` (a subset of its neighbours).

    Pass one: ``v`` sends the ids of ``T`` to each member of ``T``. Pass two:
    each member acks every id of ``T`` with a bit telling whether it is a
    neighbour.
    """
    g.check_node(v)
    ts = sorted(set(int(x) for x in T))
    nb = g.neighbor_sets[v]
    for u in ts:
        if u not in nb:
            raise InputError(f"{u} is not a neighbour of {v}")
    if not ts:
        return set()
    out1 = {v: {u: [Message((w,)) for w in ts] for u in ts}}
    local_exchange(g, out1, label, ledger, W, B)
    out2 = {
        u: {v: [Message((w, int(g.has_edge(u, w)))) for w in ts]} for u in ts
    }
    inbox = local_exchange(g, out2, label, ledger, W, B)
    learned = set()
    for u, msg in inbox.get(v, []):
        w, bit = msg.payload
        if bit:
            learned.add((u, w) if u < w else (w, u))
    return learned


def exhaustive_learn_many(
    g: Graph,
    targets: Mapping[int, Iterable[int]],
    label: str,
    ledger: RoundLedger,
    B: int = 1,
    knowledge: Graph | None = None,
) -> dict[int, set[tuple[int, int]]]:
    """Run the two-pass learn for many nodes at once.

    ``knowledge`` is the edge set the repliers consult (defaults to ``g``).
    Only counts are simulated; the learned sets are computed directly.
    """
    know = g if knowledge is None else knowledge
    tsets = {}
    for v in sorted(targets):
        ts = set(int(x) for x in targets[v])
        if not ts:
            continue
        if not ts <= g.neighbor_sets[v]:
            raise InputError(f"learn set of {v} is not inside its neighbourhood")
        tsets[v] = ts
    if not tsets:
        return {}
    src, dst, cnt = [], [], []
    for v, ts in tsets.items():
        src.extend([v] * len(ts))
        dst.extend(ts)
        cnt.extend([len(ts)] * len(ts))
    local_exchange_counts(None, src, dst, cnt, label, ledger, B)
    local_exchange_counts(None, dst, src, cnt, label, ledger, B)
    learned = {}
    for v, ts in tsets.items():
        found = set()
        for u in ts:
            for w in know.neighbor_sets[u] & ts:
                if u < w:
                    found.add((u, w))
        learned[v] = found
    return learned
