from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kplist.congest import (
    Message,
    RoundLedger,
    exhaustive_learn_many,
    exhaustive_neighborhood_learn,
    local_exchange,
    local_exchange_counts,
    parallel_compose,
)
from kplist.errors import InputError, InvariantFailure, ProtocolViolation
from kplist.graph import Graph


def test_one_message_per_neighbour_is_one_round():
    g = Graph.complete(5)
    led = RoundLedger()
    out = {u: {v: [Message((u,))] for v in range(5) if v != u} for u in range(5)}
    inbox = local_exchange(g, out, "x", led)
    assert led.per_phase == {"x": 1}
    assert sorted(u for u, _ in inbox[0]) == [1, 2, 3, 4]
    led.check_conservation()


def test_both_directions_share_a_round():
    g = Graph(2, [(0, 1)])
    led = RoundLedger()
    local_exchange(g, {0: {1: [Message((0,))]}, 1: {0: [Message((1,))]}}, "x", led)
    assert led.total_rounds == 1


def test_queue_drains_b_at_a_time():
    g = Graph(2, [(0, 1)])
    led = RoundLedger()
    local_exchange(g, {0: {1: [Message((i,)) for i in range(5)]}}, "x", led, B=2)
    assert led.total_rounds == 3
    assert led.phases["x"].max_edge_load == 2


def test_non_edge_rejected():
    g = Graph(3, [(0, 1)])
    with pytest.raises(ProtocolViolation):
        local_exchange(g, {0: {2: [Message((0,))]}}, "x", RoundLedger())
    with pytest.raises(ProtocolViolation):
        local_exchange_counts(g, [0], [2], [1], "x", RoundLedger())


def test_oversized_message_rejected():
    g = Graph(2, [(0, 1)])
    with pytest.raises(ProtocolViolation):
        local_exchange(g, {0: {1: [Message((1, 2, 3))]}}, "x", RoundLedger(), W=2)


def test_k4_learn_costs_six_rounds():
    g = Graph.complete(4)
    led = RoundLedger()
    learned = exhaustive_neighborhood_learn(g, 0, [1, 2, 3], "learn", led)
    assert learned == {(1, 2), (1, 3), (2, 3)}
    assert led.total_rounds == 6


def test_learn_reports_non_edges_correctly():
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    assert exhaustive_neighborhood_learn(g, 0, [1, 2, 3], "l", RoundLedger()) == {(1, 2)}


def test_learn_outside_neighbourhood_rejected():
    g = Graph(3, [(0, 1)])
    with pytest.raises(InputError):
        exhaustive_neighborhood_learn(g, 0, [2], "l", RoundLedger())


def test_learn_many_matches_single():
    g = Graph.complete(5)
    single, many = RoundLedger(), RoundLedger()
    one = exhaustive_neighborhood_learn(g, 0, [1, 2, 3, 4], "l", single)
    res = exhaustive_learn_many(g, {0: [1, 2, 3, 4]}, "l", many)
    assert res[0] == one
    assert many.total_rounds == single.total_rounds == 8


@pytest.mark.parametrize(
    "groups,expected",
    [
        ([([0, 1], 3), ([2, 3], 5)], 5),
        ([([0, 1], 3), ([1, 2], 5)], 8),
        ([([0], 0)], 0),
        ([], 0),
    ],
)
def test_parallel_compose(groups, expected):
    assert parallel_compose(groups) == expected


@given(st.lists(st.tuples(st.sets(st.integers(0, 6), min_size=1), st.integers(0, 9)), max_size=6))
def test_parallel_compose_bounds(groups):
    got = parallel_compose(groups)
    assert got <= sum(r for _, r in groups)
    assert got >= max((r for _, r in groups), default=0)


def test_merge_parallel_and_sequential():
    root = RoundLedger()
    a, b = root.fork(), root.fork()
    a.charge("s", 4, 2, 2)
    b.charge("s", 7, 1, 1)
    root.merge_parallel([([0, 1], a), ([2], b)])
    assert root.per_phase == {"s": 7}
    assert root.phases["s"].msgs_sent == 3
    c = root.fork()
    c.charge("s", 2)
    root.merge_sequential(c)
    assert root.per_phase == {"s": 9}


def test_forks_share_preprocessing():
    root = RoundLedger()
    root.fork().preprocessed.add("c0")
    assert "c0" in root.preprocessed


def test_negative_charge_rejected():
    with pytest.raises(InvariantFailure):
        RoundLedger().charge("x", -1)


def test_conservation_failure_detected():
    led = RoundLedger()
    led.charge("x", 1, 3, 2)
    with pytest.raises(InvariantFailure):
        led.check_conservation()


def test_serialisation(tmp_path):
    led = RoundLedger(constants={"W": 2})
    local_exchange_counts(None, np.array([0, 0]), np.array([1, 2]), np.array([3, 1]), "x", led)
    assert json.loads(led.to_json())["total_rounds"] == 3
    assert led.to_csv().splitlines()[0] == "phase,rounds,msgs_sent,msgs_received,max_edge_load"
    led.write(tmp_path)
    assert (tmp_path / "ledger.csv").exists() and (tmp_path / "ledger.json").exists()
    assert led.node_sent[0] == 4 and led.node_received[1] == 3
