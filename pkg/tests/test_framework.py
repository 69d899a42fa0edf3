from __future__ import annotations

import math

import numpy as np
import pytest

from kplist.config import Config
from kplist.congest import RoundLedger
from kplist.decomp import clustering_from_parts
from kplist.errors import ClaimViolation
from kplist.framework import (
    ClaimLog,
    cliques_through,
    handle_small_clusters,
    is_low_average,
    iteration_bound,
    prune_low_degree,
    shrink_check,
)
from kplist.graph import Graph
from kplist.oracle import enumerate_cliques


def test_claim_log_strict_and_lenient():
    log = ClaimLog(strict=False)
    assert log.check("x", 1, 3, 2) is False
    assert not log.ok and log.failures()[0].claim == "x"
    log.skip("y", 1, "n/a")
    assert "claim,iteration" in log.to_csv().splitlines()[0]
    with pytest.raises(ClaimViolation):
        ClaimLog(strict=True).check("x", 1, 3, 2)


def test_cliques_through():
    nbrs = np.array([1, 2, 3])
    assert cliques_through(0, nbrs, {(1, 2), (1, 3), (2, 3)}, 4) == {(0, 1, 2, 3)}
    assert cliques_through(0, nbrs, {(1, 2)}, 4) == set()
    assert cliques_through(0, np.array([1]), set(), 4) == set()


def test_prune_degree_five_at_n_nine():
    # a K6 on 0..5 plus a path to node 8: node 0 has degree 5 <= 2*sqrt(9)
    edges = [(u, v) for u in range(6) for v in range(u + 1, 6)] + [(5, 6), (6, 7), (7, 8)]
    g = Graph(9, edges)
    found, h, pruned, _ = prune_low_degree(g, 9, 4, RoundLedger(), ClaimLog(), 1, "t")
    assert 0 in pruned
    assert found == enumerate_cliques(g, 4)
    assert h.m == 0


@pytest.mark.parametrize("n", [7, 9, 12])
def test_clique_keeps_all_nodes(n):
    g = Graph.complete(n)
    _, h, pruned, _ = prune_low_degree(g, n, 5, RoundLedger(), ClaimLog(strict=False), 1, "t")
    assert pruned == [] and h.m == g.m


def test_star_leaves_pruned():
    g = Graph(30, [(0, i) for i in range(1, 30)])
    _, h, pruned, _ = prune_low_degree(g, 30, 4, RoundLedger(), ClaimLog(), 1, "t")
    assert set(range(1, 30)) <= set(pruned)
    assert h.m == 0


def test_small_clusters_listed_and_removed():
    g = Graph(12, [(u, v) for u in range(5) for v in range(u + 1, 5)] + [(4, 5), (5, 6)])
    cl = clustering_from_parts(g, [range(5), [5], [6]] + [[i] for i in range(7, 12)])
    found, h, large = handle_small_clusters(g, cl, 12, 5, 2.0, RoundLedger(), ClaimLog(), 1, "t")
    assert found == {(0, 1, 2, 3, 4)}
    assert large == []
    assert h.edge_list() == [(5, 6)]


def test_large_clusters_returned():
    g = Graph.complete(10)
    cl = clustering_from_parts(g, [range(10)])
    found, h, large = handle_small_clusters(g, cl, 10, 5, 1.01, RoundLedger(), ClaimLog(), 1, "t")
    assert found == set() and len(large) == 1 and h.m == 45


def test_shrink_check():
    log = ClaimLog(strict=False)
    assert shrink_check(log, 1, 10, 20, Graph(10, [(0, 1)]))["halved"]
    assert not shrink_check(log, 2, 4, 4, Graph.complete(4))["halved"]


def test_iteration_bound():
    assert iteration_bound(0) == 4
    assert iteration_bound(1024) == 40


def test_low_average():
    cfg = Config()
    assert not is_low_average(1000, 10, 0, 64, cfg)
    assert is_low_average(10, 10, 0, 1024, cfg)
    assert is_low_average(1000, 10, 10**6, 64, cfg)
    assert math.sqrt(64) / cfg.gamma_prime == 1
