from __future__ import annotations

import itertools

import numpy as np
import pytest

from kplist import k4
from kplist.config import Config
from kplist.congest import RoundLedger
from kplist.framework import ClaimLog
from kplist.generators import erdos_renyi, planted_clique_overlay
from kplist.graph import Graph
from kplist.oracle import enumerate_cliques


def clique_edges(nodes) -> list[tuple[int, int]]:
    return list(itertools.combinations(sorted(nodes), 2))


def test_single_k4():
    res = k4.run(Graph.complete(4))
    assert res.cliques == {(0, 1, 2, 3)}
    assert res.tags[(0, 1, 2, 3)] in k4.PHASES


def test_triangle_plus_pendant():
    assert k4.run(Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])).cliques == set()


def test_er100_with_planted_k4():
    gen = planted_clique_overlay(erdos_renyi(100, 0.25, 5), [4] * 8, 6)
    res = k4.run(gen.graph, seed=5)
    assert res.cliques == enumerate_cliques(gen.graph, 4)
    assert res.claims.ok
    assert set(res.tags) == res.cliques


@pytest.mark.parametrize("seed", range(3))
def test_forced_clusters_match_oracle(seed):
    g = planted_clique_overlay(erdos_renyi(90, 0.3, seed), [4] * 6, seed).graph
    res = k4.run(g, seed=seed, config=Config(beta=1.1, phi_target=0.1, strict_claims=False))
    assert res.cliques == enumerate_cliques(g, 4)


class TestCover:
    def test_single_expander(self):
        g = Graph.complete(12)
        cover = k4.build_cover(g, Config(phi_target=0.2))
        assert len(cover.clusters) == 1 and cover.levels == 1
        assert cover.residual == set()

    def test_k22_crossing_goes_to_level_two(self):
        edges = clique_edges(range(8)) + clique_edges(range(8, 16)) + [(0, 8), (0, 9), (1, 8), (1, 9)]
        g = Graph(16, edges)
        led = RoundLedger()
        cover = k4.build_cover(g, Config(phi_target=0.2), ledger=led)
        assert [c.level for c in cover.clusters] == [1, 1, 2]
        assert cover.clusters[2].edge_set == {(0, 8), (0, 9), (1, 8), (1, 9)}
        assert cover.residual == set()
        assert set(cover.owner) == set(g.edge_list())
        assert int(cover.overlap().max()) <= cover.levels
        assert led.per_phase["k4.cover"] > 0

    def test_empty_level_stops_early(self):
        g = Graph(12, clique_edges(range(6)) + clique_edges(range(6, 12)))
        cover = k4.build_cover(g, Config(phi_target=0.2))
        assert cover.levels == 1 and len(cover.clusters) == 2

    def test_given_top_clusters(self):
        g = Graph.complete(10)
        cover = k4.build_cover(g, top=[np.arange(5)])
        assert cover.top == [0]
        assert cover.level_of[0] == 1
        assert not cover.residual

    def test_cover_from_parts(self):
        g = Graph.complete(6)
        cover = k4.cover_from_parts(g, [[0, 1, 2]], [([3, 4, 5], [(3, 4)])])
        assert cover.levels == 2
        assert (3, 5) in cover.residual and (0, 1) not in cover.residual
        assert cover.owner[(3, 4)] == 1


class TestCrossSets:
    @staticmethod
    def setup():
        # C = K4 on 0..3, C* = K9 on 4..12; 4..8 each have one neighbour (node 0) in C
        edges = clique_edges(range(4)) + clique_edges(range(4, 13)) + [(0, x) for x in range(4, 9)]
        g = Graph(16, edges)
        cover = k4.cover_from_parts(g, [range(4)], [(range(4, 13), clique_edges(range(4, 13)))])
        return g, cover

    def test_light_nodes(self):
        g, cover = self.setup()
        light, _ = k4.cross_sets(g, cover.clusters[0], cover.clusters[1])
        # deg_C = 1 and 1 * sqrt(16) < 8 = deg_C*
        assert light.tolist() == [4, 5, 6, 7, 8]
        # nodes 9..12 have no neighbour in C
        assert not set(light.tolist()) & {9, 10, 11, 12}

    def test_bad_node(self):
        g, cover = self.setup()
        _, bad = k4.cross_sets(g, cover.clusters[0], cover.clusters[1])
        assert bad.tolist() == [0]

    def test_four_light_neighbours_not_bad(self):
        edges = clique_edges(range(4)) + clique_edges(range(4, 13)) + [(0, x) for x in range(4, 8)]
        g = Graph(16, edges)
        cover = k4.cover_from_parts(g, [range(4)], [(range(4, 13), clique_edges(range(4, 13)))])
        light, bad = k4.cross_sets(g, cover.clusters[0], cover.clusters[1])
        assert len(light) == 4 and len(bad) == 0


def hand_cover():
    """C = K24 on 0..23 (top), C* = K40 on 24..63 at level two, wired for each part."""
    C, S = range(24), range(24, 64)
    cross = [(v, x) for v in (0, 1) for x in range(24, 36)] + [(2, 24), (2, 25)]
    cross += [(v, 40) for v in range(5)] + [(3, 41), (4, 41)]
    g = Graph(64, clique_edges(C) + clique_edges(S) + cross)
    return g, k4.cover_from_parts(g, [C], [(S, clique_edges(S))])


@pytest.mark.parametrize(
    "clique,phase",
    [((3, 4, 40, 41), "part1"), ((1, 2, 24, 25), "part2"), ((0, 1, 24, 25), "part3"), ((0, 1, 2, 3), "intra")],
)
def test_each_part_lists_its_case(clique, phase):
    g, cover = hand_cover()
    claims = ClaimLog()
    found, _, info = k4.cross_cluster_listing(g, cover, claims=claims)
    assert phase in found[clique]
    pairs = k4._Pairs(g, cover)
    assert k4.canonical_case(clique, cover, cover.top, pairs) == phase
    assert claims.ok


def test_hand_cover_finds_every_clique_touching_c():
    g, cover = hand_cover()
    led = RoundLedger()
    found, nxt, info = k4.cross_cluster_listing(g, cover, ledger=led)
    want = {c for c in enumerate_cliques(g, 4) if sum(v < 24 for v in c) >= 2}
    assert want <= set(found)
    assert set(found) <= enumerate_cliques(g, 4)
    assert any(lab.startswith("k4.part3[") for lab in led.phases)
    # C*'s edges and the uncovered crossing edges stay for the next iteration
    assert (24, 25) in nxt.edge_set
    assert cover.residual <= nxt.edge_set
    # nodes seeing an uncovered edge among their neighbours keep their C edges; the rest go
    assert 0 < info["removed"] < 24 * 23 // 2
    assert nxt.m == g.m - info["removed"]


def test_run_tags_first_phase():
    g = planted_clique_overlay(erdos_renyi(60, 0.4, 2), [4], 3).graph
    res = k4.run(g, seed=2)
    assert set(res.tags.values()) <= set(k4.PHASES)
