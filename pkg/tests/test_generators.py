from __future__ import annotations

import numpy as np
import pytest

from kplist.errors import InputError
from kplist.generators import (
    FAMILIES,
    barbell,
    erdos_renyi,
    generate,
    planted_clique_overlay,
    random_regular,
    two_expanders_bridged,
)
from kplist.graph import Graph, read_edgelist, write_edgelist


def test_seeded_er_is_reproducible():
    assert erdos_renyi(50, 0.2, 3) == erdos_renyi(50, 0.2, 3)
    assert erdos_renyi(50, 0.2, 3) != erdos_renyi(50, 0.2, 4)


def test_er_density():
    g = erdos_renyi(400, 0.1, 0)
    assert abs(g.m - 0.1 * 400 * 399 / 2) < 4 * np.sqrt(0.1 * 400 * 399 / 2)


def test_avg_degree_parameter():
    g = generate("erdos-renyi", {"n": 300, "avg_degree": 30}, 1).graph
    assert 25 < g.avg_degree < 35
    with pytest.raises(InputError):
        generate("erdos-renyi", {"n": 10, "avg_degree": 3, "p_edge": 0.2})


@pytest.mark.parametrize("n,d", [(20, 3), (30, 4), (16, 5)])
def test_random_regular(n, d):
    g = random_regular(n, d, 2)
    assert np.all(g.degree == d)


def test_two_expanders_bridge_count():
    g = two_expanders_bridged(40, p_in=1.0, bridges=3, seed=0)
    half = 20
    cross = [(u, v) for u, v in g.edge_list() if (u < half) != (v < half)]
    assert len(cross) == 3
    assert g.m == 2 * 190 + 3


def test_barbell_shape():
    g = barbell(10)
    assert g.n == 10
    assert g.m == 2 * 10 + 1


def test_planted_cliques_present():
    gen = planted_clique_overlay(Graph(30), [5, [1, 2, 3]], 4)
    assert len(gen.planted) == 2 and gen.planted[1] == (1, 2, 3)
    for c in gen.planted:
        assert all(gen.graph.has_edge(u, v) for i, u in enumerate(c) for v in c[i + 1 :])


@pytest.mark.parametrize("bad", [[40], [[0, 0, 1]], [[-1, 2]]])
def test_bad_planted(bad):
    with pytest.raises(InputError):
        planted_clique_overlay(Graph(30), bad)


@pytest.mark.parametrize(
    "family,params",
    [
        ("erdos-renyi", {"n": 20, "p_edge": 0.3}),
        ("random-regular", {"n": 12, "d": 3}),
        ("two-expanders-bridged", {"n": 20}),
        ("barbell", {"n": 12}),
        ("cycle", {"n": 7}),
        ("complete", {"n": 6}),
        ("planted-clique-overlay", {"base": {"family": "cycle", "params": {"n": 12}}, "cliques": [4]}),
    ],
)
def test_every_family(family, params, tmp_path):
    assert family in FAMILIES
    gen = generate(family, params, 0)
    write_edgelist(gen.graph, tmp_path / "g.txt", {"family": family})
    back, meta = read_edgelist(tmp_path / "g.txt")
    assert back == gen.graph and meta["family"] == family


def test_unknown_family_and_params():
    with pytest.raises(InputError):
        generate("lattice", {"n": 3})
    with pytest.raises(InputError):
        generate("cycle", {"n": 5, "extra": 1})
