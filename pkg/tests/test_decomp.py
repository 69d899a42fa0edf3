from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kplist.config import Config
from kplist.decomp import Clustering, clustering_from_parts, decompose, validate_decomposition
from kplist.errors import InputError, ValidationFailure
from kplist.generators import erdos_renyi, two_expanders_bridged
from kplist.graph import Graph

from corpus import small_corpus


def two_k8() -> Graph:
    left = list(itertools.combinations(range(8), 2))
    right = [(u + 8, v + 8) for u, v in left]
    return Graph(16, left + right + [(7, 8)])


def test_complete_graph_is_one_cluster():
    cl = decompose(Graph.complete(16), 0.1)
    assert len(cl.clusters) == 1
    assert cl.inter_edges == set()
    assert validate_decomposition(Graph.complete(16), cl, 0.1).ok


def test_bridged_cliques_split_at_bridge():
    g = two_k8()
    cl = decompose(g, 0.1)
    assert sorted(map(tuple, (c.tolist() for c in cl.clusters))) == [tuple(range(8)), tuple(range(8, 16))]
    assert cl.inter_edges == {(7, 8)}
    assert cl.achieved_epsilon == Fraction(1, 57)
    assert validate_decomposition(g, cl, 0.1).ok


def test_split_off_singleton_fails_epsilon():
    g = two_k8()
    bad = clustering_from_parts(g, [[0], range(1, 8), range(8, 16)])
    rep = validate_decomposition(g, bad, 0.1)
    assert rep.epsilon == Fraction(8, 57)
    assert not rep.ok
    with pytest.raises(ValidationFailure):
        rep.raise_if_failed()


def test_tampered_inter_edges_detected():
    g = two_k8()
    cl = decompose(g, 0.1)
    cl.inter_edges = set()
    assert not validate_decomposition(g, cl, 0.1).ok


def test_disconnected_graph_splits_into_components():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    cl = decompose(g, 0.2)
    assert len(cl.clusters) == 2 and not cl.inter_edges


def test_isolated_nodes_become_singletons():
    g = Graph(4, [(0, 1)])
    cl = decompose(g, 0.2)
    assert sorted(len(c) for c in cl.clusters) == [1, 1, 2]
    assert cl.certificates[cl.cluster_of[2]] is None


def test_rejects_bad_phi():
    with pytest.raises(InputError):
        decompose(Graph.complete(4), 1.5)


def test_default_phi_uses_config():
    g = erdos_renyi(40, 0.3, 1)
    cl = decompose(g, config=Config())
    assert cl.phi_target == pytest.approx(1 / np.log2(40) ** 2)


def test_overlapping_parts_rejected():
    with pytest.raises(InputError):
        clustering_from_parts(Graph.complete(4), [[0, 1], [1, 2]])


@pytest.mark.parametrize("name,g", sorted(small_corpus().items()))
@pytest.mark.parametrize("phi", [0.05, 0.2, 0.4])
def test_corpus_decompositions_certify(name, g, phi):
    cl = decompose(g, phi, seed=3)
    covered = np.concatenate(cl.clusters)
    assert sorted(covered.tolist()) == list(range(g.n))
    rep = validate_decomposition(g, cl, 1.0)
    assert rep.ok, rep.failures
    for c in cl.certificates:
        assert c is None or c >= Fraction(phi).limit_denominator(10**6) or float(c) >= phi


@settings(max_examples=15)
@given(seed=st.integers(0, 10**6), phi=st.sampled_from([0.05, 0.15, 0.3]))
def test_random_decomposition_is_valid(seed, phi):
    g = two_expanders_bridged(40, p_in=0.4, bridges=2, seed=seed)
    cl = decompose(g, phi, seed=seed)
    assert validate_decomposition(g, cl, 1.0).ok
    assert all(c is None or float(c) >= phi for c in cl.certificates)


def test_roundtrip(tmp_path):
    g = two_k8()
    cl = decompose(g, 0.1)
    cl.save(tmp_path / "c.json")
    back = Clustering.load(tmp_path / "c.json")
    assert back.inter_edges == cl.inter_edges
    assert back.certificates == cl.certificates
    assert [c.tolist() for c in back.clusters] == [c.tolist() for c in cl.clusters]
