from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import small_corpus, two_k5_bridged
from kplist.errors import CapabilityError, InputError, StructuralError
from kplist.graph import (
    ClusterView,
    Graph,
    cut_conductance,
    deg_in,
    edges_between,
    estimate_mixing_time,
    graph_conductance,
    read_edgelist,
    write_edgelist,
)
from kplist.oracle import conductance_by_enumeration


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, k in zip(pairs, keep) if k])


class TestGraphInvariants:
    def test_rejects_self_loops(self):
        with pytest.raises(InputError):
            Graph(3, [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            Graph(3, [(0, 3)])

    def test_parallel_edges_collapse(self):
        g = Graph(3, [(0, 1), (1, 0), (0, 1)])
        assert g.m == 1

    @given(graphs())
    def test_adjacency_matches_edges(self, g):
        for v in range(g.n):
            nb = g.adjacency(v)
            assert g.degree[v] == len(nb)
            assert list(nb) == sorted(nb)
            for u in nb.tolist():
                assert g.has_edge(u, v) and v in g.neighbor_sets[u]
        assert int(g.degree.sum()) == 2 * g.m

    def test_arrays_are_read_only(self):
        g = Graph.complete(4)
        with pytest.raises(ValueError):
            g.edges[0, 0] = 3


class TestDegIn:
    def test_complete(self):
        assert deg_in(Graph.complete(4), 0, {1, 2}) == 2

    def test_empty_set(self):
        assert deg_in(Graph.cycle(6), 3, set()) == 0

    def test_cycle(self):
        assert deg_in(Graph.cycle(6), 0, {1, 5, 3}) == 2

    def test_unknown_node(self):
        with pytest.raises(InputError):
            deg_in(Graph.cycle(6), 9, {1})


class TestEdgesBetween:
    def test_bipartite_crossing(self):
        assert edges_between(Graph.complete(4), {0, 1}, {2, 3}) == {(0, 2), (0, 3), (1, 2), (1, 3)}

    def test_no_crossing(self):
        g = Graph(4, [(0, 1), (2, 3)])
        assert edges_between(g, {0, 1}, {2, 3}) == set()

    def test_same_set_reports_each_edge_once(self):
        assert edges_between(Graph.cycle(6), {0, 1, 2}, {0, 1, 2}) == {(0, 1), (1, 2)}


class TestCutConductance:
    def test_complete_singleton(self):
        view = ClusterView(Graph.complete(4), range(4))
        assert cut_conductance(view, {0}) == 1

    def test_cycle_half(self):
        view = ClusterView(Graph.cycle(6), range(6))
        assert cut_conductance(view, {0, 1, 2}) == Fraction(1, 3)

    def test_loop_mode_without_outside_edges_matches_induced(self):
        g = Graph.cycle(6)
        a = ClusterView(g, range(6), "induced")
        b = ClusterView(g, range(6), "loop")
        assert cut_conductance(a, {0, 1, 2}) == cut_conductance(b, {0, 1, 2})

    @pytest.mark.parametrize("side", [set(), set(range(6))])
    def test_rejects_trivial_cuts(self, side):
        with pytest.raises(InputError):
            cut_conductance(ClusterView(Graph.cycle(6), range(6)), side)

    @given(graphs(), st.data())
    def test_loop_mode_never_exceeds_induced(self, g, data):
        members = data.draw(st.sets(st.integers(0, g.n - 1), min_size=2))
        side = data.draw(st.sets(st.sampled_from(sorted(members)), min_size=1, max_size=len(members) - 1))
        induced = ClusterView(g, members, "induced")
        loop = ClusterView(g, members, "loop")
        try:
            a = cut_conductance(induced, side)
        except StructuralError:
            return
        assert cut_conductance(loop, side) <= a

    @given(graphs(), st.data())
    def test_volumes_add_up(self, g, data):
        members = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1))
        side = data.draw(st.sets(st.sampled_from(sorted(members))))
        view = ClusterView(g, members, "loop")
        rest = set(members) - side
        loops = int(view.self_loops.sum())
        assert view.volume(side) + view.volume(rest) == 2 * view.m_inside + loops
        for v, d in zip(view.members.tolist(), view.view_degree.tolist()):
            assert d == g.degree[v]


class TestGraphConductance:
    @pytest.mark.parametrize(
        "g, expected",
        [(Graph.complete(4), Fraction(2, 3)), (Graph.cycle(6), Fraction(1, 3)), (two_k5_bridged(), Fraction(1, 21))],
        ids=["K4", "C6", "two-K5"],
    )
    def test_exact_values(self, g, expected):
        assert graph_conductance(ClusterView(g, range(g.n)), "exact").value == expected

    def test_exact_cap(self):
        with pytest.raises(CapabilityError):
            graph_conductance(ClusterView(Graph.cycle(21), range(21)), "exact")

    @pytest.mark.parametrize("name, g", sorted(small_corpus().items()))
    def test_exact_equals_enumeration(self, name, g):
        view = ClusterView(g, range(g.n))
        best, _ = conductance_by_enumeration(view)
        res = graph_conductance(view, "exact")
        assert res.value == best
        assert cut_conductance(view, res.cut) == best

    @pytest.mark.parametrize("name, g", sorted(small_corpus().items()))
    def test_sweep_brackets_exact(self, name, g):
        view = ClusterView(g, range(g.n))
        exact = graph_conductance(view, "exact").value
        sweep = graph_conductance(view, "sweep")
        assert sweep.value >= exact
        assert sweep.lower_bound <= float(exact) + 1e-12


class TestMixing:
    def test_complete_mixes_fast(self):
        assert estimate_mixing_time(ClusterView(Graph.complete(8), range(8))) <= 4

    def test_single_node(self):
        assert estimate_mixing_time(ClusterView(Graph(1), [0])) == 0

    def test_cycle_slower_than_complete(self):
        c = estimate_mixing_time(ClusterView(Graph.cycle(16), range(16)))
        k = estimate_mixing_time(ClusterView(Graph.complete(16), range(16)))
        assert c > k

    def test_disconnected(self):
        with pytest.raises(StructuralError):
            estimate_mixing_time(ClusterView(Graph(4, [(0, 1), (2, 3)]), range(4)))

    @pytest.mark.parametrize("tol", [0.0, 0.5, 0.7])
    def test_tolerance_range(self, tol):
        with pytest.raises(InputError):
            estimate_mixing_time(ClusterView(Graph.complete(3), range(3)), tol)

    @pytest.mark.parametrize("name, g", sorted(small_corpus().items()))
    def test_within_conductance_band(self, name, g):
        view = ClusterView(g, range(g.n))
        phi = float(graph_conductance(view, "exact").value)
        t = estimate_mixing_time(view)
        assert 0.25 / phi <= t <= 16 * np.log(view.total_volume()) / phi**2


def test_edgelist_roundtrip(tmp_path):
    g = two_k5_bridged()
    path = tmp_path / "g.txt"
    write_edgelist(g, path, {"family": "hand"})
    back, meta = read_edgelist(path)
    assert back == g and meta["family"] == "hand" and meta["n"] == 10


def test_edgelist_without_header(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# a comment\n0 1\n1 2  # trailing\n\n")
    g, meta = read_edgelist(path)
    assert g.n == 3 and g.m == 2 and meta == {}


def test_edgelist_bad_line(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("0 1 2\n")
    with pytest.raises(InputError):
        read_edgelist(path)
