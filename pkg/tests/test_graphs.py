import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isinglimits.errors import DimensionMismatch, EmptyClass, InfeasibleEnumeration, PreconditionViolated
from isinglimits.graphs import (
    Graph,
    GraphClassSpec,
    cardinality_bounds,
    enumerate_class,
    matching_number,
    maximum_matching,
    pair_index,
    pair_list,
    symmetric_difference,
)

import oracle

# class sizes from the itertools oracle, indexed [p][bound]
EDGE_COUNTS = {2: {1: 1, 2: 1, 3: 1}, 3: {1: 3, 2: 6, 3: 7}, 4: {1: 6, 2: 21, 3: 41},
               5: {1: 10, 2: 55, 3: 175}, 6: {1: 15, 2: 120, 3: 575}}
DEGREE_COUNTS = {2: {1: 1}, 3: {1: 3, 2: 7}, 4: {1: 9, 2: 40}, 5: {1: 25, 2: 252}, 6: {1: 75, 2: 1857}}


def graphs(max_p=7):
    return st.integers(2, max_p).flatmap(
        lambda p: st.integers(0, (1 << (p * (p - 1) // 2)) - 1).map(lambda m: Graph(p, m)))


def test_pair_index_is_lexicographic():
    assert pair_list(4) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    for i, (s, t) in enumerate(pair_list(6)):
        assert pair_index(s, t, 6) == i == pair_index(t, s, 6)


def test_enumerate_small_examples():
    assert [g.edge_list() for g in enumerate_class(GraphClassSpec.edge(2, 1))] == [[(0, 1)]]
    assert len(list(enumerate_class(GraphClassSpec.edge(3, 2)))) == 6
    assert len(list(enumerate_class(GraphClassSpec.degree(3, 1)))) == 3


@pytest.mark.parametrize("p", range(2, 7))
def test_enumeration_counts_match_oracle(p):
    for k, n in EDGE_COUNTS[p].items():
        out = list(enumerate_class(GraphClassSpec.edge(p, k)))
        assert len(out) == n
        assert [g.edges for g in out] == sorted(g.edges for g in out)
        assert len({g.edges for g in out}) == n
    for d, n in DEGREE_COUNTS[p].items():
        assert len(list(enumerate_class(GraphClassSpec.degree(p, d)))) == n


def test_enumeration_matches_oracle_graph_sets():
    for kind, b in (("edge", 2), ("degree", 2)):
        ours = {tuple(g.edge_list()) for g in enumerate_class(GraphClassSpec(kind, 4, b))}
        assert ours == set(oracle.graphs_of_class(4, kind, b))


def test_enumeration_guards():
    with pytest.raises(InfeasibleEnumeration):
        list(enumerate_class(GraphClassSpec.degree(9, 1)))
    with pytest.raises(EmptyClass):
        GraphClassSpec.degree(5, 2, lam=1.0, omega=1.5)
    with pytest.raises(EmptyClass):
        GraphClassSpec.edge(5, 2, lam=1.0, omega=0.5)


def test_cardinality_examples():
    assert cardinality_bounds(GraphClassSpec.edge(3, 1)) == (3, 3)
    with pytest.raises(PreconditionViolated):
        cardinality_bounds(GraphClassSpec.edge(3, 2))
    assert cardinality_bounds(GraphClassSpec.edge(6, 3)) == (455, 1365)


def test_cardinality_brackets_enumeration():
    for p in range(2, 7):
        for k in range(1, 4):
            if k <= p * (p - 1) / 4:
                lo, hi = cardinality_bounds(GraphClassSpec.edge(p, k))
                assert lo <= EDGE_COUNTS[p][k] <= hi
        for d in (1, 2):
            if d <= (p - 1) / 2:
                lo, hi = cardinality_bounds(GraphClassSpec.degree(p, d))
                assert lo <= DEGREE_COUNTS[p][d] <= hi


def test_symmetric_difference_examples():
    a = Graph.from_edges(4, [(1, 2)])
    b = Graph.from_edges(4, [(2, 3)])
    assert symmetric_difference(a, a).edges == 0
    assert symmetric_difference(a, b).edge_list() == [(1, 2), (2, 3)]
    c = Graph.from_edges(4, [(1, 2), (2, 3)])
    d = Graph.from_edges(4, [(2, 3), (1, 3)])
    assert symmetric_difference(c, d).edge_list() == [(1, 2), (1, 3)]
    with pytest.raises(DimensionMismatch):
        symmetric_difference(a, Graph.empty(5))


def test_matching_examples():
    assert matching_number(Graph.empty(4)) == 0
    assert matching_number(Graph.from_edges(4, [(1, 2), (2, 3)])) == 1
    assert matching_number(Graph.from_edges(5, [(1, 2), (3, 4)])) == 2


@settings(max_examples=150, deadline=None)
@given(graphs(6))
def test_matching_against_brute_force(g):
    m = matching_number(g)
    assert m == oracle.matching_number(g.edge_list())
    assert m <= g.p // 2 and m <= g.n_edges
    verts = [v for e in maximum_matching(g) for v in e]
    assert len(verts) == len(set(verts)) == 2 * m
    assert all(g.has_edge(s, t) for s, t in maximum_matching(g))


@settings(max_examples=100, deadline=None)
@given(graphs(7), st.data())
def test_symmetric_difference_laws(g, data):
    h = Graph(g.p, data.draw(st.integers(0, (1 << (g.p * (g.p - 1) // 2)) - 1)))
    assert symmetric_difference(g, h) == symmetric_difference(h, g)
    assert symmetric_difference(symmetric_difference(g, h), h) == g


@settings(max_examples=100, deadline=None)
@given(graphs(8))
def test_text_round_trip_and_degrees(g):
    assert Graph.from_text(g.to_text()) == g
    assert sum(g.degrees()) == 2 * g.n_edges
    assert g.max_degree <= g.p - 1


@pytest.mark.parametrize("p", range(3, 7))
@pytest.mark.parametrize("d", (1, 2))
def test_matching_of_differences_scales_with_degree(p, d):
    if d > p - 1:
        pytest.skip("class equals the single-degree case")
    gs = list(enumerate_class(GraphClassSpec.degree(p, d)))
    for a in gs:
        for b in gs:
            diff = symmetric_difference(a, b)
            assert matching_number(diff) >= diff.n_edges / (4 * d)


def test_bad_text_and_bounds():
    with pytest.raises(PreconditionViolated):
        Graph.from_text("p=3;edges=0-3")
    with pytest.raises(PreconditionViolated):
        Graph(25, 0)


def test_class_spec_round_trip_and_membership():
    spec = GraphClassSpec.degree(6, 2, 0.5)
    assert GraphClassSpec.from_dict(spec.to_dict()) == spec
    assert math.isclose(spec.omega, 1.0)
    assert not spec.contains(Graph.empty(6))
    assert spec.contains(Graph.from_edges(6, [(0, 1), (1, 2)]))
    assert not spec.contains(Graph.from_edges(6, [(0, 1), (0, 2), (0, 3)]))
