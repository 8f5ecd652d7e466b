import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetabody import graph as G
from oracles import PETERSEN_EDGES, brute_alpha, brute_maximal, brute_stable_sets, cycle_edges


def to_sets(masks):
    return {frozenset(G.mask_to_vertices(m)) for m in masks}


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return G.Graph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


def test_parse_k2():
    g = G.parse_dimacs("p edge 2 1\ne 1 2")
    assert g.n == 2 and g.edges == {(1, 2)}


def test_parse_empty():
    g = G.parse_dimacs(b"p edge 3 0\n")
    assert g.n == 3 and g.m == 0


def test_parse_c5_with_comments_and_duplicates():
    text = "c five cycle\np edge 5 6\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 1 5\ne 5 1\n"
    g = G.parse_dimacs(text)
    assert g == G.cycle(5)


@pytest.mark.parametrize("text,line", [
    ("p edge x 1\ne 1 2", 1),
    ("p edge 3 1\ne 1 4", 2),
    ("p edge 3 1\nc ok\ne 2 2", 3),
    ("e 1 2\np edge 2 1", 1),
    ("p edge 3 1\ne 1", 2),
    ("p edge 3 1\nq 1 2", 2),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(G.GraphError, match=f"line {line}"):
        G.parse_dimacs(text)


def test_parse_missing_header():
    with pytest.raises(G.GraphError):
        G.parse_dimacs("c nothing here\n")


def test_graph_rejects_self_loops_and_range():
    with pytest.raises(G.GraphError):
        G.Graph.from_edges(3, [(2, 2)])
    with pytest.raises(G.GraphError):
        G.Graph.from_edges(3, [(1, 4)])
    with pytest.raises(G.GraphError):
        G.Graph(65)


def test_dimacs_round_trip():
    g = G.petersen()
    assert G.parse_dimacs(G.to_dimacs(g)) == g


def test_complement_examples():
    assert G.complement(G.complete(3)) == G.empty(3)
    c5 = G.cycle(5)
    assert G.complement(G.complement(c5)) == c5
    # the complement of C5 is the cycle 1-3-5-2-4
    assert G.complement(c5).edges == G.Graph.from_edges(
        5, [(1, 3), (3, 5), (5, 2), (2, 4), (4, 1)]).edges


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_complement_involution(g):
    assert G.complement(G.complement(g)) == g
    assert g.edges.isdisjoint(G.complement(g).edges)


def test_c5_stable_sets():
    sets = to_sets(G.enumerate_stable_sets(G.cycle(5)))
    assert max(len(s) for s in sets) == 2
    assert sum(len(s) == 2 for s in sets) == 5


def test_k4_stable_sets():
    sets = to_sets(G.enumerate_stable_sets(G.complete(4)))
    assert sets == {frozenset()} | {frozenset([i]) for i in range(1, 5)}


def test_petersen_alpha():
    g = G.petersen()
    assert g.edges == G.Graph.from_edges(10, PETERSEN_EDGES).edges
    assert G.alpha(g) == 4


def test_cliques():
    assert to_sets(G.maximal_cliques(G.cycle(5))) == {frozenset(e) for e in cycle_edges(5)}
    k3 = to_sets(G.enumerate_cliques(G.complete(3)))
    assert k3 == {frozenset(s) for r in range(4) for s in itertools.combinations([1, 2, 3], r)}
    e4 = to_sets(G.enumerate_cliques(G.empty(4)))
    assert e4 == {frozenset()} | {frozenset([i]) for i in range(1, 5)}


def test_alpha_examples():
    assert G.alpha(G.cycle(5)) == 2
    assert G.alpha(G.cycle(5), np.zeros(5)) == 0


def test_enumeration_guard():
    with pytest.raises(ValueError):
        G.enumerate_stable_sets(G.empty(25))


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_enumeration_matches_brute_force(g):
    sets = to_sets(G.enumerate_stable_sets(g))
    assert sets == set(brute_stable_sets(g.n, g.edges))
    for s in sets:
        assert not any(g.has_edge(i, j) for i, j in itertools.combinations(s, 2))
    assert to_sets(G.maximal_stable_sets(g)) == set(brute_maximal(list(sets)))
    assert G.alpha(g) == max(len(s) for s in sets)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_alpha_weighted_and_monotone(g, data):
    w = np.array(data.draw(st.lists(st.floats(0, 5), min_size=g.n, max_size=g.n)))
    bump = np.array(data.draw(st.lists(st.floats(0, 2), min_size=g.n, max_size=g.n)))
    a = G.alpha(g, w)
    assert a == pytest.approx(brute_alpha(g.n, g.edges, w), abs=1e-12)
    assert G.alpha(g, w + bump) >= a - 1e-12


def test_induced_subgraph():
    h = G.induced_subgraph(G.cycle(5), [1, 2, 3])
    assert h.n == 3 and h.edges == {(1, 2), (2, 3)}
