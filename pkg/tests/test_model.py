from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from t3co.instance import load_native_file
from t3co.errors import AmbiguousWalkError, InvalidWalkError
from t3co.model import (Edge, Graph, Walk, bottleneck, complement_cost, is_valid_walk, lift_cost, natural_key,
                        originating_proper_walk, scatter, traversals_count, visits_count, walk_parts)

FIG1_GRAPH = load_native_file(Path(__file__).parent / "fixtures" / "fig1.t3i").graph

S1 = ("v1", "e1", "v2", "e2", "v3", "e2", "e3", "v4", "e4")
S2 = ("v1", "e1", "v2", "e2", "v3", "e2", "v2", "e3", "v4", "e4")
S3 = ("v1", "e1", "v2", "e2", "v3", "e2", "e3", "v4", "e5")


def walk(*items):
    return Walk.of(*items)


def test_fig1_costs(fig1):
    c = fig1.table("c")
    assert lift_cost(walk("e1", "e2", "e2", "e3", "e4"), c) == 8
    assert lift_cost(walk(*S1), c) == 12
    assert lift_cost(walk(*S2), c) == 13
    assert lift_cost(walk(*S3), c) == 13


def test_valid_walks(fig1):
    g = fig1.graph
    assert is_valid_walk(g, walk(*S1))
    assert not is_valid_walk(g, walk("v1", "e2", "v3"))
    assert is_valid_walk(Graph(("v1",), ()), walk("v1"))


def test_originating_proper_walk(fig1):
    g = fig1.graph
    p = originating_proper_walk(g, walk(*S1))
    assert str(p) == "v1 e1 v2 e2 v3 e2 v2! e3 v4 e4 v1!"
    assert str(originating_proper_walk(g, walk(*S2))) == "v1 e1 v2 e2 v3 e2 v2 e3 v4 e4 v1!"
    assert originating_proper_walk(g, p) == p


def test_two_node_ambiguity():
    g = Graph(("a", "b"), (Edge("x", "a", "b"),))
    with pytest.raises(AmbiguousWalkError):
        originating_proper_walk(g, Walk.of("x", graph=g))


def test_unknown_edge_is_invalid(fig1):
    with pytest.raises(InvalidWalkError):
        originating_proper_walk(fig1.graph, walk("v1", "e9", "v2"))


def test_counts(fig1):
    g = fig1.graph
    assert visits_count(g, walk(*S2))["v2"] == 2
    assert visits_count(g, walk(*S1))["v2"] == 1
    assert visits_count(g, walk("v1"))["v9"] == 0
    assert traversals_count(g, walk(*S1))["v2"] == 2
    assert traversals_count(g, walk(*S1))["v3"] == 1


def test_hamiltonian_circuit_counts_each_node_once():
    nodes = ("a", "b", "c", "d")
    edges = tuple(Edge(f"e{i}", nodes[i], nodes[(i + 1) % 4]) for i in range(4))
    g = Graph(nodes, edges)
    t = traversals_count(g, walk("a", "e0", "b", "e1", "c", "e2", "d", "e3", "a"))
    assert set(t.values()) == {1}


def test_walk_parts(fig1):
    parts = walk_parts(fig1.graph, walk(*S1))
    assert parts.sequence_edges == ("e1", "e2", "e2", "e3", "e4")
    assert (parts.start, parts.end) == ("v1", "v1")
    assert parts.sequence_visited == ("v1", "v2", "v3", "v4")


def test_complement_cost(fig1):
    ones = {v: 1 for v in fig1.nodes}
    assert complement_cost(fig1.nodes, walk(*S1), ones) == 0
    assert complement_cost(fig1.nodes, walk("v1", "e1", "v2"), ones) == 2


def test_aggregates(fig1):
    c = fig1.table("c")
    assert bottleneck(walk(*S1), c) == 2
    assert scatter(walk(*S3), c) == 1


def test_natural_key_orders_numbers():
    assert sorted(["v10", "v2", "v1"], key=natural_key) == ["v1", "v2", "v10"]


def test_graph_rejects_unknown_endpoint():
    with pytest.raises(ValueError):
        Graph(("a",), (Edge("x", "a", "b"),))


# properties over random walks on the fig1 graph


@st.composite
def fig1_walks(draw):
    adj = {"v1": [("e1", "v2"), ("e4", "v4"), ("e5", "v4")], "v2": [("e1", "v1"), ("e2", "v3"), ("e3", "v4")],
           "v3": [("e2", "v2")], "v4": [("e3", "v2"), ("e4", "v1"), ("e5", "v1")]}
    node = draw(st.sampled_from(sorted(adj)))
    items = [node]
    for _ in range(draw(st.integers(0, 8))):
        e, node = draw(st.sampled_from(adj[node]))
        items += [e, node if draw(st.booleans()) else node + "!"]
    if not items[0].endswith("!") and draw(st.booleans()):
        items[0] += "!"
    return Walk.of(*items)


@settings(max_examples=200, deadline=None)
@given(fig1_walks())
def test_visits_never_exceed_traversals(w):
    g = FIG1_GRAPH
    v, t = visits_count(g, w), traversals_count(g, w)
    assert all(v[n] <= t[n] for n in g.nodes)
    closed = len(w.edge_ids) > 0 and w.steps[0].node == w.steps[-1].node
    assert sum(t.values()) == len(w.edge_ids) + (0 if closed else 1)
    assert originating_proper_walk(g, originating_proper_walk(g, w)) == originating_proper_walk(g, w)


@settings(max_examples=200, deadline=None)
@given(fig1_walks(), fig1_walks(), st.dictionaries(st.sampled_from(["v1", "v2", "v3", "v4"]),
                                                   st.fractions(0, 10), min_size=4))
def test_lift_is_additive_and_complement_partitions(a, b, p):
    c = {f"e{i}": Fraction(i) for i in range(1, 6)}
    edges_a, edges_b = Walk.of(*a.edge_ids), Walk.of(*b.edge_ids)
    assert lift_cost(Walk.of(*a.edge_ids, *b.edge_ids), c) == lift_cost(edges_a, c) + lift_cost(edges_b, c)
    seen = set(a.visited_nodes)
    inside = sum((p[v] for v in p if v in seen), Fraction(0))
    assert inside + complement_cost(p, a, p) == sum(p.values(), Fraction(0))
