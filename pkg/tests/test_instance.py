import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import fixture_instances, property_scan
from t3co.errors import BindingError, ClosureError, InstanceFormatError, RangeError, UnsupportedFormatError
from t3co.generators import complete_instance, random_connected, unit_complete, with_tables
from t3co.grammar import parse
from t3co.instance import (PairCosts, check_declared_properties, check_property, check_triangle, expand_walk,
                           load_native, load_tsplib, metric_closure, save_native, shortest_paths)
from t3co.model import Walk, lift_cost
from t3co.semantics import resolve

TSP3 = """NAME: t
TYPE: TSP
DIMENSION: 3
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 0 4
EOF
"""

MATRIX = """NAME: m
TYPE: TSP
DIMENSION: 2
EDGE_WEIGHT_TYPE: EXPLICIT
EDGE_WEIGHT_FORMAT: FULL_MATRIX
EDGE_WEIGHT_SECTION
0 7
7 0
EOF
"""


def test_fig1_fixture(fig1):
    g = fig1.graph
    assert g.nodes == ("v1", "v2", "v3", "v4")
    assert len(g.edges) == 5
    assert [e.id for e in g.edges_between("v1", "v4")] == ["e4", "e5"]
    assert all(fig1.table("c")[v] == 1 for v in g.nodes)


def test_save_load_round_trip(fig1):
    again = load_native(save_native(fig1))
    assert again.graph == fig1.graph
    assert again.tables == fig1.tables


def test_missing_node_cost_is_a_binding_error():
    text = "NODES\nv1 v2\n\nEDGES\ne1 v1 v2\n\nCOSTS c\ne1 1\n\nCOSTS c2\nv1 1\n"
    variant = resolve(parse("⟨=1|=1|circuit|c:E↦ℝ≥0; c2:V↦ℝ≥0|min c(S) + c2(S)⟩"))
    with pytest.raises(BindingError, match="c2"):
        load_native(text, variant)


def test_empty_window_is_rejected():
    text = "NODES\nv1 v2\n\nEDGES\ne1 v1 v2\n\nCOSTS c\ne1 1\n\nCOSTS r\nv1 5\nv2 0\n\nCOSTS d\nv1 3\nv2 9\n"
    with pytest.raises(InstanceFormatError, match="empty"):
        load_native(text)


def test_value_outside_declared_range():
    text = "NODES\nv1 v2\n\nEDGES\ne1 v1 v2\n\nCOSTS c\ne1 -1\n"
    variant = resolve(parse("⟨=1|=1|circuit|c:E↦ℝ≥0|min c(S)⟩"))
    with pytest.raises(RangeError):
        load_native(text, variant)


def test_tsplib_euclidean():
    inst = load_tsplib(TSP3)
    assert sorted(inst.table("c").values()) == [3, 4, 5]


def test_tsplib_full_matrix():
    inst = load_tsplib(MATRIX)
    assert len(inst.graph.edges) == 1
    assert list(inst.table("c").values()) == [7]


def test_tsplib_geo_is_unsupported():
    with pytest.raises(UnsupportedFormatError):
        load_tsplib(TSP3.replace("EUC_2D", "GEO"))


def test_unit_metric_verified():
    k4 = unit_complete(4)
    for word in ("identity", "symmetric", "triangle", "metric"):
        assert check_property(k4, "c", word).status == "verified"


def test_triangle_violation_witness():
    inst = complete_instance({(1, 2): 5, (1, 3): 1, (3, 2): 1, (2, 1): 5, (3, 1): 1, (2, 3): 1}, 3)
    # witness reads (u, detour node, v)
    assert check_triangle(PairCosts(inst.graph, inst.table("c"))) == ("v1", "v3", "v2")


def test_declared_properties(fig1):
    variant = resolve(parse("⟨=1|=1|circuit|c:E↦ℝ≥0, metric, planar|min c(S)⟩"))
    report = check_declared_properties(metric_closure(fig1), variant)
    assert report.status("c", "metric") == "verified"
    assert report.status("c", "planar") == "declared-only"


def test_fig1_closure(fig1):
    closure = metric_closure(fig1)
    c = closure.table("c")
    assert c["v1~v3"] == 3 and c["v3~v4"] == 3
    assert check_property(closure, "c", "triangle").status == "verified"


def test_closure_of_metric_is_identity():
    k4 = unit_complete(4)
    assert sorted(metric_closure(k4).table("c").values()) == sorted(k4.table("c").values())


def test_disconnected_closure():
    inst = load_native("NODES\na b\n\nCOSTS c\na 0\n")
    with pytest.raises(ClosureError):
        metric_closure(inst)


def test_expand_walk_keeps_cost(fig1):
    closure = metric_closure(fig1)
    tour = Walk.of("v1", "v1~v3", "v3", "v3~v4", "v4", "v1~v4", "v1!", graph=closure.graph)
    full = expand_walk(closure, tour)
    edges_only = {k: v for k, v in fig1.table("c").items() if k.startswith("e")}
    closure_edges = {k: v for k, v in closure.table("c").items() if "~" in k}
    assert lift_cost(full, edges_only) == lift_cost(tour, closure_edges) == 8
    assert full.visited_nodes == tour.visited_nodes


def test_shortest_paths_distances(fig1):
    dist, _ = shortest_paths(fig1.graph, fig1.table("c"))
    assert dist[("v1", "v3")] == 3


def test_property_checker_matches_scan(fixtures_dir):
    for name, inst in fixture_instances(fixtures_dir).items():
        for word in ("identity", "symmetric", "triangle", "shoreline"):
            got = check_property(inst, "c", word).status == "verified"
            assert got == property_scan(inst, word), (name, word)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 7), st.integers(0, 4))
def test_closure_is_idempotent(seed, n, extra):
    inst = random_connected(random.Random(seed), n, extra=extra)
    once = metric_closure(inst)
    twice = metric_closure(once)
    assert once.table("c") == twice.table("c")
    assert property_scan(once, "triangle")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 6))
def test_random_costs_property_verdicts(seed, n):
    rng = random.Random(seed)
    w = {(i, j): rng.randint(1, 6) for i in range(1, n + 1) for j in range(1, n + 1) if i != j}
    if rng.random() < 0.5:
        w.update({(j, i): x for (i, j), x in w.items() if i < j})
    inst = complete_instance(w, n, directed=True)
    for word in ("identity", "symmetric", "triangle", "shoreline"):
        assert (check_property(inst, "c", word).status == "verified") == property_scan(inst, word)


def test_with_tables_keeps_graph(fig1):
    inst = with_tables(fig1, p={v: 1 for v in fig1.nodes})
    assert inst.graph == fig1.graph and inst.table("p")["v1"] == Fraction(1)
