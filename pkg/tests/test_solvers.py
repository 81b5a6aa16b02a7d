import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from t3co.errors import UnverifiedPropertyError
from t3co.generators import (complete_instance, random_connected, random_metric, unit_complete, with_params,
                             with_tables)
from t3co.grammar import parse
from t3co.semantics import resolve
from t3co.solvers import (Oracle, SolveLimits, brute_force, christofides, double_tree, enumerate_walks,
                          flag_patterns, min_weight_perfect_matching, nearest_neighbor, ratio_check)
from t3co.validator import validate

STD = resolve(parse("⟨=1|=1|circuit; complete; undirected|c:E↦ℝ≥0|min c(S)⟩"))
GE1 = resolve(parse("⟨=1|≥1|circuit; undirected|c:E↦ℝ≥0|min c(S)⟩"))
QUOTA = resolve(parse("⟨=1|≤1; always|circuit; complete; undirected|c:E↦ℝ≥0; q:V↦ℤ≥0|q(S) ≥ b; min c(S)⟩"))


def line(n):
    return complete_instance({(i, j): abs(i - j) for i in range(1, n + 1) for j in range(1, n + 1)}, n)


def tour_cost(inst, order):
    c = inst.table("c")
    key = lambda a, b: f"e{min(a, b)}_{max(a, b)}"
    return sum(c[key(a, b)] for a, b in zip(order, order[1:] + order[:1]))


def exhaustive_tour(inst):
    n = len(inst.nodes)
    return min(tour_cost(inst, (1,) + p) for p in permutations(range(2, n + 1)))


@pytest.mark.parametrize("strategy", ["auto", "walks", "multiset"])
def test_fig1_ge1_optimum(fig1, strategy):
    res = brute_force(GE1, fig1, strategy=strategy)
    assert res.status == "optimal" and res.value == 8
    assert validate(GE1, fig1, res.best).feasible


def test_k4_standard():
    res = brute_force(STD, unit_complete(4))
    assert res.value == 4 and res.strategy == "permutation"


def test_ties_break_by_smallest_sequence():
    res = brute_force(STD, unit_complete(4))
    assert str(res.best.walk) == "v1 e1_2 v2 e2_3 v3 e3_4 v4 e1_4 v1!"


def test_quota_must_visit_all():
    k4 = unit_complete(4)
    inst = with_params(with_tables(k4, q={v: 1 for v in k4.nodes}), b=4)
    res = brute_force(QUOTA, inst)
    assert res.value == 4 and res.strategy == "subsets"


def test_limits():
    assert brute_force(STD, unit_complete(5), SolveLimits(max_nodes=4)).status == "limit-exceeded"


def test_infeasible_on_a_tree():
    inst = random_connected(random.Random(1), 4, extra=0)
    variant = resolve(parse("⟨=1|=1|circuit; undirected|c:E↦ℝ≥0|min c(S)⟩"))
    assert brute_force(variant, inst).status == "infeasible"


def test_workers_agree():
    inst = random_metric(random.Random(3), 7)
    one, two = brute_force(STD, inst), brute_force(STD, inst, workers=2)
    assert (one.value, one.best) == (two.value, two.best)


def test_random_tours_match_plain_enumeration():
    rng = random.Random(5)
    for n in range(3, 8):
        inst = random_metric(rng, n)
        assert brute_force(STD, inst).value == exhaustive_tour(inst)


def test_nearest_neighbor_trace():
    inst = complete_instance({(1, 2): 1, (2, 3): 1, (1, 3): 5}, 3)
    s, value = nearest_neighbor(inst, "v1")
    assert value == 7 and s.walk.visited_nodes == ("v1", "v2", "v3")


def test_nearest_neighbor_small_cases():
    assert nearest_neighbor(unit_complete(4))[1] == 4
    assert nearest_neighbor(unit_complete(1))[1] == 0


def test_double_tree_and_christofides():
    assert double_tree(unit_complete(4))[1] == 4
    assert christofides(unit_complete(4))[1] == 4
    s, value = double_tree(line(3))
    assert value == 4 and s.walk.visited_nodes == ("v1", "v2", "v3")


def test_christofides_on_a_line_is_optimal():
    inst = line(5)
    assert christofides(inst)[1] == brute_force(STD, inst).value == 8


def test_baselines_need_metric():
    inst = complete_instance({(1, 2): 5, (1, 3): 1, (2, 3): 1}, 3)
    with pytest.raises(UnverifiedPropertyError):
        christofides(inst)
    with pytest.raises(UnverifiedPropertyError):
        double_tree(inst)
    with pytest.raises(UnverifiedPropertyError):
        nearest_neighbor(random_connected(random.Random(0), 4, extra=0))


def test_one_two_metrics():
    rng = random.Random(12)
    for _ in range(15):
        n = rng.randint(4, 8)
        inst = complete_instance({(i, j): rng.choice([1, 2]) for i in range(1, n + 1) for j in range(i + 1, n + 1)}, n)
        assert ratio_check(STD, inst, christofides(inst)[0], Fraction(3, 2)) is True


def test_ratio_check():
    k4 = unit_complete(4)
    assert ratio_check(STD, k4, nearest_neighbor(k4)[0], 1) is True
    assert ratio_check(STD, unit_complete(6), nearest_neighbor(unit_complete(6))[0], 1, SolveLimits(max_nodes=4)) is None


def test_matching_is_exact():
    rng = random.Random(4)
    nodes = [f"v{i}" for i in range(6)]
    w = {frozenset((a, b)): rng.randint(1, 20) for i, a in enumerate(nodes) for b in nodes[i + 1:]}
    pairs = min_weight_perfect_matching(nodes, lambda a, b: w[frozenset((a, b))])

    def best(rest):
        if not rest:
            return 0
        a = rest[0]
        return min(w[frozenset((a, b))] + best([x for x in rest[1:] if x != b]) for b in rest[1:])

    assert sum(w[frozenset(p)] for p in pairs) == best(nodes)


def test_flag_patterns(fig1):
    walks = list(enumerate_walks(fig1, 2, ["v3"]))
    assert {str(w) for w in walks} >= {"v3 e2 v2 e1 v1"}
    pats = {str(p) for w in walks if str(w) == "v3 e2 v2 e2 v3" for p in flag_patterns(w)}
    assert pats == {"v3 e2 v2 e2 v3!"}


# the closure route against direct enumeration of bounded walks


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 5), st.integers(0, 2))
def test_closure_route_matches_walks(seed, n, extra):
    inst = random_connected(random.Random(seed), n, extra=extra)
    a = brute_force(GE1, inst, strategy="closure")
    b = brute_force(GE1, inst, strategy="walks")
    assert a.status == b.status == "optimal"
    assert a.value == b.value


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 7))
def test_optimum_is_feasible_and_no_worse_than_any_tour(seed, n):
    rng = random.Random(seed)
    inst = random_metric(rng, n)
    res = brute_force(STD, inst)
    assert validate(STD, inst, res.best).feasible
    order = list(range(1, n + 1))
    rng.shuffle(order)
    assert res.value <= tour_cost(inst, tuple(order))


def test_oracle_agrees_on_its_own_optimum(fig1):
    res = brute_force(GE1, fig1)
    assert Oracle(GE1, fig1).feasible(res.best.walk, {})
