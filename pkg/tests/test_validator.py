from fractions import Fraction

import pytest

from t3co.errors import BindingError, UnsupportedSemanticsError
from t3co.generators import complete_instance, unit_complete, with_params, with_tables
from t3co.grammar import parse
from t3co.instance import load_native
from t3co.model import Walk
from t3co.semantics import resolve
from t3co.validator import (Solution, arrival_schedule, evaluate_objective, format_solution, parse_solution,
                            validate)

S1 = ("v1", "e1", "v2", "e2", "v3", "e2", "e3", "v4", "e4")
S3 = ("v1", "e1", "v2", "e2", "v3", "e2", "e3", "v4", "e5")


def R(text):
    return resolve(parse(text))


def sol(inst, *items, shares=None):
    return Solution(Walk.of(*items, graph=inst.graph), shares or {})


def test_standard_rejects_double_traversal(fig1):
    report = validate(R("⟨=1|=1|circuit|c:E↦ℝ≥0|min c(S)⟩"), fig1, sol(fig1, *S1))
    assert not report.feasible
    bad = report.failures()
    assert [c.id for c in bad] == ["traversals"]
    assert "traversals(v2) = 2" in bad[0].witness


def test_multi_traversal_circuit_is_feasible(fig1):
    s2 = sol(fig1, "v1", "e1", "v2", "e2", "v3", "e2", "v2", "e3", "v4", "e4", "v1!")
    report = validate(R("⟨=1|≥1|circuit|c:E↦ℝ≥0|min c(S)⟩"), fig1, s2)
    assert report.feasible
    assert report.objectives[0][1] == 8


def test_quota_shortfall():
    k4 = unit_complete(4)
    inst = with_params(with_tables(k4, q={v: 1 for v in k4.nodes}), b=3)
    variant = R("⟨=1|≤1; always|circuit; complete; undirected|c:E↦ℝ≥0; q:V↦ℤ≥0|q(S) ≥ b; min c(S)⟩")
    report = validate(variant, inst, sol(inst, "v1", "e1_2", "v2", "e1_2", "v1!"))
    assert not report.feasible
    assert report.failures()[0].witness.startswith("LowerBound(q, 3)")


def test_node_and_edge_costs(fig1):
    variant = R("⟨=1|≥1|circuit|c:E∪V↦ℝ≥0|min c(S)⟩")
    assert evaluate_objective(variant, fig1, sol(fig1, *S1))[0][1] == 12


def test_bottleneck_and_scatter(fig1):
    bn = R("⟨=1|≥1|circuit|c:E↦ℝ≥0|min max {c(e) : e ∈ E_S}⟩")
    ms = R("⟨=1|≥1|circuit|c:E↦ℝ≥0|max min {c(e) : e ∈ E_S}⟩")
    assert evaluate_objective(bn, fig1, sol(fig1, *S1))[0][1] == 2
    assert evaluate_objective(ms, fig1, sol(fig1, *S3))[0][1] == 1


TWO = "NODES\na b\n\nEDGES\nx a b\n\nCOSTS c\nx 5\n\nCOSTS r\na 0\nb 7\n\nCOSTS d\na 100\nb 100\n\nPARAMS\nstart = a\nend = b\n"
WAIT = R("⟨=1|=1|start; end; undirected|c:E↦ℝ≥0; w:E↦ℝ≥0, waiting|∀ i ∈ {0, …, k}: r(v_i) ≤ c(S_{<i}) + w(S_{≤i}) ≤ d(v_i); min c(S) + w(S)⟩")
NOWAIT = R("⟨=1|=1|start; end; undirected|c:E↦ℝ≥0|∀ i ∈ {0, …, k}: r(v_i) ≤ c(S_{<i}) ≤ d(v_i); min c(S)⟩")


def test_waiting_schedule():
    inst = load_native(TWO)
    s = arrival_schedule(WAIT, inst, Walk.of("a", "x", "b", graph=inst.graph))
    assert s.ok and s.times == (0, 7) and s.waits == (0, 2)


def test_no_waiting_means_late_release_fails():
    inst = load_native(TWO)
    s = arrival_schedule(NOWAIT, inst, Walk.of("a", "x", "b", graph=inst.graph))
    assert not s.ok and "release" in s.witness


def test_zero_handling_and_waiting_give_prefix_costs():
    inst = complete_instance({(i, j): i + j for i in range(1, 4) for j in range(1, 4)}, 3)
    inst = with_tables(inst, r={v: 0 for v in inst.nodes}, d={v: 100 for v in inst.nodes},
                       h={v: 0 for v in inst.nodes})
    variant = R("⟨=1|=1|circuit; complete; undirected|c:E↦ℝ≥0; h:V↦ℝ≥0|∀ i ∈ {0, …, k}: r(v_i) ≤ c(S_{<i}) + h(S_{<i}) ≤ d(v_i); min c(S)⟩")
    s = arrival_schedule(variant, inst, Walk.of("v1", "e1_2", "v2", "e2_3", "v3", "e1_3", "v1!", graph=inst.graph))
    assert s.times == (0, 3, 8)


def test_waiting_cost_enters_objective():
    inst = load_native(TWO)
    report = validate(WAIT, inst, Solution(Walk.of("a", "x", "b", graph=inst.graph)))
    assert report.feasible
    assert report.objectives[0][1] == 7


def tpp_instance():
    inst = complete_instance({(i, j): 1 for i in range(1, 4) for j in range(1, 4)}, 3)
    inst = with_tables(inst, p_1={"v1": 9, "v2": 2, "v3": 4}, q_1={"v1": 5, "v2": 1, "v3": 2})
    return with_params(inst, m=1, d_1=Fraction(2))


TPP = R("⟨=1|≤1; always|circuit; complete; undirected|c:E↦ℝ≥0; {q_i}_{i=1}^m:V↦ℤ≥0, partial; {p_i}_{i=1}^m:V↦ℝ≥0|∀ i ∈ {1, …, m} share_i(S_V) ≥ d_i; ∀ i ∈ {1, …, m} ∀ v ∈ V share_i(v) ≤ q_i(v); min c(S) + Σ_{i=1}^m Σ_{v ∈ S_V} p_i(v) · share_i(v)⟩")


def test_purchase_feasible_and_priced():
    inst = tpp_instance()
    tour = sol(inst, "v1", "e1_2", "v2", "e2_3", "v3", "e1_3", "v1!", shares={(1, "v2"): 1, (1, "v3"): 1})
    report = validate(TPP, inst, tour)
    assert report.feasible
    assert report.objectives[-1][1] == 3 + 2 + 4


def test_purchase_over_availability():
    inst = tpp_instance()
    tour = sol(inst, "v1", "e1_2", "v2", "e2_3", "v3", "e1_3", "v1!", shares={(1, "v2"): 2})
    assert not validate(TPP, inst, tour).feasible


def test_shares_need_partial_cost(fig1):
    with pytest.raises(BindingError):
        validate(R("⟨=1|≥1|circuit|c:E↦ℝ≥0|min c(S)⟩"), fig1, sol(fig1, *S1, shares={(1, "v1"): 1}))


def test_wildcards_are_not_validated(fig1):
    with pytest.raises(UnsupportedSemanticsError):
        validate(R("⟨=1|traversals = 1 or ≥ 1|circuit|c:E↦ℝ≥0|min c(S)⟩"), fig1, sol(fig1, *S1))


def test_extension_flag(fig1):
    variant = R("⟨=1|≥1|circuit|c:E↦ℝ≥0|min c(S)⟩^{⊕1}\n⊕1: a side condition")
    assert validate(variant, fig1, sol(fig1, *S1)).extensions_unchecked


def test_invalid_walk_reported(fig1):
    report = validate(R("⟨=1|≥1|circuit|c:E↦ℝ≥0|min c(S)⟩"), fig1, Solution(Walk.of("v1", "e2", "v3")))
    assert not report.feasible and report.checks[0].id == "walk"


def test_solution_text_round_trip(fig1):
    s = parse_solution("v1 e1 v2  # start\ne2 v3\nshares:\n1 v2 = 1/2\n", fig1.graph)
    assert s.shares == {(1, "v2"): Fraction(1, 2)}
    assert parse_solution(format_solution(s), fig1.graph) == s


def test_report_dict_is_stable(fig1):
    d = validate(R("⟨=1|≥1|circuit|c:E↦ℝ≥0|min c(S)⟩"), fig1, sol(fig1, *S1)).to_dict()
    assert list(d) == ["feasible", "checks", "objectives", "arrivalTimes", "extensionsUnchecked"]


def test_missing_start_parameter():
    inst = load_native(TWO.split("PARAMS")[0])
    with pytest.raises(BindingError, match="start"):
        validate(NOWAIT, inst, Solution(Walk.of("a", "x", "b", graph=inst.graph)))
