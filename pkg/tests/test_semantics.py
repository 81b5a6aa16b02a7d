from fractions import Fraction

import pytest

from t3co.errors import RegistryError, ResolutionError, UnsupportedObjectiveError
from t3co.grammar import parse
from t3co.registry import AttributeDef, AttributeRegistry, REGISTRY
from t3co.semantics import (Maximize, Minimize, SpecValue, TagValue, TotalCost, UpperBound, check_wellformed,
                            explain, resolve, resolved_equal)

STANDARD = "⟨ =1 | =1 | circuit; complete; undirected | c : E ↦ ℝ≥0 | min c(S) ⟩"
LONG = ("⟨ α: count = 1; β: visits = 1; γ: start = False; end = False; circuit = True; complete = True; "
        "undirected = True; δ: c : E ↦ ℝ≥0; ε: min c(S); ⟩")


def rv(text):
    return resolve(parse(text))


def test_standard_tsp():
    v = rv(STANDARD)
    assert v.count == SpecValue("=", v.count.expr) and str(v.count) == "=1"
    assert str(v.traversals) == "=1"
    assert v.circuit is True and v.start is False and v.end is False
    assert v.graphtype.word == "complete" and v.edgetype.word == "undirected"
    assert [(c.name, c.domain, c.range) for c in v.costs] == [("c", "E", "ℝ≥0")]
    assert v.objectives == (Minimize(v.objectives[0].term),)
    assert v.objectives[0].term.parts == ((Fraction(1), TotalCost("c")),)


def test_orienteering_beta():
    v = rv("⟨=1|≥0; once|circuit; undirected|c:E↦ℝ≥0; q:V↦ℝ≥0|c(S) ≤ b; max q(S)⟩")
    assert str(v.traversals) == "≥0"
    assert v.visits.word == "once"
    kinds = {type(s) for s in v.objectives}
    assert kinds == {Maximize, UpperBound}


def test_metric_property():
    v = rv("⟨=1|=1|circuit|c : E ↦ ℝ≥0, metric|min c(S)⟩")
    assert v.cost("c").properties == (TagValue("metric", "=", ()),)


def test_resolved_equal():
    assert resolved_equal(rv(STANDARD), rv(LONG))
    assert not resolved_equal(rv(STANDARD), rv("⟨ =1 | =1 | complete; undirected | c : E ↦ ℝ≥0 | min c(S) ⟩"))
    assert resolved_equal(rv(STANDARD), rv(STANDARD))


def test_ascii_and_unicode_resolve_equal():
    assert resolved_equal(rv(STANDARD), rv("< =1 | =1 | circuit; complete; undirected | c : E -> R>=0 | min c(S) >"))


def test_unresolvable_value_lists_candidates():
    with pytest.raises(ResolutionError) as info:
        rv("⟨=1|=1|foo|c:E↦ℝ≥0|min c(S)⟩")
    assert "circuit" in info.value.candidates


def test_unknown_attribute_name():
    with pytest.raises(RegistryError):
        rv("⟨ α: count = 1; β: colour = 1; γ: circuit = True; δ: c : E ↦ ℝ; ε: min c(S); ⟩")


def test_unsupported_objective_names_subtree():
    with pytest.raises(UnsupportedObjectiveError, match="c\\(S\\) · q\\(S\\)"):
        rv("⟨=1|=1|circuit|c:E↦ℝ≥0|min c(S) · q(S)⟩")


def wellformed(text):
    ast = parse(text)
    return check_wellformed(resolve(ast), ast)


def test_directed_metric_is_fine():
    assert wellformed("⟨=1|=1|circuit; directed|c:E↦ℝ≥0, metric|min c(S)⟩") == []


def test_unhoused_symbol():
    assert [d.code for d in wellformed("⟨=1|=1|circuit|c:E↦ℝ≥0|max q(S)⟩")] == ["unhoused-symbol"]


def test_cluster_parameters():
    text = "⟨=1|=1|circuit; partition(ordered, startend)|c:E↦ℝ≥0|min c(S)⟩"
    assert wellformed(text) == []
    assert rv(text).cluster.word == "partition"


def test_arity_check():
    assert [d.code for d in wellformed("⟨=1|=1|circuit; tree(1, 2)|c:E↦ℝ≥0|min c(S)⟩")] == ["arity"]


def test_explain_lists_fields():
    text = explain(rv("⟨=1|≤1; partition(once)|circuit; complete; undirected|c:E↦ℝ|min c(S)⟩"))
    assert text.startswith("α:")
    assert "partition(once)" in text


def test_registry_rejects_colliding_words():
    reg = AttributeRegistry()
    reg.register(AttributeDef("a", "beta", "tag", words=("x",)))
    with pytest.raises(RegistryError):
        reg.register(AttributeDef("b", "beta", "tag", words=("x",)))
    with pytest.raises(RegistryError):
        REGISTRY.get("nope")
