import shutil

import pytest

from t3co import catalog
from t3co.errors import CatalogError
from t3co.grammar import parse
from t3co.semantics import resolve, resolved_equal


def test_listing_is_sorted_and_large():
    entries = catalog.list_entries()
    ids = [e.id for e in entries]
    assert ids == sorted(ids)
    assert len(ids) >= 60


def test_families_are_all_populated():
    seen = {e.family for e in catalog.list_entries()}
    assert seen == set(catalog.FAMILIES)


def test_family_filter():
    std = catalog.list_entries("standard")
    assert std and all(e.family == "standard" for e in std)
    assert "standard-metric" in {e.id for e in std}


def test_unknown_family():
    with pytest.raises(CatalogError):
        catalog.list_entries("vrp")


def test_standard_metric_bounds():
    e = catalog.get("standard-metric")
    assert "metric" in e.definition_text
    got = [(b.kind, b.expr, b.citation, b.confirmed) for b in e.bounds]
    assert got == [("lower", "123/122", "KLS2015", True), ("upper", "3/2 − 10⁻³⁶", "karlin2021slightly", False)]


def test_max_scatter_triangle():
    e = catalog.get("max-scatter-triangle")
    assert {(b.kind, b.expr) for b in e.bounds} == {("lower", "2"), ("upper", "2")}


def test_path_metric():
    text = catalog.get("path-metric").definition_text
    assert "start; end; complete; undirected" in text


def test_unknown_id():
    with pytest.raises(CatalogError):
        catalog.get("no-such-entry")


def test_corpus_is_clean():
    assert catalog.verify_corpus() == []


def test_notation_pair_resolves_equal():
    a, b = catalog.get("standard-example"), catalog.get("standard-example-longhand")
    assert (a.notation, b.notation) == ("shorthand", "longhand")
    assert resolved_equal(resolve(parse(a.definition_text)), resolve(parse(b.definition_text)))


def test_closure_pair_is_flagged_and_distinct():
    a, b = catalog.get("standard-triangle"), catalog.get("standard-ge1")
    assert a.pair == b.pair == ("closure-equivalence", "distinct")
    assert not resolved_equal(resolve(parse(a.definition_text)), resolve(parse(b.definition_text)))


def test_extension_texts_are_kept():
    e = catalog.get("time-dependent-kinetic-few")
    assert [t for t, _ in e.extensions] == ["1", "2"]
    assert e.extensions[1][1].startswith("The statements for ⊕1 hold.")
    assert catalog.get("orienteering-tw-short-windows").extensions == (
        ("6", "All time windows have length in [1,2]."),)


def test_every_extension_marker_has_text():
    for e in catalog.list_entries():
        ast = parse(e.definition_text)
        if ast.extension is not None:
            assert ast.extension.tag in {t for t, _ in e.extensions}, e.id


def test_ids_are_slugs_led_by_family():
    for e in catalog.list_entries():
        assert e.id.startswith(e.family + "-"), e.id


@pytest.fixture
def corpus_copy(tmp_path, monkeypatch):
    src = catalog.corpus_dir()
    dst = tmp_path / "corpus"
    shutil.copytree(src, dst)
    monkeypatch.setenv("T3CO_CORPUS_DIR", str(dst))
    return dst


def test_env_override_and_broken_entry(corpus_copy):
    f = corpus_copy / "standard-metric.t3co"
    f.write_text(f.read_text().replace("∣ c :", "; c :", 1))
    diags = catalog.verify_corpus()
    assert [(d.entry, d.code) for d in diags] == [("standard-metric", "parse")]


def test_broken_index(corpus_copy):
    (corpus_copy / "index.t3x").write_text("ENTRY x\nfamily = standard\n")
    diags = catalog.verify_corpus()
    assert diags and diags[0].code == "index"
