"""Shipped catalog data: cardinality, parseability, closure, round trips."""

import json

import pytest

from walkerkit.catalog import (
    SCHEMA, CatalogEntry, SchemaError, Solution, builtin, builtin_map,
    load, save,
)
from walkerkit.expr import ParseError, is_zero_symbolic, parse, render, sub
from walkerkit.liealg import parse_generator, render_generator, subalgebra_closed


def test_entry_count_and_unique_ids():
    entries = builtin()
    assert len(entries) == 79
    assert len(entries) >= 13 + 48 + 4 + 3 + 4 + 1
    ids = [e.id for e in entries]
    assert len(set(ids)) == len(ids)


def test_family_sizes():
    m = builtin_map()
    assert sum(1 for k in m if k.startswith("thm31.")) == 13
    assert sum(1 for k in m if k.startswith("thm32.")) == 54
    assert sum(1 for k in m if k.startswith("eq25.")) == 4
    assert sum(1 for k in m if k.startswith("eq26.")) == 3
    assert sum(1 for k in m if k.startswith("table1.")) == 4
    assert "eq27" in m


def test_known_solution_strings():
    m = builtin_map()
    fam2 = m["eq25.family2"].solutions[0]
    assert is_zero_symbolic(sub(parse(fam2.a), parse("c1*t + c2")))
    assert is_zero_symbolic(sub(parse(fam2.b), parse("c1*c3^2*t + c5")))
    assert is_zero_symbolic(
        sub(parse(fam2.c), parse("c3*(c1*t + c2) + c1*c4")))
    row3 = m["table1.row3"].solutions[0]
    assert is_zero_symbolic(
        sub(parse(row3.a), parse("4*(t + c1)/(c2*x + c3)^2")))


def test_closed_form_entry_matches_row3():
    m = builtin_map()
    s1 = m["eq27"].solutions[0]
    s2 = m["table1.row3"].solutions[0]
    for left, right in ((s1.a, s2.a), (s1.b, s2.b), (s1.c, s2.c)):
        assert is_zero_symbolic(sub(parse(left), parse(right)))


def test_provenance_present_everywhere():
    assert all(e.provenance for e in builtin())


def test_every_expression_round_trips():
    for e in builtin():
        funcs = e._functions()
        for text in e.generators:
            first = render_generator(parse_generator(text))
            again = render_generator(parse_generator(first))
            assert again == first, (e.id, text)
        for text in e.all_expr_texts()[len(e.generators):]:
            first = render(parse(text, functions=funcs))
            again = render(parse(first, functions=funcs))
            assert again == first, (e.id, text)


def test_every_subalgebra_closes():
    for e in builtin():
        report = subalgebra_closed(list(e.coeff_vectors()))
        assert report.closed, e.id


def test_profile_dependencies():
    m = builtin_map()
    assert m["eq25.family1"].profile_deps() == (2,)
    assert m["table1.row1"].profile_deps() == (1,)
    assert m["table1.row2"].profile_deps() == (2,)
    assert m["table1.row4"].profile_deps() == (1,)


def test_ansatz_views():
    m = builtin_map()
    ans = m["eq25.family1"].pis_ansatz()
    assert set(ans.bindings) == {"b", "c"}
    assert ans.arbitrary == ("a",)
    row2 = m["table1.row2"].pis_ansatz()
    assert row2.arbitrary == ("b",)
    assert set(row2.bindings) == {"a", "c"}


def test_param_domains_recorded():
    m = builtin_map()
    assert "eps in {-1,1}" in m["thm31.5"].params
    assert "epz in {-1,0,1}" in m["thm32.A4_1"].params
    assert "alpha in R" in m["thm32.A1_1"].params
    assert "c3 in R" in m["eq25.family2"].params


def test_save_load_round_trip(tmp_path):
    path = tmp_path / "catalog.json"
    entries = builtin()
    save(entries, path)
    assert load(path) == entries
    # byte-stable serialization
    save(load(path), tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_empty_catalog_is_valid(tmp_path):
    path = tmp_path / "empty.json"
    save((), path)
    assert load(path) == ()


def test_unknown_field_rejected(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"schema": SCHEMA, "entries": [{
        "id": "x", "subalgebra": {"generators": ["X1"], "params": []},
        "provenance": "p", "surprise": 1}]}
    path.write_text(json.dumps(doc, indent=2))
    with pytest.raises(SchemaError, match="surprise.*line"):
        load(path)


def test_unknown_schema_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": "other/9", "entries": []}))
    with pytest.raises(SchemaError, match="other/9"):
        load(path)


def test_bad_derivative_index_cited(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"schema": SCHEMA, "entries": [{
        "id": "x", "subalgebra": {"generators": ["X1"], "params": []},
        "invariants": ["a_5"], "provenance": "p"}]}
    path.write_text(json.dumps(doc, indent=2))
    with pytest.raises(ParseError):
        load(path)


def test_missing_required_field(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"schema": SCHEMA, "entries": [{
        "id": "x", "subalgebra": {"generators": ["X1"]}}]}
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="provenance"):
        load(path)
