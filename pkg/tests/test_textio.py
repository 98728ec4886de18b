import json

import pytest

from randgen import FIXTURES, load, load_query
from repairlab import textio
from repairlab.errors import ParseError, SchemaError
from repairlab.model import ConjunctiveQuery, Instance, Or, Schema, fact


def test_schema_round_trip():
    text = (FIXTURES / "employee" / "schema.rl").read_text()
    s = textio.parse_schema(text)
    assert textio.parse_schema(textio.serialize_schema(s)) == s
    assert s["Employee"].attributes[0].sort == "num"


def test_constraints_round_trip():
    s, ics, _ = load("emp")
    again = textio.parse_constraints(textio.serialize_constraints(ics), s)
    assert again == ics
    assert len(again.denials) == 2


def test_instance_csv_and_json_round_trip(tmp_path):
    s, _, r = load("employee")
    files = textio.serialize_instance(r, tmp_path)
    assert sorted(files) == ["Employee.csv", "Manager.csv"]
    assert textio.parse_instance(tmp_path, s) == r
    bundle = tmp_path / "r.json"
    bundle.write_text(textio.serialize_json_bundle(r))
    assert textio.parse_instance(bundle, s) == r
    assert json.loads(bundle.read_text())["Manager"] == [[123456789], [555555555]]


def test_csv_quoting_survives(tmp_path):
    s = textio.parse_schema("relation P(a: sym, b: sym)")
    r = Instance(s, [fact("P", "x, y", 'say "hi"'), fact("P", "it's", "")])
    textio.serialize_instance(r, tmp_path)
    assert textio.parse_instance(tmp_path, s) == r


def test_multiple_data_paths_union(tmp_path):
    s, _, r = load("person")
    a, b = tmp_path / "a", tmp_path / "b"
    facts = r.sorted()
    textio.serialize_instance(r.restrict(facts[:1]), a)
    textio.serialize_instance(r.restrict(facts[1:]), b)
    assert textio.parse_instance([a, b], s) == r


@pytest.mark.parametrize("text, where", [
    ("relation R(a: sym", "1:18"),
    ("relation R(a: foo)", "1:15"),
    ("relation R(a: sym)\nprimary key R: b", "2:"),
])
def test_schema_errors_carry_spans(text, where):
    with pytest.raises((ParseError, SchemaError)) as e:
        textio.parse_schema(text, file="s.rl")
    if isinstance(e.value, ParseError):
        assert e.value.span.file == "s.rl"
        assert str(e.value.span).startswith(f"s.rl:{where}")


def test_constraint_error_unknown_relation():
    s, _, _ = load("person")
    with pytest.raises(ParseError) as e:
        textio.parse_constraints("fd X: a -> b", s, file="c.rl")
    assert e.value.span.line == 1


def test_csv_type_error_points_at_row():
    s, _, _ = load("employee")
    with pytest.raises(ParseError) as e:
        textio.parse_csv("ssn,name\nabc,Smith\n", s["Employee"], "E.csv")
    assert e.value.span.file == "E.csv" and e.value.span.line == 2


def test_csv_header_must_match():
    s, _, _ = load("employee")
    with pytest.raises((ParseError, SchemaError)):
        textio.parse_csv("name,ssn\nSmith,1\n", s["Employee"], "E.csv")


def test_query_shapes():
    s, _, _ = load("person")
    q = load_query("person", "q_disj", s)
    assert isinstance(q, Or)
    full = load_query("person", "q_full", s)
    assert isinstance(full, ConjunctiveQuery) and full.free == ("n", "c", "s")
    proj = load_query("person", "q_proj", s)
    assert proj.free == ("n", "c") and proj.bound == ("s",)


def test_query_round_trip():
    s, _, _ = load("person")
    for name in ("q_disj", "q_full", "q_proj"):
        q = load_query("person", name, s)
        assert textio.parse_query(textio.serialize_query(q), s) == q


def test_query_with_unknown_relation_rejected():
    s, _, _ = load("person")
    with pytest.raises((ParseError, SchemaError)):
        textio.parse_query("Nobody('x')", s)


def test_comments_and_blank_lines_ignored():
    s = textio.parse_schema("# people\n\nrelation P(a: sym)  # trailing\n")
    assert isinstance(s, Schema) and s.names == ("P",)
