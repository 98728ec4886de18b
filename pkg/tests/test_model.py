import pytest

from randgen import load
from repairlab.errors import SchemaError, SortError
from repairlab.model import (FD, IND, Atom, Builtin, Classification, Const, DenialConstraint, Fact, ICSet,
                             Instance, Schema, Var, classify, compare, fact, fd_to_denial, ind_graph,
                             satisfies, violations)


@pytest.fixture
def person():
    return Schema.build({"Person": ["name", "city", "street"]})


def test_schema_build_and_lookup(person):
    rel = person["Person"]
    assert rel.arity == 3
    assert rel.position("street") == 2
    with pytest.raises(SchemaError):
        person["Nope"]
    with pytest.raises(SchemaError):
        rel.position("zip")


def test_primary_key_shorthand():
    s = Schema.build({"E": ["ssn", "name"]}, keys={"E": [["name"]]}, primary={"E": ["ssn"]})
    assert s["E"].keys == (("ssn",), ("name",))
    assert s["E"].primary == 0


def test_instance_rejects_ill_typed_facts():
    s = Schema.build({"E": [("ssn", "num"), "name"]})
    with pytest.raises(SchemaError):
        Instance(s, [fact("E", "x", "Smith")])
    with pytest.raises(SchemaError):
        Instance(s, [fact("E", 1)])
    with pytest.raises(SchemaError):
        Instance(s, [fact("F", 1, "a")])


def test_instance_is_a_set(person):
    f = fact("Person", "a", "b", "c")
    r = Instance(person, [f, f])
    assert len(r) == 1 and f in r
    assert Instance(person, [f]) == r and hash(Instance(person, [f])) == hash(r)


def test_fd_normalizes_right_side():
    fd = FD("R", ("a", "a"), ("a", "b"))
    assert fd.lhs == ("a",) and fd.rhs == ("b",)
    assert FD("R", ("a",), ("a",)).vacuous


def test_fd_denial_form_agrees(person):
    fd = FD("Person", ("name",), ("city", "street"))
    ds = fd_to_denial(fd, person)
    assert len(ds) == 2
    r = Instance(person, [fact("Person", "B", "A", "1"), fact("Person", "B", "A", "2")])
    assert not satisfies(r, [fd])
    assert not satisfies(r, ds)
    ok = r.restrict([fact("Person", "B", "A", "1")])
    assert satisfies(ok, [fd]) and satisfies(ok, ds)


def test_denial_needs_safe_builtins(person):
    with pytest.raises(SchemaError):
        DenialConstraint((Atom("Person", (Var("x"), Var("y"), Var("z"))),),
                         (Builtin("=", Var("w"), Const("a")),))


def test_order_comparison_on_symbols_is_a_sort_error():
    assert compare("<", 1, 2)
    assert compare("!=", 1, "1")
    with pytest.raises(SortError):
        compare("<", "a", "b")


def test_order_denial_on_symbolic_attribute_rejected(person):
    d = DenialConstraint((Atom("Person", (Var("x"), Var("y"), Var("z"))),), (Builtin("<", Var("x"), Var("y")),))
    with pytest.raises((SortError, SchemaError)):
        ICSet.of(person, [d])


def test_ind_satisfaction():
    s = Schema.build({"M": ["ssn"], "E": ["ssn", "name"]})
    ind = IND("M", ("ssn",), "E", ("ssn",))
    r = Instance(s, [fact("M", "1"), fact("E", "2", "x")])
    vs = list(violations(r, ICSet.of(s, [ind])))
    assert len(vs) == 1 and vs[0].facts == (fact("M", "1"),)
    assert satisfies(r.with_facts([fact("E", "1", "y")]), [ind])


@pytest.mark.parametrize("name, expected", [
    ("person", Classification.FDS_ONLY),
    ("employee", Classification.ACYCLIC_FD_IND),
    ("single_repair", Classification.SINGLE_KEY_FK),
    ("emp", Classification.DENIAL_ONLY),
])
def test_fixture_classification(name, expected):
    _, ics, _ = load(name)
    assert classify(ics) is expected
    assert ics.classification is expected


def test_classification_of_remaining_tags():
    s = Schema.build({"P": ["a"], "Q": ["a", "b"]}, primary={"P": ["a"]})
    ind = IND("Q", ("a",), "P", ("a",))
    back = IND("P", ("a",), "Q", ("b",))
    deny = DenialConstraint((Atom("P", (Var("x"),)),), (Builtin("=", Var("x"), Const("z")),))
    fd = FD("Q", ("a",), ("b",))
    assert classify(ICSet.of(s, [ind])) is Classification.INDS_ONLY
    assert classify(ICSet.of(s, [ind, deny])) is Classification.GENERAL
    # FD on a keyless relation plus a cycle of INDs
    assert classify(ICSet.of(s, [ind, back, fd])) is Classification.GENERAL
    assert classify(ICSet.of(s, [ind, fd])) is Classification.ACYCLIC_FD_IND


def test_self_loop_ind_is_cyclic():
    s = Schema.build({"R": ["a1", "a2", "a3", "a4"]})
    ics = ICSet.of(s, [FD("R", ("a1",), ("a2",)), IND("R", ("a3",), "R", ("a4",))])
    assert not ind_graph(ics).acyclic
    assert classify(ics) is Classification.GENERAL


def test_ind_graph_orders_targets_first():
    _, ics, _ = load("employee")
    g = ind_graph(ics)
    assert g.acyclic
    assert g.order.index("Employee") < g.order.index("Manager")


def test_fact_ordering_is_total():
    fs = [Fact("R", (2, "b")), Fact("R", (1, "z")), Fact("Q", ("a", 1))]
    assert sorted(fs)[0].relation == "Q"
    assert sorted(fs)[1].values == (1, "z")
