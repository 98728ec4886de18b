import random

import pytest

from randgen import denial_class, load, naive_repairs, subsets
from repairlab import build_hypergraph
from repairlab.reductions import gen_exponential_family
from repairlab.model import FD, ICSet, Instance, Schema, fact, satisfies


def test_example_person_has_one_edge():
    _, ics, r = load("person")
    h = build_hypergraph(r, ics)
    assert len(h.vertices) == 3
    assert h.edges == ((fact("Person", "Brown", "Amherst", "115 Klein"),
                        fact("Person", "Brown", "Amherst", "120 Maple")),)
    assert h.edges_containing(fact("Person", "Green", "Clarence", "4000 Transit")) == []


def test_singleton_edges_from_one_atom_denial():
    _, ics, r = load("emp")
    h = build_hypergraph(r, ics)
    assert h.singletons == {fact("Emp", "cy", 250000, "cy")}
    # ann earns more than her manager bob
    assert (fact("Emp", "ann", 150000, "bob"), fact("Emp", "bob", 120000, "cy")) in h.edges


def test_inds_are_rejected():
    _, ics, r = load("employee")
    with pytest.raises(Exception):
        build_hypergraph(r, ics)


def test_duplicate_edges_merged():
    s = Schema.build({"R": ["a", "b"]})
    fds = ICSet(s, fds=(FD("R", ("a",), ("b",)), FD("R", ("a",), ("b",))))
    r = Instance(s, [fact("R", "1", "x"), fact("R", "1", "y")])
    h = build_hypergraph(r, fds)
    assert len(h.edges) == 1


def test_dot_and_json_dumps():
    _, ics, r = load("person")
    h = build_hypergraph(r, ics)
    assert h.to_json()["edges"] == [[0, 1]]
    dot = h.to_dot()
    assert dot.startswith("graph conflicts {") and "v0 -- v1;" in dot


@pytest.mark.parametrize("seed", range(60))
def test_soundness_against_satisfaction(seed):
    rng = random.Random(seed)
    ics, r = denial_class(rng)
    r = r.restrict(r.sorted()[:6])
    h = build_hypergraph(r, ics)
    for e in h.edges:
        assert set(e) <= set(h.vertices)
        assert not satisfies(r.restrict(e), ics)
    # exhaustive: independent sets are exactly the consistent subsets
    for s in subsets(r):
        assert h.is_independent(s.facts) == satisfies(s, ics)
    reps = naive_repairs(r, ics)
    for rep in reps:
        assert h.is_maximal_independent(rep.facts)
        assert not rep.facts & h.singletons


def test_exponential_family_pairs():
    red = gen_exponential_family(3)
    h = build_hypergraph(red.instance, red.ics)
    assert len(h.vertices) == 6 and len(h.edges) == 3
    assert all(len(e) == 2 for e in h.edges)
    assert len(set().union(*map(set, h.edges))) == 6
    for v in h.vertices:
        assert len(h.edges_containing(v)) == 1


def test_consistent_instance_has_no_edges():
    _, ics, r = load("person")
    rep = r.restrict(r.sorted()[1:])
    assert build_hypergraph(rep, ics).edges == ()
