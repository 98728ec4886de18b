import random

import pytest

from randgen import acyclic_class, denial_class, load, single_key_class, subsets
from repairlab import (UnsupportedClassError, check_acyclic, check_denial, check_repair, check_single_key,
                       oracle_repair_check, sample_repair, unique_ind_repair)
from repairlab.model import FD, IND, ICSet, Instance, Schema, fact, satisfies
from repairlab.reductions import gen_exponential_family
from repairlab.repair import revalidate

BROWN_KLEIN = fact("Person", "Brown", "Amherst", "115 Klein")
BROWN_MAPLE = fact("Person", "Brown", "Amherst", "120 Maple")
GREEN = fact("Person", "Green", "Clarence", "4000 Transit")


def test_person_repairs_accepted():
    _, ics, r = load("person")
    for name in ("repair1", "repair2"):
        _, _, cand = load("person", name)
        assert check_denial(r, cand, ics).ok


def test_person_green_only_is_not_maximal():
    _, ics, r = load("person")
    v = check_denial(r, r.restrict([GREEN]), ics)
    assert not v.ok
    assert v.certificate.kind == "addable" and v.certificate.facts == (BROWN_KLEIN,)
    assert revalidate(v.certificate, r, r.restrict([GREEN]), ics)


def test_person_full_instance_is_inconsistent():
    _, ics, r = load("person")
    v = check_denial(r, r, ics)
    assert v.certificate.kind == "violation"
    assert set(v.certificate.facts) == {BROWN_KLEIN, BROWN_MAPLE}


def test_not_a_subset():
    s, ics, r = load("person")
    alien = Instance(s, [fact("Person", "X", "Y", "Z")])
    v = check_denial(r, alien, ics)
    assert v.certificate.kind == "not-subset"


def test_employee_repairs_under_acyclic_checker():
    _, ics, r = load("employee")
    for name in ("repair1", "repair2"):
        _, _, cand = load("employee", name)
        assert check_acyclic(r, cand, ics).ok
        assert check_repair(r, cand, ics).ok
    empty = r.restrict(())
    v = check_acyclic(r, empty, ics)
    assert not v.ok and v.certificate.stage == "Employee"


def test_single_repair_example():
    _, ics, r = load("single_repair")
    accepted = [s for s in subsets(r) if check_acyclic(r, s, ics).ok]
    assert accepted == [r.restrict([fact("P", "a", "b"), fact("S", "b")])]
    assert [s for s in subsets(r) if check_single_key(r, s, ics).ok] == accepted


def test_emp_denials():
    _, ics, r = load("emp")
    rep = sample_repair(r, ics, seed=0)
    assert satisfies(rep, ics)
    assert check_denial(r, rep, ics).ok
    assert fact("Emp", "cy", 250000, "cy") not in rep


def test_checkers_refuse_wrong_classes():
    _, ics, r = load("employee")
    with pytest.raises(UnsupportedClassError):
        check_denial(r, r, ics)
    with pytest.raises(UnsupportedClassError):
        check_single_key(r, r, ics)
    _, emp, re = load("emp")
    with pytest.raises(UnsupportedClassError):
        check_single_key(re, re, emp)


def test_unique_ind_repair_cascades():
    s = Schema.build({"A": ["x"], "B": ["x"], "C": ["x"]})
    inds = [IND("C", ("x",), "B", ("x",)), IND("B", ("x",), "A", ("x",))]
    r = Instance(s, [fact("A", "1"), fact("B", "1"), fact("B", "2"), fact("C", "2"), fact("C", "1")])
    rep = unique_ind_repair(r, inds)
    assert rep == r.restrict([fact("A", "1"), fact("B", "1"), fact("C", "1")])
    assert satisfies(rep, inds)


def test_exponential_family_checker():
    red = gen_exponential_family(3)
    r = red.instance
    good = [s for s in subsets(r) if check_denial(r, s, red.ics).ok]
    assert len(good) == 8
    assert all(len(s) == 3 for s in good)


def test_sample_repair_deterministic_and_valid():
    red = gen_exponential_family(4)
    seen = set()
    for seed in range(20):
        a = sample_repair(red.instance, red.ics, seed)
        assert a == sample_repair(red.instance, red.ics, seed)
        assert check_denial(red.instance, a, red.ics).ok
        seen.add(a)
    assert len(seen) > 1


@pytest.mark.parametrize("gen, check", [
    (denial_class, check_denial), (acyclic_class, check_acyclic), (single_key_class, check_single_key)])
@pytest.mark.parametrize("seed", range(25))
def test_checkers_match_oracle(gen, check, seed):
    rng = random.Random(1000 + seed)
    ics, r = gen(rng)
    r = r.restrict(r.sorted()[:8])
    for s in subsets(r):
        v = check(r, s, ics)
        assert v.ok == oracle_repair_check(r, s, ics), (s, v)
        if not v.ok:
            assert revalidate(v.certificate, r, s, ics)


@pytest.mark.parametrize("gen", [denial_class, acyclic_class, single_key_class])
@pytest.mark.parametrize("seed", range(25))
def test_sample_is_a_repair(gen, seed):
    rng = random.Random(2000 + seed)
    ics, r = gen(rng)
    rep = sample_repair(r, ics, seed)
    assert oracle_repair_check(r, rep, ics, cap=64)


def test_fd_only_set_with_merged_keys():
    s = Schema.build({"R": ["a", "b", "c"]})
    ics = ICSet(s, fds=(FD("R", ("a",), ("b",)), FD("R", ("a",), ("c",))))
    r = Instance(s, [fact("R", "1", "x", "p"), fact("R", "1", "x", "q"), fact("R", "2", "y", "p")])
    reps = [x for x in subsets(r) if check_denial(r, x, ics).ok]
    assert len(reps) == 2
