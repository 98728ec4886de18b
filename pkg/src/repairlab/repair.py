"""Repair checking and repair construction for the tractable constraint classes."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from . import hypergraph
from .errors import UnsupportedClassError
from .model.constraints import (FD, IND, Classification, Constraint, DenialConstraint, ICSet, Violation,
                                ind_graph, ind_violations, is_single_key, satisfies, violations)
from .model.data import Fact, Instance


@dataclass(frozen=True)
class Certificate:
    """Why a candidate is not a repair.

    kind ``not-subset``: ``facts`` holds a candidate fact missing from the original.
    kind ``violation``: ``constraint`` is violated by ``facts`` inside the candidate.
    kind ``addable``: the candidate plus ``facts`` (taken from the original) is
    still consistent; ``stage`` names the step of the check that found it.
    """

    kind: str
    facts: Tuple[Fact, ...]
    constraint: Optional[Constraint] = None
    stage: Optional[str] = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "facts": [str(f) for f in self.facts]}
        if self.constraint is not None:
            out["constraint"] = str(self.constraint)
        if self.stage is not None:
            out["stage"] = self.stage
        return out

    def __str__(self) -> str:
        fs = ", ".join(str(f) for f in self.facts)
        if self.kind == "not-subset":
            return f"not a subset: {fs} is not in the original instance"
        if self.kind == "violation":
            return f"inconsistent: {self.constraint} is violated by {{{fs}}}"
        return f"not maximal: {{{fs}}} can be added ({self.stage})"


@dataclass(frozen=True)
class RepairVerdict:
    ok: bool
    certificate: Optional[Certificate] = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "certificate": self.certificate.to_json() if self.certificate else None}

    def __str__(self) -> str:
        return "repair" if self.ok else f"not a repair: {self.certificate}"


OK = RepairVerdict(True)


def _not_subset(r: Instance, r2: Instance) -> Optional[RepairVerdict]:
    for f in r2:
        if f not in r:
            return RepairVerdict(False, Certificate("not-subset", (f,)))
    return None


def _violation(v: Violation) -> RepairVerdict:
    return RepairVerdict(False, Certificate("violation", v.facts, v.constraint))


def revalidate(cert: Certificate, r: Instance, r2: Instance, ics: ICSet) -> bool:
    """Independently confirm that ``cert`` refutes ``r2`` being a repair of ``r``."""
    if cert.kind == "not-subset":
        return len(cert.facts) == 1 and cert.facts[0] in r2 and cert.facts[0] not in r
    if cert.kind == "violation":
        if not all(f in r2 for f in cert.facts):
            return False
        c = cert.constraint
        if isinstance(c, IND):
            # the fact must lack support in the whole candidate
            return any(v.facts == cert.facts for v in ind_violations(r2, c, ics.schema))
        sub = r2.restrict(cert.facts)
        if isinstance(c, FD):
            return not satisfies(sub, ICSet(ics.schema, fds=(c,)))
        return not satisfies(sub, ICSet(ics.schema, denials=(c,)))
    if cert.kind == "addable":
        if not cert.facts or not all(f in r and f not in r2 for f in cert.facts):
            return False
        return satisfies(r2, ics) and satisfies(r.restrict(r2.facts | set(cert.facts)), ics)
    return False


# --- denial constraints -------------------------------------------------------

def check_denial(r: Instance, r2: Instance, F: Union[ICSet, Sequence[DenialConstraint]]) -> RepairVerdict:
    """Is ``r2`` a maximal independent set of the conflict hypergraph of ``r``?"""
    if isinstance(F, ICSet) and F.inds:
        raise UnsupportedClassError("check_denial handles denial constraints and FDs only")
    bad = _not_subset(r, r2)
    if bad is not None:
        return bad
    h = hypergraph.build(r, F)
    s = r2.facts
    i = h.contained_edge(s)
    if i is not None:
        d, _ = h.sources[i]
        return RepairVerdict(False, Certificate("violation", h.edges[i], d))
    v = h.addable(s)
    if v is not None:
        return RepairVerdict(False, Certificate("addable", (v,), stage="denial"))
    return OK


# --- inclusion dependencies ---------------------------------------------------

def _projection(facts: Iterable[Fact], positions: Sequence[int]) -> Set[tuple]:
    return {tuple(f.values[i] for i in positions) for f in facts}


def unique_ind_repair(r: Instance, inds: Union[ICSet, Sequence[IND]]) -> Instance:
    """The largest sub-instance of ``r`` satisfying the inclusion dependencies."""
    if isinstance(inds, ICSet):
        inds = inds.inds
    schema = r.schema
    plan = [(i.source, schema[i.source].positions(i.source_attrs), i.target,
             schema[i.target].positions(i.target_attrs)) for i in inds]
    cur: Dict[str, Set[Fact]] = {rel.name: set(r.relation(rel.name)) for rel in schema}
    changed = True
    while changed:
        changed = False
        for src, sp, tgt, tp in plan:
            present = _projection(cur[tgt], tp)
            dead = {f for f in cur[src] if tuple(f.values[i] for i in sp) not in present}
            if dead:
                cur[src] -= dead
                changed = True
    return r.restrict(f for fs in cur.values() for f in fs)


# --- single-key schemas -------------------------------------------------------

def _require(ok: bool, msg: str) -> None:
    if not ok:
        raise UnsupportedClassError(msg)


def _fk_closure(r1: Instance, r2: Instance, start: Fact, ics: ICSet) -> Tuple[Fact, ...]:
    """Facts to add with ``start`` so every foreign key stays satisfied.

    Follows missing foreign-key targets inside ``r1``, one fact per key value.
    """
    schema = ics.schema
    key_pos = {rel.name: rel.positions(sorted(rel.keys[0], key=rel.attribute_names.index))
               for rel in schema if rel.keys}
    chosen: Dict[Tuple[str, tuple], Fact] = {}

    def key_of(f: Fact) -> Tuple[str, tuple]:
        return (f.relation, tuple(f.values[i] for i in key_pos.get(f.relation, range(len(f.values)))))

    taken = {key_of(f) for f in r2}
    stack = [start]
    chosen[key_of(start)] = start
    while stack:
        f = stack.pop()
        for ind in ics.inds:
            if ind.source != f.relation:
                continue
            sp = schema[ind.source].positions(ind.source_attrs)
            tp = schema[ind.target].positions(ind.target_attrs)
            want = tuple(f.values[i] for i in sp)
            sup = [g for g in r1.relation_sorted(ind.target) if tuple(g.values[i] for i in tp) == want]
            if any(g in r2 or key_of(g) in chosen for g in sup):
                continue
            g = sup[0]
            k = key_of(g)
            if k in taken:
                continue
            chosen[k] = g
            stack.append(g)
    return tuple(sorted(chosen.values(), key=Fact.sort_key))


def check_single_key(r: Instance, r2: Instance, ics: ICSet) -> RepairVerdict:
    """Repair check for key FDs plus foreign keys: cascade, then check the FD repair."""
    _require(is_single_key(ics), f"constraints are not single-key with foreign keys ({ics.classification})")
    bad = _not_subset(r, r2)
    if bad is not None:
        return bad
    for v in violations(r2, ics):
        return _violation(v)
    r1 = unique_ind_repair(r, ics.inds)
    # r1 contains every IND-consistent subset of r, so a consistent r2 lies inside it
    assert r2 <= r1
    fd_only = ICSet(ics.schema, fds=ics.fds)
    h = hypergraph.build(r1, fd_only)
    s = r2.facts
    for v in h.vertices:
        if v not in s and h.blocking_edge(s, v) is None:
            return RepairVerdict(False, Certificate("addable", _fk_closure(r1, r2, v, ics), stage="key"))
    return OK


# --- acyclic FDs and INDs -----------------------------------------------------

class _AddTest:
    """Would adding one fact to a consistent set break an FD or an outgoing IND?"""

    def __init__(self, s: Instance, ics: ICSet):
        schema = ics.schema
        self.fds = {}
        for fd in ics.fds:
            rel = schema[fd.relation]
            lp, rp = rel.positions(fd.lhs), rel.positions(fd.rhs)
            groups: Dict[tuple, Set[tuple]] = {}
            for f in s.relation(fd.relation):
                groups.setdefault(tuple(f.values[i] for i in lp), set()).add(tuple(f.values[i] for i in rp))
            self.fds.setdefault(fd.relation, []).append((fd, lp, rp, groups))
        self.inds = {}
        for ind in ics.inds:
            sp = schema[ind.source].positions(ind.source_attrs)
            tp = schema[ind.target].positions(ind.target_attrs)
            self.inds.setdefault(ind.source, []).append((ind, sp, tp, _projection(s.relation(ind.target), tp)))

    def blocker(self, t: Fact) -> Optional[Constraint]:
        for fd, lp, rp, groups in self.fds.get(t.relation, ()):
            seen = groups.get(tuple(t.values[i] for i in lp), set())
            if seen - {tuple(t.values[i] for i in rp)}:
                return fd
        for ind, sp, tp, present in self.inds.get(t.relation, ()):
            if tuple(t.values[i] for i in sp) not in present:
                return ind
        return None

    def add(self, t: Fact) -> None:
        for fd, lp, rp, groups in self.fds.get(t.relation, ()):
            groups.setdefault(tuple(t.values[i] for i in lp), set()).add(tuple(t.values[i] for i in rp))
        for entries in self.inds.values():
            for ind, sp, tp, present in entries:
                if ind.target == t.relation:
                    present.add(tuple(t.values[i] for i in tp))


def _acyclic_order(ics: ICSet) -> Tuple[str, ...]:
    _require(not ics.denials, "denial constraints together with INDs have no tractable repair check")
    g = ind_graph(ics)
    _require(g.acyclic, "the inclusion dependencies are cyclic")
    return g.order


def check_acyclic(r: Instance, r2: Instance, ics: ICSet) -> RepairVerdict:
    """Repair check for FDs with an acyclic set of INDs.

    A consistent candidate is a repair iff no single missing fact can be added;
    relations are scanned targets-first so the reported stage is the earliest.
    """
    order = _acyclic_order(ics)
    bad = _not_subset(r, r2)
    if bad is not None:
        return bad
    for v in violations(r2, ics):
        return _violation(v)
    test = _AddTest(r2, ics)
    for rel in order:
        for t in r.relation_sorted(rel):
            if t not in r2 and test.blocker(t) is None:
                return RepairVerdict(False, Certificate("addable", (t,), stage=rel))
    return OK


# --- dispatch and sampling ------------------------------------------------------

def check_repair(r: Instance, r2: Instance, ics: ICSet) -> RepairVerdict:
    """Pick the checker matching the constraint class."""
    c = ics.classification
    if c in (Classification.DENIAL_ONLY, Classification.FDS_ONLY):
        return check_denial(r, r2, ics)
    if c is Classification.INDS_ONLY:
        return _check_inds(r, r2, ics)
    if c is Classification.SINGLE_KEY_FK:
        return check_single_key(r, r2, ics)
    if c is Classification.ACYCLIC_FD_IND:
        return check_acyclic(r, r2, ics)
    raise UnsupportedClassError("no polynomial repair check for this constraint set (use the oracle)")


def _check_inds(r: Instance, r2: Instance, ics: ICSet) -> RepairVerdict:
    bad = _not_subset(r, r2)
    if bad is not None:
        return bad
    for v in violations(r2, ics):
        return _violation(v)
    rep = unique_ind_repair(r, ics.inds)
    missing = tuple(f for f in rep if f not in r2)
    if missing:
        return RepairVerdict(False, Certificate("addable", missing, stage="ind"))
    return OK


def _shuffled(facts: Sequence[Fact], rng: random.Random) -> List[Fact]:
    out = sorted(facts, key=Fact.sort_key)
    rng.shuffle(out)
    return out


def sample_repair(r: Instance, ics: ICSet, seed: int = 0) -> Instance:
    """One repair of ``r``, chosen by a greedy scan in a seeded random order."""
    rng = random.Random(seed)
    c = ics.classification
    if c in (Classification.DENIAL_ONLY, Classification.FDS_ONLY):
        h = hypergraph.build(r, ics)
        return r.restrict(h.extend_greedy((), _shuffled(h.vertices, rng)))
    if c is Classification.INDS_ONLY:
        return unique_ind_repair(r, ics.inds)
    if c is Classification.SINGLE_KEY_FK:
        r1 = unique_ind_repair(r, ics.inds)
        h = hypergraph.build(r1, ICSet(ics.schema, fds=ics.fds))
        return r1.restrict(h.extend_greedy((), _shuffled(h.vertices, rng)))
    if c is Classification.ACYCLIC_FD_IND:
        order = _acyclic_order(ics)
        s = r.restrict(())
        test = _AddTest(s, ics)
        kept: List[Fact] = []
        for rel in order:
            for t in _shuffled(r.relation_sorted(rel), rng):
                if test.blocker(t) is None:
                    test.add(t)
                    kept.append(t)
        return r.restrict(kept)
    raise UnsupportedClassError("no polynomial repair construction for this constraint set (use the oracle)")
