"""Exponential-time ground truth for small instances.

Three enumeration strategies, all exact:

* ``mis``: without INDs, repairs are the maximal independent sets of the
  conflict hypergraph; they are enumerated by include/exclude backtracking.
* ``topdown``: for any constraint set, start from the whole instance and
  branch on which fact of a violation to drop (an unsupported IND source fact
  is always dropped), keeping the inclusion-maximal consistent leaves.
* ``stratified``: for FDs with acyclic INDs, choose each relation's facts
  targets-first as a maximal FD-consistent set of supported facts.

The size cap defaults to 18 facts and can be changed with the
``REPAIRLAB_ORACLE_CAP`` environment variable or per call.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from . import hypergraph
from .errors import OverCapError, UnsupportedClassError
from .model.constraints import ICSet, ind_graph, ind_violations, satisfies, violations
from .model.data import Fact, Instance
from .model.formula import Rel, fact_of
from .model.query import ConjunctiveQuery, Query, holds
from .model.terms import match_conjunction

DEFAULT_CAP = 18


def default_cap() -> int:
    env = os.environ.get("REPAIRLAB_ORACLE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"REPAIRLAB_ORACLE_CAP must be an integer, got {env!r}") from None
    return DEFAULT_CAP


def _check_cap(r: Instance, cap: Optional[int]) -> int:
    cap = default_cap() if cap is None else cap
    if len(r) > cap:
        raise OverCapError(f"instance has {len(r)} facts, above the oracle cap of {cap}")
    return cap


@dataclass(frozen=True)
class RepairSet:
    repairs: Tuple[Instance, ...]
    exhaustive: bool
    cap: int

    def __len__(self) -> int:
        return len(self.repairs)

    def __iter__(self):
        return iter(self.repairs)

    def __contains__(self, inst: object) -> bool:
        return inst in self.repairs


def _canonical(insts) -> Tuple[Instance, ...]:
    return tuple(sorted(insts, key=lambda i: [f.sort_key() for f in i.sorted()]))


# --- maximal independent sets -------------------------------------------------

def _mis(n: int, edges: Sequence[int], forbidden: Sequence[int] = ()) -> Iterator[int]:
    """Maximal independent sets (bitmasks over ``range(n)``) avoiding ``forbidden`` subsets.

    Maximality is w.r.t. ``edges`` only; a forbidden set just prunes inclusion.
    """
    by_vertex: List[List[int]] = [[] for _ in range(n)]
    for e in edges:
        for v in range(n):
            if e >> v & 1:
                by_vertex[v].append(e)
    forb_by_vertex: List[List[int]] = [[] for _ in range(n)]
    for w in forbidden:
        if w:
            top = w.bit_length() - 1
            # checked when the last member is decided
            forb_by_vertex[top].append(w)
    full = (1 << n) - 1

    def viable(v: int, s: int, x: int, undecided: int) -> bool:
        bit = 1 << v
        for e in by_vertex[v]:
            rest = e & ~bit
            if rest & x == 0 and rest & ~(s | undecided) == 0:
                return True
        return False

    def rec(i: int, s: int, x: int) -> Iterator[int]:
        if i == n:
            yield s
            return
        bit = 1 << i
        undecided = full & ~((bit << 1) - 1)
        t = s | bit
        if all(e & ~t for e in by_vertex[i]) and all(w & ~t for w in forb_by_vertex[i]):
            yield from rec(i + 1, t, x)
        nx = x | bit
        if viable(i, s, nx, undecided):
            ok = True
            y = x
            while y:
                low = y & -y
                v = low.bit_length() - 1
                y ^= low
                if not viable(v, s, nx, undecided):
                    ok = False
                    break
            if ok:
                yield from rec(i + 1, s, nx)

    yield from rec(0, 0, 0)


def _witness_sets(r: Instance, q: Optional[Query]) -> Optional[List[FrozenSet[Fact]]]:
    """Fact sets whose presence makes a positive query true; None when not applicable."""
    if q is None:
        return None
    if isinstance(q, ConjunctiveQuery) and not q.free:
        return [frozenset(fs) for _, fs in _matches(r, q)]
    if isinstance(q, Rel) and q.atom.is_ground():
        f = fact_of(q)
        return [frozenset({f})] if f in r else []
    return None


def _matches(r: Instance, q: ConjunctiveQuery):
    return match_conjunction(r, q.atoms, q.builtins)


def _iter_mis_repairs(r: Instance, ics: ICSet, witnesses=None) -> Iterator[Instance]:
    h = hypergraph.build(r, ics)
    index = {v: i for i, v in enumerate(h.vertices)}
    edges = [sum(1 << index[v] for v in e) for e in h.edges]
    forb = [sum(1 << index[v] for v in w) for w in (witnesses or ())]
    for s in _mis(len(h.vertices), edges, forb):
        yield r.restrict(h.vertices[i] for i in range(len(h.vertices)) if s >> i & 1)


# --- top-down search -----------------------------------------------------------

def _first_violation(t: Instance, ics: ICSet):
    # forced deletions first: an unsupported IND source fact is in no repair below t
    for ind in ics.inds:
        for v in ind_violations(t, ind, ics.schema):
            return v
    for v in violations(t, ICSet(ics.schema, ics.denials, ics.fds)):
        return v
    return None


def _iter_topdown_repairs(r: Instance, ics: ICSet) -> Iterator[Instance]:
    leaves: List[FrozenSet[Fact]] = []
    seen: Set[FrozenSet[Fact]] = set()
    stack = [r.facts]
    while stack:
        cur = stack.pop()
        if cur in seen or any(cur <= leaf for leaf in leaves):
            continue
        seen.add(cur)
        v = _first_violation(r.restrict(cur), ics)
        if v is None:
            leaves.append(cur)
            continue
        facts = v.facts
        # reverse so that the first fact's branch is explored first
        for f in sorted(set(facts), key=Fact.sort_key, reverse=True):
            stack.append(cur - {f})
    maximal = [leaf for leaf in leaves if not any(leaf < other for other in leaves)]
    yield from _canonical(r.restrict(m) for m in maximal)


# --- stratified search ---------------------------------------------------------

def _forced_exclusions(r: Instance, ics: ICSet, start: Set[Fact]) -> Set[Fact]:
    """Facts that any repair avoiding ``start`` must also avoid.

    A fact absent from a repair is either blocked by an FD partner in the repair
    or unsupported by some IND.  If every FD partner is itself excluded and its
    relation is the source of exactly one IND, every matching target fact must
    be absent too.
    """
    schema = ics.schema
    out = {f for f in start if f in r}
    partners: Dict[Fact, Set[Fact]] = {}
    for rel in {fd.relation for fd in ics.fds}:
        fds = tuple(f for f in ics.fds if f.relation == rel)
        h = hypergraph.build(r.restrict(r.relation(rel)), ICSet(schema, fds=fds))
        for e in h.edges:
            for f in e:
                partners.setdefault(f, set()).update(u for u in e if u != f)
    changed = True
    while changed:
        changed = False
        for f in sorted(out):
            inds = [ind for ind in ics.inds if ind.source == f.relation]
            if len(inds) != 1 or not partners.get(f, set()) <= out:
                continue
            ind = inds[0]
            sp = schema[ind.source].positions(ind.source_attrs)
            tp = schema[ind.target].positions(ind.target_attrs)
            want = tuple(f.values[i] for i in sp)
            for g in r.relation_sorted(ind.target):
                if g not in out and tuple(g.values[i] for i in tp) == want:
                    out.add(g)
                    changed = True
    return out


def _iter_stratified_repairs(r: Instance, ics: ICSet, witnesses=None) -> Iterator[Instance]:
    if ics.denials:
        raise UnsupportedClassError("stratified enumeration needs FDs and INDs only")
    g = ind_graph(ics)
    if not g.acyclic:
        raise UnsupportedClassError("stratified enumeration needs acyclic INDs")
    order = g.order
    schema = ics.schema
    stage_of = {rel: k for k, rel in enumerate(order)}
    ws = [w for w in (witnesses or ())]
    excluded = _forced_exclusions(r, ics, {next(iter(w)) for w in ws if len(w) == 1})
    ws += [frozenset({f}) for f in sorted(excluded) if frozenset({f}) not in ws]

    def supported(t: Fact, chosen: Dict[str, FrozenSet[Fact]]) -> bool:
        for ind in ics.inds:
            if ind.source != t.relation:
                continue
            sp = schema[ind.source].positions(ind.source_attrs)
            tp = schema[ind.target].positions(ind.target_attrs)
            want = tuple(t.values[i] for i in sp)
            if not any(tuple(u.values[i] for i in tp) == want for u in chosen[ind.target]):
                return False
        return True

    def rec(k: int, chosen: Dict[str, FrozenSet[Fact]]) -> Iterator[Instance]:
        if k == len(order):
            yield r.restrict(f for fs in chosen.values() for f in fs)
            return
        rel = order[k]
        cands = [t for t in r.relation_sorted(rel) if supported(t, chosen)]
        index = {t: i for i, t in enumerate(cands)}
        sub = r.restrict(cands)
        h = hypergraph.build(sub, ICSet(schema, fds=tuple(f for f in ics.fds if f.relation == rel)))
        edges = [sum(1 << index[v] for v in e) for e in h.edges]
        earlier = {f for fs in chosen.values() for f in fs}
        forb = []
        for w in ws:
            # a witness is decided at the stage of its latest relation
            if max(stage_of[f.relation] for f in w) != k:
                continue
            if all(f in earlier or f in index for f in w):
                forb.append(sum(1 << index[f] for f in w if f.relation == rel))
        for s in _mis(len(cands), edges, forb):
            nxt = dict(chosen)
            nxt[rel] = frozenset(cands[i] for i in range(len(cands)) if s >> i & 1)
            yield from rec(k + 1, nxt)

    yield from rec(0, {})


# --- public entry points ---------------------------------------------------------

METHODS = ("auto", "mis", "topdown", "stratified")


def iter_repairs(r: Instance, ics: ICSet, cap: Optional[int] = None, method: str = "auto",
                 avoid: Optional[Query] = None) -> Iterator[Instance]:
    """Lazily enumerate repairs.

    With ``avoid`` set to a closed conjunctive query (or ground atom), only
    repairs in which it is false are produced (``mis`` and ``stratified`` only).
    """
    _check_cap(r, cap)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "topdown" if ics.inds else "mis"
    if method == "mis" and ics.inds:
        raise UnsupportedClassError("maximal-independent-set enumeration cannot handle INDs")
    ws = _witness_sets(r, avoid) if avoid is not None else None
    if method == "mis":
        yield from _iter_mis_repairs(r, ics, ws)
    elif method == "stratified":
        yield from _iter_stratified_repairs(r, ics, ws)
    else:
        for rep in _iter_topdown_repairs(r, ics):
            if avoid is None or not holds(rep, avoid):
                yield rep


def enumerate_repairs(r: Instance, ics: ICSet, cap: Optional[int] = None, method: str = "auto",
                      limit: Optional[int] = None) -> RepairSet:
    """All repairs of ``r``, or the first ``limit`` of them."""
    cap_used = _check_cap(r, cap)
    out = []
    exhaustive = True
    for rep in iter_repairs(r, ics, cap_used, method):
        if limit is not None and len(out) >= limit:
            exhaustive = False
            break
        out.append(rep)
    return RepairSet(_canonical(out), exhaustive, cap_used)


def _has_consistent_extension(r: Instance, base: FrozenSet[Fact], ics: ICSet) -> Optional[FrozenSet[Fact]]:
    """A consistent S with base < S <= r, or None."""
    schema = ics.schema
    closed = ICSet(schema, ics.denials, ics.fds)
    outside = [f for f in r.sorted() if f not in base]

    def ok_closed(s: FrozenSet[Fact]) -> bool:
        return satisfies(r.restrict(s), closed)

    def complete(cur: FrozenSet[Fact], excluded: Set[Fact]) -> Optional[FrozenSet[Fact]]:
        inst = r.restrict(cur)
        for ind in ics.inds:
            for v in ind_violations(inst, ind, schema):
                t = v.facts[0]
                sp = schema[ind.source].positions(ind.source_attrs)
                tp = schema[ind.target].positions(ind.target_attrs)
                want = tuple(t.values[i] for i in sp)
                local = set(excluded)
                for g in r.relation_sorted(ind.target):
                    if g in cur or g in local or tuple(g.values[i] for i in tp) != want:
                        continue
                    nxt = cur | {g}
                    if ok_closed(nxt):
                        found = complete(nxt, set(local))
                        if found is not None:
                            return found
                    local.add(g)
                return None
        return cur

    excluded: Set[Fact] = set()
    for t in outside:
        start = base | {t}
        if ok_closed(start):
            found = complete(start, set(excluded))
            if found is not None:
                return found
        excluded.add(t)
    return None


def consistent_extension(r: Instance, r2: Instance, ics: ICSet, cap: Optional[int] = None) -> Optional[Instance]:
    """A consistent instance strictly between ``r2`` and ``r``, or None."""
    _check_cap(r, cap)
    found = _has_consistent_extension(r, r2.facts, ics)
    return None if found is None else r.restrict(found)


def oracle_repair_check(r: Instance, r2: Instance, ics: ICSet, cap: Optional[int] = None) -> bool:
    """Is ``r2`` a repair of ``r``?  Decided from the definition by search."""
    _check_cap(r, cap)
    if not r2.facts <= r.facts:
        return False
    if not satisfies(r2, ics):
        return False
    return _has_consistent_extension(r, r2.facts, ics) is None


def oracle_cqa_witness(r: Instance, ics: ICSet, q: Query, cap: Optional[int] = None,
                       method: str = "auto") -> Tuple[bool, Optional[Instance]]:
    """(consistently true?, a repair falsifying ``q`` when not)."""
    if isinstance(q, ConjunctiveQuery) and q.free:
        raise ValueError("open query: use oracle_consistent_answers")
    use_avoid = method != "topdown" and _witness_sets(r, q) is not None and not (method == "auto" and ics.inds)
    if method == "auto" and not ics.inds:
        method = "mis"
    for rep in iter_repairs(r, ics, cap, method, avoid=q if use_avoid else None):
        if not holds(rep, q):
            return False, rep
    return True, None


def oracle_cqa(r: Instance, ics: ICSet, q: Query, cap: Optional[int] = None, method: str = "auto") -> bool:
    return oracle_cqa_witness(r, ics, q, cap, method)[0]


def oracle_consistent_answers(r: Instance, ics: ICSet, q: ConjunctiveQuery, cap: Optional[int] = None) -> Set[tuple]:
    """Answer tuples of an open conjunctive query that hold in every repair."""
    result: Optional[Set[tuple]] = None
    for rep in iter_repairs(r, ics, cap):
        ans = q.answers(rep)
        result = ans if result is None else result & ans
        if not result:
            break
    return result or set()
