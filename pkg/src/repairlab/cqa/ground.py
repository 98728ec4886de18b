"""Consistent answers to ground quantifier-free sentences under denial constraints.

The sentence is put in CNF and each clause is refuted separately: a repair
falsifies a clause iff it keeps every fact the clause negates and drops every
fact the clause asserts.  A fact is dropped from some repair containing a set
``S`` iff some conflict edge around it, minus the fact itself, fits into an
independent set together with ``S``.
"""

from __future__ import annotations

from typing import FrozenSet, Optional, Sequence, Union

from .. import hypergraph
from ..errors import UnsupportedClassError
from ..model.constraints import DenialConstraint, ICSet
from ..model.data import Fact, Instance
from ..model.formula import Formula, Literal, is_ground_qf, to_cnf
from .verdict import CqaVerdict

ENGINE = "ground-qf"


def _refute_clause(h: hypergraph.ConflictHypergraph, clause: Sequence[Literal],
                   present: FrozenSet[Fact]) -> Optional[FrozenSet[Fact]]:
    """An independent set that extends to a repair falsifying ``clause``, or None."""
    keep = sorted({f for f, pos in clause if not pos}, key=Fact.sort_key)
    drop = sorted({f for f, pos in clause if pos}, key=Fact.sort_key)
    singles = h.singletons
    for f in keep:
        if f not in present or f in singles:
            return None
    base = frozenset(keep)
    if not h.is_independent(base):
        return None
    # facts outside r are absent from every repair
    todo = [f for f in drop if f in present]

    def search(k: int, cur: FrozenSet[Fact]) -> Optional[FrozenSet[Fact]]:
        if k == len(todo):
            return cur
        t = todo[k]
        for e in h.edges_containing(t):
            nxt = cur | (frozenset(e) - {t})
            # a dropped fact landing in nxt closes its own edge, so this also rejects that case
            if h.is_independent(nxt):
                found = search(k + 1, nxt)
                if found is not None:
                    return found
        return None

    return search(0, base)


def cqa_ground_qf(r: Instance, F: Union[ICSet, Sequence[DenialConstraint]], phi: Formula) -> CqaVerdict:
    """Is the ground sentence ``phi`` true in every repair of ``r`` w.r.t. denial constraints ``F``?"""
    if not is_ground_qf(phi):
        raise ValueError("cqa_ground_qf needs a ground quantifier-free sentence")
    if isinstance(F, ICSet) and F.inds:
        raise UnsupportedClassError("inclusion dependencies are not denial constraints")
    h = hypergraph.build(r, F)
    present = r.facts
    for clause in to_cnf(phi):
        core = _refute_clause(h, clause, present)
        if core is not None:
            witness = r.restrict(h.extend_greedy(core))
            return CqaVerdict(False, witness, ENGINE)
    return CqaVerdict(True, None, ENGINE)
