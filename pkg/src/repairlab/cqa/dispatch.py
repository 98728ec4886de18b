"""Choose a consistent-query-answering engine for a constraint class and query shape."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Set, Tuple

from .. import oracle
from ..errors import UnsupportedClassError
from ..model.constraints import Classification, ICSet, satisfies
from ..model.data import Instance
from ..model.formula import is_ground_qf
from ..model.query import ConjunctiveQuery, Query, holds
from ..repair import unique_ind_repair
from .ground import cqa_ground_qf
from .rewrite import merged_fds, rewrite_simple_conjunctive
from .verdict import CqaVerdict

# why each engine is correct for the inputs it is picked for
JUSTIFICATION = {
    "plain": "the instance is consistent, so it is its own unique repair",
    "ground-qf": "ground sentence under denial constraints: per-clause search for a refuting repair "
                 "in the conflict hypergraph (polynomial)",
    "rewrite": "simple closed conjunctive query, one FD per relation: first-order rewriting evaluated "
               "on the original instance (polynomial)",
    "ind-repair": "inclusion dependencies only: the repair is unique and obtained by cascading deletions",
    "single-key": "key FDs with foreign keys: cascade the foreign keys, then answer under the FDs alone",
    "oracle": "exhaustive repair enumeration (exponential; bounded by the oracle cap)",
}


@dataclass(frozen=True)
class Plan:
    engine: str
    reason: str


def _blocker(cls: Classification, q: Query) -> str:
    if cls is Classification.GENERAL:
        return ("no polynomial engine for this constraint set: with FDs and cyclic or non-key INDs, or "
                "denials mixed with INDs, consistent answers can be Pi2p-complete")
    if cls is Classification.ACYCLIC_FD_IND:
        return ("FDs with acyclic INDs outside the one-key-per-relation class: consistent answers "
                "to atomic queries are already coNP-complete")
    if isinstance(q, ConjunctiveQuery):
        if not q.simple:
            return ("conjunctive query repeats a relation: under a single key FD such queries can be "
                    "coNP-complete")
        if cls is Classification.DENIAL_ONLY:
            return ("quantified queries under general denial constraints can be coNP-complete "
                    "(one denial constraint suffices)")
        return "the rewriting needs at most one FD (per determinant) on each queried relation"
    if isinstance(q, ConjunctiveQuery) or not is_ground_qf(q):
        return "only ground sentences and simple conjunctive queries have polynomial engines"
    return "unsupported combination of constraint class and query"


def _fd_plan(ics: ICSet, q: Query) -> Optional[str]:
    """Engine for an IND-free constraint set, or None."""
    if not isinstance(q, ConjunctiveQuery) and is_ground_qf(q):
        return "ground-qf"
    if isinstance(q, ConjunctiveQuery) and q.closed and q.simple and not ics.denials:
        per_rel = merged_fds(ics.fds)
        if all(len(per_rel.get(a.relation, [])) <= 1 for a in q.atoms):
            rw = rewrite_simple_conjunctive(q, ics)
            if rw.exact:
                return "rewrite"
    return None


def plan(r: Instance, ics: ICSet, q: Query, allow_oracle: bool = False) -> Plan:
    if isinstance(q, ConjunctiveQuery) and q.free:
        raise ValueError("open query: use consistent_answers_open")
    cls = ics.classification
    if satisfies(r, ics):
        return Plan("plain", JUSTIFICATION["plain"])
    engine: Optional[str] = None
    if cls in (Classification.DENIAL_ONLY, Classification.FDS_ONLY):
        engine = _fd_plan(ics, q)
    elif cls is Classification.INDS_ONLY:
        engine = "ind-repair"
    elif cls is Classification.SINGLE_KEY_FK:
        if _fd_plan(ICSet(ics.schema, fds=ics.fds), q) is not None:
            engine = "single-key"
    if engine is not None:
        return Plan(engine, JUSTIFICATION[engine])
    if allow_oracle:
        return Plan("oracle", JUSTIFICATION["oracle"])
    raise UnsupportedClassError(f"{cls}: {_blocker(cls, q)}")


def _fd_engine(r: Instance, ics: ICSet, q: Query, name: str) -> CqaVerdict:
    if not isinstance(q, ConjunctiveQuery) and is_ground_qf(q):
        v = cqa_ground_qf(r, ics, q)
        return CqaVerdict(v.consistent, v.witness, name)
    rw = rewrite_simple_conjunctive(q, ics)
    return CqaVerdict(rw.evaluate(r), None, name)


def cqa_dispatch(r: Instance, ics: ICSet, q: Query, allow_oracle: bool = False,
                 oracle_cap: Optional[int] = None, engine: str = "auto") -> CqaVerdict:
    """Is the closed query ``q`` true in every repair of ``r``?

    ``engine`` may force ``oracle``; otherwise the cheapest exact engine is used.
    """
    if engine == "oracle":
        ok, wit = oracle.oracle_cqa_witness(r, ics, q, oracle_cap)
        return CqaVerdict(ok, wit, "oracle")
    p = plan(r, ics, q, allow_oracle)
    if p.engine == "plain":
        return CqaVerdict(holds(r, q), None if holds(r, q) else r, "plain")
    if p.engine in ("ground-qf", "rewrite"):
        return _fd_engine(r, ics, q, p.engine)
    if p.engine == "ind-repair":
        rep = unique_ind_repair(r, ics.inds)
        ok = holds(rep, q)
        return CqaVerdict(ok, None if ok else rep, "ind-repair")
    if p.engine == "single-key":
        r1 = unique_ind_repair(r, ics.inds)
        v = _fd_engine(r1, ICSet(ics.schema, fds=ics.fds), q, "single-key")
        return v
    ok, wit = oracle.oracle_cqa_witness(r, ics, q, oracle_cap)
    return CqaVerdict(ok, wit, "oracle")


def consistent_answers_open(r: Instance, ics: ICSet, q: ConjunctiveQuery, allow_oracle: bool = False,
                            oracle_cap: Optional[int] = None, engine: str = "auto") -> Set[Tuple]:
    """Answer tuples of ``q`` true in every repair.

    Only answers on ``r`` itself can qualify, since every repair is a subset
    of ``r`` and ``q`` has no negation; each is checked as a closed query.
    """
    if not q.free:
        raise ValueError("closed query: use cqa_dispatch")
    out = set()
    for t in sorted(q.answers(r), key=lambda vs: [(isinstance(v, str), v) for v in vs]):
        if cqa_dispatch(r, ics, q.ground(t), allow_oracle, oracle_cap, engine).consistent:
            out.add(t)
    return out
