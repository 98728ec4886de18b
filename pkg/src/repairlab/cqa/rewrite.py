"""First-order rewriting of simple conjunctive queries under one FD per relation.

For an atom ``R(y, z, w)`` under ``Y -> Z`` (``y`` the determinant positions,
``z`` the dependent ones, ``w`` the rest) the rewriting asks for a match of the
query such that, for every way ``(y, z', w')`` the repairs may resolve the
``y``-group, some fact ``(y, z', w'')`` still satisfies the builtins.

The construction is sound, and it is complete whenever each builtin either
mentions only determinant variables or stays inside one atom.  A builtin that
joins dependent or free positions of two different atoms lets different repairs
use different determinant groups, which the rewriting cannot see; see
:func:`is_exact`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from ..errors import UnsupportedClassError
from ..model.constraints import FD, ICSet
from ..model.data import Instance, Schema
from ..model.formula import Cmp, Exists, ForAll, Formula, Implies, Rel, check_guarded, conj, eval_fo
from ..model.query import ConjunctiveQuery, normalize
from ..model.terms import Atom, Term, Var

ENGINE = "rewrite"


@dataclass(frozen=True)
class AtomSplit:
    atom: Atom
    key: Tuple[int, ...]
    dependent: Tuple[int, ...]
    rest: Tuple[int, ...]

    def names(self, positions: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.atom.terms[i].name for i in positions)


@dataclass(frozen=True)
class RewrittenSentence:
    formula: Formula
    query: ConjunctiveQuery
    splits: Tuple[AtomSplit, ...]
    exact: bool

    def __str__(self) -> str:
        return str(self.formula)

    def evaluate(self, inst: Instance) -> bool:
        return eval_fo(inst, self.formula)


def merged_fds(fds: Sequence[FD]) -> Dict[str, List[FD]]:
    """Per relation, FDs with equal determinants merged into one."""
    by_rel: Dict[str, Dict[frozenset, FD]] = {}
    for fd in fds:
        groups = by_rel.setdefault(fd.relation, {})
        k = frozenset(fd.lhs)
        if k in groups:
            old = groups[k]
            groups[k] = FD(fd.relation, old.lhs, old.rhs + tuple(a for a in fd.rhs if a not in old.rhs))
        else:
            groups[k] = fd
    return {rel: list(g.values()) for rel, g in by_rel.items()}


def _splits(q: ConjunctiveQuery, schema: Schema, fds: Sequence[FD]) -> Tuple[AtomSplit, ...]:
    per_rel = merged_fds(fds)
    out = []
    for a in q.atoms:
        rel = schema[a.relation]
        found = per_rel.get(a.relation, [])
        if len(found) > 1:
            raise UnsupportedClassError(
                f"relation {a.relation} has {len(found)} FDs with different determinants; "
                "the rewriting needs at most one per relation")
        if not found:
            # no dependency: the whole tuple acts as the determinant
            out.append(AtomSplit(a, tuple(range(rel.arity)), (), ()))
            continue
        fd = found[0]
        key = tuple(sorted(rel.positions(fd.lhs)))
        dep = tuple(sorted(rel.positions(fd.rhs)))
        rest = tuple(i for i in range(rel.arity) if i not in key and i not in dep)
        out.append(AtomSplit(a, key, dep, rest))
    return tuple(out)


def is_exact(q: ConjunctiveQuery, splits: Sequence[AtomSplit]) -> bool:
    """Does the rewriting decide consistent truth exactly for this query shape?"""
    owner: Dict[str, int] = {}
    key_vars: Set[str] = set()
    for k, s in enumerate(splits):
        for v in s.atom.variables:
            owner[v] = k
        key_vars.update(s.names(s.key))
    for b in q.builtins:
        vs = b.variables
        if len({owner[v] for v in vs}) <= 1 or all(v in key_vars for v in vs):
            continue
        return False
    return True


def _fresh(base: str, used: Set[str]) -> str:
    name = base
    k = 1
    while name in used:
        name = f"{base}_{k}"
        k += 1
    used.add(name)
    return name


def rewrite_simple_conjunctive(q: ConjunctiveQuery, F: Union[ICSet, Sequence[FD]],
                               schema: Optional[Schema] = None) -> RewrittenSentence:
    if isinstance(F, ICSet):
        if F.denials or F.inds:
            raise UnsupportedClassError("the rewriting handles functional dependencies only")
        schema = schema or F.schema
        fds: Sequence[FD] = F.fds
    else:
        fds = list(F)
    if schema is None:
        raise ValueError("a schema is needed")
    if q.free:
        raise UnsupportedClassError("the rewriting needs a closed query")
    if not q.simple:
        raise UnsupportedClassError("the rewriting needs a simple query (no repeated relation); "
                                    "with a repeated relation consistent answers can be coNP-complete")
    q = normalize(q)
    splits = _splits(q, schema, fds)
    used: Set[str] = set(q.variables)
    primed: Dict[str, Term] = {}
    dprimed: Dict[str, Term] = {}
    universal: List[str] = []
    inner: List[str] = []
    ante: List[Formula] = []
    cons: List[Formula] = []
    for s in splits:
        if not s.dependent and not s.rest:
            continue
        for i in s.dependent:
            v = s.atom.terms[i].name
            nv = _fresh(v + "p", used)
            primed[v] = Var(nv)
            dprimed[v] = Var(nv)
            universal.append(nv)
        for i in s.rest:
            v = s.atom.terms[i].name
            p1 = _fresh(v + "p", used)
            p2 = _fresh(v + "pp", used)
            primed[v] = Var(p1)
            dprimed[v] = Var(p2)
            universal.append(p1)
            inner.append(p2)
        ante.append(Rel(s.atom.substitute(primed)))
        cons.append(Rel(s.atom.substitute(dprimed)))
    base = [Rel(a) for a in q.atoms] + [Cmp(b) for b in q.builtins]
    if ante:
        body: Formula = conj(cons + [Cmp(b.substitute(dprimed)) for b in q.builtins])
        if inner:
            body = Exists(tuple(inner), body)
        guard = ForAll(tuple(universal), Implies(conj(ante), body))
        base.append(guard)
    f: Formula = conj(base)
    if q.variables:
        f = Exists(q.variables, f)
    check_guarded(f)
    return RewrittenSentence(f, q, splits, is_exact(q, splits))
