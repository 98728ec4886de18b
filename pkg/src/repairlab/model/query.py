"""Query sentences: ground quantifier-free formulas and conjunctive queries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Set, Tuple, Union

from ..errors import SchemaError
from .data import Instance, Schema, Value, sort_of
from .formula import (And, Cmp, Exists, ForAll, Formula, Implies, Not, Or, Rel, conj, eval_fo,
                      free_variables, is_ground_qf, relation_names)
from .terms import Atom, Builtin, Const, Var, match_conjunction


@dataclass(frozen=True)
class ConjunctiveQuery:
    """``exists (bound vars): A1 and ... and Am and phi`` with ``free`` answer variables.

    Use :func:`normalize` (or :meth:`of`) to obtain the normal form where every
    atom position holds a distinct variable and all joins and selections live
    in ``builtins``.
    """

    atoms: Tuple[Atom, ...]
    builtins: Tuple[Builtin, ...] = ()
    free: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "builtins", tuple(self.builtins))
        object.__setattr__(self, "free", tuple(self.free))
        in_atoms = {v for a in self.atoms for v in a.variables}
        for b in self.builtins:
            if set(b.variables) - in_atoms:
                raise SchemaError(f"unsafe variable in {b}")
        for v in self.free:
            if v not in in_atoms:
                raise SchemaError(f"answer variable {v} does not occur in an atom")

    @classmethod
    def of(cls, atoms, builtins=(), free=()) -> "ConjunctiveQuery":
        return normalize(cls(tuple(atoms), tuple(builtins), tuple(free)))

    @property
    def variables(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for a in self.atoms:
            for v in a.variables:
                if v not in seen:
                    seen.append(v)
        return tuple(seen)

    @property
    def bound(self) -> Tuple[str, ...]:
        return tuple(v for v in self.variables if v not in self.free)

    @property
    def closed(self) -> bool:
        return not self.free

    @property
    def simple(self) -> bool:
        rels = [a.relation for a in self.atoms]
        return len(set(rels)) == len(rels)

    @property
    def normalized(self) -> bool:
        seen: Set[str] = set()
        for a in self.atoms:
            for t in a.terms:
                if not isinstance(t, Var) or t.name in seen:
                    return False
                seen.add(t.name)
        return True

    def to_formula(self) -> Formula:
        body = conj([Rel(a) for a in self.atoms] + [Cmp(b) for b in self.builtins])
        return Exists(self.bound, body) if self.bound else body

    def matches(self, inst: Instance, binding=None) -> Iterator[Dict[str, Value]]:
        for b, _ in match_conjunction(inst, self.atoms, self.builtins, binding):
            yield b

    def holds(self, inst: Instance, binding=None) -> bool:
        for _ in self.matches(inst, binding):
            return True
        return False

    def answers(self, inst: Instance) -> Set[Tuple[Value, ...]]:
        return {tuple(b[v] for v in self.free) for b in self.matches(inst)}

    def ground(self, values) -> "ConjunctiveQuery":
        """Close the query by fixing the answer variables to ``values``."""
        if len(values) != len(self.free):
            raise ValueError("wrong number of answer values")
        extra = tuple(Builtin("=", Var(v), Const(c)) for v, c in zip(self.free, values))
        return ConjunctiveQuery(self.atoms, self.builtins + extra, ())

    def __str__(self) -> str:
        parts = [str(a) for a in self.atoms] + [str(b) for b in self.builtins]
        body = " and ".join(parts)
        return f"exists {', '.join(self.bound)}: {body}" if self.bound else body


Query = Union[ConjunctiveQuery, Formula]


def _fresh(base: str, used: Set[str]) -> str:
    k = 1
    while f"{base}_{k}" in used:
        k += 1
    name = f"{base}_{k}"
    used.add(name)
    return name


def normalize(q: ConjunctiveQuery) -> ConjunctiveQuery:
    """Give every atom position its own variable; express joins and constants as equalities."""
    used: Set[str] = {v for a in q.atoms for v in a.variables}
    seen: Set[str] = set()
    atoms: List[Atom] = []
    eqs: List[Builtin] = []
    for a in q.atoms:
        terms = []
        for i, t in enumerate(a.terms):
            if isinstance(t, Const):
                v = _fresh(f"{a.relation.lower()}{i}", used)
                terms.append(Var(v))
                eqs.append(Builtin("=", Var(v), t))
            elif t.name in seen:
                v = _fresh(t.name, used)
                terms.append(Var(v))
                eqs.append(Builtin("=", Var(v), t))
            else:
                seen.add(t.name)
                terms.append(t)
        atoms.append(Atom(a.relation, tuple(terms)))
    return ConjunctiveQuery(tuple(atoms), tuple(eqs) + q.builtins, q.free)


def conjunctive_from_formula(f: Formula, free=None) -> ConjunctiveQuery:
    """Recognize ``exists v: A1 and ... and phi`` (or a bare conjunction) as a conjunctive query."""
    body = f
    if isinstance(f, Exists):
        body = f.body
    parts = list(body.parts) if isinstance(body, And) else [body]
    atoms, builtins = [], []
    for p in parts:
        if isinstance(p, Rel):
            atoms.append(p.atom)
        elif isinstance(p, Cmp):
            builtins.append(p.builtin)
        else:
            raise ValueError("not a conjunctive query")
    if not atoms:
        raise ValueError("a conjunctive query needs a relational atom")
    if free is None:
        free = free_variables(f)
    return normalize(ConjunctiveQuery(tuple(atoms), tuple(builtins), tuple(free)))


def holds(inst: Instance, q: Query) -> bool:
    """Plain evaluation of a closed query on one instance."""
    if isinstance(q, ConjunctiveQuery):
        if q.free:
            raise ValueError("open query has no truth value")
        return q.holds(inst)
    return eval_fo(inst, q)


def query_relations(q: Query) -> Tuple[str, ...]:
    if isinstance(q, ConjunctiveQuery):
        return tuple(dict.fromkeys(a.relation for a in q.atoms))
    return relation_names(q)


def is_ground_sentence(q: Query) -> bool:
    return not isinstance(q, ConjunctiveQuery) and is_ground_qf(q)


def check_query(q: Query, schema: Schema) -> None:
    """Arity and sort checks against ``schema``."""
    atoms: List[Atom] = []
    cmps: List[Builtin] = []
    if isinstance(q, ConjunctiveQuery):
        atoms, cmps = list(q.atoms), list(q.builtins)
    else:
        _collect(q, atoms, cmps)
    var_sort: Dict[str, str] = {}
    for a in atoms:
        rel = schema[a.relation]
        if len(a.terms) != rel.arity:
            raise SchemaError(f"{a}: arity {len(a.terms)} but {rel.name} has arity {rel.arity}")
        for t, attr in zip(a.terms, rel.attributes):
            if isinstance(t, Const):
                if sort_of(t.value) != attr.sort:
                    raise SchemaError(f"{a}: constant {t} does not fit attribute {attr.name}")
            else:
                prev = var_sort.setdefault(t.name, attr.sort)
                if prev != attr.sort:
                    raise SchemaError(f"variable {t.name} used at both {prev} and {attr.sort} positions")


def _collect(f: Formula, atoms: List[Atom], cmps: List[Builtin]) -> None:
    if isinstance(f, Rel):
        atoms.append(f.atom)
    elif isinstance(f, Cmp):
        cmps.append(f.builtin)
    elif isinstance(f, Not):
        _collect(f.body, atoms, cmps)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            _collect(p, atoms, cmps)
    elif isinstance(f, Implies):
        _collect(f.left, atoms, cmps)
        _collect(f.right, atoms, cmps)
    elif isinstance(f, (Exists, ForAll)):
        _collect(f.body, atoms, cmps)
