"""Terms, relational atoms, built-in comparisons and conjunctive matching."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from ..errors import SortError
from .data import Fact, Instance, Value, format_value, is_numeric

OPS = ("=", "!=", "<", ">", "<=", ">=")
ORDER_OPS = ("<", ">", "<=", ">=")
NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Const:
    value: Value

    def __str__(self) -> str:
        return format_value(self.value)


Term = Union[Var, Const]
Binding = Dict[str, Value]


def term_value(t: Term, binding: Binding) -> Optional[Value]:
    if isinstance(t, Const):
        return t.value
    return binding.get(t.name)


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: Tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def variables(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for t in self.terms:
            if isinstance(t, Var) and t.name not in seen:
                seen.append(t.name)
        return tuple(seen)

    def is_ground(self) -> bool:
        return all(isinstance(t, Const) for t in self.terms)

    def ground(self, binding: Binding) -> Fact:
        vals = []
        for t in self.terms:
            v = term_value(t, binding)
            if v is None:
                raise ValueError(f"variable {t} unbound in {self}")
            vals.append(v)
        return Fact(self.relation, tuple(vals))

    def substitute(self, mapping: Dict[str, Term]) -> "Atom":
        return Atom(self.relation, tuple(mapping.get(t.name, t) if isinstance(t, Var) else t for t in self.terms))

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(str(t) for t in self.terms)})"


def compare(op: str, a: Value, b: Value) -> bool:
    if op == "=":
        return type(a) is type(b) and a == b
    if op == "!=":
        return not (type(a) is type(b) and a == b)
    if not (is_numeric(a) and is_numeric(b)):
        raise SortError(f"order comparison {format_value(a)} {op} {format_value(b)} on symbolic values")
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    if op == ">=":
        return a >= b
    raise ValueError(f"unknown operator {op!r}")


@dataclass(frozen=True)
class Builtin:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")

    @property
    def variables(self) -> Tuple[str, ...]:
        out = []
        for t in (self.left, self.right):
            if isinstance(t, Var) and t.name not in out:
                out.append(t.name)
        return tuple(out)

    def holds(self, binding: Binding) -> bool:
        a = term_value(self.left, binding)
        b = term_value(self.right, binding)
        if a is None or b is None:
            raise ValueError(f"unbound variable in {self}")
        return compare(self.op, a, b)

    def substitute(self, mapping: Dict[str, Term]) -> "Builtin":
        def sub(t: Term) -> Term:
            return mapping.get(t.name, t) if isinstance(t, Var) else t
        return Builtin(self.op, sub(self.left), sub(self.right))

    def negated(self) -> "Builtin":
        return Builtin(NEGATED_OP[self.op], self.left, self.right)

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


def _candidates(inst: Instance, atom: Atom, binding: Binding, eqs: Sequence[Builtin]) -> Sequence[Fact]:
    # narrow by any position whose value is already known
    for i, t in enumerate(atom.terms):
        v = term_value(t, binding)
        if v is not None:
            return inst.lookup(atom.relation, i, v)
    for b in eqs:
        for mine, other in ((b.left, b.right), (b.right, b.left)):
            if isinstance(mine, Var) and mine.name not in binding:
                v = term_value(other, binding)
                if v is None:
                    continue
                for i, t in enumerate(atom.terms):
                    if isinstance(t, Var) and t.name == mine.name:
                        return inst.lookup(atom.relation, i, v)
    return inst.relation_sorted(atom.relation)


def _unify(atom: Atom, f: Fact, binding: Binding) -> Optional[List[str]]:
    """Extend ``binding`` in place; return newly bound names or None on clash."""
    added: List[str] = []
    for t, v in zip(atom.terms, f.values):
        if isinstance(t, Const):
            if not compare("=", t.value, v):
                break
        else:
            cur = binding.get(t.name)
            if cur is None:
                binding[t.name] = v
                added.append(t.name)
            elif not compare("=", cur, v):
                break
    else:
        return added
    for n in added:
        del binding[n]
    return None


def match_conjunction(inst: Instance, atoms: Sequence[Atom], builtins: Sequence[Builtin] = (),
                      binding: Optional[Binding] = None) -> Iterator[Tuple[Binding, Tuple[Fact, ...]]]:
    """Enumerate substitutions that map every atom into ``inst`` and satisfy every builtin.

    Yields ``(binding, facts)`` where ``facts[i]`` is the image of ``atoms[i]``.
    Builtins are checked as soon as their variables are bound.  The yielded
    binding is a fresh dict.
    """
    binding = dict(binding or {})
    atoms = list(atoms)
    for a in atoms:
        if len(a.terms) != inst.schema[a.relation].arity:
            raise ValueError(f"atom {a} has the wrong arity")
    bound = set(binding)
    pending = list(builtins)
    schedule: List[List[Builtin]] = [[] for _ in range(len(atoms) + 1)]
    for b in pending:
        need = set(b.variables) - bound
        stage = 0
        covered = set()
        while need - covered and stage < len(atoms):
            covered |= set(atoms[stage].variables)
            stage += 1
        if need - covered:
            raise ValueError(f"builtin {b} mentions variables outside the atoms")
        schedule[stage].append(b)
    eqs = [b for b in builtins if b.op == "="]

    for b in schedule[0]:
        if not b.holds(binding):
            return

    chosen: List[Fact] = []

    def rec(i: int) -> Iterator[Tuple[Binding, Tuple[Fact, ...]]]:
        if i == len(atoms):
            yield dict(binding), tuple(chosen)
            return
        atom = atoms[i]
        for f in _candidates(inst, atom, binding, eqs):
            added = _unify(atom, f, binding)
            if added is None:
                continue
            if all(b.holds(binding) for b in schedule[i + 1]):
                chosen.append(f)
                yield from rec(i + 1)
                chosen.pop()
            for n in added:
                del binding[n]

    yield from rec(0)
