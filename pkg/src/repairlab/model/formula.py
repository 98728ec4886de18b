"""First-order formulas over relational and built-in atoms.

One AST serves ground quantifier-free sentences, closed first-order sentences
(such as rewritten queries) and query bodies.  Evaluation is guarded: every
quantified variable must be ranged over by a positive relational atom in the
quantifier's body, so the result coincides with active-domain semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from ..errors import UnguardedVariableError
from .data import Fact, Instance
from .terms import Atom, Binding, Builtin, Const, Var, compare, match_conjunction


@dataclass(frozen=True)
class Rel:
    atom: Atom

    def __str__(self) -> str:
        return str(self.atom)


@dataclass(frozen=True)
class Cmp:
    builtin: Builtin

    def __str__(self) -> str:
        return str(self.builtin)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return f"not {_wrap(self.body, 4)}"


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __str__(self) -> str:
        if not self.parts:
            return "true"
        return " and ".join(_wrap(p, 3) for p in self.parts)


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __str__(self) -> str:
        if not self.parts:
            return "false"
        return " or ".join(_wrap(p, 2) for p in self.parts)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"{_wrap(self.left, 2)} -> {_wrap(self.right, 1)}"


@dataclass(frozen=True)
class Exists:
    variables: Tuple[str, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))

    def __str__(self) -> str:
        return f"exists {', '.join(self.variables)}: {self.body}"


@dataclass(frozen=True)
class ForAll:
    variables: Tuple[str, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))

    def __str__(self) -> str:
        return f"forall {', '.join(self.variables)}: {self.body}"


Formula = Union[Rel, Cmp, Not, And, Or, Implies, Exists, ForAll]

TRUE = And(())
FALSE = Or(())


def _prec(f: Formula) -> int:
    if isinstance(f, (Exists, ForAll)):
        return 0
    if isinstance(f, Implies):
        return 1
    if isinstance(f, Or):
        return 2 if f.parts else 5
    if isinstance(f, And):
        return 3 if f.parts else 5
    if isinstance(f, Not):
        return 4
    return 5


def _wrap(f: Formula, need: int) -> str:
    s = str(f)
    return s if _prec(f) > need or (_prec(f) == need and need in (2, 3)) else f"({s})"


def conj(parts: Iterable[Formula]) -> Formula:
    ps = []
    for p in parts:
        ps.extend(p.parts if isinstance(p, And) else (p,))
    return ps[0] if len(ps) == 1 else And(tuple(ps))


def disj(parts: Iterable[Formula]) -> Formula:
    ps = []
    for p in parts:
        ps.extend(p.parts if isinstance(p, Or) else (p,))
    return ps[0] if len(ps) == 1 else Or(tuple(ps))


def free_variables(f: Formula) -> Tuple[str, ...]:
    """Free variables in order of first occurrence."""
    out: List[str] = []

    def walk(g: Formula, bound: FrozenSet[str]) -> None:
        if isinstance(g, Rel):
            names: Sequence[str] = g.atom.variables
        elif isinstance(g, Cmp):
            names = g.builtin.variables
        elif isinstance(g, Not):
            walk(g.body, bound)
            return
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p, bound)
            return
        elif isinstance(g, Implies):
            walk(g.left, bound)
            walk(g.right, bound)
            return
        else:
            walk(g.body, bound | frozenset(g.variables))
            return
        for n in names:
            if n not in bound and n not in out:
                out.append(n)

    walk(f, frozenset())
    return tuple(out)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, ForAll)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(p) for p in f.parts)
    if isinstance(f, Implies):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


def is_ground_qf(f: Formula) -> bool:
    return is_quantifier_free(f) and not free_variables(f)


def relation_names(f: Formula) -> Tuple[str, ...]:
    out: List[str] = []

    def walk(g: Formula) -> None:
        if isinstance(g, Rel):
            if g.atom.relation not in out:
                out.append(g.atom.relation)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, Implies):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Exists, ForAll)):
            walk(g.body)

    walk(f)
    return tuple(out)


def fact_of(r: Rel) -> Fact:
    if not r.atom.is_ground():
        raise ValueError(f"atom {r.atom} is not ground")
    return r.atom.ground({})


def negate(f: Formula) -> Formula:
    """Push a negation one level inward where that keeps the formula guarded."""
    if isinstance(f, Not):
        return f.body
    if isinstance(f, Implies):
        return conj([f.left, negate(f.right)])
    if isinstance(f, Or):
        return conj(negate(p) for p in f.parts) if f.parts else TRUE
    if isinstance(f, Cmp):
        return Cmp(f.builtin.negated())
    if isinstance(f, ForAll):
        return Exists(f.variables, negate(f.body))
    if isinstance(f, Exists):
        return ForAll(f.variables, negate(f.body))
    if isinstance(f, And) and not f.parts:
        return FALSE
    return Not(f)


# --- evaluation --------------------------------------------------------------

def _conjuncts(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        out: List[Formula] = []
        for p in f.parts:
            out.extend(_conjuncts(p))
        return out
    return [f]


def _eval_exists(inst: Instance, variables: Sequence[str], body: Formula, binding: Binding) -> bool:
    parts = _conjuncts(body)
    guards = [p.atom for p in parts if isinstance(p, Rel)]
    guarded = {v for a in guards for v in a.variables}
    missing = [v for v in variables if v not in guarded]
    if missing:
        raise UnguardedVariableError(f"variable(s) {missing} not guarded by a positive atom in: {body}")
    # a quantified name shadows any outer binding of it
    inner = {k: v for k, v in binding.items() if k not in variables}
    known = guarded | set(inner)
    cmps = [p.builtin for p in parts if isinstance(p, Cmp) and set(p.builtin.variables) <= known]
    rest = [p for p in parts if not isinstance(p, Rel) and not (isinstance(p, Cmp) and p.builtin in cmps)]
    for b, _ in match_conjunction(inst, guards, cmps, inner):
        if all(_eval(inst, p, b) for p in rest):
            return True
    return False


def _eval(inst: Instance, f: Formula, binding: Binding) -> bool:
    if isinstance(f, Rel):
        return f.atom.ground(binding) in inst
    if isinstance(f, Cmp):
        return f.builtin.holds(binding)
    if isinstance(f, Not):
        return not _eval(inst, f.body, binding)
    if isinstance(f, And):
        return all(_eval(inst, p, binding) for p in f.parts)
    if isinstance(f, Or):
        return any(_eval(inst, p, binding) for p in f.parts)
    if isinstance(f, Implies):
        return (not _eval(inst, f.left, binding)) or _eval(inst, f.right, binding)
    if isinstance(f, Exists):
        return _eval_exists(inst, f.variables, f.body, binding)
    if isinstance(f, ForAll):
        return not _eval_exists(inst, f.variables, negate(f.body), binding)
    raise TypeError(f"not a formula: {f!r}")


def eval_fo(inst: Instance, f: Formula, binding: Optional[Binding] = None) -> bool:
    """Evaluate ``f`` on ``inst``; free variables must be given by ``binding``."""
    binding = dict(binding or {})
    free = [v for v in free_variables(f) if v not in binding]
    if free:
        raise UnguardedVariableError(f"free variable(s) {free} without a binding")
    return _eval(inst, f, binding)


def check_guarded(f: Formula) -> None:
    """Raise UnguardedVariableError unless every quantifier has a positive guard."""
    def walk(g: Formula) -> None:
        if isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, Implies):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Exists, ForAll)):
            body = g.body if isinstance(g, Exists) else negate(g.body)
            guarded = {v for p in _conjuncts(body) if isinstance(p, Rel) for v in p.atom.variables}
            missing = [v for v in g.variables if v not in guarded]
            if missing:
                raise UnguardedVariableError(f"variable(s) {missing} not guarded in: {g}")
            walk(body)

    walk(f)


# --- ground CNF --------------------------------------------------------------

Literal = Tuple[Fact, bool]
Clause = Tuple[Literal, ...]


def _nnf(f: Formula, positive: bool) -> Formula:
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, Implies):
        return _nnf(Or((Not(f.left), f.right)), positive)
    if isinstance(f, (And, Or)):
        parts = tuple(_nnf(p, positive) for p in f.parts)
        flip = isinstance(f, And) != positive
        return Or(parts) if flip else And(parts)
    if isinstance(f, Cmp):
        b = f.builtin
        val = compare(b.op, _const(b.left), _const(b.right))
        return TRUE if val == positive else FALSE
    if isinstance(f, Rel):
        return f if positive else Not(f)
    raise ValueError(f"quantified subformula in a ground sentence: {f}")


def _const(t) -> object:
    if isinstance(t, Var):
        raise ValueError(f"variable {t} in a ground sentence")
    return t.value


def to_cnf(f: Formula) -> List[Clause]:
    """Clauses of a ground quantifier-free sentence.

    Each clause is a sorted tuple of ``(fact, polarity)`` literals.  Builtins are
    evaluated away; tautological clauses are dropped and duplicates merged.  An
    empty clause stands for ``false``; an empty list for ``true``.
    """
    if not is_ground_qf(f):
        raise ValueError("CNF conversion needs a ground quantifier-free sentence")

    def cnf(g: Formula) -> List[FrozenSet[Literal]]:
        if isinstance(g, Rel):
            return [frozenset({(fact_of(g), True)})]
        if isinstance(g, Not):
            return [frozenset({(fact_of(g.body), False)})]
        if isinstance(g, And):
            out: List[FrozenSet[Literal]] = []
            for p in g.parts:
                out.extend(cnf(p))
            return out
        # Or: distribute
        acc: List[FrozenSet[Literal]] = [frozenset()]
        for p in g.parts:
            acc = [a | c for a in acc for c in cnf(p)]
        return acc

    clauses = set()
    for c in cnf(_nnf(f, True)):
        if any((fa, not s) in c for fa, s in c):
            continue
        clauses.add(c)
    # subsumed clauses add nothing
    kept = [c for c in clauses if not any(o < c for o in clauses)]
    return sorted((tuple(sorted(c, key=_lit_key)) for c in kept), key=lambda cl: [_lit_key(l) for l in cl])


def _lit_key(lit: Literal) -> tuple:
    return (lit[0].sort_key(), not lit[1])


def cnf_formula(clauses: Sequence[Clause]) -> Formula:
    def lit(l: Literal) -> Formula:
        a = Rel(Atom(l[0].relation, tuple(Const(v) for v in l[0].values)))
        return a if l[1] else Not(a)
    return And(tuple(Or(tuple(lit(l) for l in c)) for c in clauses))


def ground_atom(f: Fact) -> Rel:
    return Rel(Atom(f.relation, tuple(Const(v) for v in f.values)))
