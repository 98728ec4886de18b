"""Propositional inputs of the generators and their brute-force deciders."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, Optional, Sequence, Tuple

Clause = Tuple[int, ...]


@dataclass(frozen=True)
class CnfFormula:
    """Variables ``1..n_vars``; a literal is ``+v`` or ``-v``.

    ``monotone_partitioned`` and ``restricted`` are claims checked on
    construction; the matching properties are computed regardless.
    """

    n_vars: int
    clauses: Tuple[Clause, ...]
    monotone_partitioned: bool = False
    restricted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.n_vars < 0:
            raise ValueError("negative variable count")
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if not isinstance(lit, int) or lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"bad literal {lit!r} for {self.n_vars} variables")
        if self.monotone_partitioned and not self.is_monotone_partitioned:
            raise ValueError("formula has a clause mixing positive and negative literals")
        if self.restricted and not self.is_restricted:
            raise ValueError("formula violates the restricted shape "
                             "(at most 3 literals per clause, 3 occurrences per variable, "
                             "as many variables as clauses)")

    @classmethod
    def of(cls, clauses: Sequence[Sequence[int]], n_vars: Optional[int] = None, **flags) -> "CnfFormula":
        cl = tuple(tuple(c) for c in clauses)
        if n_vars is None:
            n_vars = max((abs(l) for c in cl for l in c), default=0)
        return cls(n_vars, cl, **flags)

    @property
    def is_monotone_partitioned(self) -> bool:
        return all(all(l > 0 for l in c) or all(l < 0 for l in c) for c in self.clauses)

    @property
    def is_restricted(self) -> bool:
        occ = Counter(abs(l) for c in self.clauses for l in c)
        return (all(len(c) <= 3 for c in self.clauses)
                and all(n <= 3 for n in occ.values())
                and self.n_vars == len(self.clauses))

    def evaluate(self, assignment: Dict[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def __str__(self) -> str:
        def lit(l: int) -> str:
            return f"x{l}" if l > 0 else f"~x{-l}"
        return " & ".join("(" + " | ".join(lit(l) for l in c) + ")" for c in self.clauses) or "true"


def assignments(variables: Sequence[int]) -> Iterator[Dict[int, bool]]:
    for bits in itertools.product((False, True), repeat=len(variables)):
        yield dict(zip(variables, bits))


def satisfying_assignment(f: CnfFormula) -> Optional[Dict[int, bool]]:
    for a in assignments(range(1, f.n_vars + 1)):
        if f.evaluate(a):
            return a
    return None


def is_satisfiable(f: CnfFormula) -> bool:
    return satisfying_assignment(f) is not None


@dataclass(frozen=True)
class Qbf2:
    """``forall universals exists existentials: matrix``; variables are matrix indices."""

    universals: Tuple[int, ...]
    existentials: Tuple[int, ...]
    matrix: CnfFormula

    def __post_init__(self):
        object.__setattr__(self, "universals", tuple(self.universals))
        object.__setattr__(self, "existentials", tuple(self.existentials))
        u, e = set(self.universals), set(self.existentials)
        if u & e:
            raise ValueError("a variable is quantified twice")
        if u | e != set(range(1, self.matrix.n_vars + 1)):
            raise ValueError("every matrix variable must be quantified exactly once")

    def __str__(self) -> str:
        us = ",".join(f"x{v}" for v in self.universals)
        es = ",".join(f"x{v}" for v in self.existentials)
        return f"forall {us} exists {es}: {self.matrix}"


def qbf_true(q: Qbf2) -> bool:
    for a in assignments(q.universals):
        if not any(q.matrix.evaluate({**a, **b}) for b in assignments(q.existentials)):
            return False
    return True


@dataclass(frozen=True)
class Graph:
    """Finite undirected graph without loops."""

    vertices: Tuple[str, ...]
    edges: FrozenSet[FrozenSet[str]]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise ValueError(f"bad edge {sorted(e)}")

    @classmethod
    def of(cls, vertices: Sequence, edges: Sequence[Sequence]) -> "Graph":
        return cls(tuple(str(v) for v in vertices), frozenset(frozenset(str(v) for v in e) for e in edges))

    def sorted_edges(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(sorted(tuple(sorted(e)) for e in self.edges))

    def neighbours(self, v: str) -> Tuple[str, ...]:
        return tuple(sorted(u for e in self.edges if v in e for u in e if u != v))


def three_coloring(g: Graph) -> Optional[Dict[str, int]]:
    for colors in itertools.product(range(3), repeat=len(g.vertices)):
        c = dict(zip(g.vertices, colors))
        if all(len({c[v] for v in e}) == 2 for e in g.edges):
            return c
    return None


def is_3colorable(g: Graph) -> bool:
    return three_coloring(g) is not None
