"""Exhaustive input families for the reduction checks, with their expected sizes."""

from __future__ import annotations

import itertools
import random
from typing import Iterator, List, Tuple

from repairlab.reductions import CnfFormula, Graph, Qbf2, TypedHypergraph


def monotone_clauses(n_vars: int = 3) -> List[Tuple[int, ...]]:
    out = []
    vs = range(1, n_vars + 1)
    for k in range(1, n_vars + 1):
        for c in itertools.combinations(vs, k):
            out += [c, tuple(-v for v in c)]
    return out


def all_clauses(n_vars: int) -> List[Tuple[int, ...]]:
    """Every nonempty clause over the literals of ``n_vars`` variables, tautologies included."""
    lits = [s * v for v in range(1, n_vars + 1) for s in (1, -1)]
    return [c for k in range(1, len(lits) + 1) for c in itertools.combinations(lits, k)]


def formulas(clauses, max_clauses: int = 3, n_vars: int = 3, min_clauses: int = 0, **flags) -> Iterator[CnfFormula]:
    for k in range(min_clauses, max_clauses + 1):
        for cs in itertools.combinations(clauses, k):
            yield CnfFormula.of(cs, n_vars=n_vars, **flags)


def monotone_formulas() -> Iterator[CnfFormula]:
    return formulas(monotone_clauses(), monotone_partitioned=True)


def cnf_formulas(min_clauses: int = 0) -> Iterator[CnfFormula]:
    return formulas(all_clauses(3), min_clauses=min_clauses)


def restricted_formulas() -> Iterator[CnfFormula]:
    """Two variables, two clauses, each clause at most three literals."""
    cl = [c for k in range(1, 4) for c in itertools.combinations([1, -1, 2, -2], k)]
    for c1, c2 in itertools.product(cl, repeat=2):
        try:
            yield CnfFormula.of([c1, c2], n_vars=2, restricted=True)
        except ValueError:
            continue


def qbfs_exhaustive() -> Iterator[Qbf2]:
    """k + l <= 2 with up to three clauses over all nonempty literal sets."""
    for nv in (1, 2):
        for f in formulas(all_clauses(nv), n_vars=nv, min_clauses=1):
            for nu in range(nv + 1):
                yield Qbf2(tuple(range(1, nu + 1)), tuple(range(nu + 1, nv + 1)), f)


def qbfs_random(n: int, seed: int = 7) -> Iterator[Qbf2]:
    """k + l in {3, 4}, one to three clauses of one to three literals."""
    rng = random.Random(seed)
    for _ in range(n):
        nv = rng.choice((3, 4))
        nu = rng.randint(0, nv)
        cs = []
        for _ in range(rng.randint(1, 3)):
            vs = rng.sample(range(1, nv + 1), rng.randint(1, 3))
            cs.append(tuple(v * rng.choice((1, -1)) for v in vs))
        yield Qbf2(tuple(range(1, nu + 1)), tuple(range(nu + 1, nv + 1)), CnfFormula.of(cs, n_vars=nv))


def graphs(max_nodes: int = 3) -> Iterator[Graph]:
    """Every labelled graph on ``n1..nk`` for k up to ``max_nodes``."""
    for n in range(max_nodes + 1):
        vs = [f"n{i}" for i in range(1, n + 1)]
        pairs = list(itertools.combinations(vs, 2))
        for k in range(len(pairs) + 1):
            for es in itertools.combinations(pairs, k):
                yield Graph.of(vs, es)


K4 = Graph.of("abcd", list(itertools.combinations("abcd", 2)))


def typed_hypergraphs(n: int, seed: int = 11) -> Iterator[TypedHypergraph]:
    rng = random.Random(seed)
    for _ in range(n):
        v1 = [f"t{j}" for j in range(rng.randint(1, 4))]
        v2 = [f"b{j}" for j in range(rng.randint(1, 3))]
        v3 = [f"c{j}" for j in range(rng.randint(1, 3))]
        edges = sorted({(rng.choice(v1), rng.choice(v2), rng.choice(v3)) for _ in range(rng.randint(1, 6))})
        spoiled = frozenset(t for t in v1 if rng.random() < 0.4)
        yield TypedHypergraph(tuple(v1), tuple(v2), tuple(v3), spoiled, tuple(edges))


def naive_spoiled_free(th: TypedHypergraph) -> bool:
    """Definition-level check: some maximal disjoint edge set avoids every spoiled vertex."""
    edges = list(th.edges)
    for k in range(len(edges) + 1):
        for chosen in itertools.combinations(edges, k):
            vs = [v for e in chosen for v in e]
            if len(vs) != len(set(vs)) or any(e[0] in th.spoiled for e in chosen):
                continue
            used = set(vs)
            if all(any(v in used for v in e) for e in edges):
                return True
    return False
