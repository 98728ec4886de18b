"""Intermediate colored-graph problems used by the hardness constructions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple, Union

from .formulas import CnfFormula, Graph

Pair = Tuple[str, str]
Triple = Tuple[str, str, str]

RGB = ("r", "g", "b")


def _disjoint(*sets) -> bool:
    seen = set()
    for s in sets:
        if seen & set(s):
            return False
        seen |= set(s)
    return True


@dataclass(frozen=True)
class BipartiteColoredGraph:
    """Edges go from ``left`` to ``right`` vertices; each is green or blue."""

    left: Tuple[str, ...]
    right: Tuple[str, ...]
    green: Tuple[Pair, ...]
    blue: Tuple[Pair, ...]

    def __post_init__(self):
        if not _disjoint(self.left, self.right):
            raise ValueError("the two sides share a vertex")
        if not _disjoint(self.green, self.blue):
            raise ValueError("an edge has two colors")
        lt, rt = set(self.left), set(self.right)
        for x, y in self.green + self.blue:
            if x not in lt or y not in rt:
                raise ValueError(f"edge ({x}, {y}) does not cross the bipartition")


@dataclass(frozen=True)
class DirectedColoredGraph:
    vertices: Tuple[str, ...]
    p: Tuple[Pair, ...]
    g: Tuple[Pair, ...]
    b: Tuple[Pair, ...]

    def __post_init__(self):
        if not _disjoint(self.p, self.g, self.b):
            raise ValueError("an edge has two colors")
        vs = set(self.vertices)
        for x, y in self.p + self.g + self.b:
            if x not in vs or y not in vs:
                raise ValueError(f"edge ({x}, {y}) leaves the vertex set")


@dataclass(frozen=True)
class TypedHypergraph:
    """Ternary edges ``(v1, v2, v3)`` with each component drawn from its own vertex class."""

    v1: Tuple[str, ...]
    v2: Tuple[str, ...]
    v3: Tuple[str, ...]
    spoiled: FrozenSet[str]
    edges: Tuple[Triple, ...]

    def __post_init__(self):
        if not _disjoint(self.v1, self.v2, self.v3):
            raise ValueError("vertex classes overlap")
        c1, c2, c3 = set(self.v1), set(self.v2), set(self.v3)
        if not self.spoiled <= c1:
            raise ValueError("spoiled vertices must come from the first class")
        for e in self.edges:
            if e[0] not in c1 or e[1] not in c2 or e[2] not in c3:
                raise ValueError(f"edge {e} is not typed")

    @property
    def spoiled_edges(self) -> Tuple[Triple, ...]:
        return tuple(e for e in self.edges if e[0] in self.spoiled)


ColoredGraphInstance = Union[BipartiteColoredGraph, DirectedColoredGraph, TypedHypergraph]


# --- two keys --------------------------------------------------------------------

def node(v: str, label: str, primed: bool = False) -> str:
    return f"v:{v}{chr(39) if primed else ''}.{label}"


def two_key_gadget(h: Graph) -> BipartiteColoredGraph:
    """Ten vertices per node; green paths encode a color, blue edges punish clashes."""
    left, right, green, blue = [], [], [], []
    for v in h.vertices:
        for lab in "mnrgb":
            left.append(node(v, lab))
            right.append(node(v, lab, True))
        for x, y in (("m", "r"), ("m", "b"), ("n", "b"), ("n", "g"),
                     ("r", "m"), ("b", "m"), ("b", "n"), ("g", "n")):
            green.append((node(v, x), node(v, y, True)))
        for x in RGB:
            for y in RGB:
                if x != y:
                    blue.append((node(v, x), node(v, y, True)))
    for u, v in h.sorted_edges():
        for a, b in ((u, v), (v, u)):
            for c in RGB:
                blue.append((node(a, c), node(b, c, True)))
    return BipartiteColoredGraph(tuple(left), tuple(right), tuple(green), tuple(blue))


# --- one denial ------------------------------------------------------------------

def one_denial_gadget(f: CnfFormula) -> DirectedColoredGraph:
    """Four vertices per variable and three per clause.

    A clause holding both ``x`` and ``~x`` would need an edge of two colors;
    such clauses are always true and are left out.
    """
    verts, p, g, b = [], [], [], []
    for i in range(1, f.n_vars + 1):
        a_, b_, c_, d_ = (f"v:{x}{i}" for x in "abcd")
        verts += [a_, b_, c_, d_]
        p.append((a_, b_))
        g.append((b_, d_))
        b.append((b_, c_))
    kept = [c for c in f.clauses if not any(-l in c for l in c)]
    for j, clause in enumerate(kept, 1):
        e_, f_, g_ = (f"cl:{x}{j}" for x in "efg")
        verts += [e_, f_, g_]
        p.append((e_, f_))
        g.append((e_, g_))
        for lit in sorted(set(clause), key=lambda l: (abs(l), l < 0)):
            edge = (f"v:d{abs(lit)}", e_)
            (g if lit > 0 else b).append(edge)
    return DirectedColoredGraph(tuple(verts), tuple(p), tuple(g), tuple(b))


# --- spoiled-free triangles ------------------------------------------------------

RGBPQ = ("r", "g", "b", "p", "q")


def gen_spoiled_free(h: Graph) -> TypedHypergraph:
    """Triangle gadget: five second-class and five third-class vertices per node.

    Every triangle gets a fresh first-class vertex; the spoiled ones are those
    that put a node into two colors or two adjacent nodes into the same color.
    """
    v1, v2, v3, edges = [], [], [], []
    spoiled = set()

    def tri(x: str, y: str, bad: bool) -> None:
        t = f"t:{len(edges) + 1:04d}"
        v1.append(t)
        edges.append((t, x, y))
        if bad:
            spoiled.add(t)

    for v in h.vertices:
        for lab in RGBPQ:
            v2.append(node(v, lab))
            v3.append(node(v, lab, True))
        for x, y in (("r", "p"), ("g", "p"), ("g", "q"), ("b", "q"),
                     ("p", "r"), ("p", "g"), ("q", "g"), ("q", "b")):
            tri(node(v, x), node(v, y, True), False)
        for x in RGB:
            for y in RGB:
                if x != y:
                    tri(node(v, x), node(v, y, True), True)
    for u, v in h.sorted_edges():
        for a, b in ((u, v), (v, u)):
            for c in RGB:
                tri(node(a, c), node(b, c, True), True)
    return TypedHypergraph(tuple(v1), tuple(v2), tuple(v3), frozenset(spoiled), tuple(edges))


def maximal_spoiled_free(th: TypedHypergraph) -> Optional[Tuple[Triple, ...]]:
    """A maximal set of pairwise disjoint edges containing no spoiled edge, or None.

    Brute force over the unspoiled edges, one second-class vertex at a time.
    An edge is checked for maximality as soon as none of its vertices can
    still become used.
    """
    good = [e for e in th.edges if e[0] not in th.spoiled]
    by_v2: Dict[str, List[Triple]] = {}
    for e in good:
        by_v2.setdefault(e[1], []).append(e)
    heads = sorted(by_v2)
    head_at = {b: k for k, b in enumerate(heads)}
    # the last step at which each vertex can still become used
    last_use: Dict[str, int] = {}
    for e in good:
        for v in e:
            last_use[v] = max(last_use.get(v, -1), head_at[e[1]])
    settled: List[List[Triple]] = [[] for _ in range(len(heads) + 1)]
    for e in th.edges:
        settled[max(last_use.get(v, -1) for v in e) + 1].append(e)

    def rec(k: int, chosen: List[Triple], used: Set[str]) -> Optional[Tuple[Triple, ...]]:
        # any settled edge with all vertices free could still be added
        for e in settled[k]:
            if not any(v in used for v in e):
                return None
        if k == len(heads):
            return tuple(chosen)
        for e in by_v2[heads[k]]:
            if not any(v in used for v in e):
                found = rec(k + 1, chosen + [e], used | set(e))
                if found is not None:
                    return found
        return rec(k + 1, chosen, used)

    return rec(0, [], set())
