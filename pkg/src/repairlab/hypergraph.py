"""Conflict hypergraphs of denial constraints.

Vertices are the facts of an instance; each edge is a set of facts that
together violate one denial constraint.  Repairs w.r.t. denial constraints are
exactly the maximal independent sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .model.constraints import DenialConstraint, FD, IND, ICSet
from .model.data import Fact, Instance

Edge = Tuple[Fact, ...]


@dataclass
class ConflictHypergraph:
    vertices: Tuple[Fact, ...]
    edges: Tuple[Edge, ...]
    # the constraint and fact tuple that first produced each edge
    sources: Tuple[Tuple[DenialConstraint, Tuple[Fact, ...]], ...]
    _adj: Dict[Fact, List[int]] = field(repr=False, default_factory=dict)
    _vset: FrozenSet[Fact] = field(repr=False, default=frozenset())
    _edge_sets: Tuple[FrozenSet[Fact], ...] = field(repr=False, default=())

    def __post_init__(self):
        self._vset = frozenset(self.vertices)
        self._edge_sets = tuple(frozenset(e) for e in self.edges)
        self._adj = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            for v in e:
                self._adj[v].append(i)

    @property
    def singletons(self) -> FrozenSet[Fact]:
        """Facts that violate a constraint on their own."""
        return frozenset(e[0] for e in self.edges if len(e) == 1)

    def edges_containing(self, v: Fact) -> List[Edge]:
        if v not in self._adj:
            raise KeyError(f"{v} is not a vertex")
        return [self.edges[i] for i in self._adj[v]]

    def edge_indices(self, v: Fact) -> List[int]:
        return self._adj.get(v, [])

    def edge_set(self, i: int) -> FrozenSet[Fact]:
        return self._edge_sets[i]

    def contained_edge(self, s: Iterable[Fact]) -> Optional[int]:
        """Index of some edge inside ``s``, or None."""
        s = s if isinstance(s, (set, frozenset)) else set(s)
        for v in sorted(s):
            for i in self._adj.get(v, ()):
                if self._edge_sets[i] <= s:
                    return i
        return None

    def is_independent(self, s: Iterable[Fact]) -> bool:
        return self.contained_edge(s) is None

    def blocking_edge(self, s: FrozenSet[Fact], v: Fact) -> Optional[int]:
        """An edge E with v in E and E - {v} inside s (adding v to s closes E)."""
        for i in self._adj.get(v, ()):
            if all(u == v or u in s for u in self.edges[i]):
                return i
        return None

    def addable(self, s: Iterable[Fact]) -> Optional[Fact]:
        """First vertex outside ``s`` whose addition keeps ``s`` independent."""
        s = frozenset(s)
        for v in self.vertices:
            if v not in s and self.blocking_edge(s, v) is None:
                return v
        return None

    def is_maximal_independent(self, s: Iterable[Fact]) -> bool:
        s = frozenset(s)
        return self.is_independent(s) and self.addable(s) is None

    def extend_greedy(self, s: Iterable[Fact], order: Optional[Sequence[Fact]] = None) -> FrozenSet[Fact]:
        """Grow an independent set to a maximal one, trying vertices in ``order``."""
        cur = set(s)
        for v in (order if order is not None else self.vertices):
            if v not in cur and self.blocking_edge(frozenset(cur), v) is None:
                cur.add(v)
        return frozenset(cur)

    # dumps

    def to_json(self) -> dict:
        index = {v: i for i, v in enumerate(self.vertices)}
        return {
            "vertices": [str(v) for v in self.vertices],
            "edges": [[index[v] for v in e] for e in self.edges],
        }

    def to_dot(self) -> str:
        index = {v: i for i, v in enumerate(self.vertices)}
        lines = ["graph conflicts {"]
        for v, i in index.items():
            label = str(v).replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  v{i} [label="{label}"];')
        for k, e in enumerate(self.edges):
            if len(e) == 2:
                lines.append(f"  v{index[e[0]]} -- v{index[e[1]]};")
            else:
                lines.append(f'  e{k} [shape=point, label=""];')
                for v in e:
                    lines.append(f"  e{k} -- v{index[v]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _denials(F) -> Tuple[DenialConstraint, ...]:
    if isinstance(F, ICSet):
        return F.as_denials()
    out = []
    for c in F:
        if isinstance(c, (FD, IND)):
            raise TypeError(f"hypergraphs are built from denial constraints only, got {c}")
        out.append(c)
    return tuple(out)


_CACHE: Dict[tuple, ConflictHypergraph] = {}
_CACHE_LIMIT = 256


def build(inst: Instance, F) -> ConflictHypergraph:
    """Conflict hypergraph of ``inst`` w.r.t. denial constraints ``F``.

    ``F`` may be a list of denial constraints or an IND-free :class:`ICSet`,
    whose FDs are converted first.
    """
    denials = _denials(F)
    key = (inst, denials)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    vertices = inst.sorted()
    seen: Dict[FrozenSet[Fact], int] = {}
    edges: List[Edge] = []
    sources = []
    for d in denials:
        for g in d.groundings(inst):
            e = frozenset(g)
            if e in seen:
                continue
            seen[e] = len(edges)
            edges.append(tuple(sorted(e, key=Fact.sort_key)))
            sources.append((d, g))
    order = sorted(range(len(edges)), key=lambda i: (len(edges[i]), [f.sort_key() for f in edges[i]]))
    h = ConflictHypergraph(vertices, tuple(edges[i] for i in order), tuple(sources[i] for i in order))
    if len(_CACHE) >= _CACHE_LIMIT:
        _CACHE.clear()
    _CACHE[key] = h
    return h
