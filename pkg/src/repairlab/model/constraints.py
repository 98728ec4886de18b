"""Integrity constraints: denial constraints, functional and inclusion dependencies."""

from __future__ import annotations

import enum
import graphlib
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ..errors import SchemaError, SortError
from .data import NUM, Fact, Instance, Schema, sort_of
from .terms import ORDER_OPS, Atom, Builtin, Const, Var, match_conjunction


@dataclass(frozen=True)
class DenialConstraint:
    """``not [P1(x1) and ... and Pm(xm) and phi]`` with all variables universal."""

    atoms: Tuple[Atom, ...]
    builtins: Tuple[Builtin, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "builtins", tuple(self.builtins))
        if not self.atoms:
            raise SchemaError("a denial constraint needs at least one relational atom")
        in_atoms = {v for a in self.atoms for v in a.variables}
        for b in self.builtins:
            unsafe = set(b.variables) - in_atoms
            if unsafe:
                raise SchemaError(f"unsafe variable(s) {sorted(unsafe)} in {b}")

    def __str__(self) -> str:
        parts = [str(a) for a in self.atoms] + [str(b) for b in self.builtins]
        return f"not [ {', '.join(parts)} ]"

    def groundings(self, inst: Instance) -> Iterator[Tuple[Fact, ...]]:
        """All fact tuples (one per atom) that jointly violate this constraint."""
        for _, facts in match_conjunction(inst, self.atoms, self.builtins):
            yield facts


@dataclass(frozen=True)
class FD:
    """``relation: lhs -> rhs``; the right side is normalized to exclude the left side."""

    relation: str
    lhs: Tuple[str, ...]
    rhs: Tuple[str, ...]

    def __post_init__(self):
        lhs = tuple(dict.fromkeys(self.lhs))
        rhs = tuple(a for a in dict.fromkeys(self.rhs) if a not in lhs)
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)

    @property
    def vacuous(self) -> bool:
        return not self.rhs

    def __str__(self) -> str:
        return f"{self.relation}: {', '.join(self.lhs)} -> {', '.join(self.rhs)}"


@dataclass(frozen=True)
class IND:
    """``source[source_attrs] <= target[target_attrs]``."""

    source: str
    source_attrs: Tuple[str, ...]
    target: str
    target_attrs: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "source_attrs", tuple(self.source_attrs))
        object.__setattr__(self, "target_attrs", tuple(self.target_attrs))
        if not self.source_attrs or len(self.source_attrs) != len(self.target_attrs):
            raise SchemaError(f"inclusion dependency {self} needs equally long, nonempty attribute lists")

    def is_full(self, schema: Schema) -> bool:
        return set(self.target_attrs) == set(schema[self.target].attribute_names)

    def __str__(self) -> str:
        return f"{self.source}[{', '.join(self.source_attrs)}] <= {self.target}[{', '.join(self.target_attrs)}]"


Constraint = Union[DenialConstraint, FD, IND]


class Classification(str, enum.Enum):
    DENIAL_ONLY = "denial-only"
    FDS_ONLY = "fds-only"
    INDS_ONLY = "inds-only"
    SINGLE_KEY_FK = "single-key-fk"
    ACYCLIC_FD_IND = "acyclic-fd-ind"
    GENERAL = "general"

    def __str__(self) -> str:
        return self.value

    @property
    def ptime_repair_check(self) -> bool:
        return self is not Classification.GENERAL


@dataclass(frozen=True)
class IndGraph:
    nodes: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...]
    acyclic: bool
    # targets come before their sources; None when cyclic
    order: Optional[Tuple[str, ...]]


@dataclass(frozen=True)
class ICSet:
    """A validated set of constraints over one schema."""

    schema: Schema
    denials: Tuple[DenialConstraint, ...] = ()
    fds: Tuple[FD, ...] = ()
    inds: Tuple[IND, ...] = ()
    _cache: dict = field(init=False, repr=False, compare=False, hash=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "denials", tuple(dict.fromkeys(self.denials)))
        object.__setattr__(self, "fds", tuple(f for f in dict.fromkeys(self.fds) if not f.vacuous))
        object.__setattr__(self, "inds", tuple(dict.fromkeys(self.inds)))
        for d in self.denials:
            _validate_denial(self.schema, d)
        for f in self.fds:
            rel = self.schema[f.relation]
            rel.positions(f.lhs)
            rel.positions(f.rhs)
        for i in self.inds:
            _validate_ind(self.schema, i)

    @classmethod
    def of(cls, schema: Schema, constraints: Iterable[Constraint]) -> "ICSet":
        ds, fs, is_ = [], [], []
        for c in constraints:
            if isinstance(c, DenialConstraint):
                ds.append(c)
            elif isinstance(c, FD):
                fs.append(c)
            elif isinstance(c, IND):
                is_.append(c)
            else:
                raise TypeError(f"not a constraint: {c!r}")
        return cls(schema, tuple(ds), tuple(fs), tuple(is_))

    @property
    def constraints(self) -> Tuple[Constraint, ...]:
        return self.denials + self.fds + self.inds

    def __len__(self) -> int:
        return len(self.constraints)

    def without(self, c: Constraint) -> "ICSet":
        return ICSet.of(self.schema, [x for x in self.constraints if x != c])

    def only(self, *, denials: bool = False, fds: bool = False, inds: bool = False) -> "ICSet":
        return ICSet(self.schema, self.denials if denials else (), self.fds if fds else (),
                     self.inds if inds else ())

    @property
    def classification(self) -> Classification:
        if "cls" not in self._cache:
            self._cache["cls"] = classify(self)
        return self._cache["cls"]

    def as_denials(self) -> Tuple[DenialConstraint, ...]:
        """Denial constraints plus the denial form of every FD; INDs must be absent."""
        if self.inds:
            raise SchemaError("inclusion dependencies have no denial form")
        if "denials" not in self._cache:
            out = list(self.denials)
            for f in self.fds:
                out.extend(fd_to_denial(f, self.schema))
            self._cache["denials"] = tuple(out)
        return self._cache["denials"]

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.constraints)


def _validate_denial(schema: Schema, d: DenialConstraint) -> None:
    var_sort: Dict[str, str] = {}
    for a in d.atoms:
        rel = schema[a.relation]
        if len(a.terms) != rel.arity:
            raise SchemaError(f"{a}: arity {len(a.terms)} but {rel.name} has arity {rel.arity}")
        for t, attr in zip(a.terms, rel.attributes):
            if isinstance(t, Const):
                if sort_of(t.value) != attr.sort:
                    raise SchemaError(f"{a}: constant {t} does not fit attribute {attr.name} ({attr.sort})")
            else:
                prev = var_sort.setdefault(t.name, attr.sort)
                if prev != attr.sort:
                    raise SchemaError(f"variable {t.name} used at both {prev} and {attr.sort} positions")
    for b in d.builtins:
        if b.op in ORDER_OPS:
            for t in (b.left, b.right):
                s = var_sort[t.name] if isinstance(t, Var) else sort_of(t.value)
                if s != NUM:
                    raise SortError(f"order comparison {b} on a symbolic term")


def _validate_ind(schema: Schema, ind: IND) -> None:
    src = schema[ind.source]
    tgt = schema[ind.target]
    sp = src.positions(ind.source_attrs)
    tp = tgt.positions(ind.target_attrs)
    for a, b in zip(sp, tp):
        if src.sort_at(a) != tgt.sort_at(b):
            raise SchemaError(f"{ind}: sort mismatch between {src.attributes[a].name} and {tgt.attributes[b].name}")


def fd_to_denial(fd: FD, schema: Schema) -> List[DenialConstraint]:
    """One two-atom denial constraint per dependent attribute of ``fd``."""
    rel = schema[fd.relation]
    lhs = set(rel.positions(fd.lhs))
    out = []
    for b in rel.positions(fd.rhs):
        first = [Var(f"x{i}") for i in range(rel.arity)]
        second = [Var(f"x{i}") if i in lhs else Var(f"y{i}") for i in range(rel.arity)]
        out.append(DenialConstraint(
            (Atom(rel.name, tuple(first)), Atom(rel.name, tuple(second))),
            (Builtin("!=", Var(f"x{b}"), Var(f"y{b}")),),
            name=f"{fd} [{rel.attributes[b].name}]",
        ))
    return out


def ind_graph(ics: ICSet, schema: Optional[Schema] = None) -> IndGraph:
    schema = schema or ics.schema
    nodes = schema.names
    edges = tuple(dict.fromkeys((i.source, i.target) for i in ics.inds))
    preds: Dict[str, set] = {n: set() for n in nodes}
    for s, t in edges:
        preds[s].add(t)
    try:
        order = tuple(graphlib.TopologicalSorter(preds).static_order())
    except graphlib.CycleError:
        return IndGraph(nodes, edges, False, None)
    # static_order is deterministic for a fixed insertion order; pin it to the schema order anyway
    return IndGraph(nodes, edges, True, _stable_topo(nodes, edges) or order)


def _stable_topo(nodes: Sequence[str], edges: Sequence[Tuple[str, str]]) -> Optional[Tuple[str, ...]]:
    pending = {n: {t for s, t in edges if s == n} for n in nodes}
    out: List[str] = []
    while pending:
        ready = [n for n in nodes if n in pending and not (pending[n] - set(out))]
        if not ready:
            return None
        out.append(ready[0])
        del pending[ready[0]]
    return tuple(out)


def declared_key(schema: Schema, relation: str) -> Optional[FrozenSet[str]]:
    keys = schema[relation].key_sets
    return keys[0] if len(keys) == 1 else None


def is_single_key(ics: ICSet) -> bool:
    """Key FDs plus foreign keys with at most one key per involved relation; no denials."""
    if ics.denials:
        return False
    schema = ics.schema
    for f in ics.fds:
        keys = schema[f.relation].key_sets
        if len(keys) != 1 or frozenset(f.lhs) != keys[0]:
            return False
    for i in ics.inds:
        keys = schema[i.target].key_sets
        if len(keys) != 1 or frozenset(i.target_attrs) != keys[0]:
            return False
    return True


def classify(ics: ICSet, schema: Optional[Schema] = None) -> Classification:
    if schema is not None and schema != ics.schema:
        ics = ICSet(schema, ics.denials, ics.fds, ics.inds)
    if not ics.inds:
        return Classification.DENIAL_ONLY if ics.denials else Classification.FDS_ONLY
    if ics.denials:
        return Classification.GENERAL
    if not ics.fds:
        return Classification.INDS_ONLY
    if is_single_key(ics):
        return Classification.SINGLE_KEY_FK
    if ind_graph(ics).acyclic:
        return Classification.ACYCLIC_FD_IND
    return Classification.GENERAL


# --- satisfaction -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """A witness that ``constraint`` fails: the facts that jointly violate it.

    For an IND the single fact lacks a supporting target fact.
    """

    constraint: Constraint
    facts: Tuple[Fact, ...]

    def __str__(self) -> str:
        return f"{self.constraint} violated by {{{', '.join(str(f) for f in self.facts)}}}"


def fd_violations(inst: Instance, fd: FD, schema: Schema) -> Iterator[Violation]:
    rel = schema[fd.relation]
    lp = rel.positions(fd.lhs)
    rp = rel.positions(fd.rhs)
    groups: Dict[tuple, List[Fact]] = {}
    for f in inst.relation_sorted(fd.relation):
        groups.setdefault(tuple(f.values[i] for i in lp), []).append(f)
    for members in groups.values():
        for i, f in enumerate(members):
            fr = tuple(f.values[k] for k in rp)
            for g in members[i + 1:]:
                if tuple(g.values[k] for k in rp) != fr:
                    yield Violation(fd, (f, g))


def ind_violations(inst: Instance, ind: IND, schema: Schema) -> Iterator[Violation]:
    sp = schema[ind.source].positions(ind.source_attrs)
    tp = schema[ind.target].positions(ind.target_attrs)
    present = {tuple(f.values[i] for i in tp) for f in inst.relation(ind.target)}
    for f in inst.relation_sorted(ind.source):
        if tuple(f.values[i] for i in sp) not in present:
            yield Violation(ind, (f,))


def violations(inst: Instance, ics: ICSet) -> Iterator[Violation]:
    for d in ics.denials:
        for g in d.groundings(inst):
            yield Violation(d, tuple(dict.fromkeys(g)))
    for f in ics.fds:
        yield from fd_violations(inst, f, ics.schema)
    for i in ics.inds:
        yield from ind_violations(inst, i, ics.schema)


def satisfies(inst: Instance, ics: Union[ICSet, Iterable[Constraint]]) -> bool:
    if not isinstance(ics, ICSet):
        ics = ICSet.of(inst.schema, ics)
    for _ in violations(inst, ics):
        return False
    return True
