"""Values, schemas, facts and instances.

Symbolic constants are Python ``str`` and numeric constants are Python ``int``
(booleans are rejected).  The two domains never compare equal, and only
numeric values are ordered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ..errors import SchemaError

Value = Union[str, int]

SYM = "sym"
NUM = "num"
SORTS = (SYM, NUM)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def is_numeric(v: object) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def is_symbolic(v: object) -> bool:
    return isinstance(v, str)


def sort_of(v: Value) -> str:
    if is_numeric(v):
        return NUM
    if is_symbolic(v):
        return SYM
    raise SchemaError(f"not a database value: {v!r}")


def value_key(v: Value) -> tuple:
    # numbers sort before symbols; within a domain the natural order
    if is_numeric(v):
        return (0, v, "")
    return (1, 0, v)


def check_value(v: Value, sort: str) -> None:
    if sort == NUM:
        if not is_numeric(v):
            raise SchemaError(f"expected an integer, got {v!r}")
        if not INT64_MIN <= v <= INT64_MAX:
            raise SchemaError(f"integer {v} does not fit in 64 bits")
    elif not is_symbolic(v):
        raise SchemaError(f"expected a symbolic constant, got {v!r}")


@dataclass(frozen=True)
class Attribute:
    name: str
    sort: str = SYM

    def __post_init__(self):
        if self.sort not in SORTS:
            raise SchemaError(f"unknown sort {self.sort!r} for attribute {self.name!r}")


@dataclass(frozen=True)
class Relation:
    """A relation symbol with typed attributes and optional declared keys.

    ``keys`` holds attribute-name tuples; ``primary`` indexes into ``keys``.
    """

    name: str
    attributes: Tuple[Attribute, ...]
    keys: Tuple[Tuple[str, ...], ...] = ()
    primary: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "keys", tuple(tuple(k) for k in self.keys))
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute in relation {self.name}")
        for key in self.keys:
            if not key:
                raise SchemaError(f"empty key declared on {self.name}")
            missing = set(key) - set(names)
            if missing:
                raise SchemaError(f"key {key} of {self.name} mentions unknown attributes {sorted(missing)}")
        if len({frozenset(k) for k in self.keys}) != len(self.keys):
            raise SchemaError(f"duplicate key declared on {self.name}")
        if self.primary is not None and not 0 <= self.primary < len(self.keys):
            raise SchemaError(f"primary key index out of range on {self.name}")

    @property
    def arity(self) -> int:
        return len(self.attributes)

    @property
    def attribute_names(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def position(self, attribute: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == attribute:
                return i
        raise SchemaError(f"relation {self.name} has no attribute {attribute!r}")

    def positions(self, attributes: Iterable[str]) -> Tuple[int, ...]:
        return tuple(self.position(a) for a in attributes)

    def sort_at(self, i: int) -> str:
        return self.attributes[i].sort

    @property
    def key_sets(self) -> Tuple[FrozenSet[str], ...]:
        return tuple(frozenset(k) for k in self.keys)


@dataclass(frozen=True)
class Schema:
    relations: Tuple[Relation, ...] = ()
    _by_name: Dict[str, Relation] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        by_name: Dict[str, Relation] = {}
        for rel in self.relations:
            if rel.name in by_name:
                raise SchemaError(f"duplicate relation {rel.name}")
            by_name[rel.name] = rel
        object.__setattr__(self, "_by_name", by_name)

    def __getitem__(self, name: str) -> Relation:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaError(f"unknown relation {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Relation]:
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    @classmethod
    def build(cls, spec: Mapping[str, Sequence], keys: Optional[Mapping[str, Sequence[Sequence[str]]]] = None,
              primary: Optional[Mapping[str, Sequence[str]]] = None) -> "Schema":
        """Shorthand constructor.

        ``spec`` maps relation names to attribute lists whose items are either
        names (symbolic sort) or ``(name, sort)`` pairs.
        """
        keys = keys or {}
        primary = primary or {}
        rels = []
        for name, attrs in spec.items():
            parsed = []
            for a in attrs:
                if isinstance(a, str):
                    parsed.append(Attribute(a))
                else:
                    parsed.append(Attribute(a[0], a[1]))
            rel_keys = [tuple(k) for k in keys.get(name, ())]
            prim = None
            if name in primary:
                pk = frozenset(primary[name])
                if pk not in {frozenset(k) for k in rel_keys}:
                    rel_keys.insert(0, tuple(primary[name]))
                prim = [frozenset(k) for k in rel_keys].index(pk)
            rels.append(Relation(name, tuple(parsed), tuple(rel_keys), prim))
        return cls(tuple(rels))


@dataclass(frozen=True, slots=True)
class Fact:
    relation: str
    values: Tuple[Value, ...]

    def sort_key(self) -> tuple:
        return (self.relation, tuple(value_key(v) for v in self.values))

    def __lt__(self, other: "Fact") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(format_value(v) for v in self.values)})"


def format_value(v: Value) -> str:
    if is_numeric(v):
        return str(v)
    return "'" + v.replace("'", "''") + "'"


def fact(relation: str, *values: Value) -> Fact:
    return Fact(relation, tuple(values))


class Instance:
    """A finite set of well-typed facts over a schema (set semantics).

    Instances are immutable and hashable; equality compares the schema and
    the fact set.
    """

    __slots__ = ("schema", "facts", "_sorted", "_by_rel", "_rel_sorted", "_index", "_hash")

    def __init__(self, schema: Schema, facts: Iterable[Fact] = (), *, check: bool = True):
        fs = frozenset(facts)
        if check:
            for f in fs:
                check_fact(schema, f)
        self.schema = schema
        self.facts: FrozenSet[Fact] = fs
        self._sorted: Optional[Tuple[Fact, ...]] = None
        self._by_rel: Optional[Dict[str, FrozenSet[Fact]]] = None
        self._rel_sorted: Dict[str, Tuple[Fact, ...]] = {}
        self._index: Dict[Tuple[str, int], Dict[Value, List[Fact]]] = {}
        self._hash: Optional[int] = None

    @classmethod
    def from_rows(cls, schema: Schema, rows: Mapping[str, Iterable[Sequence[Value]]]) -> "Instance":
        return cls(schema, (Fact(rel, tuple(row)) for rel, rs in rows.items() for row in rs))

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.sorted())

    def __contains__(self, f: object) -> bool:
        return f in self.facts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self.facts == other.facts and self.schema == other.schema

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.facts)
        return self._hash

    def __le__(self, other: "Instance") -> bool:
        return self.facts <= other.facts

    def __lt__(self, other: "Instance") -> bool:
        return self.facts < other.facts

    def __repr__(self) -> str:
        return f"Instance({{{', '.join(str(f) for f in self.sorted())}}})"

    def sorted(self) -> Tuple[Fact, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self.facts, key=Fact.sort_key))
        return self._sorted

    def relation(self, name: str) -> FrozenSet[Fact]:
        if self._by_rel is None:
            groups: Dict[str, set] = {r.name: set() for r in self.schema}
            for f in self.facts:
                groups.setdefault(f.relation, set()).add(f)
            self._by_rel = {k: frozenset(v) for k, v in groups.items()}
        return self._by_rel.get(name, frozenset())

    def relation_sorted(self, name: str) -> Tuple[Fact, ...]:
        out = self._rel_sorted.get(name)
        if out is None:
            out = self._rel_sorted[name] = tuple(sorted(self.relation(name), key=Fact.sort_key))
        return out

    def lookup(self, relation: str, position: int, value: Value) -> List[Fact]:
        """Facts of ``relation`` whose ``position``-th value equals ``value``, in canonical order."""
        key = (relation, position)
        idx = self._index.get(key)
        if idx is None:
            idx = {}
            for f in self.relation_sorted(relation):
                idx.setdefault(f.values[position], []).append(f)
            self._index[key] = idx
        return idx.get(value, [])

    def restrict(self, facts: Iterable[Fact]) -> "Instance":
        """Sub-instance over the same schema; facts must come from this instance."""
        return Instance(self.schema, facts, check=False)

    def with_facts(self, facts: Iterable[Fact]) -> "Instance":
        return Instance(self.schema, self.facts | frozenset(facts), check=True)

    def rows(self) -> Dict[str, List[Tuple[Value, ...]]]:
        out: Dict[str, List[Tuple[Value, ...]]] = {r.name: [] for r in self.schema}
        for f in self.sorted():
            out[f.relation].append(f.values)
        return out


def check_fact(schema: Schema, f: Fact) -> None:
    rel = schema[f.relation]
    if len(f.values) != rel.arity:
        raise SchemaError(f"{f}: arity {len(f.values)} but {rel.name} has arity {rel.arity}")
    for v, a in zip(f.values, rel.attributes):
        try:
            check_value(v, a.sort)
        except SchemaError as e:
            raise SchemaError(f"{f}: attribute {a.name}: {e}") from None
