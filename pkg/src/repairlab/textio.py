"""Reading and writing schemas, constraints, queries and instances.

The declaration language::

    relation Person(name: sym, city: sym, street: sym)
    primary key Person: name
    key Person: city, street
    fd Person: name -> city, street
    ind Manager[ssn] <= Employee[ssn]
    denial not [ Emp(n, s, m), Emp(m, s2, m2), s > s2 ]

Queries use ``exists``/``forall``, ``and``, ``or``, ``not``, ``->`` and
parentheses.  Quoted text is a symbolic constant, an integer literal is a
numeric constant and any other identifier is a variable.  ``#`` starts a
comment.

Instances are stored either as a directory with one ``<Relation>.csv`` per
relation (header row of attribute names) or as a single JSON object mapping
relation names to lists of rows.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import ParseError, SchemaError, SortError, SourceSpan
from .model.constraints import FD, IND, Constraint, DenialConstraint, ICSet
from .model.data import (INT64_MAX, INT64_MIN, NUM, SORTS, Attribute, Fact, Instance, Relation, Schema,
                         Value, check_value)
from .model.formula import (FALSE, TRUE, Cmp, Exists, ForAll, Formula, Implies, Not, Rel, conj, disj,
                            free_variables, is_ground_qf)
from .model.query import Query, check_query, conjunctive_from_formula
from .model.terms import OPS, Atom, Builtin, Const, Term, Var

PathLike = Union[str, os.PathLike]

# --- tokens ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<str>'(?:[^'\n]|'')*')
  | (?P<op>->|<=|>=|!=|<>|[()\[\],:<>=])
  | (?P<num>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | str | op | eof
    text: str
    line: int
    col: int

    def span(self, file: str) -> SourceSpan:
        return SourceSpan(file, self.line, self.col, self.col + max(len(self.text), 1) - 1)


def tokenize(text: str, file: str = "<input>") -> List[Token]:
    out: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(file, line, col, col))
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.span(self.file))

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def ident_list(self, what: str) -> List[Token]:
        out = [self.ident(what)]
        while self.accept(","):
            out.append(self.ident(what))
        return out

    # terms and atoms

    def term(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if t.kind == "num":
            self.i += 1
            v = int(t.text)
            if not INT64_MIN <= v <= INT64_MAX:
                raise self.error("integer does not fit in 64 bits", t)
            return Const(v)
        if t.kind == "str":
            self.i += 1
            return Const(t.text[1:-1].replace("''", "'"))
        raise self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def atom(self) -> Atom:
        name = self.ident("relation name")
        self.expect("(")
        terms: List[Term] = []
        if not self.at(")"):
            terms.append(self.term())
            while self.accept(","):
                terms.append(self.term())
        self.expect(")")
        return Atom(name.text, tuple(terms))

    def comparison(self) -> Builtin:
        left = self.term()
        t = self.tok
        if t.kind != "op" or t.text not in OPS + ("<>",):
            raise self.error(f"expected a comparison operator, found {t.text or 'end of input'!r}")
        self.i += 1
        op = "!=" if t.text == "<>" else t.text
        return Builtin(op, left, self.term())

    def is_atom_start(self) -> bool:
        return self.tok.kind == "ident" and self.peek().text == "(" and self.peek().kind == "op"


# --- schema ------------------------------------------------------------------

def parse_schema(text: str, file: str = "<schema>") -> Schema:
    p = _Parser(text, file)
    rels: Dict[str, dict] = {}
    order: List[str] = []
    first_tok: Dict[str, Token] = {}
    while p.tok.kind != "eof":
        start = p.tok
        if p.accept("relation"):
            name = p.ident("relation name")
            if name.text in rels:
                raise p.error(f"duplicate relation {name.text}", name)
            p.expect("(")
            attrs: List[Attribute] = []
            seen = set()
            while True:
                a = p.ident("attribute name")
                if a.text in seen:
                    raise p.error(f"duplicate attribute {a.text} in {name.text}", a)
                seen.add(a.text)
                sort = "sym"
                if p.accept(":"):
                    s = p.ident("sort")
                    if s.text not in SORTS:
                        raise p.error(f"unknown sort {s.text!r} (use sym or num)", s)
                    sort = s.text
                attrs.append(Attribute(a.text, sort))
                if not p.accept(","):
                    break
            p.expect(")")
            rels[name.text] = {"attrs": attrs, "keys": [], "primary": None}
            order.append(name.text)
            first_tok[name.text] = name
        elif p.at("key") or p.at("primary"):
            primary = p.accept("primary")
            p.expect("key")
            name = p.ident("relation name")
            if name.text not in rels:
                raise p.error(f"unknown relation {name.text}", name)
            p.expect(":")
            key_toks = p.ident_list("attribute name")
            spec = rels[name.text]
            known = {a.name for a in spec["attrs"]}
            for k in key_toks:
                if k.text not in known:
                    raise p.error(f"key attribute {k.text} is not an attribute of {name.text}", k)
            key = tuple(k.text for k in key_toks)
            fs = [frozenset(k) for k in spec["keys"]]
            if frozenset(key) in fs:
                idx = fs.index(frozenset(key))
            else:
                spec["keys"].append(key)
                idx = len(spec["keys"]) - 1
            if primary:
                if spec["primary"] is not None and spec["primary"] != idx:
                    raise p.error(f"second primary key on {name.text}", start)
                spec["primary"] = idx
        else:
            raise p.error(f"expected a declaration, found {p.tok.text!r}")
    try:
        return Schema(tuple(Relation(n, tuple(rels[n]["attrs"]), tuple(rels[n]["keys"]), rels[n]["primary"])
                            for n in order))
    except SchemaError as e:
        raise ParseError(str(e), SourceSpan(file, 1, 1, 1)) from None


def serialize_schema(schema: Schema) -> str:
    lines = []
    for rel in schema:
        attrs = ", ".join(f"{a.name}: {a.sort}" for a in rel.attributes)
        lines.append(f"relation {rel.name}({attrs})")
        for i, k in enumerate(rel.keys):
            prefix = "primary key" if rel.primary == i else "key"
            lines.append(f"{prefix} {rel.name}: {', '.join(k)}")
    return "".join(line + "\n" for line in lines)


# --- constraints -------------------------------------------------------------

def parse_constraints(text: str, schema: Schema, file: str = "<constraints>") -> ICSet:
    """Parse ``fd``, ``ind``, ``denial`` and ``key`` declarations.

    ``key R: a, b`` here is shorthand for the functional dependency from the
    key to every other attribute of ``R``.
    """
    p = _Parser(text, file)
    out: List[Constraint] = []
    while p.tok.kind != "eof":
        start = p.tok
        try:
            out.append(_constraint(p, schema))
        except ParseError:
            raise
        except (SchemaError, SortError) as e:
            raise ParseError(str(e), SourceSpan(file, start.line, start.col, p.tok.col)) from None
    try:
        return ICSet.of(schema, out)
    except (SchemaError, SortError) as e:
        raise ParseError(str(e), SourceSpan(file, 1, 1, 1)) from None


def _attr_list(p: _Parser, rel: Relation) -> Tuple[str, ...]:
    toks = p.ident_list("attribute name")
    for t in toks:
        if t.text not in rel.attribute_names:
            raise p.error(f"relation {rel.name} has no attribute {t.text}", t)
    return tuple(t.text for t in toks)


def _relation(p: _Parser, schema: Schema) -> Relation:
    t = p.ident("relation name")
    if t.text not in schema:
        raise p.error(f"unknown relation {t.text}", t)
    return schema[t.text]


def _constraint(p: _Parser, schema: Schema) -> Constraint:
    start = p.tok
    if p.accept("fd"):
        rel = _relation(p, schema)
        p.expect(":")
        lhs = _attr_list(p, rel)
        p.expect("->")
        rhs = _attr_list(p, rel)
        return FD(rel.name, lhs, rhs)
    if p.accept("key"):
        rel = _relation(p, schema)
        p.expect(":")
        lhs = _attr_list(p, rel)
        return FD(rel.name, lhs, tuple(a for a in rel.attribute_names if a not in lhs))
    if p.accept("ind"):
        src = _relation(p, schema)
        p.expect("[")
        sa = _attr_list(p, src)
        p.expect("]")
        p.expect("<=")
        tgt = _relation(p, schema)
        p.expect("[")
        ta = _attr_list(p, tgt)
        p.expect("]")
        if len(sa) != len(ta):
            raise p.error("inclusion dependency sides have different lengths", start)
        return IND(src.name, sa, tgt.name, ta)
    if p.accept("denial"):
        p.expect("not")
        p.expect("[")
        atoms: List[Atom] = []
        builtins: List[Builtin] = []
        while True:
            t = p.tok
            if p.is_atom_start():
                if builtins:
                    raise p.error("relational atoms must precede comparisons", t)
                a = p.atom()
                if a.relation not in schema:
                    raise p.error(f"unknown relation {a.relation}", t)
                atoms.append(a)
            else:
                builtins.append(p.comparison())
            if not p.accept(","):
                break
        p.expect("]")
        if not atoms:
            raise p.error("a denial constraint needs a relational atom", start)
        return DenialConstraint(tuple(atoms), tuple(builtins))
    raise p.error(f"expected fd, key, ind or denial, found {p.tok.text or 'end of input'!r}")


def serialize_constraint(c: Constraint) -> str:
    if isinstance(c, FD):
        return f"fd {c}"
    if isinstance(c, IND):
        return f"ind {c}"
    return f"denial {c}"


def serialize_constraints(ics: Union[ICSet, Iterable[Constraint]]) -> str:
    cs = ics.constraints if isinstance(ics, ICSet) else tuple(ics)
    return "".join(serialize_constraint(c) + "\n" for c in cs)


# --- queries -----------------------------------------------------------------

def _formula(p: _Parser) -> Formula:
    if p.at("exists") or p.at("forall"):
        return _quantified(p)
    left = _disjunction(p)
    if p.accept("->"):
        return Implies(left, _formula(p))
    return left


def _quantified(p: _Parser) -> Formula:
    universal = p.tok.text == "forall"
    p.i += 1
    names = [t.text for t in p.ident_list("variable")]
    p.expect(":")
    body = _formula(p)
    return ForAll(tuple(names), body) if universal else Exists(tuple(names), body)


def _disjunction(p: _Parser) -> Formula:
    parts = [_conjunction(p)]
    while p.accept("or"):
        parts.append(_conjunction(p))
    return disj(parts) if len(parts) > 1 else parts[0]


def _conjunction(p: _Parser) -> Formula:
    parts = [_unary(p)]
    while p.accept("and"):
        parts.append(_unary(p))
    return conj(parts) if len(parts) > 1 else parts[0]


def _unary(p: _Parser) -> Formula:
    if p.accept("not"):
        return Not(_unary(p))
    if p.at("exists") or p.at("forall"):
        return _quantified(p)
    if p.accept("("):
        f = _formula(p)
        p.expect(")")
        return f
    if p.tok.kind == "ident" and p.tok.text in ("true", "false") and p.peek().text not in OPS:
        p.i += 1
        return TRUE if p.toks[p.i - 1].text == "true" else FALSE
    if p.is_atom_start():
        return Rel(p.atom())
    return Cmp(p.comparison())


def parse_formula(text: str, file: str = "<query>") -> Formula:
    p = _Parser(text, file)
    f = _formula(p)
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after the query")
    return f


def parse_query(text: str, schema: Optional[Schema] = None, file: str = "<query>",
                closed: bool = False) -> Query:
    """Parse a query.

    Returns a ground formula when no variable occurs, a normalized
    :class:`ConjunctiveQuery` for (possibly open) conjunctive queries, and a
    closed first-order formula otherwise.
    """
    f = parse_formula(text, file)
    span = SourceSpan(file, 1, 1, max(1, len(text.split("\n", 1)[0])))
    free = free_variables(f)
    if closed and free:
        raise ParseError(f"free variable(s) {', '.join(free)} in a closed query", span)
    q: Query
    if is_ground_qf(f):
        q = f
    else:
        try:
            q = conjunctive_from_formula(f)
        except ValueError:
            if free:
                raise ParseError(f"open query with free variable(s) {', '.join(free)} is not conjunctive",
                                 span) from None
            q = f
        except SchemaError as e:
            raise ParseError(str(e), span) from None
    if schema is not None:
        try:
            check_query(q, schema)
        except SchemaError as e:
            raise ParseError(str(e), span) from None
    return q


def serialize_query(q: Query) -> str:
    return str(q) + "\n"


# --- instances ---------------------------------------------------------------

def _cell(text: str, sort: str, span: SourceSpan) -> Value:
    if sort == NUM:
        if not re.fullmatch(r"-?[0-9]+", text):
            raise ParseError(f"not an integer: {text!r}", span)
        v = int(text)
        if not INT64_MIN <= v <= INT64_MAX:
            raise ParseError(f"integer {text} does not fit in 64 bits", span)
        return v
    return text


def parse_csv(text: str, rel: Relation, file: str) -> List[Fact]:
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        raise ParseError("missing header row", SourceSpan(file, 1, 1, 1))
    header = rows[0]
    if tuple(header) != rel.attribute_names:
        for i, h in enumerate(header):
            if h not in rel.attribute_names:
                raise ParseError(f"unknown attribute {h!r} in header of {rel.name}", SourceSpan(file, 1, i + 1, i + 1))
        raise ParseError(f"header must list {', '.join(rel.attribute_names)} in order",
                         SourceSpan(file, 1, 1, len(header)))
    out = []
    for ln, row in enumerate(rows[1:], start=2):
        if len(row) != rel.arity:
            raise ParseError(f"expected {rel.arity} fields, found {len(row)}", SourceSpan(file, ln, 1, max(len(row), 1)))
        vals = tuple(_cell(c, rel.sort_at(i), SourceSpan(file, ln, i + 1, i + 1)) for i, c in enumerate(row))
        out.append(Fact(rel.name, vals))
    return out


def _read(path: Path) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except UnicodeDecodeError as e:
        raise ParseError(f"not UTF-8: {e.reason}", SourceSpan(str(path), 1, 1, 1)) from None


def parse_json_bundle(text: str, schema: Schema, file: str = "<json>") -> List[Fact]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, SourceSpan(file, e.lineno, e.colno, e.colno)) from None
    span = SourceSpan(file, 1, 1, 1)
    if not isinstance(data, dict):
        raise ParseError("expected an object mapping relation names to row lists", span)
    out = []
    for name, rows in data.items():
        if name not in schema:
            raise ParseError(f"unknown relation {name!r}", span)
        rel = schema[name]
        if not isinstance(rows, list):
            raise ParseError(f"rows of {name} must be a list", span)
        for k, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != rel.arity:
                raise ParseError(f"{name} row {k}: expected a list of {rel.arity} values", span)
            try:
                for v, a in zip(row, rel.attributes):
                    check_value(v, a.sort)
            except SchemaError as e:
                raise ParseError(f"{name} row {k}: {e}", span) from None
            out.append(Fact(name, tuple(row)))
    return out


def parse_instance(paths: Union[PathLike, Sequence[PathLike]], schema: Schema) -> Instance:
    """Load an instance from a CSV directory, a list of CSV files, or a JSON bundle.

    A relation without a CSV file is empty.  CSV files are matched to
    relations by their stem.
    """
    if isinstance(paths, (str, os.PathLike)):
        paths = [paths]
    facts: List[Fact] = []
    files: List[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(q for q in p.iterdir() if q.suffix == ".csv"))
        elif not p.exists():
            raise FileNotFoundError(str(p))
        else:
            files.append(p)
    for f in files:
        if f.suffix == ".json":
            facts.extend(parse_json_bundle(_read(f), schema, str(f)))
            continue
        if f.stem not in schema:
            raise ParseError(f"no relation named {f.stem!r} in the schema", SourceSpan(str(f), 1, 1, 1))
        facts.extend(parse_csv(_read(f), schema[f.stem], str(f)))
    return Instance(schema, facts)


def csv_text(inst: Instance, relation: str) -> str:
    rel = inst.schema[relation]
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(rel.attribute_names)
    for f in inst.relation_sorted(relation):
        w.writerow(f.values)
    return buf.getvalue()


def serialize_instance(inst: Instance, out_dir: Optional[PathLike] = None) -> Dict[str, str]:
    """Canonical CSV text per relation, keyed by file name; written to ``out_dir`` if given."""
    files = {f"{rel.name}.csv": csv_text(inst, rel.name) for rel in inst.schema}
    if out_dir is not None:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            with open(d / name, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return files


def instance_to_json(inst: Instance) -> Dict[str, List[List[Value]]]:
    return {rel.name: [list(f.values) for f in inst.relation_sorted(rel.name)] for rel in inst.schema}


def serialize_json_bundle(inst: Instance) -> str:
    return json.dumps(instance_to_json(inst), indent=2, ensure_ascii=False) + "\n"


def read_text(path: PathLike) -> str:
    return _read(Path(path))


def load_schema(path: PathLike) -> Schema:
    return parse_schema(read_text(path), str(path))


def load_constraints(path: PathLike, schema: Schema) -> ICSet:
    return parse_constraints(read_text(path), schema, str(path))


def load_query(path: PathLike, schema: Optional[Schema] = None) -> Query:
    return parse_query(read_text(path), schema, str(path))


def write_bundle(out_dir: PathLike, schema: Schema, ics: ICSet, inst: Instance,
                 query: Optional[Query] = None, extra: Optional[Dict[str, str]] = None) -> List[str]:
    """Write ``schema.rl``, ``constraints.rl``, ``data/*.csv`` and optionally ``query.rl``."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    texts = {"schema.rl": serialize_schema(schema), "constraints.rl": serialize_constraints(ics)}
    if query is not None:
        texts["query.rl"] = serialize_query(query)
    texts.update(extra or {})
    for name, text in texts.items():
        with open(d / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(name)
    for name in serialize_instance(inst, d / "data"):
        written.append(f"data/{name}")
    return written
