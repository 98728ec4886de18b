"""Hardness constructions as instance generators.

Each generator returns a :class:`Reduction`.  The property it is meant to
satisfy is stated in its docstring; the test drivers check it against the
brute-force deciders in :mod:`.formulas` and the repair oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..errors import SchemaError
from ..model.constraints import FD, IND, DenialConstraint, ICSet, satisfies
from ..model.data import NUM, Attribute, Fact, Instance, Relation, Schema
from ..model.formula import Rel
from ..model.query import ConjunctiveQuery, Query
from ..model.terms import Atom, Builtin, Const, Var
from .formulas import CnfFormula, Graph, Qbf2
from .gadgets import TypedHypergraph, one_denial_gadget, two_key_gadget


@dataclass(frozen=True)
class Reduction:
    schema: Schema
    ics: ICSet
    instance: Instance
    query: Optional[Query] = None
    # the subset whose repair status encodes the answer, for repair-checking reductions
    candidate: Optional[Instance] = None
    notes: Dict[str, str] = field(default_factory=dict, compare=False)


def _cq(relation: str, *terms) -> Atom:
    return Atom(relation, tuple(t if isinstance(t, (Var, Const)) else Var(t) for t in terms))


def _facts(rel: str, rows) -> List[Fact]:
    return [Fact(rel, tuple(row)) for row in rows]


def _cl(j: int) -> str:
    return f"cl:{j}"


def _v(i: int) -> str:
    return f"v:x{i}"


def _lit(l: int) -> str:
    return f"lit:x{l}" if l > 0 else f"lit:~x{-l}"


# --- FDs and denials -------------------------------------------------------------

def gen_monotone3sat(f: CnfFormula) -> Reduction:
    """One key FD; ``f`` satisfiable iff the query is *not* consistently true.

    Clause ``j`` contributes ``R(cl:j, v:p, c)`` for a negative clause and
    ``R(cl:j, v:p, c2)`` for a positive one, one fact per variable in it.
    """
    if not f.is_monotone_partitioned:
        raise ValueError("gen_monotone3sat needs a monotone-partitioned formula")
    schema = Schema.build({"R": ["A", "B", "C"]}, keys={"R": [["A"]]}, primary={"R": ["A"]})
    ics = ICSet(schema, fds=(FD("R", ("A",), ("B", "C")),))
    rows = []
    for j, clause in enumerate(f.clauses, 1):
        tag = "c2" if clause[0] > 0 else "c"
        rows += [(_cl(j), _v(abs(l)), tag) for l in sorted(set(clause), key=abs)]
    inst = Instance(schema, _facts("R", rows))
    q = ConjunctiveQuery.of([_cq("R", "x", "y", Const("c")), _cq("R", "z", "y", Const("c2"))])
    return Reduction(schema, ics, inst, q)


def gen_two_key(h: Graph) -> Reduction:
    """Two keys ``A`` and ``B``; ``h`` 3-colorable iff ``exists x, y R(x, y, b)`` is not consistently true."""
    gadget = two_key_gadget(h)
    schema = Schema.build({"R": ["A", "B", "C"]}, keys={"R": [["A"], ["B"]]}, primary={"R": ["A"]})
    ics = ICSet(schema, fds=(FD("R", ("A",), ("B", "C")), FD("R", ("B",), ("A", "C"))))
    rows = [(x, y, "g") for x, y in gadget.green] + [(x, y, "b") for x, y in gadget.blue]
    inst = Instance(schema, _facts("R", rows))
    q = ConjunctiveQuery.of([_cq("R", "x", "y", Const("b"))])
    return Reduction(schema, ics, inst, q)


ONE_DENIAL = DenialConstraint(
    (_cq("R", "x", "y", "s"), _cq("R", "y", "z", "s1"), _cq("R", "y", "w", "s2")),
    (Builtin("!=", Var("s1"), Var("s2")),),
    name="fork",
)


def gen_one_denial(f: CnfFormula) -> Reduction:
    """A single denial constraint; ``f`` satisfiable iff ``exists x, y R(x, y, p)`` is not consistently true."""
    gadget = one_denial_gadget(f)
    schema = Schema.build({"R": ["A", "B", "C"]})
    ics = ICSet(schema, denials=(ONE_DENIAL,))
    rows = ([(x, y, "p") for x, y in gadget.p] + [(x, y, "g") for x, y in gadget.g]
            + [(x, y, "b") for x, y in gadget.b])
    inst = Instance(schema, _facts("R", rows))
    q = ConjunctiveQuery.of([_cq("R", "x", "y", Const("p"))])
    return Reduction(schema, ics, inst, q)


def gen_exponential_family(n: int) -> Reduction:
    """``n`` key groups of two facts each under ``A -> B``: ``2**n`` repairs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    schema = Schema.build({"R": ["A", "B"]}, keys={"R": [["A"]]}, primary={"R": ["A"]})
    ics = ICSet(schema, fds=(FD("R", ("A",), ("B",)),))
    rows = [(f"a{i}", f"b{k}") for i in range(1, n + 1) for k in (0, 1)]
    return Reduction(schema, ics, Instance(schema, _facts("R", rows)))


# --- FDs with INDs -----------------------------------------------------------------

def gen_acyclic_cqa(sf: TypedHypergraph) -> Reduction:
    """Keys with acyclic foreign keys ``P[A] <= Q[A]`` and ``Q[B] <= R[A]``.

    The source graph is 3-colorable iff ``P(a)`` is not consistently true: a
    repair drops ``P(a)`` exactly when its ``R`` part is a maximal set of
    disjoint triangles avoiding every spoiled one.
    """
    schema = Schema.build(
        {"P": ["A"], "Q": ["A", "B"], "R": ["A", "B", "C"]},
        keys={"Q": [["A"]], "R": [["A"], ["B"], ["C"]]},
        primary={"Q": ["A"], "R": ["A"]},
    )
    ics = ICSet(
        schema,
        fds=(FD("Q", ("A",), ("B",)),
             FD("R", ("A",), ("B", "C")), FD("R", ("B",), ("A", "C")), FD("R", ("C",), ("A", "B"))),
        inds=(IND("P", ("A",), "Q", ("A",)), IND("Q", ("B",), "R", ("A",))),
    )
    facts = [Fact("P", ("a",))]
    facts += [Fact("Q", ("a", s)) for s in sorted(sf.spoiled)]
    facts += [Fact("R", e) for e in sf.edges]
    q = Rel(_cq("P", Const("a")))
    return Reduction(schema, ics, Instance(schema, facts), q)


def gen_fd_ind_repaircheck(f: CnfFormula) -> Reduction:
    """``A1 -> A2`` and ``A3 <= A4`` on one relation; the empty set is a repair iff ``f`` is unsatisfiable.

    Facts ``R(v:p, 0|1, cl:i, cl:i+1)`` chain the clauses cyclically.
    """
    schema = Schema.build({"R": ["A1", ("A2", NUM), "A3", "A4"]})
    ics = ICSet(schema, fds=(FD("R", ("A1",), ("A2",)),), inds=(IND("R", ("A3",), "R", ("A4",)),))
    m = len(f.clauses)
    rows = set()
    for i, clause in enumerate(f.clauses, 1):
        nxt = i % m + 1
        for l in clause:
            rows.add((_v(abs(l)), 1 if l > 0 else 0, _cl(i), _cl(nxt)))
    inst = Instance(schema, _facts("R", sorted(rows)))
    return Reduction(schema, ics, inst, candidate=Instance(schema))


def keyfk_permutations(f: CnfFormula) -> Dict[Tuple[int, int], Tuple[int, ...]]:
    """``s(i, j, .)`` for each pair, as a tuple indexed by variable ``l - 1``.

    ``s(i, j, l) = n`` when the ``j``-th occurrence of ``x_l`` is the ``i``-th
    literal of clause ``n + 1`` (cyclically).  Unconstrained variables take the
    unused clause indices in ascending order.
    """
    m = len(f.clauses)
    fixed: Dict[Tuple[int, int], Dict[int, int]] = {(i, j): {} for i in (1, 2, 3) for j in (1, 2, 3)}
    seen: Dict[int, int] = {}
    for k, clause in enumerate(f.clauses, 1):
        for i, lit in enumerate(clause, 1):
            l = abs(lit)
            seen[l] = seen.get(l, 0) + 1
            j = seen[l]
            if i > 3 or j > 3:
                raise ValueError("formula is not in the restricted shape")
            n = (k - 2) % m + 1
            slot = fixed[(i, j)]
            if l in slot or n in slot.values():
                raise ValueError(f"no permutation for pair ({i}, {j})")
            slot[l] = n
    out = {}
    for pair, slot in fixed.items():
        unused = iter(sorted(set(range(1, m + 1)) - set(slot.values())))
        out[pair] = tuple(slot[l] if l in slot else next(unused) for l in range(1, m + 1))
    return out


KEYFK_PAIRS = tuple((i, j) for i in (1, 2, 3) for j in (1, 2, 3))


def gen_keyfk_repaircheck(f: CnfFormula) -> Reduction:
    """Ten binary relations with key FDs and foreign keys; the empty set is a repair iff ``f`` is unsatisfiable."""
    if not f.is_restricted:
        raise ValueError("gen_keyfk_repaircheck needs a restricted formula")
    spec = {"R": ["A", "B"]}
    keys = {"R": [["B"]]}
    primary = {"R": ["B"]}
    fds = [FD("R", ("B",), ("A",))]
    inds = []
    for i, j in KEYFK_PAIRS:
        name, a, b = f"R{i}{j}", f"A{i}{j}", f"B{i}{j}"
        spec[name] = [a, b]
        keys[name] = [[a], [b]]
        primary[name] = [a]
        fds += [FD(name, (a,), (b,)), FD(name, (b,), (a,))]
    for i, j in KEYFK_PAIRS:
        inds.append(IND(f"R{i}{j}", (f"B{i}{j}",), "R", ("B",)))
    for i, j in KEYFK_PAIRS:
        inds.append(IND("R", ("A",), f"R{i}{j}", (f"A{i}{j}",)))
    schema = Schema.build(spec, keys=keys, primary=primary)
    ics = ICSet(schema, fds=tuple(fds), inds=tuple(inds))
    facts = []
    for k, clause in enumerate(f.clauses, 1):
        facts += [Fact("R", (_lit(l), _cl(k))) for l in sorted(set(clause), key=lambda l: (abs(l), l < 0))]
    perms = keyfk_permutations(f)
    for i, j in KEYFK_PAIRS:
        s = perms[(i, j)]
        for l in range(1, f.n_vars + 1):
            facts += [Fact(f"R{i}{j}", (_lit(l), _cl(s[l - 1]))), Fact(f"R{i}{j}", (_lit(-l), _cl(s[l - 1])))]
    return Reduction(schema, ics, Instance(schema, facts), candidate=Instance(schema))


def gen_qbf_cqa(q: Qbf2) -> Reduction:
    """``A -> B`` and ``C <= D``; ``q`` is true iff ``R(a, a, cl:1, a)`` is consistently true."""
    schema = Schema.build({"R": ["A", "B", "C", "D"]})
    ics = ICSet(schema, fds=(FD("R", ("A",), ("B",)),), inds=(IND("R", ("C",), "R", ("D",)),))
    m = len(q.matrix.clauses)
    rows = set()
    for j, clause in enumerate(q.matrix.clauses, 1):
        for l in clause:
            rows.add((_v(abs(l)), "1" if l > 0 else "0", _cl(j), _cl(j % m + 1)))
    for i, p in enumerate(q.universals, 1):
        rows.add((_v(p), "1", f"a{i}", f"a{i}"))
        rows.add((_v(p), "0", f"a{i}", f"a{i}"))
    third = ("a", "a", _cl(1), "a")
    rows.add(third)
    inst = Instance(schema, _facts("R", sorted(rows)))
    return Reduction(schema, ics, inst, Rel(_cq("R", *(Const(v) for v in third))))


# --- repair checking to consistent answers ---------------------------------------

def _fresh(base: str, taken) -> str:
    name, k = base, 1
    while name in taken:
        name, k = f"{base}{k}", k + 1
    return name


def reduce_rc_to_cqa(r: Instance, r2: Instance, ics: ICSet) -> Reduction:
    """Tag ``r`` with a new column and guard a unary relation by it.

    Facts of ``r2`` get ``c1`` and the rest ``c2``; a new relation holds the
    single fact ``c2`` and must be included in the tag column.  The result has
    query ``P(c2)``, consistently true iff ``r2`` is *not* a repair of ``r``.
    """
    schema = ics.schema
    if len(schema) != 1:
        raise SchemaError("only single-relation instances are supported")
    if not r2.facts <= r.facts:
        raise ValueError("the candidate must be a subset of the instance")
    if not satisfies(r2, ics):
        raise ValueError("the candidate must satisfy the constraints")
    rel = schema.relations[0]
    s_name = _fresh("S0", {rel.name})
    p_name = _fresh("P", {rel.name, s_name})
    z = _fresh("Z", set(rel.attribute_names))
    s_rel = Relation(s_name, rel.attributes + (Attribute(z),), rel.keys, rel.primary)
    p_rel = Relation(p_name, (Attribute("W"),))
    new_schema = Schema((s_rel, p_rel))
    rename = {rel.name: s_name}
    denials = []
    for d in ics.denials:
        taken = {v for a in d.atoms for v in a.variables}
        atoms = []
        for a in d.atoms:
            tag = _fresh("z", taken)
            taken.add(tag)
            atoms.append(Atom(s_name, a.terms + (Var(tag),)))
        denials.append(DenialConstraint(tuple(atoms), d.builtins, d.name))
    fds = tuple(FD(rename[fd.relation], fd.lhs, fd.rhs) for fd in ics.fds)
    inds = tuple(IND(rename[i.source], i.source_attrs, rename[i.target], i.target_attrs) for i in ics.inds)
    inds += (IND(p_name, ("W",), s_name, (z,)),)
    new_ics = ICSet(new_schema, tuple(denials), fds, inds)
    facts = [Fact(s_name, f.values + ("c1" if f in r2 else "c2",)) for f in r.sorted()]
    facts.append(Fact(p_name, ("c2",)))
    q = Rel(_cq(p_name, Const("c2")))
    return Reduction(new_schema, new_ics, Instance(new_schema, facts), q)

