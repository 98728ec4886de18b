"""Command-line interface: ``repairlab <command> [options]``.

Exit status reports whether the computation ran, never the verdict:
0 success, 2 usage error, 3 unsupported constraint class or oracle cap
exceeded, 4 input could not be read or parsed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import hypergraph, oracle, repair, textio
from .cqa import JUSTIFICATION as CQA_JUSTIFICATION
from .cqa import consistent_answers_open, cqa_dispatch, plan
from .errors import OverCapError, ParseError, RepairLabError, SchemaError, SortError, UnsupportedClassError
from .model.constraints import Classification, ICSet, ind_graph, is_single_key, violations
from .model.data import Instance, format_value
from .model.query import ConjunctiveQuery, Query
from . import reductions as red

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3
EXIT_INPUT = 4

ENGINES = ("auto", "denial", "acyclic", "single-key", "oracle")

CHECK_JUSTIFICATION = {
    "denial": "denial constraints and FDs: a candidate is a repair iff it is a maximal independent set "
              "of the conflict hypergraph (polynomial)",
    "acyclic": "FDs with acyclic INDs: a consistent candidate is a repair iff no single missing fact "
               "can be added (polynomial)",
    "single-key": "key FDs with foreign keys: cascade the foreign keys, then check maximality under the "
                  "keys (polynomial)",
    "ind-repair": "inclusion dependencies only: the unique repair is obtained by cascading deletions",
    "oracle": "search for a consistent strict superset (exponential; bounded by the oracle cap)",
}


class UsageError(Exception):
    pass


# --- loading -----------------------------------------------------------------------

class Inputs:
    def __init__(self, args: argparse.Namespace, need_data: bool = True):
        if not args.schema:
            raise UsageError("--schema is required")
        if not args.constraints:
            raise UsageError("--constraints is required")
        self.schema = textio.load_schema(args.schema)
        self.ics = textio.load_constraints(args.constraints, self.schema)
        self.data: Optional[Instance] = None
        if need_data:
            if not args.data:
                raise UsageError("--data is required")
            self.data = textio.parse_instance(args.data, self.schema)


def _instance_lines(inst: Instance) -> List[str]:
    return [str(f) for f in inst.sorted()]


def _emit(args: argparse.Namespace, payload: dict, text_lines: Sequence[str]) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write("".join(line + "\n" for line in text_lines))


# --- check ---------------------------------------------------------------------------

def _check_engine(ics: ICSet, requested: str) -> str:
    cls = ics.classification
    if requested == "auto":
        auto = {
            Classification.DENIAL_ONLY: "denial",
            Classification.FDS_ONLY: "denial",
            Classification.INDS_ONLY: "ind-repair",
            Classification.SINGLE_KEY_FK: "single-key",
            Classification.ACYCLIC_FD_IND: "acyclic",
        }
        if cls not in auto:
            raise UnsupportedClassError(
                f"{cls}: repair checking is coNP-complete for this constraint set; use --engine oracle")
        return auto[cls]
    if requested == "denial" and ics.inds:
        raise UnsupportedClassError(f"{cls}: the denial engine cannot handle inclusion dependencies")
    if requested == "acyclic" and (ics.denials or not ind_graph(ics).acyclic):
        raise UnsupportedClassError(f"{cls}: the acyclic engine needs FDs with acyclic INDs")
    if requested == "single-key" and not is_single_key(ics):
        raise UnsupportedClassError(f"{cls}: the single-key engine needs key FDs with foreign keys, "
                                    "one key per relation")
    return requested


def cmd_check(args: argparse.Namespace) -> int:
    if not args.candidate:
        raise UsageError("check needs --candidate")
    inp = Inputs(args)
    r, ics = inp.data, inp.ics
    cand = textio.parse_instance(args.candidate, inp.schema)
    engine = _check_engine(ics, args.engine)
    if engine == "oracle":
        ok = oracle.oracle_repair_check(r, cand, ics, args.oracle_cap)
        verdict = repair.RepairVerdict(ok)
        if not ok:
            verdict = _oracle_certificate(r, cand, ics)
    elif engine == "denial":
        verdict = repair.check_denial(r, cand, ics)
    elif engine == "acyclic":
        verdict = repair.check_acyclic(r, cand, ics)
    elif engine == "single-key":
        verdict = repair.check_single_key(r, cand, ics)
    else:
        verdict = repair.check_repair(r, cand, ics)
    payload = verdict.to_json()
    payload["engine"] = engine
    lines = []
    if args.engine == "auto":
        payload["justification"] = CHECK_JUSTIFICATION[engine]
        lines += [f"engine: {engine}", f"justification: {CHECK_JUSTIFICATION[engine]}"]
    lines.append(str(verdict))
    _emit(args, payload, lines)
    return EXIT_OK


def _oracle_certificate(r: Instance, cand: Instance, ics: ICSet) -> repair.RepairVerdict:
    if not cand.facts <= r.facts:
        f = min(cand.facts - r.facts)
        return repair.RepairVerdict(False, repair.Certificate("not-subset", (f,)))
    for v in violations(cand, ics):
        return repair.RepairVerdict(False, repair.Certificate("violation", v.facts, v.constraint))
    bigger = oracle.consistent_extension(r, cand, ics)
    extra = tuple(sorted(bigger.facts - cand.facts)) if bigger is not None else ()
    return repair.RepairVerdict(False, repair.Certificate("addable", extra, stage="oracle"))


# --- cqa -------------------------------------------------------------------------------

_CQA_EXPECT = {
    "denial": ({Classification.DENIAL_ONLY, Classification.FDS_ONLY}, {"plain", "ground-qf", "rewrite"}),
    "single-key": ({Classification.SINGLE_KEY_FK}, {"plain", "single-key"}),
}


def _cqa_plan(r: Instance, ics: ICSet, q: Query, requested: str) -> str:
    if requested == "oracle":
        return "oracle"
    if requested == "acyclic":
        raise UnsupportedClassError(
            f"{ics.classification}: consistent answers under FDs with acyclic INDs are coNP-complete "
            "even for atomic queries; use --engine oracle")
    probe = q
    if isinstance(q, ConjunctiveQuery) and q.free:
        probe = ConjunctiveQuery(q.atoms, q.builtins)
    chosen = plan(r, ics, probe).engine
    if requested != "auto":
        classes, engines = _CQA_EXPECT[requested]
        if ics.classification not in classes or chosen not in engines:
            raise UnsupportedClassError(f"{ics.classification}: the {requested} engine does not apply here "
                                        f"(the planner chose {chosen})")
    return chosen


def _row(t: Tuple) -> str:
    return "(" + ", ".join(format_value(v) for v in t) + ")"


def _row_key(t: Tuple):
    return [(isinstance(v, str), v) for v in t]


def cmd_cqa(args: argparse.Namespace) -> int:
    if not args.query:
        raise UsageError("cqa needs --query")
    inp = Inputs(args)
    r, ics = inp.data, inp.ics
    q = textio.load_query(args.query, inp.schema)
    engine = _cqa_plan(r, ics, q, args.engine)
    use_oracle = "oracle" if engine == "oracle" else "auto"
    lines = []
    payload: Dict[str, object] = {}
    if args.engine == "auto":
        payload["justification"] = CQA_JUSTIFICATION[engine]
        lines += [f"engine: {engine}", f"justification: {CQA_JUSTIFICATION[engine]}"]
    if isinstance(q, ConjunctiveQuery) and q.free:
        answers = consistent_answers_open(r, ics, q, oracle_cap=args.oracle_cap, engine=use_oracle)
        rows = sorted(answers, key=_row_key)
        payload.update({"engine": engine, "free": list(q.free), "answers": [list(t) for t in rows]})
        lines.append(f"answers ({', '.join(q.free)}): {len(rows)}")
        lines += [_row(t) for t in rows]
    else:
        v = cqa_dispatch(r, ics, q, oracle_cap=args.oracle_cap, engine=use_oracle)
        payload.update(v.to_json())
        payload["engine"] = engine
        lines.append("consistently true" if v.consistent else "not consistently true")
        if v.witness is not None:
            lines.append("falsifying repair:")
            lines += ["  " + s for s in _instance_lines(v.witness)]
    _emit(args, payload, lines)
    return EXIT_OK


# --- repairs ----------------------------------------------------------------------------

def cmd_repairs(args: argparse.Namespace) -> int:
    inp = Inputs(args)
    r, ics = inp.data, inp.ics
    if args.mode == "sample":
        if args.engine == "oracle":
            reps = oracle.enumerate_repairs(r, ics, args.oracle_cap).repairs
            chosen = random.Random(args.seed).choice(reps)
        else:
            if args.engine != "auto":
                _check_engine(ics, args.engine)
            chosen = repair.sample_repair(r, ics, args.seed)
        payload = {"mode": "sample", "seed": args.seed, "repair": textio.instance_to_json(chosen)}
        _emit(args, payload, _instance_lines(chosen))
        return EXIT_OK
    rs = oracle.enumerate_repairs(r, ics, args.oracle_cap, limit=args.limit)
    payload = {"mode": "enumerate", "count": len(rs), "exhaustive": rs.exhaustive,
               "repairs": [textio.instance_to_json(x) for x in rs]}
    lines = [f"{len(rs)} repair(s){'' if rs.exhaustive else ' (limit reached)'}"]
    for k, x in enumerate(rs, 1):
        lines.append(f"repair {k}:")
        lines += ["  " + s for s in _instance_lines(x)]
    _emit(args, payload, lines)
    return EXIT_OK


# --- hypergraph / classify ---------------------------------------------------------------

def cmd_hypergraph(args: argparse.Namespace) -> int:
    inp = Inputs(args)
    if inp.ics.inds:
        raise UnsupportedClassError("conflict hypergraphs are defined for denial constraints and FDs only")
    h = hypergraph.build(inp.data, inp.ics)
    if args.format == "json":
        sys.stdout.write(json.dumps(h.to_json(), indent=2, ensure_ascii=False) + "\n")
    elif args.format == "text":
        lines = [f"{len(h.vertices)} vertices, {len(h.edges)} edges"]
        lines += ["{" + ", ".join(str(f) for f in e) + "}" for e in h.edges]
        sys.stdout.write("".join(s + "\n" for s in lines))
    else:
        sys.stdout.write(h.to_dot())
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    inp = Inputs(args, need_data=False)
    ics = inp.ics
    g = ind_graph(ics)
    payload = {
        "classification": str(ics.classification),
        "ind_acyclic": g.acyclic,
        "ind_order": list(g.order) if g.order is not None else None,
        "counts": {"denials": len(ics.denials), "fds": len(ics.fds), "inds": len(ics.inds)},
    }
    _emit(args, payload, [str(ics.classification)])
    return EXIT_OK


# --- generate ------------------------------------------------------------------------------

FAMILIES = ("monotone3sat", "two-key", "one-denial", "acyclic-cqa", "fd-ind-repaircheck",
            "keyfk-repaircheck", "qbf-cqa", "exponential", "rc-to-cqa")


def parse_cnf(text: str, n_vars: Optional[int] = None) -> red.CnfFormula:
    """Clauses separated by ``;``, literals by spaces or commas: ``"1 2; -1 -2"``."""
    clauses = []
    for part in text.split(";"):
        lits = [x for x in part.replace(",", " ").split()]
        if not lits:
            continue
        try:
            clauses.append(tuple(int(x) for x in lits))
        except ValueError:
            raise UsageError(f"bad literal in clause {part.strip()!r}") from None
    try:
        return red.CnfFormula.of(clauses, n_vars)
    except ValueError as e:
        raise UsageError(str(e)) from None


def parse_graph(edges: str, nodes: str = "") -> red.Graph:
    """Edges ``"a-b,b-c"``; extra isolated vertices via ``nodes="a,b,c,d"``."""
    pairs = []
    vs: List[str] = [v for v in nodes.replace(" ", "").split(",") if v]
    for e in edges.replace(" ", "").split(","):
        if not e:
            continue
        ends = e.split("-")
        if len(ends) != 2 or not all(ends) or ends[0] == ends[1]:
            raise UsageError(f"bad edge {e!r}")
        pairs.append(tuple(ends))
        vs += [x for x in ends]
    return red.Graph.of(list(dict.fromkeys(vs)), pairs)


def _params(items: Sequence[str]) -> Dict[str, str]:
    out = {}
    for it in items:
        if "=" not in it:
            raise UsageError(f"parameter {it!r} is not of the form key=value")
        k, v = it.split("=", 1)
        out[k.strip()] = v
    return out


def _need(p: Dict[str, str], key: str, family: str) -> str:
    if key not in p:
        raise UsageError(f"family {family} needs the parameter {key}=...")
    return p[key]


def build_family(family: str, p: Dict[str, str], args: argparse.Namespace) -> red.Reduction:
    n_vars = int(p["vars"]) if "vars" in p else None
    if family == "exponential":
        try:
            n = int(_need(p, "n", family))
        except ValueError:
            raise UsageError("n must be an integer") from None
        if n < 1:
            raise UsageError("n must be at least 1")
        return red.gen_exponential_family(n)
    if family in ("two-key", "acyclic-cqa"):
        g = parse_graph(p.get("graph", ""), p.get("nodes", ""))
        return red.gen_two_key(g) if family == "two-key" else red.gen_acyclic_cqa(red.gen_spoiled_free(g))
    if family == "rc-to-cqa":
        inp = Inputs(args)
        if not args.candidate:
            raise UsageError("rc-to-cqa needs --candidate")
        cand = textio.parse_instance(args.candidate, inp.schema)
        try:
            return red.reduce_rc_to_cqa(inp.data, cand, inp.ics)
        except (ValueError, SchemaError) as e:
            raise UsageError(str(e)) from None
    f = parse_cnf(_need(p, "cnf", family), n_vars)
    try:
        if family == "monotone3sat":
            return red.gen_monotone3sat(f)
        if family == "one-denial":
            return red.gen_one_denial(f)
        if family == "fd-ind-repaircheck":
            return red.gen_fd_ind_repaircheck(f)
        if family == "keyfk-repaircheck":
            return red.gen_keyfk_repaircheck(f)
        universals = tuple(int(x) for x in p.get("forall", "").replace(",", " ").split())
        existentials = tuple(v for v in range(1, f.n_vars + 1) if v not in universals)
        return red.gen_qbf_cqa(red.Qbf2(universals, existentials, f))
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_generate(args: argparse.Namespace) -> int:
    if not args.out_dir:
        raise UsageError("generate needs --out-dir")
    rd = build_family(args.family, _params(args.params), args)
    files = textio.write_bundle(args.out_dir, rd.schema, rd.ics, rd.instance, rd.query)
    if rd.candidate is not None:
        files += [f"candidate/{n}" for n in textio.serialize_instance(rd.candidate, Path(args.out_dir) / "candidate")]
    payload = {
        "family": args.family,
        "files": files,
        "facts": len(rd.instance),
        "classification": str(rd.ics.classification),
    }
    lines = [f"{args.family}: {len(rd.instance)} facts, {rd.ics.classification}"]
    lines += [f"wrote {name}" for name in files]
    _emit(args, payload, lines)
    return EXIT_OK


# --- parser -----------------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, formats=("text", "json"), default="text") -> None:
    p.add_argument("--schema", help="schema file (.rl)")
    p.add_argument("--constraints", help="constraints file (.rl)")
    p.add_argument("--data", nargs="+", help="CSV directory, CSV files or a JSON bundle")
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-cap", type=int, default=None,
                   help="largest instance the brute-force oracle accepts (default 18, or REPAIRLAB_ORACLE_CAP)")
    p.add_argument("--format", choices=formats, default=default)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="repairlab",
                                 description="Repair checking and consistent query answering by tuple deletion.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="is a candidate instance a repair?")
    _common(p)
    p.add_argument("--candidate", nargs="+")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("cqa", help="consistent answers to a query")
    _common(p)
    p.add_argument("--query", help="query file")
    p.set_defaults(func=cmd_cqa)

    p = sub.add_parser("repairs", help="sample or enumerate repairs")
    _common(p)
    p.add_argument("--mode", choices=("sample", "enumerate"), default="sample")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_repairs)

    p = sub.add_parser("hypergraph", help="dump the conflict hypergraph")
    _common(p, formats=("dot", "json", "text"), default="dot")
    p.set_defaults(func=cmd_hypergraph)

    p = sub.add_parser("classify", help="print the constraint class")
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("generate", help="write a hardness-reduction instance bundle")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("params", nargs="*", help="key=value: cnf='1 2; -1 -2', vars=N, graph='a-b,b-c', "
                                             "nodes=a,b,c, forall=1,2, n=3")
    _common(p)
    p.add_argument("--candidate", nargs="+")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"repairlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UnsupportedClassError, OverCapError) as e:
        print(f"repairlab: unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (OSError, ValueError, ParseError, SchemaError, SortError, RepairLabError) as e:
        msg = f"{e.filename}: {e.strerror}" if isinstance(e, OSError) and e.filename else str(e)
        print(f"repairlab: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
