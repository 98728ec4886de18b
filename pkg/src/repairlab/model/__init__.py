"""Typed relational model, constraints, queries and satisfaction."""

from .constraints import (FD, IND, Classification, Constraint, DenialConstraint, ICSet, IndGraph, Violation,
                          classify, fd_to_denial, ind_graph, is_single_key, satisfies, violations)
from .data import (NUM, SYM, Attribute, Fact, Instance, Relation, Schema, Value, fact, format_value,
                   value_key)
from .formula import (FALSE, TRUE, And, Cmp, Exists, ForAll, Formula, Implies, Not, Or, Rel, eval_fo,
                      free_variables, ground_atom, is_ground_qf, to_cnf)
from .query import ConjunctiveQuery, Query, conjunctive_from_formula, holds, normalize
from .terms import Atom, Builtin, Const, Var, compare, match_conjunction

__all__ = [
    "FD", "IND", "Classification", "Constraint", "DenialConstraint", "ICSet", "IndGraph", "Violation",
    "classify", "fd_to_denial", "ind_graph", "is_single_key", "satisfies", "violations",
    "NUM", "SYM", "Attribute", "Fact", "Instance", "Relation", "Schema", "Value", "fact", "format_value",
    "value_key", "FALSE", "TRUE", "And", "Cmp", "Exists", "ForAll", "Formula", "Implies", "Not", "Or", "Rel",
    "eval_fo", "free_variables", "ground_atom", "is_ground_qf", "to_cnf", "ConjunctiveQuery", "Query",
    "conjunctive_from_formula", "holds", "normalize", "Atom", "Builtin", "Const", "Var", "compare",
    "match_conjunction",
]
