"""Minimal-change integrity maintenance by tuple deletion.

Repair checking and consistent query answering under denial constraints,
functional dependencies and inclusion dependencies, with a brute-force oracle
for small instances and instance generators for the hard cases.
"""

from .errors import (OverCapError, ParseError, RepairLabError, SchemaError, SortError, SourceSpan,
                     UnguardedVariableError, UnsupportedClassError)
from .hypergraph import ConflictHypergraph, build as build_hypergraph
from .model import (FD, IND, Classification, ConjunctiveQuery, DenialConstraint, Fact, ICSet, Instance, Schema,
                    classify, fact, satisfies)
from .oracle import enumerate_repairs, oracle_cqa, oracle_repair_check
from .repair import (Certificate, RepairVerdict, check_acyclic, check_denial, check_repair, check_single_key,
                     sample_repair, unique_ind_repair)
from .cqa import CqaVerdict, consistent_answers_open, cqa_dispatch, cqa_ground_qf, rewrite_simple_conjunctive

__version__ = "0.1.0"

__all__ = [
    "OverCapError", "ParseError", "RepairLabError", "SchemaError", "SortError", "SourceSpan",
    "UnguardedVariableError", "UnsupportedClassError", "ConflictHypergraph", "build_hypergraph",
    "FD", "IND", "Classification", "ConjunctiveQuery", "DenialConstraint", "Fact", "ICSet", "Instance",
    "Schema", "classify", "fact", "satisfies", "enumerate_repairs", "oracle_cqa", "oracle_repair_check",
    "Certificate", "RepairVerdict", "check_acyclic", "check_denial", "check_repair", "check_single_key",
    "sample_repair", "unique_ind_repair", "CqaVerdict", "consistent_answers_open", "cqa_dispatch",
    "cqa_ground_qf", "rewrite_simple_conjunctive",
]
