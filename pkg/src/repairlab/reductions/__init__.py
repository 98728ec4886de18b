"""Hardness constructions as instance generators, with brute-force deciders for their inputs."""

from .formulas import (CnfFormula, Graph, Qbf2, assignments, is_3colorable, is_satisfiable, qbf_true,
                       satisfying_assignment, three_coloring)
from .gadgets import (BipartiteColoredGraph, ColoredGraphInstance, DirectedColoredGraph, TypedHypergraph,
                      gen_spoiled_free, maximal_spoiled_free, one_denial_gadget, two_key_gadget)
from .generators import (KEYFK_PAIRS, ONE_DENIAL, Reduction, gen_acyclic_cqa, gen_exponential_family,
                         gen_fd_ind_repaircheck, gen_keyfk_repaircheck, gen_monotone3sat, gen_one_denial,
                         gen_qbf_cqa, gen_two_key, keyfk_permutations, reduce_rc_to_cqa)

__all__ = [
    "CnfFormula", "Graph", "Qbf2", "assignments", "is_3colorable", "is_satisfiable", "qbf_true",
    "satisfying_assignment", "three_coloring",
    "BipartiteColoredGraph", "ColoredGraphInstance", "DirectedColoredGraph", "TypedHypergraph",
    "gen_spoiled_free", "maximal_spoiled_free", "one_denial_gadget", "two_key_gadget",
    "KEYFK_PAIRS", "ONE_DENIAL", "Reduction", "gen_acyclic_cqa", "gen_exponential_family",
    "gen_fd_ind_repaircheck", "gen_keyfk_repaircheck", "gen_monotone3sat", "gen_one_denial",
    "gen_qbf_cqa", "gen_two_key", "keyfk_permutations", "reduce_rc_to_cqa",
]
