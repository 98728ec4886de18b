"""Consistent query answering engines."""

from ..model.formula import eval_fo
from .dispatch import JUSTIFICATION, Plan, consistent_answers_open, cqa_dispatch, plan
from .ground import cqa_ground_qf
from .rewrite import RewrittenSentence, is_exact, rewrite_simple_conjunctive
from .verdict import CqaVerdict

__all__ = ["JUSTIFICATION", "Plan", "consistent_answers_open", "cqa_dispatch", "plan", "cqa_ground_qf",
           "RewrittenSentence", "is_exact", "rewrite_simple_conjunctive", "CqaVerdict", "eval_fo"]
