"""Bounded evaluators and translations for HyperQPTL, HyperQPTL+, Hyper2LTL
and second- and third-order arithmetic."""

from hyperq.formula import Formula, Logic
from hyperq.kernel import BACKEND
from hyperq.semantics import (
    Assignment, EvalParams, eval_hyper2ltl, eval_hyperqptl, eval_hyperqptl_plus, eval_qf, evaluate,
)
from hyperq.syntax import ParseError, parse, print_formula
from hyperq.traces import LassoTrace, TraceSet, UniverseParams, lasso

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BACKEND", "EvalParams", "Formula", "LassoTrace", "Logic", "ParseError",
    "TraceSet", "UniverseParams", "eval_hyper2ltl", "eval_hyperqptl", "eval_hyperqptl_plus",
    "eval_qf", "evaluate", "lasso", "parse", "print_formula",
]
