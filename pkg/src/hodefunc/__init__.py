"""Defunctionalization of higher-order constrained Horn clause problems."""

from .core import Problem, SortEnv
from .defunc import defunctionalize
from .emit import emit_native, emit_smtlib
from .frontend import parse_problem, print_problem
from .preprocess import preprocess
from .sortcheck import check_problem

__version__ = "0.1.0"

__all__ = [
    "Problem", "SortEnv", "check_problem", "defunctionalize", "emit_native",
    "emit_smtlib", "parse_problem", "preprocess", "print_problem",
]
