"""Finite-domain reference semantics for monotone problems."""

from __future__ import annotations

from typing import Mapping

from .checks import (
    DiagramReport, BridgeReport, closure_nesting, diagram_check, is_solvable,
    least_prefixed_point, bridge_check, prefixed_points, solvable_by_enumeration,
)
from .closures import (
    DEFAULT_DEPTH, Explorer, closure_sort, closure_universe, expand,
    extract_valuation, relevant_closures,
)
from .semantics import DEFAULT_CAP, Semantics, problem_is_first_order, semantics_for, valuation_leq
from .universe import Universe
from .values import Closure, Func, Rel, apply_value, is_monotone, join, leq


def _semantics(env, u, monotone, v=None):
    sparse = problem_is_first_order(env)
    if v is not None and any(isinstance(x, Func) for x in v.values()):
        sparse = False
    return Semantics(u, monotone=monotone, sparse=sparse)


def frame(s, u: Universe, monotone: bool = True) -> tuple:
    return Semantics(u, monotone=monotone).frame(s)


def eval_term(t, u: Universe, v: Mapping, monotone: bool = True):
    """Value of ``t`` under ``v``; relation values in ``v`` may be explicit
    functions or (first-order) ``Rel`` tuple sets."""
    sparse = not any(isinstance(x, Func) for x in v.values())
    return Semantics(u, monotone=monotone, sparse=sparse).eval(t, v)


def one_step(program, env, u: Universe, v: Mapping, monotone: bool = True) -> dict:
    return _semantics(env, u, monotone, v).one_step(program, env, v)


def lfp(program, env, u: Universe, monotone: bool = True) -> dict:
    return _semantics(env, u, monotone).lfp(program, env)[0]


__all__ = [
    "Closure", "DEFAULT_CAP", "DEFAULT_DEPTH", "DiagramReport", "Explorer", "Func",
    "BridgeReport", "Rel", "Semantics", "Universe", "apply_value", "closure_nesting",
    "closure_sort", "closure_universe", "diagram_check", "eval_term", "expand",
    "extract_valuation", "frame", "is_monotone", "is_solvable", "join",
    "least_prefixed_point", "bridge_check", "leq", "lfp", "one_step",
    "prefixed_points", "problem_is_first_order", "relevant_closures",
    "semantics_for", "solvable_by_enumeration", "valuation_leq",
]
