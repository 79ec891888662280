"""Sorting rules for goal terms, constraint atoms and whole problems."""

from __future__ import annotations

from .core import (
    BOOL, CLOSR, INT, App, Arrow, Base, BinOp, Cmp, Constraint, Ctor, Exists,
    IntLit, Lambda, LogConst, Problem, Signature, SortEnv, TopVar, Var,
    ctor_symbol, is_relational, sort_order, sort_str,
)
from .errors import SortError

_LOGIC_SORT = Arrow(BOOL, Arrow(BOOL, BOOL))


def _known_sort(s, sig: Signature, symbol: str, span):
    if isinstance(s, Base):
        if s.name not in sig.base_sorts:
            raise SortError(SortError.MISMATCH, symbol, f"unknown base sort {sort_str(s)}", span)
        return
    _known_sort(s.dom, sig, symbol, span)
    _known_sort(s.cod, sig, symbol, span)


def _binder_sort_ok(s) -> bool:
    return isinstance(s, Base) or is_relational(s)


def check_fo(env: SortEnv, sig: Signature, t):
    """Sort of a first-order term; relations are not allowed inside."""
    span = getattr(t, "span", None)
    if isinstance(t, IntLit):
        return INT
    if isinstance(t, Var):
        s = env.get(t.name)
        if s is None:
            raise SortError(SortError.UNBOUND, t.name, "unbound variable", span)
        if isinstance(s, Arrow):
            raise SortError(SortError.ILL_FORMED_CONSTRAINT, t.name,
                            f"relational variable of sort {sort_str(s)} inside a constraint", span)
        return s
    if isinstance(t, BinOp):
        for side in (t.left, t.right):
            s = check_fo(env, sig, side)
            if s != INT:
                raise SortError(SortError.MISMATCH, t.op, f"operand of sort {sort_str(s)}, expected int", span)
        return INT
    if isinstance(t, Cmp):
        ls = check_fo(env, sig, t.left)
        rs = check_fo(env, sig, t.right)
        if ls != rs:
            raise SortError(SortError.MISMATCH, t.op, f"operands of sorts {sort_str(ls)} and {sort_str(rs)}", span)
        allowed = (INT, CLOSR) if t.op == "=" else (INT,)
        if ls not in allowed:
            raise SortError(SortError.MISMATCH, t.op, f"not defined on {sort_str(ls)}", span)
        return BOOL
    if isinstance(t, Ctor):
        sym = ctor_symbol(t.rel, len(t.args))
        s = sig.constant(sym)
        if s is None:
            raise SortError(SortError.UNBOUND, sym, "undeclared closure constructor", span)
        for a in t.args:
            if not isinstance(s, Arrow):
                raise SortError(SortError.MISMATCH, sym, "too many arguments", span)
            got = check_fo(env, sig, a)
            if got != s.dom:
                raise SortError(SortError.MISMATCH, sym,
                                f"argument of sort {sort_str(got)}, expected {sort_str(s.dom)}", span)
            s = s.cod
        if s != CLOSR:
            raise SortError(SortError.MISMATCH, sym, "constructor not fully applied", span)
        return CLOSR
    raise SortError(SortError.ILL_FORMED_CONSTRAINT, type(t).__name__, "not first-order constraint material", span)


def check_goal_term(env: SortEnv, sig: Signature, t):
    """Return the unique sort of ``t`` or raise SortError."""
    span = getattr(t, "span", None)
    if isinstance(t, (Var, TopVar)):
        s = env.get(t.name)
        if s is None:
            raise SortError(SortError.UNBOUND, t.name, "unbound variable", span)
        return s
    if isinstance(t, LogConst):
        return _LOGIC_SORT
    if isinstance(t, Constraint):
        return check_fo(env, sig, t.atom)
    if isinstance(t, (Exists, Lambda)):
        if t.var in env:
            raise SortError(SortError.CONFLICTING_ENV, t.var, "binder already in scope", span)
        _known_sort(t.sort, sig, t.var, span)
        if not _binder_sort_ok(t.sort):
            raise SortError(SortError.MISMATCH, t.var, f"binder sort {sort_str(t.sort)} is not relational", span)
        body = check_goal_term(env.extend(t.var, t.sort), sig, t.body)
        if isinstance(t, Exists):
            if body != BOOL:
                raise SortError(SortError.MISMATCH, t.var, f"quantified body has sort {sort_str(body)}, expected bool", span)
            return BOOL
        if not is_relational(body):
            raise SortError(SortError.MISMATCH, t.var, f"abstraction body has sort {sort_str(body)}, which is not relational", span)
        return Arrow(t.sort, body)
    if isinstance(t, App):
        fs = check_goal_term(env, sig, t.fun)
        if not isinstance(fs, Arrow):
            raise SortError(SortError.MISMATCH, _name_of(t.fun), f"applied term has sort {sort_str(fs)}", span)
        a = check_goal_term(env, sig, t.arg)
        if a != fs.dom:
            raise SortError(SortError.MISMATCH, _name_of(t.fun),
                            f"argument of sort {sort_str(a)}, expected {sort_str(fs.dom)}", span)
        return fs.cod
    raise SortError(SortError.MISMATCH, type(t).__name__, "not a goal term", span)


def _name_of(t) -> str:
    while isinstance(t, App):
        t = t.fun
    if isinstance(t, (Var, TopVar)):
        return t.name
    if isinstance(t, LogConst):
        return "&&" if t.op == "and" else "||"
    return type(t).__name__


def check_problem(p: Problem) -> None:
    sig = p.signature
    for sym, s in sig.constants:
        if sort_order(s) > 2:
            raise SortError(SortError.MISMATCH, sym, "signature constants must have order at most 2")
    for name, s in p.env.items():
        _known_sort(s, sig, name, None)
        if not isinstance(s, Arrow) or not is_relational(s):
            raise SortError(SortError.NON_RELATIONAL_TOP_VAR, name,
                            f"top-level sort {sort_str(s)} is not a relational arrow sort")
    for e in p.program:
        if e.name not in p.env:
            raise SortError(SortError.UNBOUND, e.name, "equation for an undeclared relation", e.span)
        try:
            got = check_goal_term(p.env, sig, e.body)
        except SortError as err:
            raise err.in_equation(e.name)
        want = p.env[e.name]
        if got != want:
            raise SortError(SortError.MISMATCH, e.name,
                            f"body has sort {sort_str(got)} but {sort_str(want)} was declared", e.span).in_equation(e.name)
    got = check_goal_term(p.env, sig, p.goal)
    if got != BOOL:
        raise SortError(SortError.MISMATCH, "goal", f"goal has sort {sort_str(got)}, expected bool",
                        getattr(p.goal, "span", None))
