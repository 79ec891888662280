"""Executable checks of the correctness argument on finite instances."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional

from ..core import (
    BOOL, App, Arrow, Base, Constraint, Exists, IntLit, BinOp, Ctor, Lambda,
    TopVar, Var, as_logic, domains, spine, strip_lambdas,
)
from ..defunc import Transformer, build_target, transform_sort
from ..preprocess import FreshNamer
from ..sortcheck import check_goal_term
from ..errors import Explosion
from .closures import closure_sort, closure_universe, expand, extract_valuation, relevant_closures
from .semantics import DEFAULT_CAP, Semantics, semantics_for, valuation_leq
from .universe import Universe
from .values import Closure, closure_key


def is_solvable(p, u: Optional[Universe] = None, monotone: bool = True, cap: int = DEFAULT_CAP) -> bool:
    """Solvable iff the goal is false in the least model.

    For target problems without an explicit closure carrier, the carrier is
    the set of closures reachable from the goal (see ``relevant_closures``),
    which decides the goal exactly.
    """
    u = u or Universe()
    if "closr" in p.signature.base_sorts and u.closures is None:
        u = u.with_closures(sorted(relevant_closures(p, u), key=closure_key))
    sem = semantics_for(p, u, monotone, cap)
    v, _ = sem.lfp(p.program, p.env)
    return sem.eval(p.goal, v) == 0


# ---------------------------------------------------------------------------
# brute force

def prefixed_points(p, u: Universe, monotone: bool = True, cap: int = DEFAULT_CAP):
    """All valuations ``v`` with ``T(v) <= v``, by enumerating the frames."""
    sem = Semantics(u, monotone=monotone, sparse=False, cap=cap)
    names = p.env.names()
    frames = [sem.frame(s) for _, s in p.env.items()]
    total = 1
    for f in frames:
        total *= len(f)
    if total > cap:
        raise Explosion(f"{total} valuations to enumerate")
    for vals in product(*frames):
        v = dict(zip(names, vals))
        if valuation_leq(p.env, sem.one_step(p.program, p.env, v), v):
            yield v


def least_prefixed_point(p, u: Universe, monotone: bool = True, cap: int = DEFAULT_CAP):
    points = list(prefixed_points(p, u, monotone, cap))
    for v in points:
        if all(valuation_leq(p.env, v, w) for w in points):
            return v
    return None


def solvable_by_enumeration(p, u: Universe, monotone: bool = True, cap: int = DEFAULT_CAP) -> bool:
    sem = Semantics(u, monotone=monotone, sparse=False, cap=cap)
    return any(sem.eval(p.goal, v) == 0 for v in prefixed_points(p, u, monotone, cap))


# ---------------------------------------------------------------------------
# closure depth needed by a program

def closure_nesting(p) -> int:
    """Upper bound on how much deeper than its inputs a closure built while
    evaluating any body or the goal can be."""
    def nest(t) -> int:
        if isinstance(t, (Var, TopVar, IntLit, BinOp, Ctor, Constraint)):
            return 0
        if isinstance(t, (Exists, Lambda)):
            return nest(t.body)
        logic = as_logic(t)
        if logic is not None:
            return max(nest(logic[1]), nest(logic[2]))
        if isinstance(t, App):
            h, args = spine(t)
            return max([nest(h)] + [nest(a) + 1 for a in args if not isinstance(a, (Var, IntLit, BinOp, Constraint))])
        return 0
    return max([nest(e.body) for e in p.program] + [nest(p.goal)])


def _typed(c, env, s) -> bool:
    if isinstance(s, Arrow):
        return isinstance(c, Closure) and closure_sort(c, env) == s
    return not isinstance(c, Closure)


# ---------------------------------------------------------------------------
# the semantic bridge between a term and its transformed formula

@dataclass
class BridgeReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def bridge_check(src, u: Universe, d0: int = 1, alpha: Optional[Mapping] = None,
                 max_failures: int = 20) -> BridgeReport:
    """For every subterm ``s`` of every (preprocessed) body and the goal, and
    every binding of the enclosing variables to values of depth <= d0:
    arrow-sorted ``s`` has exactly one closure satisfying its transformed
    formula, and that closure expands to the value of ``s``; o-sorted ``s``
    has the same truth value as its transformation."""
    env = src.env
    depth = d0 + closure_nesting(src)
    U = closure_universe(env, u, depth)
    sem = semantics_for(src, u)
    if alpha is None:
        alpha, _ = sem.lfp(src.program, env)
    arts = build_target(src)
    names = arts.names
    alpha_t = extract_valuation(src, u, depth, alpha, names, closures=U)
    tsem = Semantics(u.with_closures(U), sparse=True)
    tr = Transformer(src, names, FreshNamer.for_problem(arts.to_problem()))
    small = [c for c in U if c.depth <= d0]
    report = BridgeReport()
    transformed = {}

    def translate(s, senv, o_sorted):
        hit = transformed.get(id(s))
        if hit is None:
            hit = transformed[id(s)] = (s, tr.transform(s, senv) if o_sorted else tr.transform_arrow(s, senv))
        return hit[1]

    def walk(s, senv, se, te):
        if len(report.failures) >= max_failures:
            return
        srt = check_goal_term(senv, src.signature, s)
        if srt == BOOL:
            lhs = sem.compile(s)(dict(se))
            rhs = tsem.compile(translate(s, senv, True))(dict(te))
            report.checked += 1
            if lhs != rhs:
                report.failures.append(("formula", s, lhs, rhs))
        elif isinstance(srt, Arrow):
            h = translate(s, senv, False)
            f = tsem.compile(h.body)
            e = dict(te)
            hits = []
            for c in U:
                e[h.hole] = c
                if f(e):
                    hits.append(c)
            report.checked += 1
            val = sem.compile(s)(dict(se))
            if len(hits) != 1 or expand(hits[0], alpha, env) != val:
                report.failures.append(("closure", s, hits, val))
        else:
            return
        if isinstance(s, Exists):
            for c in sem.frame(s.sort):
                walk(s.body, senv.extend(s.var, s.sort), {**se, s.var: c}, {**te, s.var: c})
            return
        logic = as_logic(s)
        if logic is not None:
            walk(logic[1], senv, se, te)
            walk(logic[2], senv, se, te)
        elif isinstance(s, App):
            walk(s.fun, senv, se, te)
            walk(s.arg, senv, se, te)

    for eq in src.program:
        binders, body = strip_lambdas(eq.body)
        benv = env.extend_many(binders)
        pools = [[c for c in small if _typed(c, env, s)] if isinstance(s, Arrow) else sem.frame(s)
                 for _, s in binders]
        for vals in product(*pools):
            se = dict(alpha)
            te = dict(alpha_t)
            for (n, s), c in zip(binders, vals):
                se[n] = expand(c, alpha, env)
                te[n] = c
            walk(body, benv, se, te)
    walk(src.goal, env, dict(alpha), dict(alpha_t))
    return report


# ---------------------------------------------------------------------------
# extraction commutes with the consequence operators

@dataclass
class DiagramReport:
    compared: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def diagram_check(src, gamma: Mapping, u: Universe, d0: int = 1, literal: bool = False) -> DiagramReport:
    """Compare the extraction of ``T_P(gamma)`` with ``T_P'`` applied to the
    extraction of ``gamma``.

    Apply relations are compared entirely.  IOMatch entries are compared at
    well-typed closures of depth <= d0 (with well-typed closure arguments of
    depth <= d0); the closure universe is deep enough that every witness the
    target needs for such an entry exists.

    With ``literal=True`` the closure arguments on the left are expanded
    under ``T_P(gamma)``; otherwise under ``gamma``, which is the valuation
    the target's IOMatch lookups in ``T_P'(T_f(gamma))`` actually see.
    """
    env = src.env
    depth = d0 + closure_nesting(src)
    U = closure_universe(env, u, depth)
    arts = build_target(src)
    names, target = arts.names, arts.to_problem()
    sem = semantics_for(src, u)
    stepped = sem.one_step(src.program, env, gamma)
    left = extract_valuation(src, u, depth, stepped, names, closures=U,
                             arg_alpha=None if literal else gamma)
    zeta = extract_valuation(src, u, depth, gamma, names, closures=U)
    tsem = Semantics(u.with_closures(U), sparse=True)
    right = tsem.one_step(target.program, target.env, zeta)
    report = DiagramReport()
    for (family, b), name in names.items():
        lt, rt = left[name].true, right[name].true
        if family == "Apply":
            report.compared += 1
            if lt != rt:
                report.mismatches.append((name, sorted(map(repr, lt ^ rt))[:5]))
            continue
        carrier = U if b == "closr" else u.carrier(Base(b))
        for m in U:
            if m.depth > d0 or closure_sort(m, env) is None:
                continue
            doms = domains(env[m.rel])
            last = doms[len(m.args)]
            if transform_sort(last).name != b:
                continue
            for n in carrier:
                if isinstance(n, Closure) and n.depth > d0:
                    continue
                if not _typed(n, env, last):
                    continue
                report.compared += 1
                if ((m, n) in lt) != ((m, n) in rt):
                    report.mismatches.append((name, m, n, (m, n) in lt, (m, n) in rt))
    return report
