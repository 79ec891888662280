"""Defunctionalization of preprocessed problems into first-order problems.

A term of sort ``o`` is turned into a formula (``transform``); a term of a
relational arrow sort is turned into a formula with one free placeholder
``X`` of sort ``closr`` that holds exactly when ``X`` is the closure the
term denotes (``transform_arrow``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    AND, BOOL, CLOSR, INT, OR, App, Arrow, Base, Constraint, Ctor, Equation,
    Exists, Lambda, LogConst, Problem, Signature, SortEnv, TopVar, Var, arrow,
    as_logic, conj, ctor_symbol, domains, eq, exists_many, fold_disj, head,
    lambdas, names_in, rename_bound, replace_vars, sort_order, sort_str,
    strip_lambdas, subterms, substitute,
)
from .errors import ArityMismatch, InternalError
from .preprocess import FreshNamer
from .sortcheck import check_goal_term


def transform_sort(s):
    return s if isinstance(s, Base) else CLOSR


@dataclass(frozen=True)
class HoleFormula:
    """A target formula with one free placeholder variable of sort closr."""
    hole: str
    body: object

    def instantiate(self, name: str):
        return substitute(self.body, self.hole, name)


# ---------------------------------------------------------------------------
# names of the generated relations

def _sort_key(name: str) -> tuple:
    order = {"int": 0, "o": 1, "closr": 3}
    return (order.get(name, 2), name)


def clone_sorts(sig: Signature) -> list[str]:
    """The base sorts the Apply/IOMatch families are indexed by."""
    return sorted(set(sig.base_sorts) | {"closr"}, key=_sort_key)


def relation_names(p: Problem) -> dict[tuple[str, str], str]:
    """``(family, sort) -> name`` for Apply and IOMatch clones."""
    taken = p.identifiers()
    out = {}
    for family in ("Apply", "IOMatch"):
        for b in clone_sorts(p.signature):
            base = f"{family}_{sort_str(Base(b))}"
            name, n = base, 1
            while name in taken:
                name = f"{base}_{n}"
                n += 1
            taken.add(name)
            out[(family, b)] = name
    return out


# ---------------------------------------------------------------------------
# the rules

class Transformer:
    def __init__(self, p: Problem, names: dict, namer: FreshNamer):
        self.p = p
        self.names = names
        self.namer = namer
        self.top = set(p.env.names())

    def sort_of(self, t, env: SortEnv):
        return check_goal_term(env, self.p.signature, t)

    def apply_rel(self, s) -> TopVar:
        return TopVar(self.names[("Apply", transform_sort(s).name)])

    def iomatch_rel(self, s) -> TopVar:
        return TopVar(self.names[("IOMatch", transform_sort(s).name)])

    def transform(self, t, env: SortEnv):
        """``t : o`` to a formula."""
        if isinstance(t, Lambda):
            raise InternalError("abstraction survived preprocessing")
        if isinstance(t, Constraint):                      # ConstrLan
            return t
        if isinstance(t, Var):                             # Var-Base
            if env.get(t.name) != BOOL:
                raise InternalError(f"variable {t.name} is not of sort bool")
            return t
        if isinstance(t, Exists):                          # Exi
            if not isinstance(t.sort, Base):
                raise InternalError(f"higher-order quantifier over {t.var} survived preprocessing")
            return Exists(t.var, t.sort, self.transform(t.body, env.extend(t.var, t.sort)))
        logic = as_logic(t)
        if logic is not None:                              # LogSym
            op, a, b = logic
            return App(App(LogConst(op), self.transform(a, env)), self.transform(b, env))
        if isinstance(t, App):                             # Match
            if isinstance(head(t), LogConst):
                raise InternalError("partially applied connective")
            e_hole = self.transform_arrow(t.fun, env)
            arg_sort = self.sort_of(t.arg, env)
            if isinstance(arg_sort, Base):                 # Match-Base
                f_arg = self.base_arg(t.arg, arg_sort, env)
                x = self.namer("_c")
                return Exists(x, CLOSR, conj(e_hole.instantiate(x),
                                             App(App(self.iomatch_rel(arg_sort), Var(x)), f_arg)))
            f_hole = self.transform_arrow(t.arg, env)      # Match-Arrow
            x = self.namer("_c")
            y = self.namer("_c")
            inner = Exists(y, CLOSR, conj(f_hole.instantiate(y),
                                          App(App(self.iomatch_rel(arg_sort), Var(x)), Var(y))))
            return Exists(x, CLOSR, conj(e_hole.instantiate(x), inner))
        raise InternalError(f"unexpected term of sort bool: {t!r}")

    def base_arg(self, t, s, env):
        return self.transform(t, env) if s == BOOL else t

    def transform_arrow(self, t, env: SortEnv) -> HoleFormula:
        """``t`` of relational arrow sort to a formula over a placeholder."""
        hole = self.namer("_h")
        X = Var(hole)
        if isinstance(t, TopVar):                          # TopVar
            return HoleFormula(hole, eq(X, Ctor(t.name, ())))
        if isinstance(t, Var):                             # Var-Arrow
            if t.name in self.top:
                return HoleFormula(hole, eq(X, Ctor(t.name, ())))
            return HoleFormula(hole, eq(X, Var(t.name)))
        if isinstance(t, App):                             # App
            if isinstance(head(t), LogConst):
                raise InternalError("partially applied connective")
            e_hole = self.transform_arrow(t.fun, env)
            arg_sort = self.sort_of(t.arg, env)
            if isinstance(arg_sort, Base):                 # App-Base
                f_arg = self.base_arg(t.arg, arg_sort, env)
                x = self.namer("_c")
                call = App(App(App(self.apply_rel(arg_sort), Var(x)), f_arg), X)
                return HoleFormula(hole, Exists(x, CLOSR, conj(e_hole.instantiate(x), call)))
            f_hole = self.transform_arrow(t.arg, env)      # App-Arrow
            x = self.namer("_c")
            y = self.namer("_c")
            call = App(App(App(self.apply_rel(arg_sort), Var(x)), Var(y)), X)
            inner = Exists(y, CLOSR, conj(f_hole.instantiate(y), call))
            return HoleFormula(hole, Exists(x, CLOSR, conj(e_hole.instantiate(x), inner)))
        if isinstance(t, Lambda):
            raise InternalError("abstraction survived preprocessing")
        raise InternalError(f"unexpected term of arrow sort: {t!r}")


def transform_body(t, env: SortEnv, p: Problem, names: Optional[dict] = None, namer: Optional[FreshNamer] = None):
    """Formula for ``t : o`` or a HoleFormula for arrow-sorted ``t``."""
    namer = namer or FreshNamer.for_problem(p)
    tr = Transformer(p, names or relation_names(p), namer)
    if check_goal_term(env, p.signature, t) == BOOL:
        return tr.transform(t, env)
    return tr.transform_arrow(t, env)


# ---------------------------------------------------------------------------
# merging

def merge_equations(eqs: list, namer=None) -> Equation:
    """Combine equations for one relation into one by disjunction."""
    first = eqs[0]
    if len(eqs) == 1:
        return first
    binders, body0 = strip_lambdas(first.body)
    names = [n for n, _ in binders]
    if namer is None:
        taken = set()
        for e in eqs:
            taken |= names_in(e.body)
        namer = FreshNamer(taken)
    bodies = [body0]
    for e in eqs[1:]:
        if e.name != first.name:
            raise ArityMismatch(f"cannot merge equations for {first.name} and {e.name}")
        bs, body = strip_lambdas(e.body)
        if len(bs) != len(binders) or [s for _, s in bs] != [s for _, s in binders]:
            raise ArityMismatch(f"equations for {first.name} disagree on their binders")
        # rename inner binders that would capture the shared parameter names
        body = rename_bound(body, set(names), lambda: namer("_m"))
        body = replace_vars(body, {y: Var(x) for (y, _), x in zip(bs, names) if y != x})
        bodies.append(body)
    return Equation(first.name, lambdas(binders, fold_disj(bodies)), span=first.span)


# ---------------------------------------------------------------------------
# the target problem

@dataclass
class TargetArtifacts:
    delta: SortEnv
    sigma: Signature
    apply_eqs: list
    iomatch_eqs: list
    goal: object
    names: dict = field(default_factory=dict)

    def to_problem(self) -> Problem:
        return Problem(self.delta, tuple(self.apply_eqs + self.iomatch_eqs), self.goal, self.sigma)


def target_signature(p: Problem) -> Signature:
    consts = [("=_closr", Arrow(CLOSR, Arrow(CLOSR, BOOL)))]
    for name, s in p.env.items():
        doms = [transform_sort(d) for d in domains(s)]
        for i in range(len(doms)):
            consts.append((ctor_symbol(name, i), arrow(*doms[:i], CLOSR)))
    return Signature(frozenset(set(p.signature.base_sorts) | {"closr"}), tuple(consts))


def build_target(p: Problem, namer: Optional[FreshNamer] = None) -> TargetArtifacts:
    namer = namer or FreshNamer.for_problem(p)
    names = relation_names(p)
    namer.reserve(names.values())
    tr = Transformer(p, names, namer)
    sig = target_signature(p)
    families = clone_sorts(p.signature)
    delta = SortEnv(
        [(names[("Apply", b)], arrow(CLOSR, Base(b), CLOSR, BOOL)) for b in families]
        + [(names[("IOMatch", b)], arrow(CLOSR, Base(b), BOOL)) for b in families]
    )
    branches: dict[str, list] = {n: [] for n in delta.names()}

    for X, s in p.env.items():
        doms = [transform_sort(d) for d in domains(s)]
        m = len(doms)
        for n in range(m - 1):
            x, y, z = namer("_x"), namer("_x"), namer("_x")
            a = [(namer("_x"), doms[i]) for i in range(n)]
            av = [Var(v) for v, _ in a]
            body = exists_many(a, conj(eq(Var(x), Ctor(X, tuple(av))),
                                       eq(Var(z), Ctor(X, tuple(av) + (Var(y),)))))
            rel = names[("Apply", doms[n].name)]
            branches[rel].append(Equation(rel, lambdas([(x, CLOSR), (y, doms[n]), (z, CLOSR)], body)))
        for e in p.equations_for(X):
            binders, F = strip_lambdas(e.body)
            if len(binders) != m:
                raise InternalError(f"equation for {X} is not eta-expanded")
            env = p.env.extend_many(binders)
            F_t = tr.transform(F, env)
            x = namer("_x")
            params = [(v, transform_sort(bs)) for v, bs in binders]
            first = params[:-1]
            body = exists_many(first, conj(eq(Var(x), Ctor(X, tuple(Var(v) for v, _ in first))), F_t))
            rel = names[("IOMatch", doms[-1].name)]
            branches[rel].append(Equation(rel, lambdas([(x, CLOSR), params[-1]], body)))

    merged = {rel: merge_equations(eqs, namer) for rel, eqs in branches.items() if eqs}
    apply_eqs = [merged[names[("Apply", b)]] for b in families if names[("Apply", b)] in merged]
    iomatch_eqs = [merged[names[("IOMatch", b)]] for b in families if names[("IOMatch", b)] in merged]
    goal = tr.transform(p.goal, p.env)
    return TargetArtifacts(delta, sig, apply_eqs, iomatch_eqs, goal, names)


def referenced(t) -> set[str]:
    return {u.name for u in subterms(t) if isinstance(u, TopVar)}


def prune_unused(t: TargetArtifacts) -> TargetArtifacts:
    bodies = {e.name: e.body for e in t.apply_eqs + t.iomatch_eqs}
    live = referenced(t.goal)
    todo = list(live)
    while todo:
        name = todo.pop()
        if name in bodies:
            for r in referenced(bodies[name]) - live:
                live.add(r)
                todo.append(r)
    keep = lambda eqs: [e for e in eqs if e.name in live]
    delta = SortEnv((n, s) for n, s in t.delta.items() if n in live)
    return TargetArtifacts(delta, t.sigma, keep(t.apply_eqs), keep(t.iomatch_eqs), t.goal, t.names)


def defunctionalize(p: Problem, prune: bool = True, namer: Optional[FreshNamer] = None) -> Problem:
    """First-order target problem of a preprocessed problem."""
    t = build_target(p, namer)
    if prune:
        t = prune_unused(t)
    return t.to_problem()
