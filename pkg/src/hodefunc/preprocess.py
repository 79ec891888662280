"""Lambda lifting, eta-expansion and higher-order existential elimination."""

from __future__ import annotations

from typing import Callable, Optional

from .core import (
    App, Arrow, Base, Constraint, Cmp, Equation, Exists, IntLit, Lambda, Problem,
    SortEnv, TopVar, Var, apply_spine, arrow, domains, eq, free_vars_ordered,
    lambdas, names_in, replace_vars, strip_lambdas,
)
from .sortcheck import check_goal_term


class FreshNamer:
    """Hands out ``<prefix><N>`` names that do not clash with ``taken``."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.counters: dict[str, int] = {}

    def __call__(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0)
        while f"{prefix}{n}" in self.taken:
            n += 1
        name = f"{prefix}{n}"
        self.counters[prefix] = n + 1
        self.taken.add(name)
        return name

    def reserve(self, names):
        self.taken |= set(names)

    @classmethod
    def for_problem(cls, p: Problem) -> "FreshNamer":
        return cls(p.identifiers())


def _namer(p: Problem, namer: Optional[FreshNamer]) -> FreshNamer:
    if namer is None:
        return FreshNamer.for_problem(p)
    namer.reserve(p.identifiers())
    return namer


# ---------------------------------------------------------------------------
# lambda lifting

class _Found(Exception):
    pass


def _lift_first(t, env: SortEnv, p: Problem, namer: FreshNamer, top: set, out: list):
    """Replace the leftmost-outermost lambda in ``t``; record the new equation."""

    def walk(u, env):
        if isinstance(u, Lambda):
            params = [n for n in free_vars_ordered(u) if n not in top]
            sorts = [env[n] for n in params]
            lam_sort = check_goal_term(env, p.signature, u)
            name = namer("_lift")
            out.append((name, arrow(*sorts, lam_sort), lambdas(list(zip(params, sorts)), u)))
            raise _Found(apply_spine(TopVar(name), [Var(n) for n in params]))
        if isinstance(u, App):
            try:
                walk(u.fun, env)
            except _Found as f:
                raise _Found(App(f.args[0], u.arg, span=u.span))
            try:
                walk(u.arg, env)
            except _Found as f:
                raise _Found(App(u.fun, f.args[0], span=u.span))
        elif isinstance(u, Exists):
            try:
                walk(u.body, env.extend(u.var, u.sort))
            except _Found as f:
                raise _Found(Exists(u.var, u.sort, f.args[0], span=u.span))

    try:
        walk(t, env)
    except _Found as f:
        return f.args[0]
    return None


def lift_lambdas(p: Problem, namer: Optional[FreshNamer] = None) -> Problem:
    """Name every anonymous function, one at a time."""
    namer = _namer(p, namer)
    env_items = list(p.env.items())
    program = list(p.program)
    goal = p.goal
    while True:
        env = SortEnv(env_items)
        top = set(env.names())
        new: list = []
        changed = False
        for k, e in enumerate(program):
            binders, body = strip_lambdas(e.body)
            res = _lift_first(body, env.extend_many(binders), p, namer, top, new)
            if res is not None:
                program[k] = Equation(e.name, lambdas(binders, res), span=e.span)
                changed = True
                break
        if not changed:
            res = _lift_first(goal, env, p, namer, top, new)
            if res is not None:
                goal = res
                changed = True
        if not changed:
            break
        for name, s, body in new:
            env_items.append((name, s))
            program.append(Equation(name, body))
    return Problem(SortEnv(env_items), tuple(program), goal, p.signature)


# ---------------------------------------------------------------------------
# eta-expansion

def eta_expand(p: Problem, namer: Optional[FreshNamer] = None) -> Problem:
    """Make every outermost abstraction take the full declared arity."""
    namer = _namer(p, namer)
    program = []
    for e in p.program:
        binders, body = strip_lambdas(e.body)
        doms = domains(p.env[e.name])
        extra = [(namer("_x"), s) for s in doms[len(binders):]]
        if extra:
            body = apply_spine(body, [Var(n) for n, _ in extra])
        program.append(Equation(e.name, lambdas(binders + extra, body), span=e.span))
    return Problem(p.env, tuple(program), p.goal, p.signature)


# ---------------------------------------------------------------------------
# higher-order existential elimination

TRUE_ATOM = eq(IntLit(0), IntLit(0))


def universal_relation(s, namer: Callable[[str], str]):
    """The body ``\\a1..ak. 0 = 0`` of the top element of a relational sort."""
    return lambdas([(namer("_x"), d) for d in domains(s)], TRUE_ATOM)


def eliminate_ho_exists_term(t, env: SortEnv, namer: Callable[[str], str], universals: Optional[dict] = None):
    """Drop quantifiers over relational sorts in favour of universal relations.

    Returns the new term and a list of ``(name, sort, body)`` equations that
    must be added to the program.  ``universals`` maps already available
    universal relations by sort and is updated in place.
    """
    universals = {} if universals is None else universals
    new: list = []

    def universal(s):
        if s not in universals:
            name = namer("_u")
            universals[s] = name
            new.append((name, s, universal_relation(s, namer)))
        return universals[s]

    def walk(u):
        if isinstance(u, Exists):
            if isinstance(u.sort, Arrow):
                body = replace_vars(u.body, {u.var: TopVar(universal(u.sort))})
                return walk(body)
            return Exists(u.var, u.sort, walk(u.body), span=u.span)
        if isinstance(u, Lambda):
            return Lambda(u.var, u.sort, walk(u.body), span=u.span)
        if isinstance(u, App):
            return App(walk(u.fun), walk(u.arg), span=u.span)
        return u

    return walk(t), new


def eliminate_ho_exists(p: Problem, namer: Optional[FreshNamer] = None) -> Problem:
    namer = _namer(p, namer)
    universals: dict = {}
    new_all: list = []
    program = []
    for e in p.program:
        body, new = eliminate_ho_exists_term(e.body, p.env, namer, universals)
        new_all += new
        program.append(Equation(e.name, body, span=e.span))
    goal, new = eliminate_ho_exists_term(p.goal, p.env, namer, universals)
    new_all += new
    env = p.env.extend_many((n, s) for n, s, _ in new_all)
    program += [Equation(n, b) for n, _, b in new_all]
    out = Problem(env, tuple(program), goal, p.signature)
    # the replacement never introduces abstractions, but keep the stage
    # closed under the earlier invariants anyway
    return lift_lambdas(out, namer)


STAGES = ("lift", "eta", "ho-exists")


def preprocess(p: Problem, namer: Optional[FreshNamer] = None, on_stage=None) -> Problem:
    namer = _namer(p, namer)
    for stage, fn in zip(STAGES, (lift_lambdas, eta_expand, eliminate_ho_exists)):
        p = fn(p, namer)
        if on_stage is not None:
            on_stage(stage, p)
    return p
