"""Closure universes, expansion of closures under a source valuation, the
valuation extraction map, and the set of closures a target goal can reach."""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Optional

from ..core import (
    AND, BOOL, CLOSR, App, Arrow, Base, BinOp, Cmp, Constraint, Ctor, Exists,
    IntLit, TopVar, Var, arity, as_logic, domains, free_vars, spine,
    strip_lambdas, subterms,
)
from ..defunc import clone_sorts, relation_names, transform_sort
from ..errors import Explosion, SortMismatch
from .universe import Universe
from .values import Closure, Rel, apply_value

DEFAULT_DEPTH = 2
CLOSURE_CAP = 20_000
MAX_RELEVANT_DEPTH = 8
GEN_BUDGET = 200_000


def closure_universe(env, u: Universe, depth: int, cap: int = CLOSURE_CAP) -> tuple:
    """Closures ``(X, t1..tk)`` with ``k < arity(X)``.  Base arguments range
    over ``u``; closure arguments range over the closures of the previous
    level, so ``depth`` bounds the nesting."""
    level: list = []
    for _ in range(depth + 1):
        nxt = []
        for X, s in env.items():
            doms = domains(s)
            for k in range(len(doms)):
                pools = [level if isinstance(d, Arrow) else u.carrier(d) for d in doms[:k]]
                size = 1
                for p in pools:
                    size *= len(p)
                if len(nxt) + size > cap:
                    raise Explosion(f"closure universe at depth {depth} exceeds {cap} elements")
                nxt.extend(Closure(X, args) for args in product(*pools))
        level = nxt
    return tuple(level)


def _value_has_sort(v, s, env) -> bool:
    if isinstance(s, Arrow):
        return isinstance(v, Closure) and closure_sort(v, env) == s
    if isinstance(v, Closure):
        return False
    return v in (0, 1) if s == BOOL else isinstance(v, int)


def closure_sort(c: Closure, env) -> Optional[object]:
    """The source sort a closure denotes, or None if it is ill-typed."""
    s = env.get(c.rel)
    if s is None or len(c.args) >= arity(s):
        return None
    for a in c.args:
        if not _value_has_sort(a, s.dom, env):
            return None
        s = s.cod
    return s


def expand(c, alpha: Mapping, env):
    if not isinstance(c, Closure):
        return c
    if closure_sort(c, env) is None:
        raise SortMismatch(f"ill-typed closure {c!r}")
    return apply_value(alpha[c.rel], [expand(a, alpha, env) for a in c.args])


def _carrier(u: Universe, b: str, closures):
    return closures if b == "closr" else u.carrier(Base(b))


def extract_valuation(src, u: Universe, depth: int, alpha: Mapping, names: Optional[dict] = None,
                      closures: Optional[Iterable] = None, arg_alpha: Optional[Mapping] = None) -> dict:
    """The target valuation represented by the source valuation ``alpha``.

    ``apply_B m1 n m2`` holds iff ``m2`` is ``m1`` with ``n`` appended, the
    next parameter of ``m1`` has (transformed) sort B, and the result is a
    closure.  ``iomatch_B m n`` is ``expand(m)`` applied to ``expand(n)``,
    and 0 when that is ill-typed.  ``arg_alpha`` (default ``alpha``) is the
    valuation used to expand arguments while the head relation of ``m`` is
    still read from ``alpha``.
    """
    env = src.env
    names = names or relation_names(src)
    U = tuple(closures) if closures is not None else closure_universe(env, u, depth)
    in_u = set(U)
    arg_alpha = alpha if arg_alpha is None else arg_alpha
    out = {}
    for b in clone_sorts(src.signature):
        carrier = _carrier(u, b, U)
        app = set()
        for m1 in U:
            doms = domains(env[m1.rel])
            k = len(m1.args)
            if k + 1 >= len(doms) or transform_sort(doms[k]).name != b:
                continue
            for n in carrier:
                m2 = m1.append(n)
                if m2 in in_u:
                    app.add((m1, n, m2))
        out[names[("Apply", b)]] = Rel((CLOSR, Base(b), CLOSR), app)
        io = set()
        for m in U:
            doms = domains(env[m.rel])
            if len(m.args) != len(doms) - 1 or transform_sort(doms[-1]).name != b:
                continue
            try:
                head = apply_value(alpha[m.rel], [expand(a, arg_alpha, env) for a in m.args])
            except SortMismatch:
                continue
            for n in carrier:
                try:
                    if apply_value(head, (expand(n, arg_alpha, env),)) == 1:
                        io.add((m, n))
                except SortMismatch:
                    pass
        out[names[("IOMatch", b)]] = Rel((CLOSR, Base(b)), io)
    return out


# ---------------------------------------------------------------------------
# relevant closures of a target problem

class _Unknown(Exception):
    pass


_UNBOUND = object()


class Explorer:
    """Collects every closure that can occur while deciding the goal of a
    first-order target problem under its least model.

    Starting from the goal, every relation call whose arguments are all
    known is recorded and the callee's equations are explored with those
    arguments.  Closure-valued existentials are resolved from the body
    (equalities, destructuring, or by solving a callee's body for the
    missing argument); base existentials range over their carrier.
    """

    def __init__(self, p, u: Universe, cap: int = CLOSURE_CAP, max_depth: int = MAX_RELEVANT_DEPTH):
        self.p = p
        self.max_depth = max_depth
        self.u = u
        self.cap = cap
        self.eqs = {}
        for e in p.program:
            self.eqs.setdefault(e.name, []).append(strip_lambdas(e.body))
        # relations whose bodies only compare terms (the Apply family) can be
        # solved for a missing argument without recursion
        self.solvable = {n for n, bs in self.eqs.items()
                         if not any(isinstance(u, TopVar) for _, b in bs for u in subterms(b))}
        self.calls = set()
        self.seen = set()
        self.solved = {}
        self.gens = {}
        self.effort = 0
        self._fv = {}
        self.closures = set()
        self.work = []

    def run(self) -> set:
        self.visit(self.p.goal, {})
        while self.work:
            rel, vals = self.work.pop()
            for binders, body in self.eqs.get(rel, []):
                self.visit(body, dict(zip((n for n, _ in binders), vals)))
        return self.closures

    def note(self, v):
        if isinstance(v, Closure) and v not in self.closures:
            self.closures.add(v)
            if len(self.closures) > self.cap:
                raise Explosion(f"more than {self.cap} relevant closures")
            if v.depth > self.max_depth:
                raise Explosion(f"relevant closures nest deeper than {self.max_depth}")
            for a in v.args:
                self.note(a)

    def value(self, t, e):
        if isinstance(t, IntLit):
            return self.u.wrap(t.value)
        if isinstance(t, (Var, TopVar)):
            if t.name not in e:
                raise _Unknown(t.name)
            return e[t.name]
        if isinstance(t, BinOp):
            l, r = self.value(t.left, e), self.value(t.right, e)
            return self.u.wrap(l + r if t.op == "+" else l - r)
        if isinstance(t, Ctor):
            return Closure(t.rel, [self.value(a, e) for a in t.args])
        if isinstance(t, Constraint):
            return self.value(t.atom, e)
        if isinstance(t, Cmp):
            l, r = self.value(t.left, e), self.value(t.right, e)
            return int({"=": l == r, "<": l < r, "<=": l <= r, ">": l > r, ">=": l >= r}[t.op])
        raise _Unknown(type(t).__name__)

    def arg_values(self, t, e):
        try:
            return [self.value(t, e)]
        except _Unknown:
            if _is_fo(t):
                raise
            return [0, 1]  # a formula of sort bool

    def free(self, t) -> tuple:
        hit = self._fv.get(id(t))
        if hit is None or hit[0] is not t:
            hit = self._fv[id(t)] = (t, tuple(sorted(free_vars(t))))
        return hit[1]

    def visit(self, t, e):
        # visiting only records calls, so a repeated visit adds nothing
        key = (id(t), tuple(e.get(v) for v in self.free(t)))
        if key in self.seen:
            return
        self.seen.add(key)
        if isinstance(t, Exists):
            for c in self.candidates(t.var, t.sort, t.body, e):
                self.note(c)
                self.visit(t.body, {**e, t.var: c})
            return
        logic = as_logic(t)
        if logic is not None:
            self.visit(logic[1], e)
            self.visit(logic[2], e)
            return
        if isinstance(t, App):
            h, args = spine(t)
            for a in args:
                if not _is_fo(a):
                    self.visit(a, e)
            if isinstance(h, TopVar):
                for vals in product(*(self.arg_values(a, e) for a in args)):
                    self.call(h.name, vals)
            return

    def call(self, rel, vals):
        key = (rel, tuple(vals))
        if key in self.calls:
            return
        self.calls.add(key)
        if len(self.calls) > self.cap:
            raise Explosion(f"more than {self.cap} relevant calls")
        for v in vals:
            self.note(v)
        self.work.append(key)

    def candidates(self, x, s, body, e):
        if s != CLOSR:
            return self.u.carrier(s)
        got = self.gen(x, body, e)
        if got is None:
            raise Explosion(f"cannot bound the closure quantifier {x}")
        return [c for c in got if isinstance(c, Closure)]

    def gen(self, x, t, e):
        """A superset of the values of ``x`` that can make ``t`` true."""
        key = (x, id(t), tuple(e.get(v, _UNBOUND) for v in self.free(t) if v != x))
        hit = self.gens.get(key, _UNBOUND)
        if hit is _UNBOUND:
            hit = self.gens[key] = self._gen(x, t, e)
        return hit

    def _gen(self, x, t, e):
        self.effort += 1
        if self.effort > GEN_BUDGET:
            raise Explosion(f"closure search exceeded {GEN_BUDGET} steps")
        if isinstance(t, Constraint) and isinstance(t.atom, Cmp) and t.atom.op == "=":
            l, r = t.atom.left, t.atom.right
            for a, b in ((l, r), (r, l)):
                if a == Var(x) and x not in free_vars(b):
                    try:
                        return {self.value(b, e)}
                    except _Unknown:
                        return None
            for known, pat in ((l, r), (r, l)):
                if isinstance(pat, Ctor) and Var(x) in pat.args and x not in free_vars(known):
                    try:
                        c = self.value(known, e)
                    except _Unknown:
                        return None
                    if isinstance(c, Closure) and c.rel == pat.rel and len(c.args) == len(pat.args):
                        return {c.args[pat.args.index(Var(x))]}
                    return set()
            return None
        logic = as_logic(t)
        if logic is not None:
            ga = self.gen(x, logic[1], e)
            if logic[0] == AND:
                return ga if ga is not None else self.gen(x, logic[2], e)
            if ga is None:
                return None
            gb = self.gen(x, logic[2], e)
            return None if gb is None else ga | gb
        if isinstance(t, Exists):
            if t.var == x:
                return None
            if t.sort != CLOSR:
                # a bound found without the inner binder holds for all of its values
                got = self.gen(x, t.body, {k: v for k, v in e.items() if k != t.var})
                if got is not None:
                    return got
            if t.sort == CLOSR:
                wc = self.gen(t.var, t.body, e)
                if wc is None:
                    return None
            else:
                wc = self.u.carrier(t.sort)
            out = set()
            for w in wc:
                got = self.gen(x, t.body, {**e, t.var: w})
                if got is None:
                    return None
                out |= got
            return out
        if isinstance(t, App):
            h, args = spine(t)
            if not isinstance(h, TopVar) or Var(x) not in args or h.name not in self.solvable:
                return None
            i = args.index(Var(x))
            try:
                pools = [[None] if j == i else self.arg_values(a, e) for j, a in enumerate(args)]
            except _Unknown:
                return None
            out = set()
            for vals in product(*pools):
                got = self.solve_call(h.name, i, vals)
                if got is None:
                    return None
                out |= got
            return out
        return None

    def solve_call(self, rel, i, vals):
        """Values at position ``i`` for which ``rel`` can hold, given the
        other argument values."""
        key = (rel, i, vals)
        if key in self.solved:
            return self.solved[key]
        out = set()
        for binders, body in self.eqs.get(rel, []):
            names = [n for n, _ in binders]
            if len(names) != len(vals):
                out = None
                break
            e2 = {n: v for j, (n, v) in enumerate(zip(names, vals)) if j != i}
            got = self.gen(names[i], body, e2)
            if got is None:
                out = None
                break
            out |= got
        self.solved[key] = out
        return out


def _is_fo(t) -> bool:
    return isinstance(t, (Var, TopVar, IntLit, BinOp, Ctor))


def relevant_closures(p, u: Universe, cap: int = CLOSURE_CAP, max_depth: int = MAX_RELEVANT_DEPTH) -> set:
    return Explorer(p, u, cap, max_depth).run()
