"""Finite-model semantics of goal terms, the one-step consequence operator and
least fixed points.

Terms are compiled once into Python closures over a mutable environment
dict.  Existential quantifiers over base sorts try to compute a small
candidate set for the bound variable from the body (equalities,
destructuring of known closures, lookups in already-computed relations)
and fall back to enumerating the carrier.  Candidate sets are always
supersets of the witnesses, so the result equals the max over the frame.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Optional

from ..core import (
    AND, BOOL, CLOSR, App, Arrow, Base, BinOp, Cmp, Constraint, Ctor, Exists, IntLit,
    Lambda, LogConst, TopVar, Var, arity, as_logic, domains, exists_many,
    free_vars, sort_order, spine, strip_lambdas, subterms,
)
from ..errors import Explosion, InternalError
from .universe import Universe
from .values import Closure, Func, Rel, apply_value, join, leq, value_sort

DEFAULT_CAP = 10 ** 6
_MISSING = object()
_MEMO_LIMIT = 100_000


def problem_is_first_order(env) -> bool:
    return all(sort_order(s) <= 2 for _, s in env.items())


class Semantics:
    """Interpreter over one universe.

    ``monotone`` selects monotone frames (otherwise full function spaces).
    ``sparse`` represents top-level relations as ``Rel`` tuple sets, which
    is only valid when every top-level sort is first-order.
    """

    def __init__(self, universe: Universe, monotone: bool = True, sparse: bool = False,
                 cap: int = DEFAULT_CAP):
        self.u = universe
        self.monotone = monotone
        self.sparse = sparse
        self.cap = cap
        self._frames = {}
        self._sets = {}
        self._code = {}
        self._gens = {}
        self._plans = {}
        self._constant = {}

    # frames ---------------------------------------------------------------

    def frame(self, s) -> tuple:
        got = self._frames.get(s)
        if got is not None:
            return got
        if isinstance(s, Base):
            got = tuple(self.u.carrier(s))
        else:
            dom, cod = self.frame(s.dom), self.frame(s.cod)
            got = tuple(self._monotone_maps(s, dom, cod) if self.monotone else self._all_maps(s, dom, cod))
        self._frames[s] = got
        return got

    def carrier_set(self, s) -> frozenset:
        got = self._sets.get(s)
        if got is None:
            got = self._sets[s] = frozenset(self.frame(s))
        return got

    def _all_maps(self, s, dom, cod):
        if len(cod) ** len(dom) > self.cap:
            raise Explosion(f"full frame of {s} has {len(cod)}^{len(dom)} elements")
        return [Func(s, dom, vals) for vals in product(cod, repeat=len(dom))]

    def _monotone_maps(self, s, dom, cod):
        below = [[j for j in range(len(dom)) if j != i and leq(s.dom, dom[j], dom[i])] for i in range(len(dom))]
        order = sorted(range(len(dom)), key=lambda i: len(below[i]))
        cod_leq = [[leq(s.cod, a, b) for b in cod] for a in cod]
        if len(cod) ** len(dom) > self.cap and _lower_bound_exceeds(below, cod_leq, self.cap):
            raise Explosion(f"monotone frame of {s} exceeds {self.cap} elements")
        assign = [0] * len(dom)
        out = []

        def rec(pos):
            if pos == len(order):
                out.append(Func(s, dom, [cod[a] for a in assign]))
                if len(out) > self.cap:
                    raise Explosion(f"monotone frame of {s} exceeds {self.cap} elements")
                return
            i = order[pos]
            preds = below[i]
            for c in range(len(cod)):
                if all(cod_leq[assign[j]][c] for j in preds):
                    assign[i] = c
                    rec(pos + 1)

        rec(0)
        return out

    def bottom(self, s):
        if s == BOOL:
            return 0
        if self.sparse:
            return Rel(domains(s))
        return Func(s, self.frame(s.dom), [self.bottom(s.cod)] * len(self.frame(s.dom)))

    def top(self, s):
        if s == BOOL:
            return 1
        if self.sparse:
            doms = domains(s)
            return Rel(doms, product(*(self.frame(d) for d in doms)))
        return Func(s, self.frame(s.dom), [self.top(s.cod)] * len(self.frame(s.dom)))

    def height(self, s) -> int:
        """Length of the longest strict chain in the frame of ``s``."""
        if s == BOOL:
            return 1
        if isinstance(s, Base):
            return 0
        return len(self.frame(s.dom)) * self.height(s.cod)

    # compilation ----------------------------------------------------------

    def compile(self, t):
        hit = self._code.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        fn = self._compile(t)
        self._code[id(t)] = (t, fn)
        return fn

    def compile_fo(self, t):
        if isinstance(t, IntLit):
            v = self.u.wrap(t.value)
            return lambda e: v
        if isinstance(t, (Var, TopVar)):
            name = t.name
            return lambda e: e[name]
        if isinstance(t, BinOp):
            l, r = self.compile_fo(t.left), self.compile_fo(t.right)
            lo, n = self.u.lo, len(self.u.ints)
            if t.op == "+":
                return lambda e: lo + (l(e) + r(e) - lo) % n
            return lambda e: lo + (l(e) - r(e) - lo) % n
        if isinstance(t, Cmp):
            l, r = self.compile_fo(t.left), self.compile_fo(t.right)
            op = t.op
            if op == "=":
                return lambda e: 1 if l(e) == r(e) else 0
            if op == "<":
                return lambda e: 1 if l(e) < r(e) else 0
            if op == "<=":
                return lambda e: 1 if l(e) <= r(e) else 0
            if op == ">":
                return lambda e: 1 if l(e) > r(e) else 0
            return lambda e: 1 if l(e) >= r(e) else 0
        if isinstance(t, Ctor):
            rel = t.rel
            fs = [self.compile_fo(a) for a in t.args]
            return lambda e: Closure(rel, [f(e) for f in fs])
        raise InternalError(f"not a constraint term: {t!r}")

    def _compile(self, t):
        if isinstance(t, (Var, TopVar)):
            name = t.name
            return lambda e: e[name]
        if isinstance(t, Constraint):
            return self.compile_fo(t.atom)
        if isinstance(t, Exists):
            return self._compile_exists(t)
        if isinstance(t, Lambda):
            return self._compile_lambda(t)
        if isinstance(t, App):
            logic = as_logic(t)
            if logic is not None:
                a, b = self.compile(logic[1]), self.compile(logic[2])
                if logic[0] == AND:
                    return lambda e: a(e) and b(e)
                return lambda e: a(e) or b(e)
            h, args = spine(t)
            fh = self.compile(h)
            fa = [self.compile(a) for a in args]
            if len(fa) == 1:
                f0 = fa[0]
                return lambda e: apply_value(fh(e), (f0(e),))
            return lambda e: apply_value(fh(e), [f(e) for f in fa])
        if isinstance(t, LogConst):
            raise InternalError("unapplied logical connective")
        raise InternalError(f"cannot evaluate {type(t).__name__}")

    def _compile_exists(self, t: Exists):
        x, s = t.var, t.sort
        body = self.compile(t.body)
        gen = self.compile_gen(x, t.body) if isinstance(s, Base) else None
        fvs = tuple(sorted(free_vars(t)))
        memo = {}

        def run(e):
            # the value depends only on the free variables; nested chains of
            # quantifiers would otherwise re-evaluate inner ones per candidate
            key = tuple([e.get(n, _MISSING) for n in fvs])
            hit = memo.get(key)
            if hit is None:
                if len(memo) > _MEMO_LIMIT:
                    memo.clear()
                hit = memo[key] = search(e)
            return hit

        def search(e):
            cands = _try_gen(gen, e)
            old = e.get(x, _MISSING)
            try:
                if cands is None:
                    for c in self.frame(s):
                        e[x] = c
                        if body(e):
                            return 1
                else:
                    allowed = self.carrier_set(s)
                    for c in cands:
                        if c in allowed:
                            e[x] = c
                            if body(e):
                                return 1
                return 0
            finally:
                _restore(e, x, old)

        return run

    def _compile_lambda(self, t: Lambda):
        binders, body_t = strip_lambdas(t)
        body = self.compile(body_t)
        frame = self.frame

        def build(e, i):
            if i == len(binders):
                return body(e)
            name, s = binders[i]
            dom = frame(s)
            old = e.get(name, _MISSING)
            vals = []
            for d in dom:
                e[name] = d
                vals.append(build(e, i + 1))
            _restore(e, name, old)
            return Func(Arrow(s, value_sort(vals[0])), dom, vals)

        return lambda e: build(e, 0)

    # candidate generation ---------------------------------------------------

    def compile_gen(self, x: str, t):
        """A function from environments to a superset of the values of ``x``
        that can make ``t`` true, or None when no such bound is known."""
        key = (x, id(t))
        hit = self._gens.get(key)
        if hit is not None and hit[0] is t:
            return hit[1]
        g = self._gen(x, t)
        self._gens[key] = (t, g)
        return g

    def _gen(self, x, t):
        if isinstance(t, Constraint) and isinstance(t.atom, Cmp) and t.atom.op == "=":
            l, r = t.atom.left, t.atom.right
            for a, b in ((l, r), (r, l)):
                if a == Var(x) and x not in free_vars(b):
                    fb = self.compile_fo(b)
                    return lambda e: (fb(e),)
            for known, pat in ((l, r), (r, l)):
                if isinstance(pat, Ctor) and Var(x) in pat.args and x not in free_vars(known):
                    i = pat.args.index(Var(x))
                    fk, rel, k = self.compile_fo(known), pat.rel, len(pat.args)

                    def destruct(e, fk=fk, rel=rel, k=k, i=i):
                        c = fk(e)
                        if isinstance(c, Closure) and c.rel == rel and len(c.args) == k:
                            return (c.args[i],)
                        return ()
                    return destruct
            return None
        logic = as_logic(t)
        if logic is not None:
            ga, gb = self.compile_gen(x, logic[1]), self.compile_gen(x, logic[2])
            if logic[0] == AND:
                return ga if ga is not None else gb
            if ga is None or gb is None:
                return None

            def union(e):
                ra = ga(e)
                if ra is None:
                    return None
                rb = gb(e)
                if rb is None:
                    return None
                return set(ra) | set(rb)
            return union
        if isinstance(t, Exists):
            if not isinstance(t.sort, Base) or t.var == x:
                return None
            inner = self.compile_gen(x, t.body)
            if inner is None:
                return None
            w, ws = t.var, t.sort
            wg = self.compile_gen(w, t.body)
            fvs = tuple(sorted(free_vars(t) - {x}))
            memo = {}

            def nested(e):
                key = tuple([e.get(n, _MISSING) for n in fvs])
                if key in memo:
                    return memo[key]
                if len(memo) > _MEMO_LIMIT:
                    memo.clear()
                memo[key] = r = search(e)
                return r

            def search(e):
                if ws != CLOSR:
                    old = e.pop(w, _MISSING)
                    try:
                        # a bound that does not read w holds for every w
                        direct = _try_gen(inner, e)
                    finally:
                        _restore(e, w, old)
                    if direct is not None:
                        return direct
                cands = _try_gen(wg, e)
                if cands is None:
                    cands = self.frame(ws)
                else:
                    allowed = self.carrier_set(ws)
                    cands = [c for c in cands if c in allowed]
                out = set()
                old = e.get(w, _MISSING)
                try:
                    for c in cands:
                        e[w] = c
                        r = _try_gen(inner, e)
                        if r is None:
                            return None
                        out.update(r)
                finally:
                    _restore(e, w, old)
                return out
            return nested
        if isinstance(t, App):
            h, args = spine(t)
            if not isinstance(h, (Var, TopVar)) or h.name == x:
                return None
            pos = [i for i, a in enumerate(args) if a == Var(x)]
            if not pos:
                return None
            i = pos[0]
            others = tuple(j for j in range(len(args)) if j != i)
            if any(x in free_vars(args[j]) for j in others):
                return None
            fo = [self.compile(args[j]) for j in others]
            name, n = h.name, len(args)

            def lookup(e):
                r = e.get(name)
                if isinstance(r, Rel) and len(r.sorts) == n:
                    return r.index(others, i).get(tuple(f(e) for f in fo), ())
                return None
            return lookup
        return None

    # evaluation -----------------------------------------------------------

    def eval(self, t, v: Mapping):
        return self.compile(t)(dict(v))

    def relation_value(self, name, s, bodies, v: Mapping):
        if not bodies:
            return self.bottom(s)
        if self.sparse:
            true = set()
            for b in bodies:
                true |= self._cached_table(b, v, s)
            return Rel(domains(s), true)
        e = dict(v)
        out = None
        for b in bodies:
            val = self.compile(b)(e)
            out = val if out is None else join(s, out, val)
        return out

    def _plan(self, body):
        hit = self._plans.get(id(body))
        if hit is not None and hit[0] is body:
            return hit[1]
        binders, f = strip_lambdas(body)
        gens = []
        for j, (name, s) in enumerate(binders):
            ctx = exists_many(binders[j + 1:], f)
            gens.append((name, s, self.compile_gen(name, ctx) if isinstance(s, Base) else None, ctx))
        plan = (gens, self.compile(f))
        self._plans[id(body)] = (body, plan)
        return plan

    def _cached_table(self, body, v, s) -> set:
        # bodies that mention no top-level relation do not depend on v
        hit = self._constant.get(id(body))
        if hit is not None and hit[0] is body:
            return hit[1]
        table = self._table(body, v, s)
        if not any(isinstance(u, TopVar) for u in subterms(body)):
            self._constant[id(body)] = (body, table)
        return table

    def _table(self, body, v, s) -> set:
        gens, f = self._plan(body)
        rest_sorts = domains(s)[len(gens):]
        e = dict(v)
        out = set()
        acc = []

        def rec(j):
            if j == len(gens):
                val = f(e)
                if rest_sorts:
                    out.update(tuple(acc) + t for t in _true_tuples(val, rest_sorts))
                elif val:
                    out.add(tuple(acc))
                return
            name, srt, gen, _ = gens[j]
            cands = _try_gen(gen, e)
            if cands is None:
                cands = self.frame(srt)
            else:
                allowed = self.carrier_set(srt)
                cands = [c for c in set(cands) if c in allowed]
            old = e.get(name, _MISSING)
            for c in cands:
                e[name] = c
                acc.append(c)
                rec(j + 1)
                acc.pop()
            _restore(e, name, old)

        rec(0)
        return out

    def one_step(self, program, env, v: Mapping) -> dict:
        bodies = {}
        for eq in program:
            bodies.setdefault(eq.name, []).append(eq.body)
        return {name: self.relation_value(name, s, bodies.get(name, []), v) for name, s in env.items()}

    def bottom_valuation(self, env) -> dict:
        return {name: self.bottom(s) for name, s in env.items()}

    def lfp(self, program, env, max_iter: Optional[int] = None):
        """Kleene iteration from the bottom valuation.  Returns the fixed point
        and the number of strictly increasing steps taken."""
        v = self.bottom_valuation(env)
        steps = 0
        while True:
            nv = self.one_step(program, env, v)
            if nv == v:
                return v, steps
            v = nv
            steps += 1
            if max_iter is not None and steps > max_iter:
                raise Explosion(f"no fixed point after {max_iter} iterations")

    def lattice_height(self, env) -> int:
        return sum(self.height(s) for _, s in env.items())


def _lower_bound_exceeds(below, cod_leq, cap) -> bool:
    """Cheap test that there are more than ``cap`` monotone maps.

    Elements with equally many strict predecessors are pairwise incomparable.
    If the codomain has a least and a greatest element, every 0/1 choice on
    such an antichain extends to a distinct monotone map (an up-set indicator).
    """
    n = len(cod_leq)
    if all(not b for b in below):
        return n ** len(below) > cap
    has_bottom = any(all(row) for row in cod_leq)
    has_top = any(all(cod_leq[i][j] for i in range(n)) for j in range(n))
    if n < 2 or not (has_bottom and has_top):
        return False
    levels = {}
    for b in below:
        levels[len(b)] = levels.get(len(b), 0) + 1
    return 2 ** max(levels.values()) > cap


def _try_gen(gen, e):
    # a generator that needs a not-yet-bound variable gives no bound
    if gen is None:
        return None
    try:
        return gen(e)
    except KeyError:
        return None


def _restore(e, name, old):
    if old is _MISSING:
        e.pop(name, None)
    else:
        e[name] = old


def _true_tuples(val, sorts):
    if isinstance(val, Rel):
        return val.true
    if isinstance(val, Func):
        return [(k,) + t for k, sub in val.items() for t in _true_tuples(sub, sorts[1:])]
    return [()] if val else []


def valuation_leq(env, a: Mapping, b: Mapping) -> bool:
    return all(leq(s, a[n], b[n]) for n, s in env.items())


def semantics_for(p, universe: Universe, monotone: bool = True, cap: int = DEFAULT_CAP) -> Semantics:
    return Semantics(universe, monotone=monotone, sparse=problem_is_first_order(p.env), cap=cap)
