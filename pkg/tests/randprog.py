"""Random well-sorted monotone problems, emitted as source text.

The generator is type-directed: every relation gets a sort first, then each
body is built from terms of the required sort.  It only needs ``choice``,
``randint`` and ``random`` from its rng, so it works with ``random.Random``
and with hypothesis' ``st.randoms()``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from hodefunc.core import BOOL, INT, Arrow, arrow, domains, sort_order, sort_str

INT_O = arrow(INT, BOOL)
BOOL_O = arrow(BOOL, BOOL)
INT2_O = arrow(INT, INT, BOOL)


@dataclass
class GenConfig:
    relations: tuple = (1, 3)
    params: tuple = (1, 3)
    depth: int = 2
    literals: tuple = (0, 2)
    higher_order: bool = True      # parameters of arrow sort
    binary_params: bool = True     # allow int -> int -> bool parameters
    lambdas: bool = True
    ho_exists: bool = True
    max_ho_params: int = 1


TINY = GenConfig(relations=(1, 2), params=(1, 2), depth=2, literals=(0, 1),
                 binary_params=False, max_ho_params=1)
FIRST_ORDER = GenConfig(higher_order=False, lambdas=False, ho_exists=False)


class ProblemGen:
    def __init__(self, rng, cfg: GenConfig = GenConfig()):
        self.rng = rng
        self.cfg = cfg
        self.counter = 0
        self.top = {}

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def weighted(self, pairs):
        total = sum(w for _, w in pairs)
        x = self.rng.random() * total
        for item, w in pairs:
            x -= w
            if x < 0:
                return item
        return pairs[-1][0]

    # sorts ------------------------------------------------------------------

    def param_sort(self, ho_left: int):
        pairs = [(INT, 6), (BOOL, 2)]
        if self.cfg.higher_order and ho_left > 0:
            pairs += [(INT_O, 3), (BOOL_O, 1)]
            if self.cfg.binary_params:
                pairs.append((INT2_O, 1))
        return self.weighted(pairs)

    def relation_sort(self):
        n = self.rng.randint(*self.cfg.params)
        ho_left = self.cfg.max_ho_params
        doms = []
        for _ in range(n):
            s = self.param_sort(ho_left)
            if isinstance(s, Arrow):
                ho_left -= 1
            doms.append(s)
        return arrow(*doms, BOOL)

    # terms ------------------------------------------------------------------

    def int_term(self, ctx) -> str:
        ints = [n for n, s in ctx.items() if s == INT]
        lo, hi = self.cfg.literals
        r = self.rng.random()
        if ints and r < 0.6:
            v = self.rng.choice(ints)
            return f"{v} + 1" if self.rng.random() < 0.2 else v
        return str(self.rng.randint(lo, hi))

    def constraint(self, ctx) -> str:
        op = self.weighted([("=", 4), ("<=", 2), ("<", 1), (">", 1), (">=", 1)])
        return f"{self.int_term(ctx)} {op} {self.int_term(ctx)}"

    def formula(self, ctx, d) -> str:
        opts = [("cmp", 2)]
        if any(s == BOOL for s in ctx.values()):
            opts.append(("bvar", 1))
        if d > 0:
            opts += [("and", 2), ("or", 2), ("exists", 1.5), ("app", 5)]
            if self.cfg.ho_exists and self.cfg.higher_order:
                opts.append(("hoex", 0.5))
        kind = self.weighted(opts)
        if kind == "cmp":
            return self.constraint(ctx)
        if kind == "bvar":
            return self.rng.choice([n for n, s in ctx.items() if s == BOOL])
        if kind in ("and", "or"):
            op = "&&" if kind == "and" else "||"
            return f"({self.formula(ctx, d - 1)}) {op} ({self.formula(ctx, d - 1)})"
        if kind == "exists":
            v = self.fresh()
            s = self.weighted([(INT, 3), (BOOL, 1)])
            body = self.formula({**ctx, v: s}, d - 1)
            return f"E {v}: {sort_str(s)}. {body}"
        if kind == "hoex":
            v = self.fresh()
            s = self.weighted([(INT_O, 3), (BOOL_O, 1)])
            inner = {**ctx, v: s}
            return f"E {v}: {sort_str(s)}. ({self.app(inner, d - 1, prefer=v) or self.constraint(inner)})"
        return self.app(ctx, d) or self.constraint(ctx)

    def relations_in_scope(self, ctx):
        out = [(n, s) for n, s in self.top.items()]
        out += [(n, s) for n, s in ctx.items() if isinstance(s, Arrow)]
        return out

    def app(self, ctx, d, prefer=None):
        rels = self.relations_in_scope(ctx)
        if not rels:
            return None
        if prefer is not None and self.rng.random() < 0.8:
            name, s = prefer, ctx[prefer]
        else:
            name, s = self.rng.choice(rels)
        args = []
        for dom in domains(s):
            a = self.arg(dom, ctx, d - 1)
            if a is None:
                return None
            args.append(a)
        return " ".join([name] + [f"({a})" for a in args])

    def arg(self, s, ctx, d):
        if s == INT:
            return self.int_term(ctx)
        if s == BOOL:
            return self.formula(ctx, max(d, 0))
        return self.rel_term(s, ctx, d)

    def rel_term(self, s, ctx, d):
        opts = []
        local = [n for n, t in ctx.items() if t == s]
        top = [n for n, t in self.top.items() if t == s]
        partial = []
        for n, t in self.top.items():
            doms = domains(t)
            for k in range(1, len(doms)):
                if arrow(*doms[k:], BOOL) == s:
                    partial.append((n, doms[:k]))
        if local:
            opts.append(("local", 3))
        if top:
            opts.append(("top", 3))
        if partial:
            opts.append(("partial", 3))
        if self.cfg.lambdas:
            opts.append(("lambda", 2))
        if not opts:
            return None
        kind = self.weighted(opts)
        if kind == "local":
            return self.rng.choice(local)
        if kind == "top":
            return self.rng.choice(top)
        if kind == "partial":
            n, doms = self.rng.choice(partial)
            args = []
            for dom in doms:
                a = self.arg(dom, ctx, d - 1)
                if a is None:
                    return None
                args.append(f"({a})")
            return " ".join([n] + args)
        binders = [(self.fresh(), dom) for dom in domains(s)]
        inner = {**ctx, **dict(binders)}
        body = self.formula(inner, max(d - 1, 0))
        return "".join(f"\\{v}: {sort_str(t)}. " for v, t in binders) + body

    # problems -----------------------------------------------------------------

    def problem(self) -> str:
        n = self.rng.randint(*self.cfg.relations)
        self.top = {f"r{i}": self.relation_sort() for i in range(n)}
        lines = ["environment"]
        lines += [f"{n}: {sort_str(s)}" for n, s in self.top.items()]
        lines.append("")
        lines.append("program")
        for name, s in self.top.items():
            binders = [(self.fresh(), dom) for dom in domains(s)]
            body = self.formula(dict(binders), self.cfg.depth)
            lam = "".join(f"\\{v}: {sort_str(t)}. " for v, t in binders)
            lines.append(f"{name} := {lam}{body};")
        lines.append("")
        lines.append("goal")
        lines.append(self.goal())
        return "\n".join(lines) + "\n"

    def goal(self) -> str:
        ctx = {}
        prefix = []
        for _ in range(self.rng.randint(0, 2)):
            v = self.fresh()
            ctx[v] = INT
            prefix.append(f"E {v}: int. ")
        body = self.app(ctx, self.cfg.depth) or self.formula(ctx, self.cfg.depth)
        if self.rng.random() < 0.3:
            body = f"({body}) && ({self.formula(ctx, 1)})"
        return "".join(prefix) + body


def random_problem_text(rng, cfg: GenConfig = GenConfig()) -> str:
    return ProblemGen(rng, cfg).problem()


def random_problem(rng, cfg: GenConfig = GenConfig()):
    from hodefunc.frontend import parse_problem
    from hodefunc.sortcheck import check_problem

    p = parse_problem(random_problem_text(rng, cfg))
    check_problem(p)
    return p


def problem_order(p) -> int:
    return max((sort_order(s) for _, s in p.env.items()), default=0)


def seeded(seed: int) -> random.Random:
    return random.Random(seed)
