"""Sorts, goal terms, programs and problems.

Every node is an immutable dataclass.  Source spans are carried in a
``span`` field that takes no part in equality or hashing, so two terms that
differ only in where they were parsed compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import CaptureRisk, DuplicateEquation


@dataclass(frozen=True)
class Span:
    line: int
    column: int


def _span():
    return field(default=None, compare=False, hash=False, repr=False)


# ---------------------------------------------------------------------------
# sorts

@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return sort_str(self)


@dataclass(frozen=True)
class Arrow:
    dom: "Sort"
    cod: "Sort"

    def __str__(self):
        return sort_str(self)


Sort = Union[Base, Arrow]

INT = Base("int")
BOOL = Base("o")
CLOSR = Base("closr")

SURFACE_NAMES = {"o": "bool"}


def arrow(*sorts: Sort) -> Sort:
    """``arrow(a, b, c)`` is ``a -> b -> c``."""
    result = sorts[-1]
    for s in reversed(sorts[:-1]):
        result = Arrow(s, result)
    return result


def sort_order(s: Sort) -> int:
    if isinstance(s, Base):
        return 1
    return max(sort_order(s.dom) + 1, sort_order(s.cod))


def arity(s: Sort) -> int:
    n = 0
    while isinstance(s, Arrow):
        n += 1
        s = s.cod
    return n


def domains(s: Sort) -> list[Sort]:
    out = []
    while isinstance(s, Arrow):
        out.append(s.dom)
        s = s.cod
    return out


def result_sort(s: Sort) -> Sort:
    while isinstance(s, Arrow):
        s = s.cod
    return s


def is_relational(s: Sort) -> bool:
    """o, b -> rho, or rho1 -> rho2."""
    if isinstance(s, Base):
        return s == BOOL
    return (isinstance(s.dom, Base) or is_relational(s.dom)) and is_relational(s.cod)


def sort_str(s: Sort) -> str:
    if isinstance(s, Base):
        return SURFACE_NAMES.get(s.name, s.name)
    dom = sort_str(s.dom)
    if isinstance(s.dom, Arrow):
        dom = f"({dom})"
    return f"{dom} -> {sort_str(s.cod)}"


# ---------------------------------------------------------------------------
# first-order terms

@dataclass(frozen=True)
class Var:
    """A variable.  Occurs both as a goal term and inside constraint atoms."""
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class IntLit:
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinOp:
    op: str  # "+" or "-"
    left: "FoTerm"
    right: "FoTerm"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Cmp:
    op: str  # "<", "<=", "=", ">", ">="
    left: "FoTerm"
    right: "FoTerm"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Ctor:
    """Closure constructor ``rel^k`` applied to its ``k`` arguments."""
    rel: str
    args: tuple = ()
    span: Optional[Span] = _span()

    @property
    def symbol(self) -> str:
        return ctor_symbol(self.rel, len(self.args))


FoTerm = Union[Var, IntLit, BinOp, Cmp, Ctor]

ARITH_OPS = ("+", "-")
CMP_OPS = ("<", "<=", "=", ">", ">=")


def ctor_symbol(rel: str, k: int) -> str:
    return f"{rel}^{k}"


def split_ctor_symbol(symbol: str) -> tuple[str, int]:
    rel, _, k = symbol.rpartition("^")
    return rel, int(k)


# ---------------------------------------------------------------------------
# goal terms

@dataclass(frozen=True)
class TopVar:
    name: str
    span: Optional[Span] = _span()


AND = "and"
OR = "or"


@dataclass(frozen=True)
class LogConst:
    op: str  # AND or OR
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "GoalTerm"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Lambda:
    var: str
    sort: Sort
    body: "GoalTerm"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App:
    fun: "GoalTerm"
    arg: "GoalTerm"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Constraint:
    atom: FoTerm
    span: Optional[Span] = _span()


GoalTerm = Union[Var, TopVar, LogConst, Exists, Lambda, App, Constraint]


def conj(a: GoalTerm, b: GoalTerm) -> GoalTerm:
    return App(App(LogConst(AND), a), b)


def disj(a: GoalTerm, b: GoalTerm) -> GoalTerm:
    return App(App(LogConst(OR), a), b)


def fold_disj(terms: Sequence[GoalTerm]) -> GoalTerm:
    out = terms[0]
    for t in terms[1:]:
        out = disj(out, t)
    return out


def eq(left: FoTerm, right: FoTerm) -> Constraint:
    return Constraint(Cmp("=", left, right))


def as_logic(t: GoalTerm) -> Optional[tuple[str, GoalTerm, GoalTerm]]:
    """``(op, a, b)`` when ``t`` is a fully applied connective."""
    if isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, LogConst):
        return t.fun.fun.op, t.fun.arg, t.arg
    return None


def spine(t: GoalTerm) -> tuple[GoalTerm, list[GoalTerm]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def apply_spine(head: GoalTerm, args: Iterable[GoalTerm]) -> GoalTerm:
    for a in args:
        head = App(head, a)
    return head


def head(t: GoalTerm) -> GoalTerm:
    while isinstance(t, App):
        t = t.fun
    return t


def lambdas(binders: Sequence[tuple[str, Sort]], body: GoalTerm) -> GoalTerm:
    for name, s in reversed(binders):
        body = Lambda(name, s, body)
    return body


def exists_many(binders: Sequence[tuple[str, Sort]], body: GoalTerm) -> GoalTerm:
    for name, s in reversed(binders):
        body = Exists(name, s, body)
    return body


def strip_lambdas(t: GoalTerm) -> tuple[list[tuple[str, Sort]], GoalTerm]:
    binders = []
    while isinstance(t, Lambda):
        binders.append((t.var, t.sort))
        t = t.body
    return binders, t


def _children(t) -> tuple:
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, (Exists, Lambda)):
        return (t.body,)
    if isinstance(t, Constraint):
        return (t.atom,)
    if isinstance(t, (BinOp, Cmp)):
        return (t.left, t.right)
    if isinstance(t, Ctor):
        return t.args
    return ()


def subterms(t) -> Iterator:
    """Pre-order walk over goal terms and the constraint material inside."""
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(_children(cur)))


def free_vars_ordered(t) -> list[str]:
    """Free variable names (locals and top-level) in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(u, bound: frozenset):
        if isinstance(u, (Var, TopVar)):
            if u.name not in bound and u.name not in seen:
                seen[u.name] = None
        elif isinstance(u, (Exists, Lambda)):
            walk(u.body, bound | {u.var})
        else:
            for c in _children(u):
                walk(c, bound)

    walk(t, frozenset())
    return list(seen)


def free_vars(t) -> set[str]:
    return set(free_vars_ordered(t))


def bound_vars(t) -> set[str]:
    return {u.var for u in subterms(t) if isinstance(u, (Exists, Lambda))}


def names_in(t) -> set[str]:
    """Every identifier mentioned anywhere in ``t``."""
    out = set()
    for u in subterms(t):
        if isinstance(u, (Var, TopVar)):
            out.add(u.name)
        elif isinstance(u, (Exists, Lambda)):
            out.add(u.var)
        elif isinstance(u, Ctor):
            out.add(u.rel)
    return out


def replace_vars(t, mapping: Mapping[str, object]):
    """Simultaneously replace free ``Var`` occurrences by terms.

    Raises CaptureRisk if a replacement's free variable would be captured.
    """
    if not mapping:
        return t
    fv_of = {k: free_vars(v) for k, v in mapping.items()}

    def walk(u, bound: frozenset):
        if isinstance(u, Var):
            if u.name in mapping and u.name not in bound:
                clash = fv_of[u.name] & bound
                if clash:
                    raise CaptureRisk(f"{sorted(clash)[0]!r} would be captured")
                return mapping[u.name]
            return u
        if isinstance(u, (TopVar, LogConst, IntLit)):
            return u
        if isinstance(u, App):
            return App(walk(u.fun, bound), walk(u.arg, bound), span=u.span)
        if isinstance(u, Exists):
            return Exists(u.var, u.sort, walk(u.body, bound | {u.var}), span=u.span)
        if isinstance(u, Lambda):
            return Lambda(u.var, u.sort, walk(u.body, bound | {u.var}), span=u.span)
        if isinstance(u, Constraint):
            return Constraint(walk(u.atom, bound), span=u.span)
        if isinstance(u, BinOp):
            return BinOp(u.op, walk(u.left, bound), walk(u.right, bound), span=u.span)
        if isinstance(u, Cmp):
            return Cmp(u.op, walk(u.left, bound), walk(u.right, bound), span=u.span)
        if isinstance(u, Ctor):
            return Ctor(u.rel, tuple(walk(a, bound) for a in u.args), span=u.span)
        raise TypeError(f"not a term: {u!r}")

    return walk(t, frozenset())


def substitute(t, frm: str, to: str):
    """Rename free occurrences of ``frm`` to ``to``."""
    if to in bound_vars(t):
        raise CaptureRisk(f"{to!r} occurs bound in the term")
    return replace_vars(t, {frm: Var(to)})


def rename_bound(t, avoid: set[str], fresh) -> object:
    """Alpha-rename binders whose names are in ``avoid`` using ``fresh()``."""

    def walk(u, ren: dict):
        if isinstance(u, Var):
            return Var(ren[u.name], span=u.span) if u.name in ren else u
        if isinstance(u, (TopVar, LogConst, IntLit)):
            return u
        if isinstance(u, (Exists, Lambda)):
            name = u.var
            inner = ren
            if name in avoid:
                name = fresh()
                inner = {**ren, u.var: name}
            elif name in ren:
                inner = {k: v for k, v in ren.items() if k != name}
            return type(u)(name, u.sort, walk(u.body, inner), span=u.span)
        if isinstance(u, App):
            return App(walk(u.fun, ren), walk(u.arg, ren), span=u.span)
        if isinstance(u, Constraint):
            return Constraint(walk(u.atom, ren), span=u.span)
        if isinstance(u, (BinOp, Cmp)):
            return type(u)(u.op, walk(u.left, ren), walk(u.right, ren), span=u.span)
        if isinstance(u, Ctor):
            return Ctor(u.rel, tuple(walk(a, ren) for a in u.args), span=u.span)
        raise TypeError(f"not a term: {u!r}")

    return walk(t, {})


def resolve_top_vars(t, top: set[str]):
    """Turn free ``Var`` nodes naming top-level relations into ``TopVar``."""

    def walk(u, bound: frozenset):
        if isinstance(u, Var):
            if u.name in top and u.name not in bound:
                return TopVar(u.name, span=u.span)
            return u
        if isinstance(u, App):
            return App(walk(u.fun, bound), walk(u.arg, bound), span=u.span)
        if isinstance(u, (Exists, Lambda)):
            return type(u)(u.var, u.sort, walk(u.body, bound | {u.var}), span=u.span)
        # constraint material never holds relations
        return u

    return walk(t, frozenset())


# ---------------------------------------------------------------------------
# environments, programs, problems

class SortEnv:
    """Ordered, duplicate-free mapping from names to sorts."""

    __slots__ = ("_items", "_map")

    def __init__(self, items: Iterable[tuple[str, Sort]] = ()):
        self._items = tuple(items)
        self._map = dict(self._items)
        if len(self._map) != len(self._items):
            seen = set()
            for name, _ in self._items:
                if name in seen:
                    raise ValueError(f"{name!r} bound twice in sort environment")
                seen.add(name)

    def __contains__(self, name):
        return name in self._map

    def __getitem__(self, name) -> Sort:
        return self._map[name]

    def get(self, name, default=None):
        return self._map.get(name, default)

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._items)

    def items(self):
        return self._items

    def names(self) -> list[str]:
        return [n for n, _ in self._items]

    def extend(self, name: str, s: Sort) -> "SortEnv":
        return SortEnv(self._items + ((name, s),))

    def extend_many(self, pairs: Iterable[tuple[str, Sort]]) -> "SortEnv":
        return SortEnv(self._items + tuple(pairs))

    def __eq__(self, other):
        return isinstance(other, SortEnv) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        inner = ", ".join(f"{n}: {sort_str(s)}" for n, s in self._items)
        return f"SortEnv({inner})"


@dataclass(frozen=True)
class Signature:
    base_sorts: frozenset = frozenset({"int", "o"})
    constants: tuple = ()  # (symbol, Sort) pairs in declaration order

    def constant(self, symbol: str) -> Optional[Sort]:
        for name, s in self.constants:
            if name == symbol:
                return s
        return None

    def constructors(self) -> list[tuple[str, Sort]]:
        return [(n, s) for n, s in self.constants if "^" in n]


SOURCE_SIGNATURE = Signature()


@dataclass(frozen=True)
class Equation:
    name: str
    body: GoalTerm
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Problem:
    env: SortEnv
    program: tuple  # of Equation, in source order; names may repeat
    goal: GoalTerm
    signature: Signature = SOURCE_SIGNATURE

    def equations_for(self, name: str) -> list[Equation]:
        return [e for e in self.program if e.name == name]

    def definitions(self) -> dict[str, GoalTerm]:
        out: dict[str, GoalTerm] = {}
        for e in self.program:
            if e.name in out:
                raise DuplicateEquation(e.name)
            out[e.name] = e.body
        return out

    def identifiers(self) -> set[str]:
        out = set(self.env.names())
        for e in self.program:
            out.add(e.name)
            out |= names_in(e.body)
        out |= names_in(self.goal)
        for sym, _ in self.signature.constants:
            out.add(sym.split("^")[0])
        return out

    def replace(self, **changes) -> "Problem":
        return replace(self, **changes)
