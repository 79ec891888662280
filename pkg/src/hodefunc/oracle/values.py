"""Semantic values: base values, explicit finite functions, sparse relations
and closures."""

from __future__ import annotations

from itertools import product
from typing import Optional, Sequence

from ..core import BOOL, Arrow, Base, arrow, sort_str
from ..errors import SortMismatch


class Closure:
    """The closure ``(rel, t1, ..., tk)``; structurally compared."""

    __slots__ = ("rel", "args", "_hash", "depth")

    def __init__(self, rel: str, args: Sequence = ()):
        self.rel = rel
        self.args = tuple(args)
        self._hash = hash((rel, self.args))
        inner = [a.depth for a in self.args if isinstance(a, Closure)]
        self.depth = 1 + max(inner) if inner else 0

    def __eq__(self, other):
        return isinstance(other, Closure) and self._hash == other._hash \
            and self.rel == other.rel and self.args == other.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "(" + ", ".join([self.rel] + [repr(a) for a in self.args]) + ")"

    def append(self, value) -> "Closure":
        return Closure(self.rel, self.args + (value,))


def closure_key(c: Closure):
    return (c.depth, c.rel, len(c.args), repr(c.args))


class Func:
    """A total function given by its graph over an enumerated domain."""

    __slots__ = ("sort", "keys", "vals", "_map", "_hash")

    def __init__(self, sort: Arrow, keys: tuple, vals: Sequence):
        self.sort = sort
        self.keys = keys
        self.vals = tuple(vals)
        self._map = None
        self._hash = hash((sort, self.vals))

    def __call__(self, arg):
        m = self._map
        if m is None:
            m = self._map = dict(zip(self.keys, self.vals))
        try:
            return m[arg]
        except KeyError:
            raise SortMismatch(f"{arg!r} is outside the domain of a function of sort {sort_str(self.sort)}") from None

    def items(self):
        return zip(self.keys, self.vals)

    def __eq__(self, other):
        return isinstance(other, Func) and self._hash == other._hash and self.sort == other.sort \
            and self.vals == other.vals and (self.keys is other.keys or self.keys == other.keys)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if len(self.keys) <= 6:
            inner = ", ".join(f"{k!r}->{v!r}" for k, v in self.items())
            return "{" + inner + "}"
        return f"<Func {sort_str(self.sort)} |{len(self.keys)}|>"


class Rel:
    """A first-order relation: the set of argument tuples mapped to 1."""

    __slots__ = ("sorts", "true", "_hash", "_index")

    def __init__(self, sorts: Sequence, true=()):
        self.sorts = tuple(sorts)
        self.true = frozenset(true)
        self._hash = hash((self.sorts, self.true))
        self._index = {}

    @property
    def sort(self):
        return arrow(*self.sorts, BOOL)

    def __eq__(self, other):
        return isinstance(other, Rel) and self._hash == other._hash \
            and self.sorts == other.sorts and self.true == other.true

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Rel({sorted(map(repr, self.true))})"

    def holds(self, args: tuple) -> int:
        return 1 if args in self.true else 0

    def index(self, known: tuple, target: int) -> dict:
        """Map from the values at positions ``known`` to values at ``target``."""
        key = (known, target)
        idx = self._index.get(key)
        if idx is None:
            idx = {}
            for t in self.true:
                idx.setdefault(tuple(t[i] for i in known), []).append(t[target])
            self._index[key] = idx
        return idx

    def section(self, prefix: tuple) -> "Rel":
        n = len(prefix)
        return Rel(self.sorts[n:], (t[n:] for t in self.true if t[:n] == prefix))


def value_sort(v):
    """Sort of a value produced by an abstraction body (base results are o)."""
    if isinstance(v, (Func, Rel)):
        return v.sort
    if isinstance(v, Closure):
        return Base("closr")
    return BOOL


def apply_value(v, args: Sequence):
    for i, a in enumerate(args):
        if isinstance(v, Func):
            v = v(a)
        elif isinstance(v, Rel):
            rest = tuple(args[i:])
            if len(rest) == len(v.sorts):
                return v.holds(rest)
            if len(rest) > len(v.sorts):
                raise SortMismatch("relation applied to too many arguments")
            return v.section(rest)
        else:
            raise SortMismatch(f"cannot apply base value {v!r}")
    return v


def leq(sort, a, b) -> bool:
    """The pointwise order; o is 0 <= 1, other base sorts are discrete."""
    if isinstance(sort, Base):
        return a <= b if sort == BOOL else a == b
    if isinstance(a, Rel) and isinstance(b, Rel):
        return a.true <= b.true
    if isinstance(a, Func) and isinstance(b, Func):
        cod = sort.cod
        if a.keys is b.keys or a.keys == b.keys:
            return all(leq(cod, x, y) for x, y in zip(a.vals, b.vals))
        return all(leq(cod, a(k), b(k)) for k in a.keys)
    raise SortMismatch("incomparable values")


def join(sort, a, b):
    if isinstance(sort, Base):
        return max(a, b)
    if isinstance(a, Rel):
        return Rel(a.sorts, a.true | b.true)
    return Func(a.sort, a.keys, [join(sort.cod, x, b(k)) for k, x in a.items()])


def is_monotone(f, sort=None) -> bool:
    """Whether ``f`` preserves the order in every argument.

    For relations this is checked tuple by tuple: raising an o-sorted
    argument from 0 to 1 must keep the tuple true.  For explicit functions
    it is checked one argument at a time, which is equivalent to the
    flattened product-order condition.
    """
    if isinstance(f, Rel):
        bool_pos = [i for i, s in enumerate(f.sorts) if s == BOOL]
        for t in f.true:
            for i in bool_pos:
                if t[i] == 0 and (t[:i] + (1,) + t[i + 1:]) not in f.true:
                    return False
        return True
    if not isinstance(f, Func):
        return True
    sort = sort or f.sort
    dom, cod = sort.dom, sort.cod
    keys = list(f.keys)
    for i, d in enumerate(keys):
        for d2 in keys:
            if d2 is not d and d2 != d and leq(dom, d, d2) and not leq(cod, f(d), f(d2)):
                return False
    if isinstance(cod, Arrow):
        return all(is_monotone(v, cod) for v in f.vals)
    return True
