"""Finite carriers for the base sorts."""

from __future__ import annotations

import re
from typing import Iterable, Optional

from ..core import BOOL, Base


class Universe:
    """Carriers: ``int`` is a finite range, ``o`` is {0 <= 1}, ``closr`` is
    an explicit set of closures (only needed for target problems).

    Arithmetic and out-of-range literals wrap around the int range, which
    keeps the constraint language total on the finite carrier.
    """

    def __init__(self, ints: Iterable[int] = range(0, 5), closures: Optional[Iterable] = None):
        self.ints = tuple(ints)
        if not self.ints:
            raise ValueError("the int carrier must be non-empty")
        self.lo = self.ints[0]
        self.closures = None if closures is None else tuple(closures)

    @classmethod
    def from_range(cls, spec: str) -> "Universe":
        m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", spec)
        if not m or int(m.group(1)) > int(m.group(2)):
            raise ValueError(f"bad int range {spec!r}, expected a..b with a <= b")
        return cls(range(int(m.group(1)), int(m.group(2)) + 1))

    def with_closures(self, closures: Iterable) -> "Universe":
        return Universe(self.ints, closures)

    def carrier(self, sort) -> tuple:
        if sort == BOOL:
            return (0, 1)
        if isinstance(sort, Base) and sort.name == "int":
            return self.ints
        if isinstance(sort, Base) and sort.name == "closr":
            if self.closures is None:
                raise ValueError("no closure carrier configured")
            return self.closures
        raise ValueError(f"no carrier for {sort!r}")

    def wrap(self, n: int) -> int:
        return self.lo + (n - self.lo) % len(self.ints)

    def __repr__(self):
        extra = "" if self.closures is None else f", |closr|={len(self.closures)}"
        return f"Universe({self.ints[0]}..{self.ints[-1]}{extra})"
