"""Minimal SMT-LIB2 s-expression reader, used to validate emitted documents."""

from __future__ import annotations

import re

_TOK = re.compile(r'\s+|;[^\n]*|\(|\)|\|[^|]*\||"(?:[^"]|"")*"|[^\s()|";]+')


class SExprError(ValueError):
    pass


class Symbol(str):
    """An atom; quoted symbols keep their bars stripped."""


def tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if m is None:
            raise SExprError(f"bad character at offset {pos}: {text[pos]!r}")
        tok = m.group()
        pos = m.end()
        if tok.isspace() or tok.startswith(";"):
            continue
        out.append(tok)
    return out


def parse_all(text: str) -> list:
    """All top-level s-expressions; lists become Python lists."""
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SExprError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif tok.startswith("|"):
            stack[-1].append(Symbol(tok[1:-1]))
        else:
            stack[-1].append(Symbol(tok))
    if len(stack) != 1:
        raise SExprError("unbalanced '('")
    return stack[0]
