"""Reader and printer for the native problem format.

A problem file has the sections ``environment``, ``program`` and ``goal``
(target problems also carry a ``signature`` section listing closure
constructors)::

    # comment
    environment
    add: int -> int -> int -> bool

    program
    add := \\x: int. \\y: int. \\z: int. x + y = z;

    goal
    E x: int. add 1 2 x
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    AND, ARITH_OPS, BOOL, CLOSR, CMP_OPS, INT, OR, App, Arrow, Base, BinOp, Cmp,
    Constraint, Ctor, Equation, Exists, IntLit, Lambda, LogConst, Problem,
    Signature, SortEnv, Span, TopVar, Var, as_logic, ctor_symbol, resolve_top_vars,
    sort_str, spine, split_ctor_symbol,
)
from .errors import ParseError

SECTIONS = ("signature", "environment", "program", "goal")
KEYWORDS = set(SECTIONS) | {"E"}
BASE_NAMES = {"int": INT, "bool": BOOL, "o": BOOL, "closr": CLOSR}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<op>:=|->|&&|\|\||<=|>=|[<>=+\-\\.:;()^])
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "op", "int", "ident", "eof"
    text: str
    line: int
    col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(source: str) -> list[Token]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            ch = source[pos]
            if ch == "∀":
                raise ParseError(line, col, "a goal term (universal quantification is not supported)", repr(ch))
            raise ParseError(line, col, "a token", repr(ch))
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, source: str, allow_closr: bool):
        self.toks = tokenize(source)
        self.i = 0
        self.allow_closr = allow_closr

    # -- token helpers -----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def fail(self, expected: str):
        t = self.tok
        raise ParseError(t.line, t.col, expected, t.describe())

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "an identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(what)
        self.i += 1
        return t

    def span(self) -> Span:
        return Span(self.tok.line, self.tok.col)

    def at_section(self) -> bool:
        return self.tok.kind == "ident" and self.tok.text in SECTIONS

    # -- problem -----------------------------------------------------------
    def problem(self) -> Problem:
        env, program, goal, constants = [], [], None, []
        seen = set()
        if self.tok.text == "signature":
            self.allow_closr = True
        while self.tok.kind != "eof":
            if not self.at_section():
                self.fail("a section keyword (" + ", ".join(SECTIONS) + ")")
            name = self.tok.text
            if name in seen:
                self.fail(f"at most one {name} section")
            seen.add(name)
            self.i += 1
            if name == "signature":
                while not self.at_section() and self.tok.kind != "eof":
                    constants.append(self.ctor_decl())
            elif name == "environment":
                while not self.at_section() and self.tok.kind != "eof":
                    t = self.ident("a relation name")
                    self.expect(":")
                    env.append((t.text, self.sort(), Span(t.line, t.col)))
            elif name == "program":
                while not self.at_section() and self.tok.kind != "eof":
                    t = self.ident("an equation name")
                    self.expect(":=")
                    body = self.term()
                    self.expect(";")
                    program.append(Equation(t.text, body, span=Span(t.line, t.col)))
            else:
                goal = self.term()
                if self.at(";"):
                    self.i += 1
                if self.tok.kind != "eof" and not self.at_section():
                    self.fail("end of goal")
        if goal is None:
            t = self.tok
            raise ParseError(t.line, t.col, "a goal section", t.describe())
        names = [n for n, _, _ in env]
        for k, (n, _, sp) in enumerate(env):
            if n in names[:k]:
                raise ParseError(sp.line, sp.column, "distinct relation names", repr(n))
        top = set(names)
        program = tuple(Equation(e.name, resolve_top_vars(e.body, top), span=e.span) for e in program)
        goal = resolve_top_vars(goal, top)
        sig = Signature()
        if "signature" in seen:
            consts = [("=_closr", Arrow(CLOSR, Arrow(CLOSR, BOOL)))] + constants
            sig = Signature(frozenset({"int", "o", "closr"}), tuple(consts))
        return Problem(SortEnv((n, s) for n, s, _ in env), program, goal, sig)

    def ctor_decl(self):
        rel = self.ident("a constructor name")
        self.expect("^")
        k = self.tok
        if k.kind != "int":
            self.fail("a constructor index")
        self.i += 1
        self.expect(":")
        return ctor_symbol(rel.text, int(k.text)), self.sort()

    # -- sorts -------------------------------------------------------------
    def sort(self):
        left = self.sort_atom()
        if self.at("->"):
            self.i += 1
            return Arrow(left, self.sort())
        return left

    def sort_atom(self):
        if self.at("("):
            self.i += 1
            s = self.sort()
            self.expect(")")
            return s
        t = self.tok
        if t.kind == "ident" and t.text in BASE_NAMES:
            if t.text == "closr" and not self.allow_closr:
                self.fail("a sort (closr is only available in target problems)")
            self.i += 1
            return BASE_NAMES[t.text]
        self.fail("a sort")

    # -- terms -------------------------------------------------------------
    def term(self):
        if self.at("\\") or self.at("E"):
            return self.binder()
        if self.tok.kind == "ident" and self.tok.text in ("A", "forall") and self.peek().kind == "ident" \
                and self.peek(2).kind == "op" and self.peek(2).text == ":":
            self.fail("a goal term (universal quantification is not supported)")
        return self.disj()

    def binder(self):
        sp = self.span()
        is_lambda = self.at("\\")
        self.i += 1
        name = self.ident("a bound variable").text
        if not self.at(":"):
            self.fail("':' and a sort annotation for bound variable " + repr(name))
        self.i += 1
        s = self.sort()
        self.expect(".")
        body = self.term()
        return (Lambda if is_lambda else Exists)(name, s, body, span=sp)

    def disj(self):
        left = self.conj()
        while self.at("||"):
            sp = self.span()
            self.i += 1
            right = self.conj()
            left = App(App(LogConst(OR, span=sp), left, span=sp), right, span=sp)
        return left

    def conj(self):
        left = self.cmp()
        while self.at("&&"):
            sp = self.span()
            self.i += 1
            right = self.cmp()
            left = App(App(LogConst(AND, span=sp), left, span=sp), right, span=sp)
        return left

    def cmp(self):
        sp = self.span()
        left = self.arith()
        if self.tok.kind == "op" and self.tok.text in CMP_OPS:
            op = self.tok.text
            op_tok = self.tok
            self.i += 1
            right = self.arith()
            left = Constraint(Cmp(op, self.fo(left, op_tok), self.fo(right, op_tok), span=sp), span=sp)
            if self.tok.kind == "op" and self.tok.text in CMP_OPS:
                self.fail("'&&', '||' or the end of the comparison")
        return left

    def arith(self):
        left = self.app()
        while self.tok.kind == "op" and self.tok.text in ARITH_OPS:
            op_tok = self.tok
            self.i += 1
            right = self.app()
            left = Constraint(BinOp(op_tok.text, self.fo(left, op_tok), self.fo(right, op_tok),
                                    span=Span(op_tok.line, op_tok.col)))
        return left

    def fo(self, t, op_tok: Token):
        """View a parsed operand as first-order constraint material."""
        if isinstance(t, Constraint):
            return t.atom
        if isinstance(t, Var):
            return t
        sp = getattr(t, "span", None) or Span(op_tok.line, op_tok.col)
        raise ParseError(sp.line, sp.column, f"an arithmetic operand of {op_tok.text!r}", "a relational term")

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "int":
            return True
        if t.kind == "ident":
            return t.text not in SECTIONS
        return t.kind == "op" and t.text in ("(", "\\")

    def app(self):
        sp = self.span()
        if self.tok.kind == "ident" and self.peek().kind == "op" and self.peek().text == "^":
            return self.ctor_app()
        head = self.atom()
        while self.starts_atom():
            arg = self.atom()
            head = App(head, arg, span=sp)
        return head

    def ctor_app(self):
        sp = self.span()
        rel = self.ident("a constructor name").text
        self.expect("^")
        k = self.tok
        if k.kind != "int":
            self.fail("a constructor index")
        self.i += 1
        args = []
        while self.starts_atom():
            op_tok = self.tok
            args.append(self.fo(self.atom(), op_tok))
        if len(args) != int(k.text):
            raise ParseError(sp.line, sp.column, f"{k.text} arguments for {rel}^{k.text}", str(len(args)))
        return Constraint(Ctor(rel, tuple(args), span=sp), span=sp)

    def atom(self):
        t = self.tok
        sp = Span(t.line, t.col)
        if t.kind == "int":
            self.i += 1
            return Constraint(IntLit(int(t.text), span=sp), span=sp)
        if self.at("-") and self.peek().kind == "int":
            self.i += 2
            return Constraint(IntLit(-int(self.peek(-1).text), span=sp), span=sp)
        if self.at("("):
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if self.at("\\") or self.at("E"):
            return self.binder()
        if t.kind == "ident" and t.text not in KEYWORDS:
            if self.peek().kind == "op" and self.peek().text == "^":
                inner = self.ctor_app()
                return inner
            self.i += 1
            return Var(t.text, span=sp)
        self.fail("a term")


def parse_problem(source: str, allow_closr: bool = False) -> Problem:
    """Parse a problem.  ``closr`` is accepted when ``allow_closr`` is set or
    the text carries a ``signature`` section."""
    return _Parser(source, allow_closr).problem()


def parse_term(source: str, allow_closr: bool = False):
    p = _Parser(source, allow_closr)
    t = p.term()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return t


def parse_sort(source: str, allow_closr: bool = True):
    p = _Parser(source, allow_closr)
    s = p.sort()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return s


# ---------------------------------------------------------------------------
# printing

# precedence levels: 0 binder, 1 ||, 2 &&, 3 comparison, 4 arithmetic,
# 5 application, 6 atom

def _paren(text: str, level: int, ctx: int) -> str:
    return f"({text})" if level < ctx else text


def print_fo(t, ctx: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, IntLit):
        text = str(t.value)
        return f"({text})" if t.value < 0 and ctx >= 6 else text
    if isinstance(t, BinOp):
        text = f"{print_fo(t.left, 4)} {t.op} {print_fo(t.right, 5)}"
        return _paren(text, 4, ctx)
    if isinstance(t, Cmp):
        text = f"{print_fo(t.left, 4)} {t.op} {print_fo(t.right, 4)}"
        return _paren(text, 3, ctx)
    if isinstance(t, Ctor):
        sym = ctor_symbol(t.rel, len(t.args))
        if not t.args:
            return sym
        text = " ".join([sym] + [print_fo(a, 6) for a in t.args])
        return _paren(text, 5, ctx)
    raise TypeError(f"not a first-order term: {t!r}")


def print_term(t, ctx: int = 0) -> str:
    if isinstance(t, (Var, TopVar)):
        return t.name
    if isinstance(t, Constraint):
        return print_fo(t.atom, ctx)
    if isinstance(t, (Lambda, Exists)):
        mark = "\\" if isinstance(t, Lambda) else "E "
        text = f"{mark}{t.var}: {sort_str(t.sort)}. {print_term(t.body, 0)}"
        return _paren(text, 0, ctx)
    logic = as_logic(t)
    if logic is not None:
        op, a, b = logic
        level = 1 if op == OR else 2
        sym = "||" if op == OR else "&&"
        text = f"{print_term(a, level)} {sym} {print_term(b, level + 1)}"
        return _paren(text, level, ctx)
    if isinstance(t, App):
        h, args = spine(t)
        if isinstance(h, LogConst):
            raise ValueError("partially applied connective cannot be printed")
        text = " ".join([print_term(h, 6)] + [print_term(a, 6) for a in args])
        return _paren(text, 5, ctx)
    if isinstance(t, LogConst):
        raise ValueError("bare connective cannot be printed")
    raise TypeError(f"not a goal term: {t!r}")


def print_problem(p: Problem) -> str:
    out = []
    ctors = p.signature.constructors()
    if "closr" in p.signature.base_sorts:
        out.append("signature")
        for sym, s in ctors:
            rel, k = split_ctor_symbol(sym)
            out.append(f"{rel}^{k}: {sort_str(s)}")
        out.append("")
    out.append("environment")
    for name, s in p.env.items():
        out.append(f"{name}: {sort_str(s)}")
    out.append("")
    out.append("program")
    for e in p.program:
        out.append(f"{e.name} := {print_term(e.body)};")
    out.append("")
    out.append("goal")
    out.append(print_term(p.goal))
    return "\n".join(out) + "\n"
