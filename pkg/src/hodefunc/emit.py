"""Native and SMT-LIB2 output for target problems."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    AND, BOOL, CLOSR, INT, OR, App, Arrow, Base, BinOp, Cmp, Constraint, Ctor,
    Exists, IntLit, Lambda, LogConst, Problem, TopVar, Var, as_logic, domains,
    sort_order, spine, split_ctor_symbol, strip_lambdas, subterms,
)
from .errors import NonFirstOrder
from .frontend import print_problem
from . import sexpr


def emit_native(p: Problem) -> str:
    return print_problem(p)


@dataclass(frozen=True)
class SmtDocument:
    commands: tuple  # each entry is the text of one top-level command

    def text(self) -> str:
        return "\n".join(self.commands) + "\n"

    def sexprs(self) -> list:
        return sexpr.parse_all(self.text())

    def __str__(self):
        return self.text()


SMT_SORTS = {"int": "Int", "o": "Bool", "closr": "Closr"}
CONS = {"o": "bool", "int": "int", "closr": "closr"}

_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")
RESERVED = {
    "and", "or", "not", "=>", "=", "ite", "exists", "forall", "let", "true", "false",
    "distinct", "assert", "declare-fun", "declare-const", "declare-datatypes",
    "define-fun", "check-sat", "set-logic", "_", "!", "as", "par", "match",
    "Int", "Bool", "Closr", "+", "-", "*", "<", "<=", ">", ">=", "div", "mod", "abs",
    "boolCons", "boolHd", "boolTl", "intCons", "intHd", "intTl",
    "closrCons", "closrHd", "closrTl", "noClosr",
}


class _Symbols:
    """Maps problem names to distinct SMT-LIB symbols."""

    def __init__(self):
        self.table: dict[str, str] = {}
        self.used: set[str] = set(RESERVED)

    def __call__(self, name) -> str:
        if name in self.table:
            return self.table[name]
        cand = name[1] if isinstance(name, tuple) else name
        while cand in self.used:
            cand += "_"
        self.used.add(cand)
        sym = cand if _SIMPLE.match(cand) else "|" + cand + "|"
        self.table[name] = sym
        return sym


def _smt_sort(s) -> str:
    if isinstance(s, Arrow):
        raise NonFirstOrder(f"arrow sort in a first-order position")
    return SMT_SORTS[s.name]


def _check_first_order(p: Problem):
    for sym, s in p.signature.constants:
        if sort_order(s) > 2:
            raise NonFirstOrder(f"constant {sym} has order {sort_order(s)}")
    for name, s in p.env.items():
        if sort_order(s) > 2:
            raise NonFirstOrder(f"relation {name} has order {sort_order(s)}")
    terms = [e.body for e in p.program] + [p.goal]
    for t in terms:
        binders, body = strip_lambdas(t)
        for u in subterms(body):
            if isinstance(u, Lambda):
                raise NonFirstOrder("abstraction inside a clause body")
            if isinstance(u, Exists) and isinstance(u.sort, Arrow):
                raise NonFirstOrder(f"quantifier over relational variable {u.var}")
        for _, s in binders:
            if isinstance(s, Arrow):
                raise NonFirstOrder("relational parameter")


class _Writer:
    def __init__(self, p: Problem):
        self.p = p
        self.sym = _Symbols()
        self.ctor_doms = {}
        for name, s in p.signature.constructors():
            rel, k = split_ctor_symbol(name)
            self.ctor_doms[(rel, k)] = [d.name for d in domains(s)]
        # nullary constructors first so they claim their names
        self.ctors = []
        for name, _ in p.signature.constructors():
            rel, k = split_ctor_symbol(name)
            if k == 0:
                self.ctors.append(rel)
                self.sym(("ctor", rel))
        for name in p.env.names():
            self.sym(name)

    def ctor_name(self, rel):
        return self.sym(("ctor", rel))

    def term(self, t) -> str:
        logic = as_logic(t)
        if logic is not None:
            op = logic[0]
            parts = self._flatten(t, op)
            return "(" + ("and" if op == AND else "or") + " " + " ".join(self.term(x) for x in parts) + ")"
        if isinstance(t, Exists):
            binders = []
            while isinstance(t, Exists):
                binders.append(f"({self.sym(t.var)} {_smt_sort(t.sort)})")
                t = t.body
            return f"(exists ({' '.join(binders)}) {self.term(t)})"
        if isinstance(t, Constraint):
            return self.fo(t.atom)
        if isinstance(t, (Var, TopVar)):
            return self.sym(t.name)
        if isinstance(t, App):
            h, args = spine(t)
            return "(" + " ".join([self.term(h)] + [self.term(a) for a in args]) + ")"
        raise NonFirstOrder(f"cannot encode {type(t).__name__}")

    def _flatten(self, t, op):
        logic = as_logic(t)
        if logic is not None and logic[0] == op:
            return self._flatten(logic[1], op) + self._flatten(logic[2], op)
        return [t]

    def fo(self, t) -> str:
        if isinstance(t, IntLit):
            return str(t.value) if t.value >= 0 else f"(- {-t.value})"
        if isinstance(t, Var):
            return self.sym(t.name)
        if isinstance(t, (BinOp, Cmp)):
            return f"({t.op} {self.fo(t.left)} {self.fo(t.right)})"
        if isinstance(t, Ctor):
            doms = self.ctor_doms[(t.rel, len(t.args))]
            out = self.ctor_name(t.rel)
            # the most recently supplied argument ends up at the head
            for a, d in zip(t.args, doms):
                out = f"({CONS[d]}Cons {self.fo(a)} {out})"
            return out
        raise NonFirstOrder(f"cannot encode {type(t).__name__}")


def datatype_block(ctor_names: list[str]) -> str:
    lines = ["(declare-datatypes () ((Closr"]
    for n in ctor_names or ["noClosr"]:
        lines.append(f"  {n}")
    lines.append("  (boolCons (boolHd Bool) (boolTl Closr))")
    lines.append("  (intCons (intHd Int) (intTl Closr))")
    lines.append("  (closrCons (closrHd Closr) (closrTl Closr)) )))")
    return "\n".join(lines)


def _split(t):
    logic = as_logic(t)
    if logic is not None and logic[0] == OR:
        return _split(logic[1]) + _split(logic[2])
    return [t]


def emit_smtlib(p: Problem, split_disjuncts: bool = False) -> SmtDocument:
    _check_first_order(p)
    w = _Writer(p)
    cmds = ["(set-logic HORN)", datatype_block([w.ctor_name(r) for r in w.ctors])]
    for name, s in p.env.items():
        doms = " ".join(_smt_sort(d) for d in domains(s))
        cmds.append(f"(declare-fun {w.sym(name)} ({doms}) Bool)")
    for e in p.program:
        binders, body = strip_lambdas(e.body)
        decl = " ".join(f"({w.sym(n)} {_smt_sort(s)})" for n, s in binders)
        atom = "(" + " ".join([w.sym(e.name)] + [w.sym(n) for n, _ in binders]) + ")"
        for part in (_split(body) if split_disjuncts else [body]):
            cmds.append(f"(assert (forall ({decl}) (=> {w.term(part)} {atom})))")
    g = p.goal
    binders = []
    while isinstance(g, Exists):
        binders.append(f"({w.sym(g.var)} {_smt_sort(g.sort)})")
        g = g.body
    if binders:
        cmds.append(f"(assert (forall ({' '.join(binders)}) (=> {w.term(g)} false)))")
    else:
        cmds.append(f"(assert (=> {w.term(g)} false))")
    cmds.append("(check-sat)")
    return SmtDocument(tuple(cmds))
