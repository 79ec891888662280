"""Canonical text of terms and problems up to renaming of bound variables
and reordering of disjuncts."""

from __future__ import annotations

from .core import (
    AND, OR, App, BinOp, Cmp, Constraint, Ctor, Exists, IntLit, Lambda,
    LogConst, TopVar, Var, as_logic, sort_str, spine,
)


def _flatten(t, op):
    logic = as_logic(t)
    if logic is not None and logic[0] == op:
        return _flatten(logic[1], op) + _flatten(logic[2], op)
    return [t]


def canonical(t, env=None, level: int = 0) -> str:
    """Bound variables are named by their binding depth (de Bruijn levels),
    so the result does not depend on the order of sibling disjuncts."""
    env = env or {}
    if isinstance(t, (Var, TopVar)):
        return env.get(t.name, t.name)
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, (BinOp, Cmp)):
        return f"({canonical(t.left, env, level)} {t.op} {canonical(t.right, env, level)})"
    if isinstance(t, Ctor):
        return "(" + " ".join([f"{t.rel}^{len(t.args)}"] + [canonical(a, env, level) for a in t.args]) + ")"
    if isinstance(t, Constraint):
        return canonical(t.atom, env, level)
    if isinstance(t, (Exists, Lambda)):
        name = f"#{level}"
        kw = "E" if isinstance(t, Exists) else "\\"
        return f"({kw}{name}:{sort_str(t.sort)}. {canonical(t.body, {**env, t.var: name}, level + 1)})"
    logic = as_logic(t)
    if logic is not None:
        op = logic[0]
        parts = [canonical(x, env, level) for x in _flatten(t, op)]
        if op == OR:
            parts.sort()
        return "(" + (" || " if op == OR else " && ").join(parts) + ")"
    if isinstance(t, App):
        h, args = spine(t)
        return "(" + " ".join(canonical(x, env, level) for x in [h] + args) + ")"
    if isinstance(t, LogConst):
        return t.op
    raise TypeError(f"cannot canonicalize {type(t).__name__}")


def canonical_problem(p) -> dict:
    """Comparable summary: declarations, constants, one canonical body per
    relation (several equations are merged as a disjunction), and the goal."""
    bodies = {}
    for e in p.program:
        bodies.setdefault(e.name, []).append(e.body)
    program = {}
    for name, bs in bodies.items():
        texts = []
        for b in bs:
            # equations for one name are compared as a set of disjuncts
            binders = []
            while isinstance(b, Lambda):
                binders.append((b.var, b.sort))
                b = b.body
            env = {v: f"#{i}" for i, (v, _) in enumerate(binders)}
            head = "".join(f"\\#{i}:{sort_str(s)}. " for i, (_, s) in enumerate(binders))
            texts.append((head, [canonical(x, env, len(binders)) for x in _flatten(b, OR)]))
        heads = {h for h, _ in texts}
        program[name] = (tuple(sorted(heads)), tuple(sorted(d for _, ds in texts for d in ds)))
    return {
        "env": dict(p.env.items()),
        "constants": dict(p.signature.constants),
        "program": program,
        "goal": canonical(p.goal),
    }


def alpha_equivalent(p, q) -> bool:
    return canonical_problem(p) == canonical_problem(q)
