import pytest
from hypothesis import given, settings, strategies as st

from conftest import GOLDEN, SAMPLE, load
from randprog import random_problem
from hodefunc.cli import pipeline
from hodefunc.emit import datatype_block, emit_native, emit_smtlib
from hodefunc.errors import NonFirstOrder
from hodefunc.frontend import parse_problem, print_problem
from hodefunc.sexpr import SExprError, Symbol, parse_all

# the listing for a program with relations Twice and Add
LISTING = """(declare-datatypes () ((Closr
  Twice
  Add
  (boolCons (boolHd Bool) (boolTl Closr))
  (intCons (intHd Int) (intTl Closr))
  (closrCons (closrHd Closr) (closrTl Closr)) )))"""


def target_of(text):
    return pipeline(load(text))[1]


@pytest.fixture
def add_twice_target():
    return target_of((GOLDEN / "add_twice.hochc").read_text())


def test_datatype_block_listing():
    assert datatype_block(["Twice", "Add"]) == LISTING


def test_datatype_block_in_document(add_twice_target):
    doc = emit_smtlib(add_twice_target).text()
    block = LISTING.replace("  Twice\n  Add\n", "  add\n  twice\n")
    assert block in doc


def test_closure_encoding():
    t = add_twice_target_with_goal("E c: closr. c = add^2 1 2 && IOMatch_int c 3")
    doc = emit_smtlib(t).text()
    assert "(intCons 2 (intCons 1 add))" in doc


def add_twice_target_with_goal(goal):
    t = target_of((GOLDEN / "add_twice.hochc").read_text())
    text = print_problem(t)
    text = text[: text.index("goal")] + "goal\n" + goal + "\n"
    return parse_problem(text)


def test_document_structure(add_twice_target):
    doc = emit_smtlib(add_twice_target)
    cmds = doc.sexprs()
    assert cmds[0] == [Symbol("set-logic"), Symbol("HORN")]
    assert cmds[1][0] == "declare-datatypes"
    heads = [c[0] for c in cmds]
    assert heads.count("check-sat") == 1 and heads[-1] == "check-sat"
    decls = [c[1] for c in cmds if c[0] == "declare-fun"]
    assert decls == ["Apply_int", "Apply_closr", "IOMatch_int"]
    # one clause per equation plus the goal
    assert heads.count("assert") == len(add_twice_target.program) + 1


def _symbols(x):
    if isinstance(x, list):
        for y in x:
            yield from _symbols(y)
    elif isinstance(x, Symbol):
        yield x


def test_relations_declared_before_use(add_twice_target):
    declared = set()
    for cmd in emit_smtlib(add_twice_target).sexprs():
        if cmd[0] == "declare-fun":
            declared.add(cmd[1])
        elif cmd[0] == "assert":
            used = {s for s in _symbols(cmd) if s.startswith(("Apply_", "IOMatch_"))}
            assert used <= declared


def test_goal_clause(add_twice_target):
    last = emit_smtlib(add_twice_target).sexprs()[-2]
    assert last[0] == "assert" and last[1][0] == "forall"
    assert last[1][2][0] == "=>" and last[1][2][2] == "false"


def test_split_disjuncts(add_twice_target):
    plain = emit_smtlib(add_twice_target).sexprs()
    split = emit_smtlib(add_twice_target, split_disjuncts=True).sexprs()
    # Apply_int has three branches and IOMatch_int two
    assert len(split) == len(plain) + 3


def test_trivial_goal():
    t = target_of("goal\nE x: int. 1 = 1")
    doc = emit_smtlib(t).text()
    assert "(assert (forall ((x Int)) (=> (= 1 1) false)))" in doc
    parse_all(doc)


def test_quoted_names():
    t = target_of("environment\nf': int -> bool\nprogram\nf' := \\a: int. a = 1;\ngoal\nf' 1")
    doc = emit_smtlib(t).text()
    assert "|f'|" in doc
    parse_all(doc)


def test_source_problem_rejected(sample):
    with pytest.raises(NonFirstOrder):
        emit_smtlib(sample)


def test_native(sample, add_twice_target):
    assert emit_native(sample) == print_problem(sample)
    text = emit_native(add_twice_target)
    assert "Apply_int :=" in text
    assert parse_problem(text) == add_twice_target


def test_native_empty_program():
    text = emit_native(target_of("goal\n0 = 1"))
    assert "environment" in text and "goal" in text
    assert parse_problem(text).program == ()


def test_sexpr_parser():
    assert parse_all("(a (b |x y| 1) ; comment\n c)") == [["a", ["b", "x y", "1"], "c"]]
    with pytest.raises(SExprError):
        parse_all("(a (b)")
    with pytest.raises(SExprError):
        parse_all("a)")


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False), st.booleans())
def test_random_documents_parse(rng, split):
    _, t = pipeline(random_problem(rng))
    cmds = emit_smtlib(t, split_disjuncts=split).sexprs()
    assert [c[0] for c in cmds].count("check-sat") == 1
