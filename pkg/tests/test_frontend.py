import pytest
from hypothesis import given, settings, strategies as st

from conftest import SAMPLE
from randprog import random_problem_text
from hodefunc.core import BOOL, INT, App, Cmp, Constraint, Exists, IntLit, Lambda, TopVar, Var, arrow, as_logic, OR, AND
from hodefunc.defunc import defunctionalize
from hodefunc.errors import ParseError, SortError
from hodefunc.frontend import parse_problem, parse_term, print_problem, tokenize
from hodefunc.preprocess import preprocess
from hodefunc.sortcheck import check_problem


def test_parse_sample():
    p = parse_problem(SAMPLE)
    assert dict(p.env.items()) == {
        "add": arrow(INT, INT, INT, BOOL),
        "twice": arrow(arrow(INT, INT, BOOL), INT, INT, BOOL),
    }
    assert [e.name for e in p.program] == ["add", "twice"]
    g = p.goal
    assert isinstance(g, Exists) and g.var == "x" and g.sort == INT
    lit = lambda n: Constraint(IntLit(n))  # first-order arguments are wrapped
    assert g.body == App(App(App(TopVar("add"), lit(1)), lit(2)), Var("x"))


def test_goal_only():
    p = parse_problem("goal\n E x: int. 1 = 1")
    assert len(p.env) == 0 and p.program == ()
    assert p.goal == Exists("x", INT, Constraint(Cmp("=", IntLit(1), IntLit(1))))


def test_non_relational_body_parses_but_fails_sortcheck():
    p = parse_problem("environment\nf: int -> bool\nprogram\nf := \\x:int. x;\ngoal\n0 = 0")
    assert p.program[0].body == Lambda("x", INT, Var("x"))
    with pytest.raises(SortError):
        check_problem(p)


def test_round_trip_sample():
    p = parse_problem(SAMPLE)
    assert parse_problem(print_problem(p)) == p


def test_empty_program_prints_section():
    text = print_problem(parse_problem("goal\n0 = 1"))
    assert "program" in text
    assert parse_problem(text).program == ()


def test_round_trip_target():
    t = defunctionalize(preprocess(parse_problem(SAMPLE)))
    text = print_problem(t)
    assert "closr" in text
    q = parse_problem(text)
    assert q == t
    check_problem(q)


def test_closr_rejected_in_source():
    with pytest.raises(ParseError):
        parse_problem("environment\nr: closr -> bool\ngoal\n0 = 0")


def test_precedence():
    t = parse_term("a = 1 || b = 2 && c = 3")
    op, left, right = as_logic(t)
    assert op == OR
    assert as_logic(right)[0] == AND


def test_binders_scope_right():
    t = parse_term("E x: int. x = 1 && x = 2")
    assert isinstance(t, Exists) and as_logic(t.body)[0] == AND


def test_application_left_assoc():
    t = parse_term("f a b")
    assert t == App(App(Var("f"), Var("a")), Var("b"))


def test_unary_minus_literal():
    t = parse_term("x = -3")
    assert t.atom.right == IntLit(-3)


def test_comments_ignored():
    p = parse_problem("# header\ngoal # trailing\n 0 = 0 # done\n")
    assert p.goal == Constraint(Cmp("=", IntLit(0), IntLit(0)))


def test_duplicate_equations_kept():
    p = parse_problem("environment\nr: int -> bool\nprogram\nr := \\x: int. x = 0;\n"
                      "r := \\x: int. x = 1;\ngoal\nr 1")
    assert [e.name for e in p.program] == ["r", "r"]


@pytest.mark.parametrize("text", [
    "goal\nE x. x = 1",                 # missing sort annotation
    "goal\n\\x. x = 1",
    "environment\nr: int -> bool\nprogram\nr := \\x: int. x = 0\ngoal\nr 1",  # missing ;
    "goal\nA x: int. x = 1",            # no universal quantifiers
    "goal\n(0 = 0",
    "goal\n0 = $",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_problem(text)


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_problem("goal\n  0 = = 1")
    assert info.value.line == 2
    assert info.value.column == 7


def test_identifier_primes():
    t = parse_term("f' x_1")
    assert t == App(Var("f'"), Var("x_1"))


def test_tokenize_operators():
    kinds = [tok.text for tok in tokenize("a <= b && c >= d || e < f")]
    assert "<=" in kinds and ">=" in kinds and "&&" in kinds and "||" in kinds


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_random(rng):
    p = parse_problem(random_problem_text(rng))
    assert parse_problem(print_problem(p)) == p
