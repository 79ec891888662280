import pytest
from hypothesis import given, settings, strategies as st

from conftest import SAMPLE, corpus_files, load
from randprog import random_problem
from hodefunc.core import BOOL, INT, SOURCE_SIGNATURE, SortEnv, arrow
from hodefunc.defunc import defunctionalize
from hodefunc.errors import SortError
from hodefunc.frontend import parse_problem, parse_term
from hodefunc.preprocess import preprocess
from hodefunc.sortcheck import check_goal_term, check_problem


def sort_of(env_pairs, text):
    env = SortEnv(env_pairs)
    return check_goal_term(env, SOURCE_SIGNATURE, parse_term(text))


def test_application():
    env = [("f", arrow(INT, INT, BOOL)), ("x", INT), ("y", INT)]
    assert sort_of(env, "f x y") == BOOL


def test_lambda():
    env = [("add", arrow(INT, INT, INT, BOOL))]
    assert sort_of(env, "\\a: int. \\b: int. \\c: int. a + b = c") == arrow(INT, INT, INT, BOOL)


def test_unbound():
    with pytest.raises(SortError) as info:
        sort_of([], "x")
    assert info.value.kind == SortError.UNBOUND and info.value.symbol == "x"


def test_relational_var_in_constraint():
    with pytest.raises(SortError) as info:
        sort_of([("f", arrow(INT, BOOL))], "f = 1")
    assert info.value.kind in (SortError.ILL_FORMED_CONSTRAINT, SortError.MISMATCH)
    assert info.value.symbol


def test_mismatch_argument():
    with pytest.raises(SortError) as info:
        sort_of([("f", arrow(INT, BOOL)), ("b", BOOL)], "f (\\x: int. x = 0)")
    assert info.value.kind == SortError.MISMATCH


def test_sort_is_deterministic():
    env = [("f", arrow(arrow(INT, BOOL), INT, BOOL))]
    a = sort_of(env, "f (\\x: int. x = 0)")
    assert a == sort_of(env, "f (\\x: int. x = 0)") == arrow(INT, BOOL)


def test_sample_ok():
    check_problem(parse_problem(SAMPLE))


def test_partial_application_in_body_rejected():
    bad = SAMPLE.replace("f x z && f z y", "f x && f z y")
    with pytest.raises(SortError) as info:
        check_problem(parse_problem(bad))
    assert info.value.kind == SortError.MISMATCH
    assert info.value.equation == "twice"


def test_target_ok():
    check_problem(defunctionalize(preprocess(parse_problem(SAMPLE))))


def test_o_sorted_top_var_rejected():
    with pytest.raises(SortError) as info:
        check_problem(parse_problem("environment\nb: bool\nprogram\nb := 0 = 0;\ngoal\nb"))
    assert info.value.kind == SortError.NON_RELATIONAL_TOP_VAR


def test_shadowing_rejected():
    with pytest.raises(SortError) as info:
        sort_of([("x", INT)], "E x: int. x = 0")
    assert info.value.kind == SortError.CONFLICTING_ENV


def test_goal_must_be_o():
    with pytest.raises(SortError):
        check_problem(parse_problem("environment\nr: int -> bool\nprogram\nr := \\x: int. x = 0;\ngoal\nr"))


def test_missing_equation_name():
    with pytest.raises(SortError):
        check_problem(parse_problem("environment\nr: int -> bool\nprogram\ns := \\x: int. x = 0;\ngoal\nr 0"))


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_checks(path):
    load(path.read_text())


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_problems_check(rng):
    p = random_problem(rng)
    check_problem(p)
    check_problem(defunctionalize(preprocess(p)))
