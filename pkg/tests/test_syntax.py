from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdtl import ParseError, free_variables, parse_program, parse_state_formula, parse_term, pretty_print, substitute
from pdtl.poly import Poly
from pdtl.sim import State, eval_state_formula
from pdtl.syntax import (
    And, Assign, Atom, Box, CaptureError, Choice, Exists, Forall, InadmissibleContext, Loop, Ode, Seq,
    Tae, TRUE,
)
from pdtl.syntax import Test as Guard

from strategies import programs, qf_formulas, small_rationals, state_formulas, states

TRAIN = (
    "a = 0 & v = 0 -> [(((?(v < 100); a := 1) ++ (?(v = 100); a := -1)); "
    "{x' = v, v' = a & 0 <= v & v <= 100})*] tae: v < 100"
)


def v(name):
    return Poly.var(name)


# -- parse_program ----------------------------------------------------------------------------


def test_train_body_structure():
    p = parse_program("((?(v<100); a:=1) ++ (?(v=100); a:=-1)); {x'=v, v'=a & 0<=v & v<=100}")
    assert isinstance(p, Seq)
    assert isinstance(p.left, Choice)
    for branch in (p.left.left, p.left.right):
        assert isinstance(branch, Seq)
        assert isinstance(branch.left, Guard)
        assert isinstance(branch.right, Assign)
    assert isinstance(p.right, Ode)
    assert p.right.variables == ("x", "v")
    assert p.right.domain == And(Atom(-v("v"), "<="), Atom(v("v") - 100, "<="))


def test_test_of_true():
    assert parse_program("?true") == Guard(TRUE)


def test_discrete_loop():
    p = parse_program("x:=5; {x:=x+1}*")
    assert p == Seq(Assign("x", Poly.const(5)), Loop(Assign("x", v("x") + 1)))


def test_loop_binds_tightest_and_seq_over_choice():
    assert parse_program("x:=1 ++ y:=2; x:=3*") == Choice(
        Assign("x", Poly.const(1)),
        Seq(Assign("y", Poly.const(2)), Loop(Assign("x", Poly.const(3)))),
    )


@pytest.mark.parametrize("text", ["x :=", "{x'=1, x'=2}", "?([x:=1] x>0)", "{x'=1 & [x:=1] x>0}", "x := 1 ++"])
def test_program_errors(text):
    with pytest.raises((ParseError, ValueError)):
        parse_program(text)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_state_formula("x < 1 &\n  & y > 2")
    assert err.value.line == 2
    assert err.value.column == 3


# -- parse_state_formula ---------------------------------------------------------------------


def test_circle_atom():
    assert parse_state_formula("x^2 + y^2 < 1") == Atom(v("x") ** 2 + v("y") ** 2 - 1, "<")


def test_true():
    assert parse_state_formula("true") == Atom(Poly(), "=")


def test_box_of_assignment():
    assert parse_state_formula("[a:=1] v<100") == Box(Assign("a", Poly.const(1)), Atom(v("v") - 100, "<"))


def test_tae_postcondition():
    f = parse_state_formula("[x := 1] tae: x < 5")
    assert f == Box(Assign("x", Poly.const(1)), Tae(Atom(v("x") - 5, "<")))


def test_connective_precedence():
    f = parse_state_formula("!p1 > 0 & q > 0 | r > 0 -> s > 0 <-> w > 0")
    assert pretty_print(f) == "!p1 > 0 & q > 0 | r > 0 -> s > 0 <-> w > 0"
    assert type(f).__name__ == "Iff"
    assert type(f.left).__name__ == "Imp"
    assert type(f.left.left).__name__ == "Or"
    assert type(f.left.left.left).__name__ == "And"


def test_implication_is_right_associative():
    f = parse_state_formula("a > 0 -> b > 0 -> c > 0")
    assert type(f.right).__name__ == "Imp"


def test_exact_rational_literals():
    assert parse_term("0.5*x + 1/3") == v("x") * Fraction(1, 2) + Fraction(1, 3)


def test_nested_tae_rejected():
    with pytest.raises(ParseError):
        parse_state_formula("[x:=1] tae: tae: x > 0")


# -- pretty_print --------------------------------------------------------------------------------


def test_print_atom():
    assert pretty_print(Atom(v("v") - 100, "<")) == "v < 100"


def test_print_train_model():
    assert pretty_print(parse_state_formula(TRAIN)) == TRAIN


@settings(max_examples=1000)
@given(state_formulas())
def test_round_trip_formulas(f):
    assert parse_state_formula(pretty_print(f)) == f


@settings(max_examples=300)
@given(programs())
def test_round_trip_programs(p):
    assert parse_program(pretty_print(p)) == p


# -- substitute --------------------------------------------------------------------------------


def test_substitute_into_bound():
    f = parse_state_formula("v < 100")
    assert substitute(f, "v", v("s") + v("v0")) == parse_state_formula("s + v0 < 100")


@given(state_formulas(max_leaves=3))
def test_substitute_identity(f):
    assert substitute(f, "x", v("x")) == f


def test_capture_is_rejected():
    with pytest.raises(CaptureError):
        substitute(parse_state_formula("forall y (x < y)"), "x", v("y"))


def test_capture_would_change_meaning():
    # exists y (x < y) holds everywhere; the captured text exists y (y < y) holds nowhere
    before = parse_state_formula("exists y (x < y)")
    captured = parse_state_formula("exists y (y < y)")
    omega = State(x=0, y=3)
    updated = State(x=3, y=3)  # omega with x set to the value of y
    assert eval_state_formula(updated, before) is True
    assert eval_state_formula(omega, captured) is False
    with pytest.raises(CaptureError):
        substitute(before, "x", v("y"))


def test_substitute_refuses_written_variable():
    with pytest.raises(InadmissibleContext):
        substitute(parse_state_formula("[x := x + 1] x > 0"), "x", Poly.const(2))
    with pytest.raises(InadmissibleContext):
        substitute(parse_state_formula("[y := 1] x > y"), "x", v("y"))


def test_substitute_enters_box_when_untouched():
    f = substitute(parse_state_formula("[y := x] y > x"), "x", Poly.const(2))
    assert f == parse_state_formula("[y := 2] y > 2")


@settings(max_examples=1000)
@given(qf_formulas(max_leaves=4), small_rationals, states(values=small_rationals))
def test_substitution_is_semantic_update(f, c, values):
    omega = State(values)
    lhs = eval_state_formula(omega, substitute(f, "x", Poly.const(c)))
    rhs = eval_state_formula(omega.set("x", c), f)
    assert lhs == rhs


# -- free_variables ----------------------------------------------------------------------------


def test_free_variables_atom():
    assert free_variables(parse_state_formula("v < 100")) == {"v"}


def test_free_variables_train():
    # a, v and x are read: a and v by tests and right-hand sides, x as an ODE variable
    assert free_variables(parse_state_formula(TRAIN)) == {"a", "v", "x"}


def test_free_variables_quantifier():
    assert free_variables(parse_state_formula("forall x (x < y)")) == {"y"}


def test_free_variables_after_assignment():
    assert free_variables(parse_state_formula("[x := 1] x > y")) == {"y"}
    assert free_variables(parse_state_formula("[x := 1 ++ ?true] x > y")) == {"x", "y"}


@given(st.sampled_from(["x", "y"]))
def test_ode_lhs_must_differ(name):
    with pytest.raises(ValueError):
        Ode(((name, Poly()), (name, Poly())))


def test_quantifier_binds_variable():
    f = parse_state_formula("exists z (z > x)")
    assert isinstance(f, Exists) and f.var == "z"
    assert isinstance(parse_state_formula("forall z z > 0"), Forall)
