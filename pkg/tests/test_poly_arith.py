from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pdtl import parse_state_formula, pretty_print
from pdtl.arith import (
    Falsified, NonlinearQuantifier, Unknown, Valid, ZeroPolynomial, check_validity, closure, closure_display,
    fm_eliminate, g_transform, in_closure, isolate_roots, sign_partition, to_normal_form,
)
from pdtl.arith.normal import eval_qf, is_normal_form
from pdtl.poly import Poly
from pdtl.syntax import And, Atom, Exists, Forall, Iff, Imp, Not, Or, TRUE, free_variables, substitute_many

import oracles
from strategies import LIN_VARS, lin_qf, linear_polys, polys, qf_formulas, small_rationals

F = Fraction
p = parse_state_formula


# -- Poly ------------------------------------------------------------------------------------


@given(polys(), polys(), polys())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(polys(), polys())
def test_product_matches_sympy(a, b):
    assert sympy.expand(oracles.to_sympy(a * b) - oracles.to_sympy(a) * oracles.to_sympy(b)) == 0


def test_zero_is_empty():
    assert Poly().terms == {}
    assert (Poly.var("x") - Poly.var("x")).terms == {}


@given(polys(max_degree=3))
def test_coefficient_view_recovers_poly(q):
    coeffs = q.coefficients("x")
    rebuilt = sum((a * Poly.var("x") ** i for i, a in enumerate(coeffs)), Poly())
    assert rebuilt == q
    assert all("x" not in a.variables() for a in coeffs)


# -- normal forms ----------------------------------------------------------------------------


def test_normal_form_of_negated_strict():
    nf = to_normal_form(p("!(x<1)"))
    assert nf == Atom(Poly.var("x") - 1, ">=")
    assert pretty_print(nf) == "x >= 1"


def test_normal_form_of_domain():
    nf = to_normal_form(p("0<=v & v<=100"))
    assert nf == And(Atom(Poly.var("v"), ">="), Atom(100 - Poly.var("v"), ">="))


def test_normal_form_after_elimination_is_false():
    nf = to_normal_form(p("exists x (x>3 & x<2)"))
    assert is_normal_form(nf)
    assert not eval_qf(nf, {})


def test_normal_form_rejects_nonlinear_quantifier():
    with pytest.raises(NonlinearQuantifier):
        to_normal_form(p("exists x (x^2 < y)"))


@given(qf_formulas(max_leaves=5), st.fixed_dictionaries({v: small_rationals for v in "xyzva"}))
def test_normal_form_is_equivalent(f, env):
    nf = to_normal_form(f)
    assert is_normal_form(nf)
    assert eval_qf(nf, env) == oracles.evaluate(f, env)


# -- g_transform -----------------------------------------------------------------------------


def test_g_transform_train():
    q = g_transform(to_normal_form(p("t + v0 < 100")), "t")
    e = Poly.var("t") + Poly.var("v0") - 100
    assert q == And(Atom(e, "<="), Imp(Atom(Poly.const(1), "="), Atom(e, "<")))


def test_g_transform_equality_unchanged():
    e = Atom(Poly.var("t") ** 2 - Poly.var("x"), "=")
    assert g_transform(e, "t") == e


def test_g_transform_time_free_guard_is_true():
    q = g_transform(Atom(Poly.var("x") - 1, "<"), "t")
    assert q == And(Atom(Poly.var("x") - 1, "<="), Imp(TRUE, Atom(Poly.var("x") - 1, "<")))


def test_g_transform_single_violation_time():
    # v0 = 99: Q and not P exactly at t = 1
    P = to_normal_form(p("t + v0 < 100"))
    Q = g_transform(P, "t")
    at = {"v0": Poly.const(99)}
    both = And(substitute_many(Q, at), Not(substitute_many(P, at)))
    hits = [(kind, r) for kind, r, ok in oracles.cells(both, "t", 0) if ok]
    assert hits == [("root", 1)]


# g-transform properties on random univariate normal forms whose coefficients may vanish at the state

@st.composite
def univariate_normal_forms(draw):
    """Normal-form formula in t with coefficients a_i = r_i + s_i*c, and a value for c."""
    def atom():
        deg = draw(st.integers(0, 4))
        e = Poly()
        for i in range(deg + 1):
            r = draw(st.integers(-3, 3))
            s = draw(st.integers(-1, 1))
            e = e + (Poly.const(r) + Poly.var("c") * s) * Poly.var("t") ** i
        return Atom(e, draw(st.sampled_from(["=", ">=", "<"])))

    def build(depth):
        if depth == 0 or draw(st.booleans()):
            return atom()
        op = draw(st.sampled_from([And, Or]))
        return op(build(depth - 1), build(depth - 1))

    return build(2), draw(st.sampled_from([F(0), F(1), F(-1), F(1, 2), F(2)]))


def _t_degree(f) -> int:
    """Total t-degree of the atoms: a bound on the points where any atom changes sign."""
    return sum(max(a.degree("t"), 0) for a in oracles.atom_polys(f))


@settings(max_examples=500)
@given(univariate_normal_forms())
def test_g_transform_finite_difference(case):
    P, c = case
    Q = g_transform(P, "t")
    at = {"c": Poly.const(c)}
    P_, Q_ = substitute_many(P, at), substitute_many(Q, at)
    assume(any(a.variables() for a in oracles.atom_polys(P_)))
    diff = And(Q_, Not(P_))
    pieces = oracles.cells(diff, "t", 0)
    assert not any(ok for kind, _, ok in pieces if kind == "gap"), "Q & !P holds on an interval"
    count = sum(1 for kind, _, ok in pieces if kind == "root" and ok)
    assert count <= _t_degree(P_)


@settings(max_examples=500)
@given(univariate_normal_forms(), st.fractions(min_value=0, max_value=5, max_denominator=8))
def test_g_transform_locally_false(case, k):
    P, c = case
    Q = g_transform(P, "t")
    at = {"c": Poly.const(c)}
    P_, Q_ = substitute_many(P, at), substitute_many(Q, at)
    assume(any(a.variables() for a in oracles.atom_polys(P_)))
    pieces = oracles.cells(Q_, "t", 0)
    # probe the random point and every root where Q fails
    probes = [sympy.Rational(k.numerator, k.denominator)] + [r for kind, r, ok in pieces if kind == "root" and not ok]
    p_cells = oracles.cells(P_, "t", 0)
    for kk in probes:
        if oracles.truth_at_root(Q_, "t", kk):
            continue
        assert not oracles.truth_at_root(P_, "t", kk)
        after = oracles.neighbours(p_cells, kk)[1]
        assert after is False, f"P holds right after t={kk}"
        if kk > 0:
            assert oracles.neighbours(p_cells, kk)[0] is False, f"P holds right before t={kk}"


# -- closure -----------------------------------------------------------------------------------


def test_closure_of_strict_bound():
    assert pretty_print(closure(p("v<100"))) == "v <= 100"


def test_closure_of_closed_set():
    assert pretty_print(closure(p("x<=0"))) == "x <= 0"


def test_closure_of_empty_set():
    c = closure(p("x<1 & x>1"))
    assert not eval_qf(c, {"x": F(1)})
    # the display relaxation over-approximates here
    assert eval_qf(closure_display(p("x<1 & x>1")), {"x": F(1)})


def test_nonlinear_closure_stays_quantified():
    c = closure(p("x^2 + y^2 < 1"))
    assert isinstance(c, Forall)
    assert in_closure({"x": F(0), "y": F(1)}, p("x^2 + y^2 < 1")) is True
    assert in_closure({"x": F(0), "y": F(2)}, p("x^2 + y^2 < 1")) is False


@settings(max_examples=200)
@given(lin_qf(3), st.fixed_dictionaries({v: small_rationals for v in LIN_VARS}))
def test_truth_implies_closure(f, env):
    if oracles.evaluate(f, env):
        assert eval_qf(closure(f), env)


@settings(max_examples=1000)
@given(st.sampled_from(["v < 100", "!(a1 <= 0 & a2 >= 0)", "x < 1 | x > 1", "y > 0 -> x > 1 | x < 1",
                        "0 <= v & v <= 100", "x < 5", "x^2 + y^2 < 1"]),
       st.fixed_dictionaries({v: small_rationals for v in ("v", "a1", "a2", "x", "y")}))
def test_corpus_truth_implies_closure_membership(text, env):
    f = p(text)
    point = {k: env[k] for k in free_variables(f)}
    if oracles.evaluate(f, point):
        assert in_closure(point, f) is True


@settings(max_examples=100)
@given(lin_qf(3))
def test_closure_idempotent(f):
    c = closure(f)
    assert isinstance(check_validity(Iff(closure(c), c)), Valid)


@settings(max_examples=150)
@given(lin_qf(2), lin_qf(2))
def test_topcl_at_decidable_level(a, b):
    if isinstance(check_validity(Imp(a, b)), Valid):
        assert not isinstance(check_validity(Imp(closure(a), closure(b))), Falsified)


# -- fm_eliminate ------------------------------------------------------------------------------


def test_fm_train_side_condition():
    f = p("forall t (t>0 -> (forall s (0<=s & s<=t -> 0<=v0+s & v0+s<=100)) -> t+v0<=100)")
    qf = fm_eliminate(f)
    assert isinstance(check_validity(Imp(p("v0 <= 100"), qf)), Valid)


def test_fm_trivial_existential():
    assert fm_eliminate(p("exists x (x = y)")) == TRUE


def test_fm_contradiction():
    assert not eval_qf(fm_eliminate(p("exists x (x>3 & x<2)")), {})


def test_fm_rejects_nonlinear():
    with pytest.raises(NonlinearQuantifier):
        fm_eliminate(p("forall x (x^2 > y)"))


def test_fm_splits_on_parametric_coefficient():
    assert not eval_qf(fm_eliminate(p("forall x (x*y > 0)")), {"y": F(3)})
    qf = fm_eliminate(p("exists x (x*y > 1)"))
    assert [eval_qf(qf, {"y": F(c)}) for c in (-1, 0, 2)] == [True, False, True]


GRID = [F(-3), F(-2), F(-1), F(-1, 2), F(0), F(1, 3), F(1, 2), F(1), F(2), F(3)]


@st.composite
def quantified_linear(draw):
    """Prenex linear formulas over x, y, z, u with up to three distinct quantified variables."""
    names = ("x", "y", "z", "u")
    body = draw(qf_formulas(st.builds(Atom, linear_polys(names, 3), st.sampled_from(["=", "<", "<=", ">", ">=", "!="])), 3))
    bound = draw(st.lists(st.sampled_from(names), min_size=1, max_size=3, unique=True))
    f = body
    for v in reversed(bound):
        f = draw(st.sampled_from([Forall, Exists]))(v, f)
    return f


@settings(max_examples=40)
@given(quantified_linear())
def test_fm_agrees_with_cell_sampling(f):
    qf = fm_eliminate(f)
    free = sorted(free_variables(f))
    assert free_variables(qf) <= set(free)
    from itertools import product

    for values in list(product(GRID, repeat=len(free)))[:1000]:
        env = dict(zip(free, values))
        assert eval_qf(qf, env) == oracles.decide_linear(f, env), env


# -- check_validity ----------------------------------------------------------------------------


def test_train_arith_goal_valid():
    goal = p("v0 <= 100 & v0 < 100 -> (forall t (t>0 -> (forall s (0<=s & s<=t -> 0<=v0+s & v0+s<=100)) -> t+v0<=100))")
    assert isinstance(check_validity(goal), Valid)


def test_trivial_valid():
    assert isinstance(check_validity(p("0=0")), Valid)


def test_falsified_with_grid_witness():
    verdict = check_validity(p("x^2 >= x"))
    assert isinstance(verdict, Falsified)
    assert verdict.witness == {"x": F(1, 2)}


@settings(max_examples=200)
@given(qf_formulas(max_leaves=4))
def test_falsified_witness_falsifies(f):
    verdict = check_validity(f)
    if isinstance(verdict, Falsified):
        env = {v: verdict.witness.get(v, F(0)) for v in free_variables(f)}
        assert not oracles.evaluate(f, env)


@settings(max_examples=200)
@given(lin_qf(3))
def test_valid_holds_on_grid(f):
    if isinstance(check_validity(f), Valid):
        for x in GRID:
            for y in GRID:
                assert oracles.evaluate(f, {"x": x, "y": y})


# -- root isolation ----------------------------------------------------------------------------


def test_isolate_single_root():
    roots = isolate_roots([F(-1), F(1)], 0, 10)
    assert roots == [F(1)]


def test_isolate_no_real_roots():
    assert isolate_roots([F(1), F(0), F(1)], -10, 10) == []


def test_isolate_two_roots():
    roots = isolate_roots([F(1, 2), F(-3, 2), F(1)], 0, 2)
    assert len(roots) == 2
    assert roots[0] < roots[1]


def test_isolate_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        isolate_roots([], 0, 1)


@settings(max_examples=200)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=6), st.integers(-4, 0), st.integers(1, 4))
def test_root_count_matches_sympy(coeffs, lo, hi):
    assume(any(coeffs[1:]))
    expr = sum(c * oracles.T ** i for i, c in enumerate(coeffs))
    expected = oracles.real_roots([expr], lo, hi)
    got = isolate_roots([F(c) for c in coeffs], lo, hi)
    assert len(got) == len(expected)
    for r, e in zip(got, expected):
        assert abs(float(r) - float(sympy.N(e, 30))) < 1e-9


def test_sign_partition_linear():
    pieces = sign_partition([F(-1), F(1)], 0, 2)
    assert [(x.lo, x.hi, x.lo_closed, x.hi_closed, x.sign) for x in pieces] == [
        (0, 1, True, False, -1), (1, 1, True, True, 0), (1, 2, False, True, 1),
    ]
    assert 0 < pieces[0].sample < 1 and 1 < pieces[2].sample < 2


def test_sign_partition_constant():
    (piece,) = sign_partition([F(1)], 0, 1)
    assert (piece.lo, piece.hi, piece.sign) == (0, 1, 1)


def test_sign_partition_pattern():
    # (t - 1/2)(1 - t) = -t^2 + 3/2 t - 1/2
    pieces = sign_partition([F(-1, 2), F(3, 2), F(-1)], 0, 2)
    assert [x.sign for x in pieces] == [-1, 0, 1, 0, -1]
    for x in pieces:
        if x.sample is not None:
            value = -x.sample ** 2 + F(3, 2) * x.sample - F(1, 2)
            assert (value > 0) - (value < 0) == x.sign


@settings(max_examples=200)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=5))
def test_sign_partition_covers_interval(coeffs):
    pieces = sign_partition([F(c) for c in coeffs], -3, 3)
    assert pieces[0].lo == -3 and pieces[-1].hi == 3
    for a, b in zip(pieces, pieces[1:]):
        assert a.hi == b.lo
        assert a.hi_closed != b.lo_closed


def test_many_variable_counterexample_needs_zeros():
    # falsified only where x*y = 0; projecting y out squares it through a parametric coefficient
    f = parse_state_formula("x*y != 0 | a*x + v*z + 1 = 0")
    verdict = check_validity(f)
    if isinstance(verdict, Falsified):
        env = {v: verdict.witness.get(v, F(0)) for v in free_variables(f)}
        assert not oracles.evaluate(f, env)
    else:
        assert isinstance(verdict, Unknown)
