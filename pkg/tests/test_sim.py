from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pdtl import parse_program, parse_state_formula
from pdtl.arith import closure, in_closure
from pdtl.models import corpus_model
from pdtl.poly import Poly
from pdtl.sim import (
    ABORT, Discrete, EnumConfig, NotComposable, NumericODE, OutOfRange, State, SymbolicODE, Trace,
    compose_traces, enumerate_traces, eval_box_tae, eval_state_formula, position_to_time, reach_relation,
    tae_eval, violation_measure,
)
from pdtl.sim.logic import eval_fo

import oracles
from strategies import LIN_VARS, lin_programs, lin_qf

F = Fraction
p = parse_state_formula
prog = parse_program

SMALL = EnumConfig(unroll=2, durations=(F(0), F(1, 2), F(1)))


def flow_of(ode_text, start, duration):
    """The single symbolic flow of an ODE run for ``duration``."""
    (trace,) = enumerate_traces(prog(ode_text), State(start), EnumConfig(durations=(F(duration),)))
    (flow,) = trace.flows
    return flow


# -- enumerate_traces --------------------------------------------------------------------------


def test_failed_test_aborts():
    (t,) = enumerate_traces(prog("?(v=100)"), State(v=50))
    assert t.flows == (Discrete(State(v=50)), Discrete(ABORT))
    assert not t.terminates


def test_assignment_trace():
    (t,) = enumerate_traces(prog("x:=5"), State(x=0))
    assert t.flows == (Discrete(State(x=0)), Discrete(State(x=5)))


def test_train_body_at_top_speed():
    body = corpus_model("train").problem.right.prog.body
    traces = enumerate_traces(body, State(x=0, v=100, a=0), EnumConfig(durations=(F(0), F(1))))
    aborted = [t for t in traces if not t.terminates]
    assert len(aborted) == 1 and aborted[0].flows[0].first()["v"] == 100
    braking = [t for t in traces if t.terminates]
    assert sorted(float(t.flows[-1].duration) for t in braking) == [0.0, 1.0]
    assert all(t.last()["a"] == -1 for t in braking)


def test_domain_truncates_long_flows():
    (t,) = enumerate_traces(prog("{v'=1 & v<=100}"), State(v=99), EnumConfig(durations=(F(5),)))
    assert t.flows[0].duration == 1
    assert t.last()["v"] == 100


def test_domain_failing_at_start_aborts():
    (t,) = enumerate_traces(prog("{v'=1 & v<=100}"), State(v=101), EnumConfig(durations=(F(1),)))
    assert not t.terminates


def test_numeric_fallback():
    (t,) = enumerate_traces(prog("{x'=-x}"), State(x=1), EnumConfig(durations=(F(1),)))
    assert isinstance(t.flows[0], NumericODE)


# -- compose_traces ----------------------------------------------------------------------------


def test_compose_matching():
    a = Trace((Discrete(State(x=0)), Discrete(State(x=1))))
    b = Trace((Discrete(State(x=1)), Discrete(State(x=2))))
    assert compose_traces(a, b).flows == a.flows + b.flows


def test_compose_nonterminating_absorbs():
    a = Trace((Discrete(State(x=0)), Discrete(ABORT)))
    b = Trace((Discrete(State(x=1)),))
    assert compose_traces(a, b) == a


def test_compose_mismatch():
    with pytest.raises(NotComposable):
        compose_traces(Trace((Discrete(State(x=0)),)), Trace((Discrete(State(x=1)),)))


# -- position_to_time --------------------------------------------------------------------------


def test_position_origin():
    assert position_to_time(Trace((Discrete(State(x=0)),)), 0, 0) == 0


def test_position_after_a_flow():
    f = flow_of("{x'=1}", {"x": 0}, 2)
    t = Trace((f, SymbolicODE(f.last(), f.ode, F(1), f.time_var, _shift(f, F(2)))))
    assert position_to_time(t, 1, F(1, 2)) == F(7, 2)


def _shift(flow, z):
    return tuple((v, y.subs({flow.time_var: Poly.var(flow.time_var) + z})) for v, y in flow.curves)


def test_position_after_zero_length_flows():
    f = flow_of("{x'=1}", {"x": 0}, 1)
    t = Trace((f, Discrete(f.last()), Discrete(f.last())))
    assert position_to_time(t, 2, 0) == 3


def test_position_out_of_range():
    t = Trace((Discrete(State(x=0)),))
    with pytest.raises(OutOfRange):
        position_to_time(t, 1, 0)
    with pytest.raises(OutOfRange):
        position_to_time(t, 0, F(1, 2))


@settings(max_examples=200)
@given(lin_programs(4), st.fixed_dictionaries({v: st.integers(-3, 3) for v in LIN_VARS}))
def test_time_map_is_injective_with_unit_gaps(program, start):
    for t in enumerate_traces(program, State(start), SMALL):
        ends = 0
        for i, f in enumerate(t.flows):
            lo = position_to_time(t, i, 0)
            hi = position_to_time(t, i, f.duration)
            if i:
                assert lo - ends == 1  # open gap (ends, lo) of unit length
            assert hi - lo == f.duration
            ends = hi


# -- violation_measure -------------------------------------------------------------------------

ROBOT_POST = p("!(a1 <= 0 & a2 >= 0)")


def test_unsafe_robot_measure():
    f = flow_of("{a1'=1, a2'=2}", {"a1": -1, "a2": -1}, 2)
    report = violation_measure(f, ROBOT_POST)
    assert report.exact and report.measure == F(1, 2)
    (w,) = report.witnesses
    assert (w.lo, w.hi, w.lo_closed, w.hi_closed) == (F(1, 2), F(1), True, True)


def test_safe_robot_measure_zero_at_one_point():
    f = flow_of("{a1'=1, a2'=1}", {"a1": -1, "a2": -1}, 2)
    report = violation_measure(f, ROBOT_POST)
    assert report.measure == 0
    (w,) = report.witnesses
    assert w.is_point and w.lo == 1


def test_true_has_measure_zero():
    f = flow_of("{x'=1}", {"x": 0}, 3)
    assert violation_measure(f, p("true")).measure == 0


def test_numeric_measure_is_statistical():
    (t,) = enumerate_traces(prog("{x'=-x, y'=-y}"), State(x=0, y=1), EnumConfig(durations=(F(1),), mc_samples=20000))
    report = violation_measure(t.flows[0], p("x^2 + y^2 < 1"), EnumConfig(mc_samples=20000))
    assert not report.exact and report.measure == 0 and report.confidence is not None


def _coefficients(flow):
    out = {}
    for v, y in flow.curves:
        out[v] = y.univariate(flow.time_var)
    for v, x in flow.start.items():
        out.setdefault(v, [x])
    return out


@settings(max_examples=60)
@given(st.lists(st.integers(-2, 2), min_size=2, max_size=2), st.lists(st.integers(-3, 3), min_size=2, max_size=2),
       lin_qf(3), st.sampled_from([F(1), F(2), F(5, 2)]))
def test_exact_measure_matches_riemann(rates, start, phi, r):
    ode = "{x'=%d, y'=%d + x}" % tuple(rates)
    f = flow_of(ode, dict(zip(LIN_VARS, start)), r)
    report = violation_measure(f, phi)
    estimate = oracles.riemann_failure_measure(phi, _coefficients(f), r, points=100_000)
    assert abs(float(report.measure) - estimate) <= 1e-3 * float(r)


@settings(max_examples=100)
@given(lin_programs(4), st.fixed_dictionaries({v: st.integers(-3, 3) for v in LIN_VARS}))
def test_untouched_variables_stay_constant(program, start):
    start = State({**start, "z": F(7, 3)})
    for t in enumerate_traces(program, start, SMALL):
        for f in t.flows:
            if isinstance(f, SymbolicODE):
                for z in (F(0), f.duration / 3, f.duration):
                    s = f.state_at(z)
                    for v in s:
                        if v not in f.ode.variables:
                            assert s[v] == f.start[v]


def test_untouched_variables_constant_numerically():
    (t,) = enumerate_traces(prog("{x'=-x}"), State(x=1, y=F(1, 3)), EnumConfig(durations=(F(1),)))
    f = t.flows[0]
    assert f.state_at(0.5)["y"] == F(1, 3) and f.last()["y"] == F(1, 3)


# -- tae_eval ---------------------------------------------------------------------------------


def test_discrete_counterexample_trace():
    traces = enumerate_traces(prog("x:=5; x:=x+1"), State(x=0))
    (t,) = traces
    verdict = tae_eval(t, p("x<5"))
    assert verdict.status == "failed-discrete"
    assert t.flows[verdict.index].first()["x"] == 6


def test_accelerate_then_brake_holds():
    up = flow_of("{x'=v, v'=1}", {"x": 0, "v": 99}, 1)
    braking = Trace((Discrete(up.last()), Discrete(up.last().set("a", -1))))
    t = compose_traces(Trace((up,)), braking)
    verdict = tae_eval(t, p("v<100"))
    assert verdict.holds
    assert verdict.measure == 0


def test_last_flow_violation_located_on_trace_axis():
    t = Trace((Discrete(State(a1=0, a2=0)), flow_of("{a1'=1, a2'=2}", {"a1": -1, "a2": -1}, 2)))
    verdict = tae_eval(t, ROBOT_POST)
    assert verdict.status == "failed-continuous"
    (index, report), = verdict.reports
    assert index == 1 and report.times[0].lo == F(3, 2)


# -- eval_box_tae and eval_state_formula ---------------------------------------------------------


def test_train_holds():
    problem = corpus_model("train").problem
    v = eval_box_tae(problem.right.prog, State(x=0, v=0, a=0), problem.right.post.body,
                     EnumConfig(unroll=3, durations=(F(0), F(1, 2), F(1), F(101))))
    assert v.holds and v.bounded


def test_strict_variant_holds():
    assert eval_state_formula(State(x=0, y=0), corpus_model("strict").problem) is True


def test_relaxed_variant_holds():
    # the relaxed disjunction x >= 1 | x <= 1 is true everywhere
    assert eval_state_formula(State(x=0, y=0), corpus_model("relaxed").problem) is True


def test_discrete_model_fails():
    f = p("[{x:=x+1}*] tae: x<5")
    assert eval_state_formula(State(x=5), f, EnumConfig(unroll=2)) is False


def test_circle_holds_statistically():
    f = corpus_model("circle").problem
    assert eval_state_formula(State(x=0, y=1), f, EnumConfig(durations=(F(0), F(1)))) is True


def test_state_formula_basics():
    assert eval_state_formula(State(v=99), p("v<100")) is True
    assert eval_state_formula(State(v=99), p("exists w (w > v)")) is True
    assert eval_state_formula(State(x=1), p("<x:=x+1> x>1")) is True


# -- reach_relation ----------------------------------------------------------------------------


def test_reach_assignment():
    assert reach_relation(prog("x:=5"), State(x=0)) == {State(x=5)}


def test_reach_loop():
    finals = reach_relation(prog("{x:=x+1}*"), State(x=0), EnumConfig(unroll=3))
    assert {s["x"] for s in finals} == {0, 1, 2, 3}


def test_reach_false_test():
    assert reach_relation(prog("?false"), State(x=0)) == set()


# -- properties ---------------------------------------------------------------------------------


def _random_traces(program, start):
    return enumerate_traces(program, State(start), SMALL)


starts = st.fixed_dictionaries({v: st.integers(-3, 3) for v in LIN_VARS})


@settings(max_examples=500)
@given(lin_programs(3), lin_programs(3), starts, lin_qf(2), st.data())
def test_tae_splits_over_composition(alpha, beta, start, phi, data):
    xis = [t for t in _random_traces(alpha, start) if t.terminates]
    assume(xis)
    xi = data.draw(st.sampled_from(xis))
    etas = enumerate_traces(beta, xi.last(), SMALL)
    eta = data.draw(st.sampled_from(etas))
    both = compose_traces(xi, eta)
    assert tae_eval(both, phi).holds == (tae_eval(xi, phi).holds and tae_eval(eta, phi).holds)


@settings(max_examples=500)
@given(lin_programs(4), starts, lin_qf(3), st.data())
def test_tae_implies_closure_at_the_end(program, start, phi, data):
    traces = [t for t in _random_traces(program, start) if t.terminates]
    assume(traces)
    t = data.draw(st.sampled_from(traces))
    if tae_eval(t, phi).holds:
        assert in_closure(t.last().exact_dict(), phi) is True


@settings(max_examples=200)
@given(lin_programs(4), starts, lin_qf(3))
def test_box_tae_implies_box_closure(program, start, phi):
    verdict = eval_box_tae(program, State(start), phi, SMALL)
    if verdict.holds:
        cl = closure(phi)
        for t, _ in verdict.traces:
            if t.terminates:
                assert eval_fo(cl, t.last())
