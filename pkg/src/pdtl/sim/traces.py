"""Flows, traces and bounded trace enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..arith.univariate import truth_pieces
from ..ode import NotPolynomialSolvable, PolySolution, SampledFlow, numeric_flow, solve_polynomial
from ..poly import Poly
from ..syntax import Assign, Choice, Loop, Ode, Seq, Test, substitute_many
from .logic import Undetermined, eval_fo
from .state import ABORT, State, exact

DEFAULT_DURATIONS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass(frozen=True)
class EnumConfig:
    """Bounds for trace enumeration and measure estimation."""

    unroll: int = 3
    durations: tuple = DEFAULT_DURATIONS
    symbolic: bool = True  # use polynomial solutions when one exists
    mc_samples: int = 100_000
    seed: int = 0
    step: float = 1e-3
    threshold: float = 1e-4  # numeric flows: measure bound relative to duration
    exact_only: bool = False  # report bounded results as unknown

    def __post_init__(self):
        if self.unroll < 0:
            raise ValueError("unroll bound must be >= 0")
        if self.mc_samples < 1:
            raise ValueError("Monte Carlo sample count must be >= 1")
        if not self.durations:
            raise ValueError("need at least one duration sample")
        ds = tuple(sorted({Fraction(d) for d in self.durations}))
        if ds[0] < 0:
            raise ValueError("durations must be >= 0")
        object.__setattr__(self, "durations", ds)

    def to_json(self) -> dict:
        return {
            "unroll": self.unroll,
            "durations": [str(d) for d in self.durations],
            "symbolic": self.symbolic,
            "mc_samples": self.mc_samples,
            "seed": self.seed,
            "step": self.step,
            "threshold": self.threshold,
        }


# -- flows -----------------------------------------------------------------------------------


@dataclass(frozen=True)
class Discrete:
    """A single state held for zero time (possibly the abort state)."""

    state: object
    duration = Fraction(0)

    def first(self):
        return self.state

    def last(self):
        return self.state

    def to_json(self) -> dict:
        kind = "abort" if self.state is ABORT else "discrete"
        out = {"kind": kind, "duration": "0"}
        if self.state is not ABORT:
            out["state"] = self.state.to_json()
        return out


@dataclass(frozen=True)
class SymbolicODE:
    """An ODE flow given by a polynomial solution; ``curves`` are univariate in ``time_var``."""

    start: State
    ode: Ode
    duration: Fraction
    time_var: str
    curves: tuple  # ((var, Poly in time_var), ...)

    def state_at(self, z) -> State:
        z = Fraction(z)
        return self.start.update({v: c.evaluate({self.time_var: z}) if c.variables() else c.constant_value()
                                  for v, c in self.curves})

    def first(self):
        return self.start

    def last(self):
        return self.state_at(self.duration)

    def to_json(self) -> dict:
        from ..poly import format_poly

        return {
            "kind": "symbolic",
            "duration": str(self.duration),
            "start": self.start.to_json(),
            "solution": {v: format_poly(c) for v, c in self.curves},
        }


@dataclass(frozen=True, eq=False)
class NumericODE:
    """An ODE flow sampled by RK4."""

    start: State
    ode: Ode
    duration: float
    samples: SampledFlow = field(repr=False)

    def state_at(self, z) -> State:
        row = self.samples.interpolate(float(z))[0]
        return self.start.update({v: float(x) for v, x in zip(self.samples.names, row)})

    def first(self):
        return self.start

    def last(self):
        k = len(self.samples.times) - 1
        return self.start.update(self.samples.state_at(k))

    def to_json(self) -> dict:
        return {
            "kind": "numeric",
            "duration": repr(float(self.duration)),
            "start": self.start.to_json(),
            "steps": len(self.samples.times) - 1,
        }


@dataclass(frozen=True)
class Trace:
    flows: tuple

    def __post_init__(self):
        if not self.flows:
            raise ValueError("a trace has at least one flow")

    def __len__(self):
        return len(self.flows)

    @property
    def terminates(self) -> bool:
        return self.flows[-1].last() is not ABORT

    def first(self):
        return self.flows[0].first()

    def last(self):
        if not self.terminates:
            raise ValueError("the trace does not terminate")
        return self.flows[-1].last()

    def to_json(self) -> list:
        return [f.to_json() for f in self.flows]


class NotComposable(ValueError):
    pass


def compose_traces(first: Trace, second: Trace) -> Trace:
    """Concatenate when ``first`` terminates where ``second`` starts; a non-terminating ``first`` absorbs."""
    if not first.terminates:
        return first
    if first.last() != second.first():
        raise NotComposable("last state of the first trace differs from the first state of the second")
    return Trace(first.flows + second.flows)


class OutOfRange(ValueError):
    pass


def position_to_time(trace: Trace, index: int, zeta) -> Fraction:
    """Time-axis image of position (index, zeta): flows are laid out with unit gaps."""
    if not 0 <= index < len(trace.flows):
        raise OutOfRange(f"flow index {index} outside 0..{len(trace.flows) - 1}")
    r = trace.flows[index].duration
    if not 0 <= zeta <= r:
        raise OutOfRange(f"zeta {zeta} outside [0, {r}]")
    return _offset(trace, index) + _num(zeta)


def _offset(trace: Trace, index: int):
    return index + sum((_num(f.duration) for f in trace.flows[:index]), Fraction(0))


def _num(x):
    return x if isinstance(x, (Fraction, int)) else Fraction(float(x))


# -- enumeration ----------------------------------------------------------------------------


@dataclass
class Enumeration:
    """Traces plus a flag telling whether any loop or ODE bound cut the enumeration short."""

    traces: list
    bounded: bool


def enumerate_traces(prog, state: State, cfg: EnumConfig | None = None) -> list:
    return explore(prog, state, cfg or EnumConfig()).traces


def explore(prog, state: State, cfg: EnumConfig) -> Enumeration:
    traces, bounded = _explore(prog, state, cfg)
    return Enumeration(list(traces), bounded)


@lru_cache(maxsize=65536)
def _explore(prog, state: State, cfg: EnumConfig):
    if isinstance(prog, Assign):
        value = prog.term.evaluate(state.as_dict())
        return (Trace((Discrete(state), Discrete(state.set(prog.var, value)))),), False
    if isinstance(prog, Test):
        if eval_fo(prog.cond, state):
            return (Trace((Discrete(state),)),), False
        return (Trace((Discrete(state), Discrete(ABORT))),), False
    if isinstance(prog, Choice):
        left, b1 = _explore(prog.left, state, cfg)
        right, b2 = _explore(prog.right, state, cfg)
        return _dedupe(left + right), b1 or b2
    if isinstance(prog, Seq):
        out = []
        heads, bounded = _explore(prog.left, state, cfg)
        for head in heads:
            if not head.terminates:
                out.append(head)
                continue
            tails, b = _explore(prog.right, head.last(), cfg)
            bounded = bounded or b
            out.extend(compose_traces(head, tail) for tail in tails)
        return _dedupe(out), bounded
    if isinstance(prog, Loop):
        return _explore_loop(prog, state, cfg)
    if isinstance(prog, Ode):
        return _explore_ode(prog, state, cfg), True
    raise TypeError(prog)


def _dedupe(traces) -> tuple:
    seen = set()
    out = []
    for t in traces:
        key = _trace_key(t)
        if key not in seen:
            seen.add(key)
            out.append(t)
    return tuple(out)


def _trace_key(t: Trace):
    return tuple(f if not isinstance(f, NumericODE) else id(f) for f in t.flows)


def _explore_loop(prog: Loop, state: State, cfg: EnumConfig):
    level = [Trace((Discrete(state),))]
    out = list(level)
    seen_ends = {state}
    bounded = False
    for _ in range(cfg.unroll):
        nxt = []
        for head in level:
            tails, b = _explore(prog.body, head.last(), cfg)
            bounded = bounded or b
            for tail in tails:
                t = compose_traces(head, tail)
                out.append(t)
                if t.terminates:
                    nxt.append(t)
        fresh = [t for t in nxt if t.last() not in seen_ends]
        if not fresh:
            return _dedupe(out), bounded
        seen_ends.update(t.last() for t in nxt)
        level = fresh
    # iterations beyond the bound were not explored
    return _dedupe(out), True


def _explore_ode(ode: Ode, state: State, cfg: EnumConfig) -> tuple:
    if ode.domain is not None and not eval_fo(ode.domain, state):
        return (Trace((Discrete(state), Discrete(ABORT))),)
    flows = []
    symbolic = _symbolic_curves(ode, state) if cfg.symbolic else None
    for r in cfg.durations:
        if symbolic is not None:
            tvar, curves = symbolic
            r = _admissible_duration(ode, state, tvar, curves, r)
            if r is None:
                continue
            if r == 0:
                flows.append(Discrete(state))
            else:
                flows.append(SymbolicODE(state, ode, r, tvar, curves))
        else:
            flow = _numeric(ode, state, r, cfg)
            if flow is not None:
                flows.append(flow)
    return _dedupe(Trace((f,)) for f in flows)


def _symbolic_curves(ode: Ode, state: State):
    try:
        sol: PolySolution = solve_polynomial(ode, avoid=tuple(state))
    except NotPolynomialSolvable:
        return None
    env = {v: Poly.const(exact(x)) for v, x in state.items() if v != sol.time_var}
    curves = tuple((v, y.subs(env)) for v, y in sol.solutions)
    if any(c.variables() - {sol.time_var} for _, c in curves):
        raise Undetermined("ODE mentions variables without a value")
    return sol.time_var, curves


def _admissible_duration(ode, state, tvar, curves, r):
    """``r`` if the domain holds on all of [0, r], else the attained admissible prefix, else None."""
    if ode.domain is None or r == 0:
        return r
    env = {v: Poly.const(exact(x)) for v, x in state.items()}
    env.update(dict(curves))
    along = substitute_many(ode.domain, env)
    end, closed = None, False
    for piece, ok in truth_pieces(along, tvar, Fraction(0), r):
        if not ok:
            break
        end, closed = piece.hi, piece.hi_closed
    else:
        return r
    if end is None or not closed or not isinstance(end, Fraction):
        return None
    return end


def _numeric(ode: Ode, state: State, r, cfg: EnumConfig):
    if r == 0:
        return Discrete(state)
    samples = numeric_flow(ode, state.as_dict(), float(r), cfg.step)
    if ode.domain is not None:
        for k in range(len(samples.times)):
            s = state.update(samples.state_at(k))
            if not eval_fo(ode.domain, s):
                if k == 0:
                    return None
                samples = SampledFlow(samples.names, samples.times[:k], samples.values[:k])
                break
    duration = float(samples.times[-1])
    if duration == 0:
        return Discrete(state)
    return NumericODE(state, ode, duration, samples)


def reach_relation(prog, state: State, cfg: EnumConfig | None = None) -> set:
    """Final states of the terminating enumerated traces."""
    return {t.last() for t in enumerate_traces(prog, state, cfg) if t.terminates}


__all__ = [
    "ABORT", "EnumConfig", "Discrete", "SymbolicODE", "NumericODE", "Trace",
    "NotComposable", "OutOfRange", "Enumeration", "compose_traces", "position_to_time",
    "enumerate_traces", "explore", "reach_relation",
]
