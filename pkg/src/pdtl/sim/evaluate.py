"""Valuation of state formulas and of tae boxes over enumerated traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..arith import Unknown, in_closure
from ..arith.univariate import truth_pieces
from ..poly import Poly
from ..syntax import (
    QUANTIFIERS, And, Assign, Atom, Box, Choice, Diamond, Iff, Imp, Loop, Not, Ode, Or, Seq,
    Forall, SubstitutionError, Tae, Test, free_variables, is_first_order, is_quantifier_free,
    substitute_many,
)
from ..arith.normal import eval_qf
from .logic import Undetermined, decide_closed, eval_fo
from .measure import QuantifiedPostcondition, ViolationReport, prepare_postcondition, violation_measure
from .state import ABORT, State, exact
from .traces import EnumConfig, Trace, _offset, _symbolic_curves, explore, reach_relation


# -- tae along one trace -------------------------------------------------------------------


@dataclass(frozen=True)
class TaeVerdict:
    """holds, failed-discrete, failed-continuous or unknown, with the evidence."""

    status: str
    index: int | None = None  # first flow breaking the discrete condition
    reports: tuple = ()  # (flow index, ViolationReport placed on the trace's time axis)
    reason: str | None = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def measure(self):
        exacts = [r.measure for _, r in self.reports if r.exact]
        numeric = [r.measure for _, r in self.reports if not r.exact]
        total = sum(exacts, Fraction(0)) if all(isinstance(m, Fraction) for m in exacts) else sum(map(float, exacts))
        return total + sum(numeric) if numeric else total

    def to_json(self) -> dict:
        out = {"status": self.status, "measure": _show(self.measure)}
        if self.index is not None:
            out["discrete_index"] = self.index
        if self.reason:
            out["reason"] = self.reason
        out["flows"] = [{"index": i, **r.to_json()} for i, r in self.reports]
        return out


def _show(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def tae_eval(trace: Trace, phi, cfg: EnumConfig | None = None, trace_index: int = 0) -> TaeVerdict:
    """The discrete and continuous conditions of a tae box along one trace."""
    cfg = cfg or EnumConfig()
    try:
        phi = prepare_postcondition(phi)
    except QuantifiedPostcondition as exc:
        return TaeVerdict("unknown", reason=str(exc))
    failed_at = None
    undecided = None
    reports = []
    for i, flow in enumerate(trace.flows):
        start = flow.first()
        if start is ABORT:
            continue
        if float(flow.duration) == 0:
            if failed_at is None:
                verdict = _discrete_ok(start, phi)
                if verdict is False:
                    failed_at = i
                elif verdict is None and undecided is None:
                    undecided = f"closure membership undetermined at flow {i}"
            continue
        report = violation_measure(flow, phi, cfg, key=(trace_index, i))
        reports.append((i, report.located(_offset(trace, i))))
    reports = tuple(reports)
    if failed_at is not None:
        return TaeVerdict("failed-discrete", failed_at, reports)
    statuses = [r.status for _, r in reports]
    if "positive" in statuses:
        return TaeVerdict("failed-continuous", None, reports)
    if undecided:
        return TaeVerdict("unknown", None, reports, undecided)
    if "inconclusive" in statuses:
        return TaeVerdict("unknown", None, reports, "sampled measure is inconclusive")
    return TaeVerdict("holds", None, reports)


def _discrete_ok(state: State, phi):
    point = state.exact_dict()
    missing = free_variables(phi) - point.keys()
    if missing:
        raise Undetermined(f"variables {', '.join(sorted(missing))} have no value")
    return in_closure(point, phi)


# -- tae over all traces of a program ---------------------------------------------------------


@dataclass
class BoxVerdict:
    """Conjunction of tae verdicts over the enumerated traces."""

    status: str  # holds, fails, unknown
    bounded: bool
    traces: list = field(default_factory=list)  # (Trace, TaeVerdict)
    reason: str | None = None

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def failing(self) -> list:
        return [(i, t, v) for i, (t, v) in enumerate(self.traces) if v.status.startswith("failed")]

    def truth(self, cfg: EnumConfig):
        if self.status == "unknown" or (self.bounded and cfg.exact_only):
            return Unknown(self.reason or "bounded enumeration")
        return self.status == "holds"


def eval_box_tae(prog, state: State, phi, cfg: EnumConfig | None = None) -> BoxVerdict:
    cfg = cfg or EnumConfig()
    try:
        found = explore(prog, state, cfg)
        results = [(t, tae_eval(t, phi, cfg, k)) for k, t in enumerate(found.traces)]
    except Undetermined as exc:
        return BoxVerdict("unknown", True, [], str(exc))
    statuses = {v.status for _, v in results}
    if statuses & {"failed-discrete", "failed-continuous"}:
        status = "fails"
    elif "unknown" in statuses:
        status = "unknown"
    else:
        status = "holds"
    reason = next((v.reason for _, v in results if v.status == "unknown"), None)
    return BoxVerdict(status, found.bounded, results, reason)


def eval_diamond_tae(prog, state: State, phi, cfg: EnumConfig | None = None) -> BoxVerdict:
    """Some enumerated trace satisfies the tae condition."""
    verdict = eval_box_tae(prog, state, phi, cfg)
    if not verdict.traces:
        return verdict
    statuses = {v.status for _, v in verdict.traces}
    if "holds" in statuses:
        verdict.status = "holds"
    elif "unknown" in statuses:
        verdict.status = "unknown"
    else:
        verdict.status = "fails"
    return verdict


# -- state formulas ------------------------------------------------------------------------


class _Bounded(Exception):
    pass


def eval_state_formula(state: State, phi, cfg: EnumConfig | None = None):
    """True, False or Unknown(reason)."""
    cfg = cfg or EnumConfig()
    try:
        return _eval(state, phi, cfg)
    except Undetermined as exc:
        return Unknown(str(exc))
    except _Bounded as exc:
        return Unknown(str(exc) or "bounded enumeration")


def _tri_not(v):
    return v if isinstance(v, Unknown) else not v


def _eval(state: State, f, cfg: EnumConfig):
    if isinstance(f, Atom):
        try:
            return eval_qf(f, state.as_dict())
        except KeyError as exc:
            raise Undetermined(f"variable {exc.args[0]} has no value") from exc
    if isinstance(f, Not):
        return _tri_not(_eval(state, f.arg, cfg))
    if isinstance(f, And):
        a = _eval(state, f.left, cfg)
        if a is False:
            return False
        b = _eval(state, f.right, cfg)
        if b is False:
            return False
        return a if isinstance(a, Unknown) else b
    if isinstance(f, Or):
        a = _eval(state, f.left, cfg)
        if a is True:
            return True
        b = _eval(state, f.right, cfg)
        if b is True:
            return True
        return a if isinstance(a, Unknown) else b
    if isinstance(f, Imp):
        return _eval(state, Or(Not(f.left), f.right), cfg)
    if isinstance(f, Iff):
        a, b = _eval(state, f.left, cfg), _eval(state, f.right, cfg)
        if isinstance(a, Unknown):
            return a
        if isinstance(b, Unknown):
            return b
        return a == b
    if isinstance(f, QUANTIFIERS):
        g = f if is_first_order(f) else discharge(f)
        if g is None:
            return Unknown("quantified formula with a loop or ODE box")
        return eval_fo(g, state)
    if isinstance(f, Box) and isinstance(f.post, Tae):
        return eval_box_tae(f.prog, state, f.post.body, cfg).truth(cfg)
    if isinstance(f, Diamond) and isinstance(f.post, Tae):
        return eval_diamond_tae(f.prog, state, f.post.body, cfg).truth(cfg)
    if isinstance(f, Box):
        return _box(f.prog, state, f.post, cfg)
    if isinstance(f, Diamond):
        return _tri_not(_box(f.prog, state, Not(f.post), cfg))
    raise TypeError(f)


def _conj(values):
    unknown = None
    for v in values:
        if v is False:
            return False
        if isinstance(v, Unknown) and unknown is None:
            unknown = v
    return unknown if unknown is not None else True


def _box(prog, state: State, post, cfg: EnumConfig):
    """[prog] post by the reachability semantics."""
    if isinstance(prog, Assign):
        return _eval(state.set(prog.var, prog.term.evaluate(state.as_dict())), post, cfg)
    if isinstance(prog, Test):
        if not eval_fo(prog.cond, state):
            return True
        return _eval(state, post, cfg)
    if isinstance(prog, Choice):
        return _conj(_lazy(lambda: _box(prog.left, state, post, cfg),
                           lambda: _box(prog.right, state, post, cfg)))
    if isinstance(prog, Seq):
        return _box(prog.left, state, Box(prog.right, post), cfg)
    if isinstance(prog, Ode):
        return _box_ode(prog, state, post, cfg)
    if isinstance(prog, Loop):
        return _box_loop(prog, state, post, cfg)
    raise TypeError(prog)


def _lazy(*thunks):
    for t in thunks:
        yield t()


def _box_loop(prog: Loop, state: State, post, cfg: EnumConfig):
    seen = {state}
    frontier = [state]
    results = [_eval(state, post, cfg)]
    for _ in range(cfg.unroll):
        nxt = []
        for s in frontier:
            for end in reach_relation(prog.body, s, cfg):
                if end not in seen:
                    seen.add(end)
                    nxt.append(end)
        if not nxt:
            return _conj(results)
        results.extend(_eval(s, post, cfg) for s in nxt)
        if False in results:
            return False
        frontier = nxt
    value = _conj(results)
    if value is True and cfg.exact_only:
        raise _Bounded(f"loop unrolled {cfg.unroll} times without reaching a fixpoint")
    return value


def _box_ode(ode: Ode, state: State, post, cfg: EnumConfig):
    fo = post if is_first_order(post) else discharge(post)
    curves = _symbolic_curves(ode, state) if fo is not None else None
    if curves is not None:
        exact_value = _ode_exact(ode, state, fo, curves)
        if exact_value is not None:
            return exact_value
    if cfg.exact_only:
        raise _Bounded("ODE box evaluated at sampled durations only")
    ends = []
    for trace in explore(ode, state, cfg).traces:
        for flow in trace.flows:
            if flow.last() is ABORT:
                continue
            if hasattr(flow, "samples"):
                # numeric flows: also check a thinned set of intermediate states
                ends.extend(flow.start.update(flow.samples.state_at(k)) for k in range(0, len(flow.samples.times), 50))
            ends.append(flow.last())
    return _conj(_eval(s, post, cfg) for s in ends)


def _ode_exact(ode: Ode, state: State, post, curves):
    """Exact [ode & R] post for polynomial flows, or None when an endpoint is irrational."""
    tvar, curve = curves
    env = {v: Poly.const(exact(x)) for v, x in state.items()}
    env.update(dict(curve))
    if ode.domain is not None and not eval_fo(ode.domain, state):
        return True
    if not free_variables(post) <= set(env):
        raise Undetermined("postcondition mentions variables without a value")
    try:
        along_post = substitute_many(post, env)
    except SubstitutionError:
        return None
    end, closed = None, True
    if ode.domain is not None:
        along_dom = substitute_many(ode.domain, env)
        if not _quantifier_free_in(along_dom, tvar):
            return None
        for piece, ok in truth_pieces(along_dom, tvar, Fraction(0), None):
            if not ok:
                break
            end, closed = piece.hi, piece.hi_closed
        else:
            end = None
    if end is not None and not isinstance(end, Fraction):
        return None
    if not _quantifier_free_in(along_post, tvar):
        t = Poly.var(tvar)
        admissible = Atom(-t, "<=")
        if end is not None:
            admissible = And(admissible, Atom(t - end, "<=" if closed else "<"))
        return decide_closed(Forall(tvar, Imp(admissible, along_post)))
    for piece, ok in truth_pieces(along_post, tvar, Fraction(0), end):
        if ok:
            continue
        if end is not None and not closed and piece.is_point and piece.lo == end:
            continue
        return False
    return True


def _quantifier_free_in(f, var):
    return is_quantifier_free(f) and free_variables(f) <= {var}


def discharge(f):
    """A first-order equivalent obtained by executing loop-free discrete boxes, or None."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        a = discharge(f.arg)
        return None if a is None else Not(a)
    if isinstance(f, (And, Or, Imp, Iff)):
        a, b = discharge(f.left), discharge(f.right)
        return None if a is None or b is None else type(f)(a, b)
    if isinstance(f, QUANTIFIERS):
        body = discharge(f.body)
        return None if body is None else type(f)(f.var, body)
    if isinstance(f, (Box, Diamond)) and not isinstance(f.post, Tae):
        post = discharge(f.post)
        if post is None:
            return None
        return _execute(f.prog, post, isinstance(f, Box))
    return None


def _execute(prog, post, box: bool):
    if isinstance(prog, Assign):
        try:
            return substitute_many(post, {prog.var: prog.term})
        except SubstitutionError:
            return None
    if isinstance(prog, Test):
        cond = discharge(prog.cond)
        if cond is None:
            return None
        return Imp(cond, post) if box else And(cond, post)
    if isinstance(prog, Choice):
        a, b = _execute(prog.left, post, box), _execute(prog.right, post, box)
        if a is None or b is None:
            return None
        return And(a, b) if box else Or(a, b)
    if isinstance(prog, Seq):
        inner = _execute(prog.right, post, box)
        return None if inner is None else _execute(prog.left, inner, box)
    return None


__all__ = [
    "TaeVerdict", "BoxVerdict", "ViolationReport", "tae_eval", "eval_box_tae",
    "eval_diamond_tae", "eval_state_formula", "discharge",
]
