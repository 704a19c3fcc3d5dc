"""How long a flow spends outside a formula: exact for polynomial flows, sampled otherwise."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from ..arith import NonlinearQuantifier, fm_eliminate
from ..arith.univariate import truth_pieces
from ..poly import Poly
from ..syntax import And, Atom, Iff, Imp, Not, Or, is_first_order, is_quantifier_free, substitute_many
from ..arith.normal import compare
from .state import exact
from .traces import EnumConfig, NumericODE, SymbolicODE

Z95 = 1.959963984540054


class QuantifiedPostcondition(ValueError):
    """The postcondition has quantifiers that cannot be eliminated, or modalities."""


@dataclass(frozen=True)
class Interval:
    lo: object
    hi: object
    lo_closed: bool = True
    hi_closed: bool = True

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def shift(self, offset) -> "Interval":
        return Interval(_add(self.lo, offset), _add(self.hi, offset), self.lo_closed, self.hi_closed)

    def __str__(self):
        if self.is_point:
            return "{" + _show(self.lo) + "}"
        return ("[" if self.lo_closed else "(") + f"{_show(self.lo)}, {_show(self.hi)}" + ("]" if self.hi_closed else ")")

    def to_json(self) -> dict:
        return {"lo": _show(self.lo), "hi": _show(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


def _add(x, offset):
    if isinstance(x, Fraction):
        return x + offset
    if isinstance(x, float):
        return x + float(offset)
    return float(x) + float(offset)  # algebraic endpoint: report a float


def _show(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(round(float(x), 12))


@dataclass(frozen=True)
class ViolationReport:
    """Measure of the failure set of one flow.

    Exact reports carry the failure set itself; numeric ones a Wilson 95%
    interval ``[lower, upper]`` around the sampled estimate.
    """

    measure: object
    exact: bool
    witnesses: tuple = ()
    confidence: float | None = None
    lower: float | None = None
    upper: float | None = None
    samples: int | None = None
    threshold: float | None = None
    offset: object = 0  # where the flow starts on the trace's time axis

    @property
    def status(self) -> str:
        """zero, positive or inconclusive."""
        if self.exact:
            return "zero" if self.measure == 0 else "positive"
        if self.upper < self.threshold:
            return "zero"
        if self.lower > self.threshold:
            return "positive"
        return "inconclusive"

    def located(self, offset) -> "ViolationReport":
        return replace(self, offset=offset)

    @property
    def times(self) -> tuple:
        """Witnesses on the trace's time axis."""
        return tuple(w.shift(self.offset) for w in self.witnesses)

    def to_json(self) -> dict:
        out = {
            "measure": _show(self.measure),
            "exact": self.exact,
            "witnesses": [w.to_json() for w in self.witnesses],
            "times": [w.to_json() for w in self.times],
        }
        if not self.exact:
            out.update(confidence=self.confidence, lower=self.lower, upper=self.upper,
                       samples=self.samples, threshold=self.threshold)
        return out


def prepare_postcondition(phi):
    """A quantifier-free equivalent of ``phi``, or QuantifiedPostcondition."""
    if not is_first_order(phi):
        raise QuantifiedPostcondition("postconditions under tae are first order")
    if is_quantifier_free(phi):
        return phi
    try:
        return fm_eliminate(phi)
    except NonlinearQuantifier as exc:
        raise QuantifiedPostcondition(str(exc)) from exc


def violation_measure(flow, phi, cfg: EnumConfig | None = None, key=(0, 0)) -> ViolationReport:
    """Measure of {z in [0, r] : flow(z) fails phi}; ``key`` seeds the sampler for numeric flows."""
    if float(flow.duration) <= 0:
        raise ValueError("violation measure is taken over flows of positive duration")
    phi = prepare_postcondition(phi)
    if isinstance(flow, SymbolicODE):
        return _exact_measure(flow, phi)
    if isinstance(flow, NumericODE):
        return _sampled_measure(flow, phi, cfg or EnumConfig(), key)
    raise TypeError(flow)


def _exact_measure(flow: SymbolicODE, phi) -> ViolationReport:
    env = {v: Poly.const(exact(x)) for v, x in flow.start.items()}
    env.update(dict(flow.curves))
    along = substitute_many(phi, env)
    total = Fraction(0)
    approx = 0.0
    rational = True
    witnesses = []
    for piece, ok in truth_pieces(along, flow.time_var, Fraction(0), flow.duration):
        if ok:
            continue
        witnesses.append(Interval(piece.lo, piece.hi, piece.lo_closed, piece.hi_closed))
        if piece.is_point:
            continue
        length = piece.length()
        if length is None:
            rational = False
            approx += float(piece.hi) - float(piece.lo)
        else:
            total += length
            approx += float(length)
    measure = total if rational else approx
    return ViolationReport(measure, True, tuple(_merge(witnesses)))


def _merge(intervals):
    """Join touching failure pieces into maximal intervals."""
    out = []
    for w in intervals:
        if out and out[-1].hi == w.lo and (out[-1].hi_closed or w.lo_closed):
            prev = out.pop()
            w = Interval(prev.lo, w.hi, prev.lo_closed, w.hi_closed)
        out.append(w)
    return out


def _sampled_measure(flow: NumericODE, phi, cfg: EnumConfig, key) -> ViolationReport:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, *key]))
    r = float(flow.duration)
    m = cfg.mc_samples
    ts = rng.uniform(0.0, r, size=m)
    values = flow.samples.interpolate(ts)
    env = {v: float(x) for v, x in flow.start.items()}
    env.update({v: values[:, i] for i, v in enumerate(flow.samples.names)})
    ok = np.broadcast_to(_eval_vectorized(phi, env), (m,))
    failing = ts[~ok]
    p = failing.size / m
    denom = 1 + Z95 ** 2 / m
    center = (p + Z95 ** 2 / (2 * m)) / denom
    half = Z95 * math.sqrt(p * (1 - p) / m + Z95 ** 2 / (4 * m * m)) / denom
    witnesses = (Interval(float(failing.min()), float(failing.max())),) if failing.size else ()
    return ViolationReport(
        measure=p * r, exact=False, witnesses=witnesses, confidence=half * r,
        lower=max(center - half, 0.0) * r, upper=(center + half) * r, samples=m,
        threshold=cfg.threshold * r,
    )


def _eval_vectorized(f, env):
    if isinstance(f, Atom):
        return np.asarray(compare(np.asarray(f.poly.evaluate(env), dtype=float), f.op))
    if isinstance(f, Not):
        return ~_eval_vectorized(f.arg, env)
    if isinstance(f, And):
        return _eval_vectorized(f.left, env) & _eval_vectorized(f.right, env)
    if isinstance(f, Or):
        return _eval_vectorized(f.left, env) | _eval_vectorized(f.right, env)
    if isinstance(f, Imp):
        return ~_eval_vectorized(f.left, env) | _eval_vectorized(f.right, env)
    if isinstance(f, Iff):
        return _eval_vectorized(f.left, env) == _eval_vectorized(f.right, env)
    raise TypeError(f)
