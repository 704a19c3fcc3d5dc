"""Polynomial solutions of ODE systems by Lie series, plus a fixed-step RK4 fallback."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .poly import Poly
from .syntax import Ode, all_names, fresh_name

MAX_DEPTH = 25


class NotPolynomialSolvable(ValueError):
    """The system has no polynomial solution (or none was found)."""


class DepthExceeded(NotPolynomialSolvable):
    """Lie derivatives did not vanish within the depth cap."""


@dataclass(frozen=True)
class PolySolution:
    """Per-variable polynomials in ``time_var`` over the initial-value symbols."""

    time_var: str
    solutions: tuple  # ((var, Poly), ...) in equation order
    initial: tuple  # ((var, initial symbol), ...)

    def as_dict(self) -> dict:
        return dict(self.solutions)

    def at(self, time) -> dict:
        """Solution polynomials with the time variable replaced by ``time`` (a Poly or number)."""
        t = time if isinstance(time, Poly) else Poly.const(time)
        return {v: y.subs({self.time_var: t}) for v, y in self.solutions}

    def evaluate(self, initial_values: dict, time) -> dict:
        env = {sym: initial_values[v] for v, sym in self.initial}
        for name in self._parameters():
            env.setdefault(name, initial_values[name])
        env[self.time_var] = time
        return {v: y.evaluate(env) for v, y in self.solutions}

    def _parameters(self):
        syms = {sym for _, sym in self.initial} | {self.time_var}
        return {n for _, y in self.solutions for n in y.variables()} - syms


def lie_derivative(p: Poly, rhs: dict) -> Poly:
    out = Poly()
    for v in p.variables():
        if v in rhs:
            out = out + p.derivative(v) * rhs[v]
    return out


def _constant_linear_part(sys: Ode):
    """Coefficient matrix when the system is affine with constant coefficients, else None."""
    names = sys.variables
    rows = []
    for _, f in sys.eqs:
        if f.degree() > 1:
            return None
        row = []
        for v in names:
            c = f.coefficients(v)
            a = c[1] if len(c) > 1 else Poly()
            if not a.is_constant():
                return None
            row.append(a.constant_value())
        for v in f.variables() - set(names):
            c = f.coefficients(v)
            if len(c) > 1 and not c[1].is_constant():
                return None
        rows.append(row)
    return rows


def _is_nilpotent(matrix) -> bool:
    n = len(matrix)
    m = np.array([[Fraction(x) for x in row] for row in matrix], dtype=object)
    power = m.copy()
    for _ in range(n):
        if not power.any():
            return True
        power = power.dot(m)
    return not power.any()


def solve_polynomial(sys: Ode, time_var: str | None = None, initial_names=None,
                     avoid=(), max_depth: int = MAX_DEPTH) -> PolySolution:
    """Taylor polynomial of the flow when all iterated Lie derivatives eventually vanish.

    ``initial_names`` maps each ODE variable to its initial-value symbol
    (default: the variable itself, as the axioms use it).
    """
    rhs = sys.rhs()
    names = sys.variables
    linear = _constant_linear_part(sys)
    if linear is not None and not _is_nilpotent(linear):
        raise NotPolynomialSolvable(
            "the linear part is not nilpotent, so the flow is not polynomial"
        )
    initial_names = dict(initial_names or {})
    init = {v: initial_names.get(v, v) for v in names}
    taken = set(all_names(sys)) | set(avoid) | set(init.values())
    t = time_var or fresh_name("t", taken)
    if t in taken:
        raise ValueError(f"time variable {t} collides with a name of the system")
    to_initial = {v: Poly.var(s) for v, s in init.items() if s != v}
    tp = Poly.var(t)
    sols = []
    for v in names:
        term = Poly.var(v)
        total = Poly()
        for k in range(max_depth + 1):
            if term.is_zero():
                break
            total = total + term.subs(to_initial) * tp ** k / factorial(k)
            term = lie_derivative(term, rhs)
        else:
            raise DepthExceeded(
                f"Lie derivatives of {v} did not vanish within depth {max_depth}"
            )
        sols.append((v, total))
    sol = PolySolution(t, tuple(sols), tuple(init.items()))
    if not verify_solution(sys, sol):  # pragma: no cover - guards the construction
        raise NotPolynomialSolvable("constructed solution failed verification")
    return sol


def verify_solution(sys: Ode, sol: PolySolution) -> bool:
    """d/dt y = f(y) as polynomial identities and y(0) equals the initial symbol."""
    ys = sol.as_dict()
    if set(ys) != set(sys.variables):
        return False
    init = dict(sol.initial)
    zero = {sol.time_var: Poly()}
    for v, f in sys.eqs:
        y = ys[v]
        if y.subs(zero) != Poly.var(init.get(v, v)):
            return False
        if y.derivative(sol.time_var) != f.subs(ys):
            return False
    return True


# -- numeric flows -----------------------------------------------------------------------


def compile_poly(p: Poly, names: list):
    """Vectorizable float evaluator ``g(x)`` with ``x[i]`` bound to ``names[i]``."""
    index = {n: i for i, n in enumerate(names)}
    terms = []
    for m, c in p.terms.items():
        factors = [repr(float(c))]
        for v, e in m:
            factors.append(f"x[{index[v]}]" + (f"**{e}" if e > 1 else ""))
        terms.append("*".join(factors))
    body = " + ".join(terms) if terms else "0.0"
    return eval(f"lambda x: {body}", {"__builtins__": {}})  # noqa: S307 - generated locally


@dataclass(frozen=True)
class SampledFlow:
    """RK4 samples: ``values[k, i]`` is variable ``names[i]`` at ``times[k]``."""

    names: tuple
    times: np.ndarray
    values: np.ndarray

    def state_at(self, k: int) -> dict:
        return {n: float(self.values[k, i]) for i, n in enumerate(self.names)}

    def interpolate(self, t):
        """Piecewise-linear values at time(s) ``t``; returns array (len(t), n)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([np.interp(t, self.times, self.values[:, i]) for i in range(len(self.names))], axis=1)


def numeric_flow(sys: Ode, state: dict, duration, step: float = 1e-3) -> SampledFlow:
    """Classical RK4 samples at 0, h, 2h, ... plus a final partial step to ``duration``."""
    r = float(duration)
    if r < 0 or step <= 0:
        raise ValueError("duration must be >= 0 and step > 0")
    odevars = list(sys.variables)
    params = sorted(set().union(*(f.variables() for _, f in sys.eqs)) - set(odevars))
    names = odevars + params
    funcs = [compile_poly(f, names) for _, f in sys.eqs]
    n = len(odevars)
    x = np.array([float(state[v]) for v in names], dtype=float)

    def deriv(vec):
        out = np.zeros_like(vec)
        for i, g in enumerate(funcs):
            out[i] = g(vec)
        return out

    times = [0.0]
    rows = [x.copy()]
    t = 0.0
    full = int(np.floor(r / step + 1e-12))
    steps = [step] * full
    rest = r - full * step
    if rest > 1e-15:
        steps.append(rest)
    for h in steps:
        k1 = deriv(x)
        k2 = deriv(x + h / 2 * k1)
        k3 = deriv(x + h / 2 * k2)
        k4 = deriv(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = min(t + h, r)
        times.append(t)
        rows.append(x.copy())
    if len(times) > 1:
        times[-1] = r
    values = np.array(rows)[:, :n]
    return SampledFlow(tuple(odevars), np.array(times), values)
