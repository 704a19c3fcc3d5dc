"""Seeded random generators with exact case counts, for the acceptance suite."""

import random
from fractions import Fraction

from pdtl.poly import Poly
from pdtl.syntax import And, Assign, Atom, Choice, Imp, Loop, Not, Ode, Or, Seq, Test

LIN_VARS = ("x", "y")
OPS = ("=", ">=", "<", "<=", ">", "!=")


def rational(rng: random.Random, span=4, dens=(1, 2, 4)) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice(dens))


def lin_term(rng, variables=LIN_VARS) -> Poly:
    p = Poly.const(rational(rng))
    for v in rng.sample(variables, rng.randint(1, len(variables))):
        p = p + Poly.var(v) * rng.choice([-2, -1, 1, 2])
    return p


def lin_atom(rng, ops=OPS) -> Atom:
    return Atom(lin_term(rng), rng.choice(ops))


def lin_qf(rng, leaves=2):
    if leaves <= 1:
        return lin_atom(rng)
    k = rng.randint(1, leaves - 1)
    op = rng.choice([And, Or, Imp, "not"])
    if op == "not":
        return Not(lin_qf(rng, leaves - 1))
    return op(lin_qf(rng, k), lin_qf(rng, leaves - k))


def lin_ode(rng, domain_chance=0.3) -> Ode:
    vs = rng.sample(LIN_VARS, rng.randint(1, 2))
    eqs = tuple((v, Poly.const(rational(rng, 2, (1, 2)))) for v in vs)
    dom = lin_atom(rng, ("<=", ">=", "<", ">")) if rng.random() < domain_chance else None
    return Ode(eqs, dom)


def lin_program(rng, size=3, loops=False):
    if size <= 1:
        kind = rng.choice(["assign", "test", "ode"])
        if kind == "assign":
            return Assign(rng.choice(LIN_VARS), lin_term(rng))
        if kind == "test":
            return Test(lin_qf(rng, rng.randint(1, 2)))
        return lin_ode(rng)
    choices = ["seq", "choice"] + (["loop"] if loops else [])
    kind = rng.choice(choices)
    if kind == "loop":
        return Loop(lin_program(rng, size - 1, False))
    k = rng.randint(1, size - 1)
    ctor = Seq if kind == "seq" else Choice
    return ctor(lin_program(rng, k, loops), lin_program(rng, size - k, loops))


def unroll(prog, n: int):
    """Replace every loop by its first ``n`` iterations."""
    if isinstance(prog, Loop):
        body = unroll(prog.body, n)
        out = Test(Atom(Poly(), "="))
        for _ in range(n):
            out = Choice(Test(Atom(Poly(), "=")), Seq(body, out))
        return out
    if isinstance(prog, (Seq, Choice)):
        return type(prog)(unroll(prog.left, n), unroll(prog.right, n))
    return prog


def box_precondition(rng):
    """Conjunction of bounds lo <= v <= hi on each variable."""
    parts = []
    for v in LIN_VARS:
        lo = rng.randint(-3, 2)
        hi = lo + rng.randint(0, 3)
        parts.append(And(Atom(Poly.const(lo) - Poly.var(v), "<="), Atom(Poly.var(v) - hi, "<=")))
    return And(*parts)


def univariate_normal_form(rng, time="t", param="c", max_degree=4, leaves=3):
    """Normal-form formula over atoms e = 0, e >= 0, e < 0 with e a polynomial in ``time``.

    Coefficients are r + s*param so that a random value of the parameter
    can make leading coefficients vanish.
    """
    def atom():
        deg = rng.randint(0, max_degree)
        e = Poly()
        for i in range(deg + 1):
            coeff = Poly.const(rational(rng, 3, (1, 2))) + Poly.var(param) * rng.randint(-1, 1)
            e = e + coeff * Poly.var(time) ** i
        return Atom(e, rng.choice(["=", ">=", "<"]))

    def build(n):
        if n <= 1:
            return atom()
        k = rng.randint(1, n - 1)
        return rng.choice([And, Or])(build(k), build(n - k))

    return build(rng.randint(1, leaves))


def state(rng, variables=LIN_VARS, span=4):
    return {v: rational(rng, span) for v in variables}
