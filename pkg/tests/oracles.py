"""Independent reference implementations used as test oracles.

None of these call into pdtl.arith; they rely on sympy for exact roots or
on plain enumeration.
"""

from fractions import Fraction
from itertools import combinations

import sympy

from pdtl.poly import Poly
from pdtl.syntax import And, Atom, Exists, Forall, Iff, Imp, Not, Or

T = sympy.Symbol("t")


def to_sympy(p: Poly, symbols=None):
    symbols = symbols or {}
    out = sympy.Integer(0)
    for mono, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for v, k in mono:
            term *= symbols.setdefault(v, sympy.Symbol(v)) ** k
        out += term
    return out


def compare(value, op):
    return {
        "=": value == 0, "!=": value != 0, "<": value < 0, "<=": value <= 0, ">": value > 0, ">=": value >= 0,
    }[op]


def evaluate(f, env: dict) -> bool:
    """Truth of a quantifier-free formula at a rational point."""
    if isinstance(f, Atom):
        return compare(f.poly.evaluate(env), f.op)
    if isinstance(f, Not):
        return not evaluate(f.arg, env)
    if isinstance(f, And):
        return evaluate(f.left, env) and evaluate(f.right, env)
    if isinstance(f, Or):
        return evaluate(f.left, env) or evaluate(f.right, env)
    if isinstance(f, Imp):
        return (not evaluate(f.left, env)) or evaluate(f.right, env)
    if isinstance(f, Iff):
        return evaluate(f.left, env) == evaluate(f.right, env)
    raise TypeError(f)


# -- univariate: roots by sympy -----------------------------------------------------------------


def real_roots(polys, lo=None, hi=None):
    """Sorted distinct real roots (sympy numbers) of univariate sympy polynomials in T."""
    roots = set()
    for p in polys:
        poly = sympy.Poly(p, T)
        if poly.degree() <= 0:
            continue
        for r in sympy.real_roots(poly):
            if (lo is None or r >= lo) and (hi is None or r <= hi):
                roots.add(r)
    return sorted(roots, key=lambda r: sympy.N(r, 60))


def sign_at(p, r) -> int:
    """Exact sign of sympy polynomial p at the real algebraic number r."""
    r = sympy.sympify(r)
    if r.is_Rational:
        v = p.subs(T, r)
        return int(bool(v > 0)) - int(bool(v < 0))
    if sympy.Poly(p, T).degree() <= 0:
        v = sympy.Poly(p, T).as_expr()
        return int(bool(v > 0)) - int(bool(v < 0))
    minimal = sympy.minimal_polynomial(r, T)
    if sympy.rem(sympy.Poly(p, T), sympy.Poly(minimal, T)).is_zero:
        return 0
    v = sympy.N(p.subs(T, r), 80)
    return int(bool(v > 0)) - int(bool(v < 0))


def eval_signs(f, sign_of) -> bool:
    if isinstance(f, Atom):
        s = sign_of(f.poly)
        return {"=": s == 0, "!=": s != 0, "<": s < 0, "<=": s <= 0, ">": s > 0, ">=": s >= 0}[f.op]
    if isinstance(f, Not):
        return not eval_signs(f.arg, sign_of)
    if isinstance(f, And):
        return eval_signs(f.left, sign_of) and eval_signs(f.right, sign_of)
    if isinstance(f, Or):
        return eval_signs(f.left, sign_of) or eval_signs(f.right, sign_of)
    if isinstance(f, Imp):
        return (not eval_signs(f.left, sign_of)) or eval_signs(f.right, sign_of)
    if isinstance(f, Iff):
        return eval_signs(f.left, sign_of) == eval_signs(f.right, sign_of)
    raise TypeError(f)


def atom_polys(f):
    if isinstance(f, Atom):
        return [f.poly]
    if isinstance(f, Not):
        return atom_polys(f.arg)
    return atom_polys(f.left) + atom_polys(f.right)


def truth_at_root(f, var, r) -> bool:
    return eval_signs(f, lambda p: sign_at(to_sympy(p, {var: T}), r))


def cells(f, var, lo, hi=None):
    """[(kind, point, truth)] for the formula in one variable on [lo, hi] (hi None: unbounded).

    kind is "root" for the exact roots and "gap" for a rational sample of each
    open interval between them.
    """
    polys = [to_sympy(p, {var: T}) for p in atom_polys(f)]
    roots = real_roots(polys, lo, hi)
    points = [sympy.Rational(lo)] + [r for r in roots if r != lo]
    if hi is not None and (not points or points[-1] != hi):
        points.append(sympy.Rational(hi))
    out = []
    for i, r in enumerate(points):
        out.append(("root", r, truth_at_root(f, var, r)))
        if i + 1 < len(points):
            q = _rational_between(r, points[i + 1])
            out.append(("gap", q, evaluate(f, {var: q})))
    if hi is None:
        q = _rational_above(points[-1])
        out.append(("gap", q, evaluate(f, {var: q})))
    return out


def neighbours(cells_, k):
    """Truth of the cells immediately left and right of the point k (left is None at the start)."""
    key = lambda r: sympy.N(r, 60)  # noqa: E731
    k = sympy.sympify(k)
    for i, (kind, r, _) in enumerate(cells_):
        if kind == "root" and r == k:
            return (cells_[i - 1][2] if i > 0 else None), cells_[i + 1][2]
        if kind == "root" and key(r) > key(k):
            return cells_[i - 1][2], cells_[i - 1][2]
    return cells_[-1][2], cells_[-1][2]


def _rational_between(a, b) -> Fraction:
    lo, hi = sympy.N(a, 60), sympy.N(b, 60)
    mid = sympy.nsimplify((lo + hi) / 2, rational=True, tolerance=(hi - lo) / 8)
    return Fraction(int(mid.p), int(mid.q))


def _rational_above(a) -> Fraction:
    return Fraction(int(sympy.floor(sympy.N(a, 30))) + 1)


# -- linear quantifier truth by cell sampling ----------------------------------------------------


def _linear_parts(p: Poly):
    coeffs = {}
    const = Fraction(0)
    for mono, c in p.items():
        if not mono:
            const = c
        else:
            ((v, k),) = mono
            assert k == 1, "linear atoms only"
            coeffs[v] = c
    return coeffs, const


def _project(forms, var):
    """Linear forms whose zeros are where the arrangement changes once ``var`` is projected away."""
    keep = [f for f in forms if var not in f[0]]
    moving = [f for f in forms if var in f[0]]
    for (ca, a0), (cb, b0) in combinations(moving, 2):
        ka, kb = ca[var], cb[var]
        coeffs = {}
        for v in set(ca) | set(cb):
            c = ca.get(v, 0) * kb - cb.get(v, 0) * ka
            if c and v != var:
                coeffs[v] = c
        keep.append((coeffs, a0 * kb - b0 * ka))
    return keep


def _bound_vars(f):
    if isinstance(f, (Forall, Exists)):
        return [f.var] + _bound_vars(f.body)
    if isinstance(f, Atom):
        return []
    if isinstance(f, Not):
        return _bound_vars(f.arg)
    return _bound_vars(f.left) + _bound_vars(f.right)


def _substitute_values(f, env):
    """Plug numbers into free occurrences (quantified names shadow)."""
    if isinstance(f, Atom):
        return Atom(f.poly.subs({v: Poly.const(c) for v, c in env.items()}), f.op)
    if isinstance(f, Not):
        return Not(_substitute_values(f.arg, env))
    if isinstance(f, (Forall, Exists)):
        inner = {k: c for k, c in env.items() if k != f.var}
        return type(f)(f.var, _substitute_values(f.body, inner))
    return type(f)(_substitute_values(f.left, env), _substitute_values(f.right, env))


def decide_linear(f, env: dict) -> bool:
    """Truth of a linear first-order formula at a rational point, by sampling every cell."""
    f = _substitute_values(f, env)
    return _decide(f)


def _decide(f) -> bool:
    if isinstance(f, Atom):
        return compare(f.poly.constant_value(), f.op)
    if isinstance(f, Not):
        return not _decide(f.arg)
    if isinstance(f, And):
        return _decide(f.left) and _decide(f.right)
    if isinstance(f, Or):
        return _decide(f.left) or _decide(f.right)
    if isinstance(f, Imp):
        return (not _decide(f.left)) or _decide(f.right)
    if isinstance(f, Iff):
        return _decide(f.left) == _decide(f.right)
    if isinstance(f, (Forall, Exists)):
        x = f.var
        forms = [_linear_parts(p) for p in atom_polys_q(f.body)]
        for v in _bound_vars(f.body):
            if v != x:
                forms = _project(forms, v)
        roots = sorted({-c0 / cs[x] for cs, c0 in forms if set(cs) == {x}})
        candidates = set(roots)
        if roots:
            candidates |= {roots[0] - 1, roots[-1] + 1}
            candidates |= {(a + b) / 2 for a, b in zip(roots, roots[1:])}
        else:
            candidates = {Fraction(0)}
        results = (_decide(_substitute_values(f.body, {x: c})) for c in sorted(candidates))
        return all(results) if isinstance(f, Forall) else any(results)
    raise TypeError(f)


def atom_polys_q(f):
    if isinstance(f, Atom):
        return [f.poly]
    if isinstance(f, Not):
        return atom_polys_q(f.arg)
    if isinstance(f, (Forall, Exists)):
        return atom_polys_q(f.body)
    return atom_polys_q(f.left) + atom_polys_q(f.right)


# -- measure by a fine grid ---------------------------------------------------------------------


def riemann_failure_measure(f, curves: dict, duration, points=100_000) -> float:
    """Midpoint-rule length of {t in [0, duration] : f fails} with the state given by ``curves``."""
    import numpy as np

    r = float(duration)
    ts = (np.arange(points) + 0.5) * (r / points)
    env = {v: np.polyval([float(c) for c in reversed(coeffs)], ts) for v, coeffs in curves.items()}
    ok = _eval_np(f, env, points)
    return float((~ok).sum()) * r / points


def _eval_np(f, env, n):
    import numpy as np

    if isinstance(f, Atom):
        total = np.zeros(n)
        for mono, c in f.poly.items():
            term = np.full(n, float(c))
            for v, k in mono:
                term = term * env[v] ** k
            total = total + term
        return np.asarray(compare(total, f.op)) & np.ones(n, dtype=bool)
    if isinstance(f, Not):
        return ~_eval_np(f.arg, env, n)
    if isinstance(f, And):
        return _eval_np(f.left, env, n) & _eval_np(f.right, env, n)
    if isinstance(f, Or):
        return _eval_np(f.left, env, n) | _eval_np(f.right, env, n)
    if isinstance(f, Imp):
        return ~_eval_np(f.left, env, n) | _eval_np(f.right, env, n)
    if isinstance(f, Iff):
        return _eval_np(f.left, env, n) == _eval_np(f.right, env, n)
    raise TypeError(f)
