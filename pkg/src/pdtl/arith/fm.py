"""Fourier–Motzkin quantifier elimination for formulas linear in their bound variables.

Formulas are handled as DNFs: a list of clauses, each a frozenset of literals
``(poly, op)`` with ``op`` in ``{'=', '>=', '>'}`` meaning ``poly op 0``.
Coefficients of the eliminated variable may mention other variables; their
sign is then split three ways, which keeps elimination exact.
"""

from __future__ import annotations

from fractions import Fraction

from ..poly import Poly
from ..syntax import (
    And, Atom, Box, Diamond, Exists, Forall, Iff, Imp, Not, Or,
)
from .normal import (
    NonlinearQuantifier, atom_literals, dnf_to_formula, negate_literal,
    normalize_literal,
)

TRUE_DNF = [frozenset()]
FALSE_DNF: list = []


# -- clause simplification ---------------------------------------------------------


def _bound_form(lit):
    """Split ``q op 0`` into (h, kind, value, strict): h primitive with positive lead."""
    q, op = lit
    c = q.constant_term()
    h = q - Poly.const(c)
    content, hp = h.primitive()
    value = -c / content
    if op == "=":
        return hp, "eq", value, False
    strict = op == ">"
    return hp, ("lo" if content > 0 else "hi"), value, strict


def simplify_clause(lits):
    """Canonical conjunction of literals, or None when it is unsatisfiable."""
    groups: dict = {}
    for lit in lits:
        lit = normalize_literal(*lit) if not isinstance(lit, bool) else lit
        if lit is False:
            return None
        if lit is True:
            continue
        hp, kind, value, strict = _bound_form(lit)
        g = groups.setdefault(hp, {"lo": None, "hi": None, "eq": None})
        if kind == "eq":
            if g["eq"] is not None and g["eq"] != value:
                return None
            g["eq"] = value
        elif kind == "lo":
            cur = g["lo"]
            if cur is None or value > cur[0] or (value == cur[0] and strict):
                g["lo"] = (value, strict)
        else:
            cur = g["hi"]
            if cur is None or value < cur[0] or (value == cur[0] and strict):
                g["hi"] = (value, strict)
    out = set()
    for hp, g in groups.items():
        lo, hi, eq = g["lo"], g["hi"], g["eq"]
        if eq is not None:
            if lo is not None and (eq < lo[0] or (eq == lo[0] and lo[1])):
                return None
            if hi is not None and (eq > hi[0] or (eq == hi[0] and hi[1])):
                return None
            out.add(normalize_literal(hp - Poly.const(eq), "="))
            continue
        if lo is not None and hi is not None:
            if lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1])):
                return None
            if lo[0] == hi[0]:
                out.add(normalize_literal(hp - Poly.const(lo[0]), "="))
                continue
        if lo is not None:
            out.add(normalize_literal(hp - Poly.const(lo[0]), ">" if lo[1] else ">="))
        if hi is not None:
            out.add(normalize_literal(Poly.const(hi[0]) - hp, ">" if hi[1] else ">="))
    return frozenset(out)


def simplify_dnf(clauses) -> list:
    """Simplify each clause, then drop duplicates and subsumed clauses."""
    seen = []
    for c in clauses:
        s = simplify_clause(c)
        if s is None:
            continue
        if not s:
            return [frozenset()]
        if s not in seen:
            seen.append(s)
    seen.sort(key=len)
    kept: list = []
    for c in seen:
        if not any(k <= c for k in kept):
            kept.append(c)
    return kept


def _product(a: list, b: list) -> list:
    if not a or not b:
        return []
    return simplify_dnf(x | y for x in a for y in b)


def negate_dnf(clauses: list) -> list:
    result = [frozenset()]
    for clause in clauses:
        factor = [frozenset([n]) for lit in clause for n in negate_literal(lit)]
        result = _product(result, factor)
        if not result:
            break
    return result


# -- formula to DNF ------------------------------------------------------------------


def to_dnf(f, positive: bool = True) -> list:
    """DNF of ``f`` (or of its negation), eliminating any quantifiers on the way."""
    if isinstance(f, Atom):
        return simplify_dnf(frozenset([lit]) for lit in atom_literals(f, positive))
    if isinstance(f, Not):
        return to_dnf(f.arg, not positive)
    if isinstance(f, And):
        if positive:
            return _product(to_dnf(f.left, True), to_dnf(f.right, True))
        return simplify_dnf(to_dnf(f.left, False) + to_dnf(f.right, False))
    if isinstance(f, Or):
        if positive:
            return simplify_dnf(to_dnf(f.left, True) + to_dnf(f.right, True))
        return _product(to_dnf(f.left, False), to_dnf(f.right, False))
    if isinstance(f, Imp):
        if positive:
            return simplify_dnf(to_dnf(f.left, False) + to_dnf(f.right, True))
        return _product(to_dnf(f.left, True), to_dnf(f.right, False))
    if isinstance(f, Iff):
        a_pos, a_neg = to_dnf(f.left, True), to_dnf(f.left, False)
        b_pos, b_neg = to_dnf(f.right, True), to_dnf(f.right, False)
        if positive:
            return simplify_dnf(_product(a_pos, b_pos) + _product(a_neg, b_neg))
        return simplify_dnf(_product(a_pos, b_neg) + _product(a_neg, b_pos))
    if isinstance(f, Exists):
        if positive:
            return eliminate(to_dnf(f.body, True), f.var)
        return negate_dnf(eliminate(to_dnf(f.body, True), f.var))
    if isinstance(f, Forall):
        inner = eliminate(to_dnf(f.body, False), f.var)
        return negate_dnf(inner) if positive else inner
    if isinstance(f, (Box, Diamond)):
        raise ValueError("quantifier elimination applies to first-order formulas only")
    raise TypeError(f"unexpected node {f!r}")


# -- single-variable elimination ----------------------------------------------------------


def eliminate(clauses: list, var: str) -> list:
    """DNF equivalent to ``exists var`` of the given DNF."""
    out = []
    for clause in clauses:
        out.extend(_eliminate_clause(clause, var, {}))
    return simplify_dnf(out)


def _sign_key(a: Poly):
    content, prim = a.primitive()
    return prim, (1 if content > 0 else -1)


def _coeff_sign(a: Poly, signs: dict):
    if a.is_constant():
        v = a.constant_value()
        return (v > 0) - (v < 0)
    prim, s = _sign_key(a)
    if prim in signs:
        return signs[prim] * s
    return None


def _eliminate_clause(clause, var: str, signs: dict) -> list:
    with_var, rest = [], []
    for lit in clause:
        d = lit[0].degree(var)
        if d > 1:
            raise NonlinearQuantifier(
                f"{var} occurs with degree {d}; only linear quantified variables are supported"
            )
        (with_var if d == 1 else rest).append(lit)
    if not with_var:
        return [clause]

    # split on the sign of the first coefficient whose sign is not yet known
    for q, op in with_var:
        a = q.coefficients(var)[1]
        if _coeff_sign(a, signs) is None:
            prim, _ = _sign_key(a)
            out = []
            for s, cond in ((1, (prim, ">")), (-1, (-prim, ">")), (0, (prim, "="))):
                branch = set(clause) | {cond}
                if s == 0:
                    branch = {_drop_zero_coeff(l, var, prim) for l in branch}
                simplified = simplify_clause(branch)
                if simplified is None:
                    continue
                out.extend(_eliminate_clause(simplified, var, {**signs, prim: s}))
            return out

    new = list(rest)
    parts = []
    for q, op in with_var:
        b, a = q.coefficients(var)
        s = _coeff_sign(a, signs)
        if s == 0:
            new.append((b, op))
        else:
            parts.append((a, b, op, s))

    eqs = [p for p in parts if p[2] == "="]
    if eqs:
        # prefer an equation with a constant coefficient: no case growth
        eqs.sort(key=lambda p: (not p[0].is_constant(), str(p[0])))
        a, b, _, _ = eqs[0]
        for p in parts:
            if p is eqs[0]:
                continue
            c, d, op, _ = p
            if a.is_constant():
                new.append((d - c * b / a.constant_value(), op))
            else:
                new.append((a * a * d - a * c * b, op))
    else:
        lowers = [p for p in parts if p[3] > 0]
        uppers = [p for p in parts if p[3] < 0]
        for a1, b1, op1, _ in lowers:
            for a2, b2, op2, _ in uppers:
                strict = op1 == ">" or op2 == ">"
                new.append((a1 * b2 - a2 * b1, ">" if strict else ">="))
    simplified = simplify_clause(new)
    return [] if simplified is None else [simplified]


def _drop_zero_coeff(lit, var: str, prim: Poly):
    q, op = lit
    if q.degree(var) != 1:
        return lit
    coeffs = q.coefficients(var)
    a = coeffs[1]
    if not a.is_constant() and _sign_key(a)[0] == prim:
        return (coeffs[0], op)
    return lit


# -- public entry points -------------------------------------------------------------------


def prune_unsat(clauses: list) -> list:
    """Drop clauses that are unsatisfiable over the reals (linear clauses only)."""
    kept = []
    for clause in clauses:
        names = sorted({v for q, _ in clause for v in q.variables()})
        try:
            d = [clause]
            for v in names:
                d = eliminate(d, v)
                if not d:
                    break
        except NonlinearQuantifier:
            kept.append(clause)
            continue
        if d:
            kept.append(clause)
    return kept


def qe_dnf(f) -> list:
    return prune_unsat(to_dnf(f, True))


def fm_eliminate(f):
    """Quantifier-free equivalent of a first-order formula linear in its bound variables."""
    return dnf_to_formula(qe_dnf(f))


def exists_closure_is_false(f, names) -> bool:
    """Whether ``exists names. f`` is false, decided by elimination."""
    d = to_dnf(f, True)
    for v in names:
        d = eliminate(d, v)
        if not d:
            return True
    return not prune_unsat(d)


def literal_value(lit, env) -> bool:
    from .normal import compare

    q, op = lit
    return compare(q.evaluate(env), op)


def dnf_holds(clauses, env) -> bool:
    return any(all(literal_value(l, env) for l in c) for c in clauses)


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
