"""Normal forms, literal utilities and direct evaluation of first-order formulas."""

from __future__ import annotations


from ..poly import Poly
from ..syntax import (
    FALSE, TRUE, And, Atom, Box, Diamond, Exists, Forall, Iff, Imp, Not, Or,
    conj, disj, is_first_order,
)


class NonlinearQuantifier(ValueError):
    """A quantified variable occurs non-linearly; outside the decidable fragment."""


def compare(value, op: str) -> bool:
    if op == "=":
        return value == 0
    if op == "!=":
        return value != 0
    if op == ">=":
        return value >= 0
    if op == "<=":
        return value <= 0
    if op == ">":
        return value > 0
    if op == "<":
        return value < 0
    raise ValueError(op)


def sign_satisfies(s: int, op: str) -> bool:
    return compare(s, op)


def eval_qf(f, env) -> bool:
    """Truth of a quantifier-free formula at a point (exact for Fractions)."""
    if isinstance(f, Atom):
        return compare(f.poly.evaluate(env), f.op)
    if isinstance(f, Not):
        return not eval_qf(f.arg, env)
    if isinstance(f, And):
        return eval_qf(f.left, env) and eval_qf(f.right, env)
    if isinstance(f, Or):
        return eval_qf(f.left, env) or eval_qf(f.right, env)
    if isinstance(f, Imp):
        return (not eval_qf(f.left, env)) or eval_qf(f.right, env)
    if isinstance(f, Iff):
        return eval_qf(f.left, env) == eval_qf(f.right, env)
    raise TypeError(f"not quantifier free: {f!r}")


def eval_signs(f, sign_of) -> bool:
    """Truth of a quantifier-free formula given a function atom-poly -> sign."""
    if isinstance(f, Atom):
        return compare(sign_of(f.poly), f.op)
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
    raise TypeError(f"not quantifier free: {f!r}")


# -- the {=0, >=0, <0} normal form ------------------------------------------------


def _nf_atom(a: Atom, positive: bool):
    e, op = a.poly, a.op
    if not positive:
        op = {"=": "!=", "!=": "=", ">=": "<", "<": ">=", "<=": ">", ">": "<="}[op]
    if op == "=":
        return Atom(e, "=")
    if op == ">=":
        return Atom(e, ">=")
    if op == "<":
        return Atom(e, "<")
    if op == "<=":
        return Atom(-e, ">=")
    if op == ">":
        return Atom(-e, "<")
    return Or(Atom(e, "<"), Atom(-e, "<"))


def _nnf(f, positive: bool):
    if isinstance(f, Atom):
        return _nf_atom(f, positive)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, And):
        op = And if positive else Or
        return op(_nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Or):
        op = Or if positive else And
        return op(_nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Imp):
        if positive:
            return Or(_nnf(f.left, False), _nnf(f.right, True))
        return And(_nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if positive:
            return Or(And(_nnf(a, True), _nnf(b, True)), And(_nnf(a, False), _nnf(b, False)))
        return Or(And(_nnf(a, True), _nnf(b, False)), And(_nnf(a, False), _nnf(b, True)))
    raise TypeError(f"unexpected node in normal form conversion: {f!r}")


def to_normal_form(f):
    """Equivalent formula over e=0, e>=0, e<0 atoms joined by & and | only."""
    if not is_first_order(f):
        raise ValueError("normal forms are defined for first-order formulas only")
    if any(isinstance(g, (Forall, Exists)) for g in _walk(f)):
        from .fm import fm_eliminate

        f = fm_eliminate(f)
    return _nnf(f, True)


def _walk(f):
    yield f
    if isinstance(f, Not):
        yield from _walk(f.arg)
    elif isinstance(f, (And, Or, Imp, Iff)):
        yield from _walk(f.left)
        yield from _walk(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from _walk(f.body)


def is_normal_form(f) -> bool:
    if isinstance(f, Atom):
        return f.op in ("=", ">=", "<")
    if isinstance(f, (And, Or)):
        return is_normal_form(f.left) and is_normal_form(f.right)
    return False


# -- literals: (poly, op) with op in {'=', '>=', '>'} meaning poly op 0 ---------------


def normalize_literal(p: Poly, op: str):
    """Canonical literal, or True/False when the polynomial is constant."""
    if p.is_constant():
        return compare(p.constant_value(), op)
    content, prim = p.primitive()
    if op == "=":
        return (prim, "=")
    if content < 0:
        # primitive() forced a positive leading coefficient; undo the sign flip
        prim = -prim
    return (prim, op)


def literal_to_atom(lit) -> Atom:
    p, op = lit
    # present with a positive leading coefficient where possible
    if op != "=" and p.leading()[1] < 0:
        return Atom(-p, {">=": "<=", ">": "<"}[op])
    return Atom(p, op)


def atom_literals(a: Atom, positive: bool) -> list:
    """The atom (or its negation) as a disjunction of literals."""
    p, op = a.poly, a.op
    if not positive:
        op = {"=": "!=", "!=": "=", ">=": "<", "<": ">=", "<=": ">", ">": "<="}[op]
    if op == "=":
        return [(p, "=")]
    if op == "!=":
        return [(p, ">"), (-p, ">")]
    if op == ">=":
        return [(p, ">=")]
    if op == ">":
        return [(p, ">")]
    if op == "<=":
        return [(-p, ">=")]
    return [(-p, ">")]


def negate_literal(lit) -> list:
    p, op = lit
    if op == "=":
        return [(p, ">"), (-p, ">")]
    if op == ">=":
        return [(-p, ">")]
    return [(-p, ">=")]


def dnf_to_formula(clauses) -> object:
    """Formula for a DNF given as an iterable of literal collections."""
    clauses = list(clauses)
    if not clauses:
        return FALSE
    parts = []
    for clause in clauses:
        lits = sorted(clause, key=_lit_key)
        parts.append(conj(literal_to_atom(l) for l in lits) if lits else TRUE)
    if any(p == TRUE for p in parts):
        return TRUE
    return disj(parts)


def _lit_key(lit):
    from ..poly import mono_key

    p, op = lit
    return (tuple(mono_key(m) for m, _ in p.items()), str(p), op)


def tidy_atom(a: Atom) -> Atom:
    """Primitive integer coefficients and a positive leading coefficient."""
    p = a.poly
    if p.is_constant():
        return TRUE if compare(p.constant_value(), a.op) else FALSE
    content, prim = p.primitive()
    op = a.op
    if content < 0:
        op = {"=": "=", "!=": "!=", ">=": "<=", "<=": ">=", ">": "<", "<": ">"}[op]
    return Atom(prim, op)


def tidy(f):
    """Normalize atoms and fold constant subformulas; keeps the connective shape."""
    if isinstance(f, Atom):
        return tidy_atom(f)
    if isinstance(f, Not):
        a = tidy(f.arg)
        if a == TRUE:
            return FALSE
        if a == FALSE:
            return TRUE
        return Not(a)
    if isinstance(f, And):
        a, b = tidy(f.left), tidy(f.right)
        if a == FALSE or b == FALSE:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE or a == b:
            return a
        return And(a, b)
    if isinstance(f, Or):
        a, b = tidy(f.left), tidy(f.right)
        if a == TRUE or b == TRUE:
            return TRUE
        if a == FALSE:
            return b
        if b == FALSE or a == b:
            return a
        return Or(a, b)
    if isinstance(f, Imp):
        a, b = tidy(f.left), tidy(f.right)
        if a == FALSE or b == TRUE:
            return TRUE
        if a == TRUE:
            return b
        return Imp(a, b)
    if isinstance(f, Iff):
        a, b = tidy(f.left), tidy(f.right)
        if a == b:
            return TRUE
        return Iff(a, b)
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, tidy(f.body))
    if isinstance(f, (Box, Diamond)):
        return f
    raise TypeError(f)
