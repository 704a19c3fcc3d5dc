"""Canonical text rendering; output always reparses to an equal AST."""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, format_poly
from .syntax import (
    And, Assign, Atom, Box, Choice, Diamond, Exists, Forall, Iff, Imp, Loop,
    Not, Ode, Or, Seq, Tae, Test,
)

# formula precedence, higher binds tighter
_IFF, _IMP, _OR, _AND, _UNARY = 1, 2, 3, 4, 5
# program precedence
_CHOICE, _SEQ, _LOOP, _PRIM = 1, 2, 3, 4


def pretty_print(node) -> str:
    if isinstance(node, Poly):
        return format_poly(node)
    if isinstance(node, (Fraction, int)):
        return format_poly(Poly.const(node))
    if isinstance(node, (Assign, Test, Ode, Choice, Seq, Loop)):
        return _prog(node, 0)
    if isinstance(node, Tae):
        return "tae: " + _formula(node.body, _UNARY)
    return _formula(node, 0)


def format_atom(a: Atom) -> str:
    p = a.poly
    if p.is_zero() and a.op == "=":
        return "true"
    if p.is_zero() and a.op == "<":
        return "false"
    pos = Poly({m: c for m, c in p.terms.items() if c > 0})
    neg = Poly({m: -c for m, c in p.terms.items() if c < 0})
    return f"{format_poly(pos)} {a.op} {format_poly(neg)}"


def _paren(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def _formula(f, ctx: int) -> str:
    if isinstance(f, Atom):
        return format_atom(f)
    if isinstance(f, Not):
        return "!" + _formula(f.arg, _UNARY)
    if isinstance(f, And):
        text = f"{_formula(f.left, _AND)} & {_formula(f.right, _AND + 1)}"
        return _paren(text, ctx > _AND)
    if isinstance(f, Or):
        text = f"{_formula(f.left, _OR)} | {_formula(f.right, _OR + 1)}"
        return _paren(text, ctx > _OR)
    if isinstance(f, Imp):
        text = f"{_formula(f.left, _IMP + 1)} -> {_formula(f.right, _IMP)}"
        return _paren(text, ctx > _IMP)
    if isinstance(f, Iff):
        text = f"{_formula(f.left, _IFF)} <-> {_formula(f.right, _IFF + 1)}"
        return _paren(text, ctx > _IFF)
    if isinstance(f, Forall):
        return f"forall {f.var} {_formula(f.body, _UNARY)}"
    if isinstance(f, Exists):
        return f"exists {f.var} {_formula(f.body, _UNARY)}"
    if isinstance(f, Box):
        return f"[{_prog(f.prog, 0)}] {_post(f.post)}"
    if isinstance(f, Diamond):
        return f"<{_prog(f.prog, 0)}> {_post(f.post)}"
    raise TypeError(f"cannot print {f!r}")


def _post(k) -> str:
    if isinstance(k, Tae):
        return "tae: " + _formula(k.body, _UNARY)
    return _formula(k, _UNARY)


def _prog(p, ctx: int) -> str:
    if isinstance(p, Assign):
        return _paren(f"{p.var} := {format_poly(p.term)}", ctx >= _PRIM)
    if isinstance(p, Test):
        if isinstance(p.cond, Atom) and p.cond.poly.is_zero() and p.cond.op in ("=", "<"):
            return "?" + format_atom(p.cond)
        return f"?({_formula(p.cond, 0)})"
    if isinstance(p, Ode):
        eqs = ", ".join(f"{v}' = {format_poly(rhs)}" for v, rhs in p.eqs)
        if p.domain is not None:
            eqs += " & " + _formula(p.domain, 0)
        return "{" + eqs + "}"
    if isinstance(p, Choice):
        # sequences inside a choice get (redundant) parentheses for readability
        left = _prog(p.left, _CHOICE)
        right = _prog(p.right, _CHOICE + 1)
        if isinstance(p.left, Seq):
            left = f"({left})"
        if isinstance(p.right, Seq):
            right = f"({right})"
        return _paren(f"{left} ++ {right}", ctx > _CHOICE)
    if isinstance(p, Seq):
        text = f"{_prog(p.left, _SEQ)}; {_prog(p.right, _SEQ + 1)}"
        return _paren(text, ctx > _SEQ)
    if isinstance(p, Loop):
        return _prog(p.body, _PRIM) + "*"
    raise TypeError(f"cannot print {p!r}")


def format_sequent(ante, succ) -> str:
    left = ", ".join(pretty_print(f) for f in ante)
    right = ", ".join(pretty_print(f) for f in succ)
    return f"{left} |- {right}".strip()
