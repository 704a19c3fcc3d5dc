"""Formulas for the topological closure of a formula's truth set."""

from __future__ import annotations

from functools import lru_cache

from ..poly import Poly
from ..syntax import (
    And, Atom, Exists, Forall, Imp, conj, free_variables, fresh_name,
    is_first_order, is_linear, is_quantifier_free, substitute_many,
)
from .fm import fm_eliminate
from .normal import _nnf, eval_qf, tidy
from .univariate import truth_pieces


def _check(f):
    if not is_first_order(f) or not is_quantifier_free(f):
        raise ValueError("closure takes quantifier-free first-order formulas")


@lru_cache(maxsize=4096)
def closure(f):
    """Quantifier-free closure for linear formulas; the explicit epsilon formula otherwise.

    In the linear case the Euclidean ball is replaced by a box of the same
    radius, which yields the same closure and keeps everything linear.
    """
    _check(f)
    if is_linear(f):
        return fm_eliminate(_closure_formula(f, euclidean=False))
    return _closure_formula(f, euclidean=True)


def _closure_formula(f, euclidean: bool):
    names = sorted(free_variables(f))
    used = set(names)
    eps = fresh_name("eps", used)
    used.add(eps)
    copies = {}
    for x in names:
        y = fresh_name(x + "_", used)
        used.add(y)
        copies[x] = y
    e = Poly.var(eps)
    moved = substitute_many(f, {x: Poly.var(y) for x, y in copies.items()})
    if euclidean:
        dist = sum(((Poly.var(x) - Poly.var(y)) ** 2 for x, y in copies.items()), Poly())
        near = Atom(dist - e * e, "<")
    else:
        near = conj(
            part
            for x, y in copies.items()
            for part in (Atom(Poly.var(x) - Poly.var(y) - e, "<"), Atom(Poly.var(y) - Poly.var(x) - e, "<"))
        )
    body = And(moved, near) if copies else moved
    for y in reversed(list(copies.values())):
        body = Exists(y, body)
    return Forall(eps, Imp(Atom(e, ">"), body))


def closure_display(f):
    """Strict-to-nonstrict relaxation; a superset of the closure, for display only."""
    _check(f)
    return tidy(_relax(_nnf(f, True)))


def _relax(f):
    if isinstance(f, Atom):
        return Atom(f.poly, "<=") if f.op == "<" else f
    return type(f)(_relax(f.left), _relax(f.right))


_DIRECTIONS = 24


def in_closure(point: dict, f):
    """True, False, or None (undetermined) for membership of a point in the closure."""
    _check(f)
    if eval_qf(f, point):
        return True
    if not eval_qf(_relax(_nnf(f, True)), point):
        return False
    if is_linear(f):
        return eval_qf(closure(f), point)
    # probe straight lines through the point for a piece of the set starting at it
    names = sorted(free_variables(f))
    s = fresh_name("s", set(names))
    for direction in _directions(names):
        line = {x: Poly.const(point[x]) + Poly.var(s) * d for x, d in zip(names, direction)}
        g = substitute_many(f, line)
        for piece, ok in truth_pieces(g, s, 0, 1):
            if piece.lo == 0 and not piece.is_point:
                if ok:
                    return True
                break
    return None


def _directions(names):
    import itertools
    import random

    n = len(names)
    for i in range(n):
        for sign in (1, -1):
            yield [sign if j == i else 0 for j in range(n)]
    for signs in itertools.product((1, -1), repeat=n) if n <= 4 else ():
        yield list(signs)
    rng = random.Random(0)
    for _ in range(_DIRECTIONS):
        yield [rng.randint(-5, 5) for _ in range(n)]
