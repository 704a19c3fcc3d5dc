"""Truth of first-order formulas at a state, quantifiers included."""

from __future__ import annotations

from ..arith import NonlinearQuantifier, eval_qf, fm_eliminate
from ..arith.univariate import truth_pieces
from ..poly import Poly
from ..syntax import (
    QUANTIFIERS, And, Atom, Forall, Iff, Imp, Not, Or,
    free_variables, is_first_order, is_quantifier_free, substitute_many,
)
from .state import State, exact


class Undetermined(Exception):
    """The truth value is outside what can be decided here."""


def eval_fo(f, state: State) -> bool:
    if not is_first_order(f):
        raise TypeError("eval_fo takes first-order formulas")
    if is_quantifier_free(f):
        try:
            return eval_qf(f, state.as_dict())
        except KeyError as exc:
            raise Undetermined(f"variable {exc.args[0]} has no value") from exc
    env = {v: Poly.const(exact(state[v])) for v in free_variables(f) if v in state}
    missing = free_variables(f) - env.keys()
    if missing:
        raise Undetermined(f"variables {', '.join(sorted(missing))} have no value")
    return decide_closed(substitute_many(f, env))


def decide_closed(f) -> bool:
    """Truth of a first-order sentence: elimination when linear, root isolation in one variable."""
    try:
        return eval_qf(fm_eliminate(f), {})
    except NonlinearQuantifier:
        pass
    return _decide(f)


def _decide(f) -> bool:
    if isinstance(f, Atom):
        return eval_qf(f, {})
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
    if isinstance(f, QUANTIFIERS):
        if not is_quantifier_free(f.body):
            raise Undetermined("nested nonlinear quantifiers")
        pieces = truth_pieces(f.body, f.var)
        if isinstance(f, Forall):
            return all(ok for _, ok in pieces)
        return any(ok for _, ok in pieces)
    raise TypeError(f)

