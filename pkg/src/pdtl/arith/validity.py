"""Validity of first-order formulas: exact where decidable, witnesses otherwise."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..syntax import is_first_order, is_quantifier_free, free_variables, substitute_many
from ..poly import Poly
from .fm import eliminate, fm_eliminate, prune_unsat, to_dnf
from .normal import NonlinearQuantifier, eval_qf
from .univariate import truth_pieces

GRID = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
RANDOM_TRIES = 200


@dataclass(frozen=True)
class Valid:
    certificate: str
    status = "valid"


@dataclass(frozen=True)
class Falsified:
    witness: dict = field(hash=False)
    status = "falsified"


@dataclass(frozen=True)
class Unknown:
    reason: str
    status = "unknown"


def check_validity(f):
    """Valid, Falsified(witness) or Unknown for a first-order formula."""
    if not is_first_order(f):
        raise ValueError("check_validity takes first-order formulas only")
    return _check(f)


@lru_cache(maxsize=4096)
def _check(f):
    if not is_quantifier_free(f):
        try:
            f = fm_eliminate(f)
        except NonlinearQuantifier as exc:
            return Unknown(f"nonlinear quantifier: {exc}")
    names = sorted(free_variables(f))

    if len(names) <= 1:
        var = names[0] if names else "_"
        pieces = truth_pieces(f, var)
        bad = [p for p, ok in pieces if not ok]
        if not bad:
            return Valid(f"sign partition into {len(pieces)} pieces")
        rational = [p for p in bad if p.sample is not None]
        if rational:
            return Falsified({var: rational[0].sample} if names else {})
        return Unknown("fails only at irrational points")

    try:
        if _unsat(to_dnf(f, False), names):
            return Valid(f"Fourier-Motzkin refutation of the negation over {', '.join(names)}")
        exact_attempt = True
    except NonlinearQuantifier:
        exact_attempt = False

    witness = _search(f, names)
    if witness is not None:
        return Falsified(witness)
    if exact_attempt:
        try:
            witness = _construct_witness(f, names)
        except NonlinearQuantifier:
            # back-substitution can multiply parametric coefficients into higher degrees
            return Unknown("not valid, but the witness construction left the linear fragment")
        if witness is not None:
            return Falsified(witness)
        return Unknown("not valid, but no rational counterexample was found")
    return Unknown("nonlinear arithmetic outside the decidable fragment; no counterexample found")


def _unsat(dnf, names) -> bool:
    for v in names:
        dnf = eliminate(dnf, v)
        if not dnf:
            return True
    return not prune_unsat(dnf)


def _search(f, names):
    for values in itertools.product(GRID, repeat=len(names)) if len(names) <= 4 else ():
        env = dict(zip(names, values))
        if not eval_qf(f, env):
            return env
    rng = random.Random(0)
    for _ in range(RANDOM_TRIES if len(names) > 4 else 0):
        env = {v: rng.choice(GRID) for v in names}
        if not eval_qf(f, env):
            return env
    for _ in range(RANDOM_TRIES):
        env = {v: Fraction(rng.randint(-200, 200), rng.randint(1, 20)) for v in names}
        if not eval_qf(f, env):
            return env
    return None


def _construct_witness(f, names):
    """Fix variables one at a time so the negation stays satisfiable."""
    env: dict = {}
    current = f
    for i, v in enumerate(names):
        rest = names[i + 1:]
        dnf = to_dnf(current, False)
        for r in rest:
            dnf = eliminate(dnf, r)
        projected = _dnf_formula(dnf)
        choice = None
        for piece, ok in truth_pieces(projected, v):
            if ok and piece.sample is not None:
                choice = piece.sample
                break
        if choice is None:
            return None
        env[v] = choice
        current = substitute_many(current, {v: Poly.const(choice)})
    return env if not eval_qf(f, env) else None


def _dnf_formula(dnf):
    from .normal import dnf_to_formula

    return dnf_to_formula(dnf)
