"""Exact truth of a quantifier-free formula along one variable."""

from __future__ import annotations

from ..syntax import atoms
from .normal import eval_signs
from .roots import partition


def truth_pieces(f, var: str, lo=None, hi=None) -> list:
    """Sorted ``(piece, truth)`` pairs partitioning [lo, hi] for a formula in ``var`` only."""
    polys = list(dict.fromkeys(a.poly for a in atoms(f)))
    index = {p: i for i, p in enumerate(polys)}
    dense = [p.univariate(var) if not p.is_zero() else [] for p in polys]
    pieces = partition(dense, lo, hi)
    return [(piece, eval_signs(f, lambda q, s=piece.signs: s[index[q]])) for piece in pieces]


def rational_point(piece):
    """An exact rational inside the piece, or None for an irrational point."""
    return piece.sample
