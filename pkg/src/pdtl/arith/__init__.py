"""Exact real arithmetic: normal forms, elimination, closure, validity, roots."""

from .closure import closure, closure_display, in_closure
from .fm import fm_eliminate
from .gtransform import g_transform
from .normal import NonlinearQuantifier, eval_qf, to_normal_form, tidy
from .roots import Piece, ZeroPolynomial, isolate_roots, partition, sign_partition
from .validity import Falsified, Unknown, Valid, check_validity

__all__ = [
    "NonlinearQuantifier", "ZeroPolynomial", "Piece", "Valid", "Falsified", "Unknown",
    "closure", "closure_display", "in_closure", "fm_eliminate", "g_transform",
    "eval_qf", "to_normal_form", "tidy", "isolate_roots", "partition",
    "sign_partition", "check_validity",
]
