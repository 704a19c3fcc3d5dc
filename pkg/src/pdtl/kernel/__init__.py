"""Sequent-calculus proof kernel for tae boxes."""

from .derived import Builder, Step, apply_derived, expansion
from .rules import (
    Closed, Open, apply_dl_axiom, apply_rule, apply_tae_axiom, cl, close_by_arith,
    rewrite_in_context,
)
from .script import (
    OpenGoal, ProofNode, ProofScript, Verdict, check_script, format_verdict, parse_script,
)
from .sequent import (
    ContextError, KernelError, Position, ReplayMismatch, Sequent, ShapeMismatch,
    formula_at, parse_position,
)

__all__ = [
    "Builder", "Step", "apply_derived", "expansion",
    "Closed", "Open", "apply_dl_axiom", "apply_rule", "apply_tae_axiom", "cl",
    "close_by_arith", "rewrite_in_context",
    "OpenGoal", "ProofNode", "ProofScript", "Verdict", "check_script", "format_verdict",
    "parse_script",
    "ContextError", "KernelError", "Position", "ReplayMismatch", "Sequent", "ShapeMismatch",
    "formula_at", "parse_position",
]
