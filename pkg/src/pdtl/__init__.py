"""Proof kernel and trace-semantics oracle for time-almost-everywhere dynamic logic."""

from .parser import ParseError, parse_program, parse_state_formula, parse_term
from .poly import Poly
from .printer import pretty_print
from .syntax import free_variables, substitute

__all__ = [
    "ParseError",
    "Poly",
    "free_variables",
    "parse_program",
    "parse_state_formula",
    "parse_term",
    "pretty_print",
    "substitute",
]
