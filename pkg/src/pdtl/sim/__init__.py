"""Executable trace semantics: enumeration, tae valuation and violation measures."""

from .evaluate import (
    BoxVerdict, TaeVerdict, discharge, eval_box_tae, eval_diamond_tae, eval_state_formula, tae_eval,
)
from .logic import Undetermined
from .measure import Interval, QuantifiedPostcondition, ViolationReport, violation_measure
from .state import ABORT, State
from .traces import (
    Discrete, EnumConfig, NotComposable, NumericODE, OutOfRange, SymbolicODE, Trace,
    compose_traces, enumerate_traces, explore, position_to_time, reach_relation,
)

__all__ = [
    "BoxVerdict", "TaeVerdict", "discharge", "eval_box_tae", "eval_diamond_tae",
    "eval_state_formula", "tae_eval", "Undetermined", "Interval", "QuantifiedPostcondition",
    "ViolationReport", "violation_measure", "ABORT", "State", "Discrete", "EnumConfig",
    "NotComposable", "NumericODE", "OutOfRange", "SymbolicODE", "Trace", "compose_traces",
    "enumerate_traces", "explore", "position_to_time", "reach_relation",
]
