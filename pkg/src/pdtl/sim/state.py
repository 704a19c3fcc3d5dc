"""Immutable program states and the abort state."""

from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType


class _Abort:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABORT"

    def __reduce__(self):
        return (_Abort, ())


ABORT = _Abort()


def exact(value):
    """Fraction for ints, Fractions and floats (floats convert exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(float(value))


class State:
    """A total map from variable names to reals; hashable and read-only."""

    __slots__ = ("_values", "_key")

    def __init__(self, values=None, **kw):
        merged = dict(values or {}, **kw)
        self._values = MappingProxyType(
            {k: v if isinstance(v, (Fraction, float)) else Fraction(v) for k, v in sorted(merged.items())}
        )
        self._key = tuple(self._values.items())

    def __getitem__(self, name):
        return self._values[name]

    def __contains__(self, name):
        return name in self._values

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def get(self, name, default=None):
        return self._values.get(name, default)

    def items(self):
        return self._values.items()

    def as_dict(self) -> dict:
        return dict(self._values)

    def exact_dict(self) -> dict:
        return {k: exact(v) for k, v in self._values.items()}

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self._values.values())

    def set(self, name: str, value) -> "State":
        return State({**self._values, name: value})

    def update(self, mapping) -> "State":
        return State({**self._values, **mapping})

    def __eq__(self, other):
        return isinstance(other, State) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "State(" + ", ".join(f"{k}={_show(v)}" for k, v in self._key) + ")"

    def to_json(self) -> dict:
        return {k: _show(v) for k, v in self._key}


def _show(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))
