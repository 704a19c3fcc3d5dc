"""Turn "for almost every time" into an ordinary first-order condition on the time variable."""

from __future__ import annotations

from ..syntax import TRUE, And, Atom, Imp, Or, conj


def g_transform(f, time_var: str):
    """Structural g on a normal form; ``e < 0`` gains a closure plus a degenerate-case guard."""
    if isinstance(f, Atom):
        if f.op in ("=", ">="):
            return f
        if f.op != "<":
            raise ValueError(f"not a normal-form atom: {f.op}")
        coeffs = f.poly.coefficients(time_var)
        # a_n = 0 & ... & a_1 = 0: the atom does not depend on time at all
        guard = conj(Atom(a, "=") for a in reversed(coeffs[1:])) if len(coeffs) > 1 else TRUE
        return And(Atom(f.poly, "<="), Imp(guard, Atom(f.poly, "<")))
    if isinstance(f, And):
        return And(g_transform(f.left, time_var), g_transform(f.right, time_var))
    if isinstance(f, Or):
        return Or(g_transform(f.left, time_var), g_transform(f.right, time_var))
    raise ValueError(f"g_transform expects a normal form, got {type(f).__name__}")
