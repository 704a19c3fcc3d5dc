"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
name, exponents >= 1.  The empty tuple is the constant monomial.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Iterator, Mapping

Monomial = tuple  # tuple[tuple[str, int], ...]

ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    """Print order: higher total degree first, then lexicographic on variables."""
    return (-_mono_degree(m), tuple((v, -e) for v, e in m))


def _coerce(value) -> "Poly":
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, Fraction)) or isinstance(value, Rational):
        return Poly.const(value)
    raise TypeError(f"cannot convert {value!r} to Poly")


class Poly:
    """Immutable polynomial; the zero polynomial has no stored terms."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self._terms = clean
        self._hash = None

    # -- construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({ONE_MONO: c}) if c else cls()

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # -- basic views ----------------------------------------------------------
    @property
    def terms(self) -> dict:
        return self._terms

    def items(self) -> list:
        """Terms in canonical print order."""
        return sorted(self._terms.items(), key=lambda kv: mono_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE_MONO in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get(ONE_MONO, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE_MONO, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(v for m in self._terms for v, _ in m)

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if None); -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(_mono_degree(m) for m in self._terms)
        return max(dict(m).get(var, 0) for m in self._terms)

    def is_linear(self) -> bool:
        return self.degree() <= 1

    def leading(self) -> tuple:
        """(monomial, coefficient) first in print order."""
        return self.items()[0]

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if not other.is_constant() or other.is_zero():
            raise ZeroDivisionError("polynomials divide only by nonzero constants")
        c = other.constant_value()
        return Poly._raw({m: v / c for m, v in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a natural number")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly()
        return Poly._raw({m: v * c for m, v in self._terms.items()})

    # -- comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Poly.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    # -- calculus and substitution -----------------------------------------------
    def derivative(self, var: str) -> "Poly":
        out = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.get(var, 0)
            if not e:
                continue
            if e == 1:
                del exps[var]
            else:
                exps[var] = e - 1
            nm = tuple(sorted(exps.items()))
            out[nm] = out.get(nm, 0) + c * e
        return Poly(out)

    def subs(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        """Simultaneous substitution of polynomials for variables."""
        if not mapping or not (self.variables() & mapping.keys()):
            return self
        mapping = {k: _coerce(v) for k, v in mapping.items()}
        result = Poly()
        power_cache: dict = {}
        for m, c in self._terms.items():
            term = Poly.const(c)
            rest = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in power_cache:
                        power_cache[key] = mapping[v] ** e
                    term = term * power_cache[key]
                else:
                    rest.append((v, e))
            if rest:
                term = term * Poly._raw({tuple(rest): Fraction(1)})
            result = result + term
        return result

    def evaluate(self, env: Mapping[str, object]):
        """Value at a point; ``env`` must bind every variable.

        Works for Fractions, floats and numpy arrays alike.
        """
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                x = env[v]
                term = term * (x if e == 1 else x ** e)
            total = total + term
        return total

    def evaluate_float(self, env: Mapping[str, object]):
        total = 0.0
        for m, c in self._terms.items():
            term = float(c)
            for v, e in m:
                x = env[v]
                term = term * (x if e == 1 else x ** e)
            total = total + term
        return total

    def coefficients(self, var: str) -> list:
        """[a_0, a_1, ..., a_n] with each a_i free of ``var``."""
        n = self.degree(var)
        if n < 0:
            return []
        out = [dict() for _ in range(n + 1)]
        for m, c in self._terms.items():
            e = 0
            rest = []
            for v, k in m:
                if v == var:
                    e = k
                else:
                    rest.append((v, k))
            out[e][tuple(rest)] = c
        return [Poly(d) for d in out]

    def univariate(self, var: str) -> list:
        """Rational coefficient list [a_0..a_n]; the polynomial must mention only ``var``."""
        if self.variables() - {var}:
            raise ValueError(f"{self} is not univariate in {var}")
        return [a.constant_value() for a in self.coefficients(var)]

    @classmethod
    def from_univariate(cls, coeffs: Iterable, var: str) -> "Poly":
        out = {}
        for i, c in enumerate(coeffs):
            c = Fraction(c)
            if c:
                out[((var, i),) if i else ONE_MONO] = c
        return cls(out)

    def primitive(self) -> tuple:
        """(content, primitive) with integer coprime coefficients and positive leading coefficient.

        ``self == content * primitive``.
        """
        if not self._terms:
            return Fraction(0), self
        den = 1
        for c in self._terms.values():
            den = lcm(den, c.denominator)
        g = 0
        for c in self._terms.values():
            g = gcd(g, int(c * den))
        content = Fraction(g, den)
        if self.leading()[1] < 0:
            content = -content
        return content, Poly._raw({m: c / content for m, c in self._terms.items()})


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def format_poly(p: Poly) -> str:
    items = p.items()
    if not items:
        return "0"
    parts = []
    for i, (m, c) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = format_coeff(a)
        elif a == 1:
            body = format_monomial(m)
        else:
            body = f"{format_coeff(a)}*{format_monomial(m)}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def iter_vars(polys: Iterable[Poly]) -> Iterator[str]:
    for p in polys:
        yield from p.variables()


ZERO = Poly()
ONE = Poly.const(1)
