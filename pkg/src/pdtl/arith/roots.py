"""Exact real root isolation for univariate rational polynomials.

Polynomials are coefficient lists ``[a0, a1, ..., an]`` of Fractions.  Real
roots are either exact rationals or :class:`AlgebraicRoot` values that carry
their square-free defining polynomial and an isolating open interval with
rational endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import gcd, isqrt, lcm
from typing import Optional, Sequence, Union


class ZeroPolynomial(ValueError):
    pass


# -- dense univariate arithmetic ----------------------------------------------


def trim(p: Sequence) -> list:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def peval(p: Sequence, x):
    acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign(x) -> int:
    return (x > 0) - (x < 0)


def pderiv(p: Sequence) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def pmul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pdivmod(a: Sequence, b: Sequence) -> tuple:
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        c = r[-1] / lead
        q[shift] = c
        for i, y in enumerate(b):
            r[i + shift] -= c * y
        r = trim(r)
    return trim(q), r


def monic(p: Sequence) -> list:
    p = trim(p)
    return [c / p[-1] for c in p] if p else []


def pgcd(a: Sequence, b: Sequence) -> list:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def squarefree(p: Sequence) -> list:
    p = trim(p)
    if len(p) <= 2:
        return monic(p)
    g = pgcd(p, pderiv(p))
    return monic(pdivmod(p, g)[0])


def integer_coeffs(p: Sequence) -> list:
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    return [c // g for c in ints]


# -- Sturm sequences --------------------------------------------------------------


def sturm_sequence(p: Sequence) -> list:
    p = trim(p)
    seq = [p, pderiv(p)]
    while seq[-1]:
        r = pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        lead = abs(r[-1])
        seq.append([-c / lead for c in r])
    return [s for s in seq if s]


def _variations(seq: list, x) -> int:
    signs = [sign(peval(s, x)) for s in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Sequence, lo, hi) -> int:
    """Distinct real roots of ``p`` in the half-open interval (lo, hi]."""
    p = trim(p)
    if not p:
        raise ZeroPolynomial("the zero polynomial has infinitely many roots")
    if lo >= hi:
        return 0
    seq = sturm_sequence(squarefree(p))
    return _variations(seq, lo) - _variations(seq, hi)


def cauchy_bound(p: Sequence) -> Fraction:
    p = trim(p)
    if len(p) <= 1:
        return Fraction(1)
    lead = abs(p[-1])
    return 1 + max(abs(c) / lead for c in p[:-1])


# -- real numbers: rationals and isolated algebraic roots ---------------------------


@total_ordering
@dataclass(eq=False)
class AlgebraicRoot:
    """The unique root of ``poly`` (square-free, no rational roots) in (lo, hi)."""

    poly: list
    lo: Fraction
    hi: Fraction

    def refine(self, times: int = 1) -> "AlgebraicRoot":
        for _ in range(times):
            mid = (self.lo + self.hi) / 2
            slo = sign(peval(self.poly, self.lo))
            smid = sign(peval(self.poly, mid))
            if slo == smid:
                self.lo = mid
            else:
                self.hi = mid
        return self

    def width(self) -> Fraction:
        return self.hi - self.lo

    def __float__(self) -> float:
        while self.width() > Fraction(1, 2**60):
            self.refine(8)
        return float((self.lo + self.hi) / 2)

    def _cmp_rational(self, q: Fraction) -> int:
        while self.lo < q < self.hi:
            self.refine()
        return -1 if self.hi <= q else 1

    def _cmp(self, other) -> int:
        if isinstance(other, AlgebraicRoot):
            if other is self:
                return 0
            while True:
                if self.hi <= other.lo:
                    return -1
                if other.hi <= self.lo:
                    return 1
                g = pgcd(self.poly, other.poly)
                if len(g) > 1:
                    lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
                    if lo < hi and count_roots(g, lo, hi) > 0 and peval(g, hi) != 0:
                        return 0
                self.refine()
                other.refine()
        return self._cmp_rational(Fraction(other))

    def __eq__(self, other):
        if isinstance(other, (AlgebraicRoot, int, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"Root(~{float(self):.12g} in ({self.lo}, {self.hi}))"


Real = Union[Fraction, AlgebraicRoot]


def real_float(x: Real) -> float:
    return float(x)


def sign_at(p: Sequence, x: Real) -> int:
    """Exact sign of ``p`` at a rational or algebraic point."""
    p = trim(p)
    if not p:
        return 0
    if not isinstance(x, AlgebraicRoot):
        return sign(peval(p, Fraction(x)))
    g = pgcd(x.poly, p)
    if len(g) > 1 and count_roots(g, x.lo, x.hi) > 0 and peval(g, x.hi) != 0:
        return 0
    sp = squarefree(p)
    seq = sturm_sequence(sp)
    for _ in range(400):
        slo, shi = sign(peval(p, x.lo)), sign(peval(p, x.hi))
        if slo and slo == shi and _variations(seq, x.lo) == _variations(seq, x.hi):
            return slo
        x.refine()
    raise RuntimeError("sign determination did not converge")


def rational_roots(p: Sequence) -> list:
    """All rational roots, sorted (square-free input assumed or not)."""
    ints = integer_coeffs(p)
    if not ints:
        raise ZeroPolynomial("zero polynomial")
    roots = set()
    while ints and ints[0] == 0:
        roots.add(Fraction(0))
        ints = ints[1:]
    if len(ints) <= 1:
        return sorted(roots)
    a0, an = abs(ints[0]), abs(ints[-1])
    if max(a0, an) > 10**12:
        return sorted(roots)
    for num in _divisors(a0):
        for den in _divisors(an):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and peval(ints, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def _divisors(n: int) -> list:
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


# -- isolation ------------------------------------------------------------------------


def isolate_roots(p: Sequence, lo=None, hi=None) -> list:
    """Sorted, pairwise disjoint isolation of the distinct real roots in [lo, hi].

    Each item is a Fraction (an exact rational root) or an AlgebraicRoot whose
    open interval lies strictly inside (lo, hi) and contains no other item.
    ``None`` bounds mean unbounded.
    """
    p = trim(p)
    if not p:
        raise ZeroPolynomial("cannot isolate roots of the zero polynomial")
    sq = squarefree(p)
    if len(sq) <= 1:
        return []
    bound = cauchy_bound(sq)
    lo_ = Fraction(lo) if lo is not None else -bound - 1
    hi_ = Fraction(hi) if hi is not None else bound + 1
    if lo_ > hi_:
        return []
    exact = [r for r in rational_roots(sq) if lo_ <= r <= hi_]
    rest = sq
    for r in rational_roots(sq):
        rest = pdivmod(rest, [-r, Fraction(1)])[0]
    found: list = list(exact)
    if len(rest) > 1 and lo_ < hi_:
        seq = sturm_sequence(rest)
        _bisect(rest, seq, lo_, hi_, found)
    _separate(found)
    return sorted(found, key=_sort_key)


def _sort_key(x):
    return x if isinstance(x, Fraction) else x.lo


def _bisect(q, seq, a: Fraction, b: Fraction, out: list) -> None:
    # open interval (a, b); q has no rational roots unless found at midpoints
    n = _variations(seq, a) - _variations(seq, b)
    if peval(q, b) == 0:
        n -= 1
    if n <= 0:
        return
    if n == 1:
        out.append(AlgebraicRoot(q, a, b))
        return
    m = (a + b) / 2
    if peval(q, m) == 0:
        out.append(m)
    _bisect(q, seq, a, m, out)
    _bisect(q, seq, m, b, out)


def _separate(items: list) -> None:
    """Refine algebraic intervals until every item is strictly apart from the others."""
    changed = True
    while changed:
        changed = False
        items.sort(key=_sort_key)
        for x, y in zip(items, items[1:]):
            xhi = x if isinstance(x, Fraction) else x.hi
            ylo = y if isinstance(y, Fraction) else y.lo
            if xhi >= ylo:
                if isinstance(x, AlgebraicRoot):
                    x.refine()
                if isinstance(y, AlgebraicRoot):
                    y.refine()
                changed = True


# -- sign partitions ------------------------------------------------------------------


@dataclass
class Piece:
    """A point (lo == hi, both closed) or an interval with rational/algebraic ends.

    ``None`` ends are infinite.  ``sample`` is a rational point inside the piece
    (for points with an algebraic location it is None).
    """

    lo: Optional[Real]
    hi: Optional[Real]
    lo_closed: bool
    hi_closed: bool
    signs: tuple
    sample: Optional[Fraction] = None

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.lo is self.hi

    @property
    def sign(self) -> int:
        return self.signs[0]

    def length(self) -> Optional[Fraction]:
        if self.is_point:
            return Fraction(0)
        if self.lo is None or self.hi is None:
            return None
        if isinstance(self.lo, Fraction) and isinstance(self.hi, Fraction):
            return self.hi - self.lo
        return None

    def length_bounds(self) -> tuple:
        """(lower, upper) rational bounds on the length."""
        if self.is_point:
            return Fraction(0), Fraction(0)
        lo_lo, lo_hi = _bounds(self.lo)
        hi_lo, hi_hi = _bounds(self.hi)
        return max(hi_lo - lo_hi, Fraction(0)), hi_hi - lo_lo

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None:
            if x < self.lo if self.lo_closed else not (self.lo < x):
                return False
        if self.hi is not None:
            if x > self.hi if self.hi_closed else not (x < self.hi):
                return False
        return True

    def describe(self) -> str:
        def fmt(x):
            if x is None:
                return "inf"
            return str(x) if isinstance(x, Fraction) else f"{float(x):.9g}"

        if self.is_point:
            return "{" + fmt(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        lo = "-inf" if self.lo is None else fmt(self.lo)
        return f"{left}{lo}, {fmt(self.hi)}{right}"


def _bounds(x: Real) -> tuple:
    if isinstance(x, AlgebraicRoot):
        while x.width() > Fraction(1, 2**40):
            x.refine(8)
        return x.lo, x.hi
    return x, x


def partition(polys: Sequence, lo=None, hi=None) -> list:
    """Pieces of [lo, hi] on which every polynomial has constant sign.

    Returns a sorted list of :class:`Piece` whose ``signs`` tuple lists the
    sign of each input polynomial.  Zero polynomials contribute sign 0.
    """
    polys = [trim(p) for p in polys]
    lo = None if lo is None else Fraction(lo)
    hi = None if hi is None else Fraction(hi)
    if lo is not None and hi is not None and lo > hi:
        raise ValueError("empty interval")
    nonzero = [p for p in polys if len(p) > 1]
    prod = [Fraction(1)]
    for p in nonzero:
        prod = pmul(prod, squarefree(p))
    roots = isolate_roots(prod, lo, hi) if len(prod) > 1 else []

    def signs_at(x) -> tuple:
        return tuple(sign_at(p, x) for p in polys)

    pieces: list = []
    if lo is not None and hi is not None and lo == hi:
        return [Piece(lo, lo, True, True, signs_at(lo), lo)]

    boundaries: list = []
    for r in roots:
        if (lo is not None and r == lo) or (hi is not None and r == hi):
            continue
        boundaries.append(r)
    lo_is_root = lo is not None and any(isinstance(r, Fraction) and r == lo for r in roots)
    hi_is_root = hi is not None and any(isinstance(r, Fraction) and r == hi for r in roots)

    if lo_is_root:
        pieces.append(Piece(lo, lo, True, True, signs_at(lo), lo))
    left = lo
    left_closed = lo is not None and not lo_is_root
    for r in boundaries:
        pieces.append(_open_piece(left, r, left_closed, False, signs_at))
        sample = r if isinstance(r, Fraction) else None
        pieces.append(Piece(r, r, True, True, signs_at(r), sample))
        left, left_closed = r, False
    pieces.append(_open_piece(left, hi, left_closed, hi is not None and not hi_is_root, signs_at))
    if hi_is_root:
        pieces.append(Piece(hi, hi, True, True, signs_at(hi), hi))
    return pieces


def _open_piece(lo, hi, lo_closed, hi_closed, signs_at) -> Piece:
    a = None if lo is None else (lo if isinstance(lo, Fraction) else lo.hi)
    b = None if hi is None else (hi if isinstance(hi, Fraction) else hi.lo)
    if a is None and b is None:
        s = Fraction(0)
    elif a is None:
        s = b - 1
    elif b is None:
        s = a + 1
    else:
        s = (a + b) / 2
    return Piece(lo, hi, lo_closed, hi_closed, signs_at(s), s)


def sign_partition(p: Sequence, lo=None, hi=None) -> list:
    """Single-polynomial partition; zero polynomial gives one zero-sign piece."""
    return partition([p], lo, hi)
