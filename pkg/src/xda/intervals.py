"""Closed rational intervals with containment-preserving arithmetic.

Used wherever a digit stream or an integer root forces us to work with
an enclosure instead of a closed-form value.  The contract for every
operation: if x is in I and y is in J then f(x, y) is in f(I, J).
Endpoints are Fractions, so nothing here ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import ExactScalar, quad_sign


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order: %s > %s" % (self.lo, self.hi))

    @staticmethod
    def point(x) -> "RationalInterval":
        f = Fraction(x)
        return RationalInterval(f, f)

    @staticmethod
    def of(lo, hi) -> "RationalInterval":
        return RationalInterval(Fraction(lo), Fraction(hi))

    # -- arithmetic -----------------------------------------------------------

    def _as_iv(self, other) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return other
        return RationalInterval.point(other)

    def __add__(self, other):
        o = self._as_iv(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._as_iv(other)
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return self._as_iv(other) - self

    def __mul__(self, other):
        o = self._as_iv(other)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(c), max(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._as_iv(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("division by interval containing zero")
        return self * RationalInterval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return self._as_iv(other) / self

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0:
            return RationalInterval.point(1)
        if k % 2 == 1 or self.lo >= 0:
            return RationalInterval(self.lo ** k, self.hi ** k)
        if self.hi <= 0:
            return RationalInterval(self.hi ** k, self.lo ** k)
        return RationalInterval(Fraction(0), max(self.lo ** k, self.hi ** k))

    # -- queries --------------------------------------------------------------

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: ExactScalar) -> bool:
        return quad_sign(x - self.lo) >= 0 and quad_sign(self.hi - x) >= 0

    def strictly_below(self, x) -> bool:
        """Every element of the interval is < x."""
        return quad_sign(x - self.hi) > 0

    def strictly_above(self, x) -> bool:
        return quad_sign(self.lo - x) > 0

    def below_or_equal(self, x) -> bool:
        return quad_sign(x - self.hi) >= 0

    def intersect(self, other) -> "RationalInterval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return RationalInterval(lo, hi) if lo <= hi else None

    def hull(self, other) -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __repr__(self):
        return "[%s, %s]" % (self.lo, self.hi)


def enclose(x: ExactScalar, digits: int = 50) -> RationalInterval:
    """Enclose any exact scalar; degenerate interval for a Fraction."""
    from .scalars import as_fraction_pair

    lo, hi = as_fraction_pair(x, digits)
    return RationalInterval(lo, hi)


def nth_root_interval(q: Fraction, n: int, digits: int = 30) -> RationalInterval:
    """Enclosure of q**(1/n) for q >= 0, exact when q is an n-th power."""
    from .errors import OutOfRange

    q = Fraction(q)
    if q < 0:
        raise OutOfRange("negative radicand for even-style root enclosure")
    if n < 1:
        raise OutOfRange("root order must be >= 1")
    if q == 0:
        return RationalInterval.point(0)
    t = 10 ** digits
    # floor((q * t^n)^(1/n)) by integer Newton iteration
    m = q.numerator * t ** n // q.denominator
    r = _int_nth_root(m, n)
    lo = Fraction(r, t)
    if lo ** n == q:
        return RationalInterval.point(lo)
    return RationalInterval(lo, Fraction(r + 1, t))


def _int_nth_root(m: int, n: int) -> int:
    """Largest r with r**n <= m, for m >= 0."""
    if m < 2:
        return m
    if n == 1:
        return m
    r = 1 << ((m.bit_length() + n - 1) // n)
    while True:
        nr = ((n - 1) * r + m // r ** (n - 1)) // n
        if nr >= r:
            break
        r = nr
    while r ** n > m:
        r -= 1
    while (r + 1) ** n <= m:
        r += 1
    return r
