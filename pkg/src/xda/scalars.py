"""Exact scalars: rationals plus real quadratic irrationals (a + b*sqrt(d))/c.

Everything in the package that compares, floors or signs a number goes
through this module.  There is no floating point anywhere; a comparison
is decided by integer case analysis and is therefore a proof.

A value with a vanishing irrational part is always collapsed to a
``fractions.Fraction``, so equal values have equal representations and
can be deduplicated by :func:`scalar_key`.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Union

from .errors import FieldMismatch, OutOfRange

ExactScalar = Union[Fraction, "QuadScalar"]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _square_part(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s*s*m and m squarefree.  n must be positive."""
    s, m = 1, n
    for p in _SMALL_PRIMES:
        pp = p * p
        while m % pp == 0:
            m //= pp
            s *= p
    r = isqrt(m)
    if r * r == m:
        return s * r, 1
    # trial division for what is left; radicands here are small in practice
    f = 41
    while f * f <= m:
        ff = f * f
        while m % ff == 0:
            m //= ff
            s *= f
        f += 2
    return s, m


class QuadScalar:
    """An element (a + b*sqrt(d))/c of a real quadratic field, exactly.

    Normal form: d squarefree and > 1, b != 0, c > 0, gcd(a, b, c) == 1.
    Use the :func:`quad` factory, which collapses rational values to
    Fraction instead of constructing a degenerate QuadScalar.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if c == 0:
            raise ZeroDivisionError("zero denominator in quadratic scalar")
        if d <= 1:
            raise OutOfRange("radicand must be > 1, got %r" % (d,))
        if b == 0:
            raise ValueError("rational value; use Fraction or the quad() factory")
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(abs(a), abs(b)), c)
        self.a = a // g
        self.b = b // g
        self.c = c // g
        self.d = d

    # -- construction helpers -------------------------------------------------

    def _coerce(self, other) -> "QuadScalar":
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                raise FieldMismatch("sqrt(%d) vs sqrt(%d)" % (self.d, other.d))
            return other
        if isinstance(other, float):
            raise TypeError("refusing float operand in exact arithmetic")
        f = Fraction(other)
        return QuadScalar.__new__(QuadScalar)._raw(f.numerator, 0, f.denominator, self.d)

    def _raw(self, a, b, c, d):
        # bypass normal-form checks for internal temporaries (b may be 0)
        self.a, self.b, self.c, self.d = a, b, c, d
        return self

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return quad(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c,
                    self.c * o.c, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return quad(self.a * o.c - o.a * self.c, self.b * o.c - o.b * self.c,
                    self.c * o.c, self.d)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return quad(self.a * o.a + self.b * o.b * self.d,
                    self.a * o.b + self.b * o.a,
                    self.c * o.c, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        # multiply by the conjugate of o; norm = a^2 - b^2 d
        n = o.a * o.a - o.b * o.b * self.d
        if n == 0:
            raise ZeroDivisionError("division by zero quadratic scalar")
        return quad((self.a * o.a - self.b * o.b * self.d) * o.c,
                    (self.b * o.a - self.a * o.b) * o.c,
                    self.c * n, self.d)

    def __rtruediv__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return QuadScalar.__truediv__(o, self)

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.c, self.d)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out: ExactScalar = Fraction(1)
        base: ExactScalar = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- sign, order, floor ---------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the value, by integer case analysis on a^2 vs b^2 d."""
        a, b, d = self.a, self.b, self.d
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: |a| vs |b| sqrt(d) decided by squares
        lhs, rhs = a * a, b * b * d
        if lhs == rhs:
            # would mean sqrt(d) rational; impossible for squarefree d > 1
            raise AssertionError("squarefree radicand produced a^2 == b^2 d")
        big_is_a = lhs > rhs
        return (1 if a > 0 else -1) if big_is_a else (1 if b > 0 else -1)

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, Fraction):
            return (diff > 0) - (diff < 0)
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)
        if isinstance(other, (int, Fraction)):
            return False  # normal form has b != 0, hence irrational
        return NotImplemented

    def __hash__(self):
        return hash(("quad", self.a, self.b, self.c, self.d))

    def __floor__(self) -> int:
        # b*sqrt(d) lies in [s, s+1) for b > 0 and (-s-1, -s] for b < 0,
        # where s = isqrt(b^2 d); bracket, then fix up by exact comparison.
        s = isqrt(self.b * self.b * self.d)
        if self.b > 0:
            f = (self.a + s) // self.c
        else:
            f = (self.a - s - 1) // self.c
        while self._cmp(f + 1) >= 0:
            f += 1
        while self._cmp(f) < 0:
            f -= 1
        return f

    # -- rational enclosure ---------------------------------------------------

    def enclosure(self, digits: int = 50) -> tuple[Fraction, Fraction]:
        """Rational lo <= value <= hi with hi - lo <= 10**-digits * (1 + |b/c|)."""
        t = 10 ** digits
        s = isqrt(self.b * self.b * self.d * t * t)
        if self.b > 0:
            lo = Fraction(self.a * t + s, self.c * t)
            hi = Fraction(self.a * t + s + 1, self.c * t)
        else:
            lo = Fraction(self.a * t - s - 1, self.c * t)
            hi = Fraction(self.a * t - s, self.c * t)
        return lo, hi

    # -- misc -----------------------------------------------------------------

    def __repr__(self):
        return "(%d%+d*sqrt(%d))/%d" % (self.a, self.b, self.d, self.c)

    def __float__(self):
        # display convenience only; never used in a decision
        lo, hi = self.enclosure(30)
        return float((lo + hi) / 2)


def quad(a: int, b: int, c: int, d: int) -> ExactScalar:
    """Build (a + b*sqrt(d))/c, collapsing to Fraction when the value is rational.

    Square factors of d are folded into b, so quad(0, 1, 2, 8) == sqrt(2)
    and quad(0, 1, 1, 9) == Fraction(3).
    """
    if d <= 0:
        raise OutOfRange("radicand must be positive, got %r" % (d,))
    s, m = _square_part(d)
    b *= s
    if b == 0 or m == 1:
        return Fraction(a + b, c)
    return QuadScalar(a, b, c, m)


def sqrt_scalar(x) -> ExactScalar:
    """Exact square root of a nonnegative int or Fraction."""
    f = Fraction(x)
    if f < 0:
        raise OutOfRange("negative radicand")
    if f == 0:
        return Fraction(0)
    num, den = f.numerator, f.denominator
    r = isqrt(den)
    if r * r == den:
        return quad(0, 1, r, num)
    r = isqrt(num)
    if r * r == num:
        return quad(0, r, den, den)
    # sqrt(p/q) = sqrt(p q)/q
    return quad(0, 1, den, num * den)


def quad_sign(x: ExactScalar) -> int:
    """Sign in {-1, 0, +1}, exact for Fraction and QuadScalar alike."""
    if isinstance(x, QuadScalar):
        return x.sign()
    f = Fraction(x)
    return (f > 0) - (f < 0)


def exact_floor(x: ExactScalar) -> int:
    if isinstance(x, QuadScalar):
        return x.__floor__()
    f = Fraction(x)
    return f.numerator // f.denominator


def exact_ceil(x: ExactScalar) -> int:
    return -exact_floor(-x)


def scalar_abs(x: ExactScalar) -> ExactScalar:
    return abs(x)


def scalar_le(x, y) -> bool:
    return quad_sign(y - x) >= 0


def scalar_lt(x, y) -> bool:
    return quad_sign(y - x) > 0


def scalar_key(x: ExactScalar) -> tuple:
    """Canonical hashable key; equal values get equal keys."""
    if isinstance(x, QuadScalar):
        return ("quad", x.a, x.b, x.c, x.d)
    f = Fraction(x)
    return ("rat", f.numerator, f.denominator)


def as_fraction_pair(x: ExactScalar, digits: int = 50) -> tuple[Fraction, Fraction]:
    """Rational enclosure [lo, hi] of any exact scalar (degenerate if rational)."""
    if isinstance(x, QuadScalar):
        return x.enclosure(digits)
    f = Fraction(x)
    return f, f
