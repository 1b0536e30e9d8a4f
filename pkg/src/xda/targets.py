"""Target points: the numbers we try to approximate.

A coordinate is one of
  * an exact rational,
  * an exact real quadratic irrational,
  * a digit stream in an integer base (periodic, Thue-Morse, or seeded
    pseudorandom), read as 0.d1 d2 d3 ... in that base.

Streams are the only coordinates without a closed form; every consumer
that needs digits asks for a truncation together with an explicit error
bound, so downstream certification never trusts more digits than it
requested.

Point specs use a small textual grammar shared by the CLI and the JSON
loaders:

    rat:<p>/<q>
    quad:(<a>+<b>*sqrt(<d>))/<c>
    dig:<base>:per:<digits>
    dig:<base>:tm:<d0><d1>
    dig:<base>:seed:<u64>

and a point is a comma-separated list of coordinate specs.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import ConfigError, OutOfRange
from .intervals import RationalInterval, enclose
from .scalars import ExactScalar, QuadScalar, quad

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class DigitStream:
    """Base class: lazily generated digits d1, d2, ... in a fixed base."""

    def __init__(self, base: int):
        if base < 2:
            raise OutOfRange("digit base must be >= 2")
        self.base = base
        self._digits: list[int] = []

    def _generate(self, upto: int) -> None:
        raise NotImplementedError

    def digit(self, i: int) -> int:
        """1-based digit access."""
        if i < 1:
            raise OutOfRange("digit index is 1-based")
        if len(self._digits) < i:
            self._generate(i)
        return self._digits[i - 1]

    def digits(self, k: int) -> list[int]:
        if len(self._digits) < k:
            self._generate(k)
        return self._digits[:k]

    def truncation(self, k: int) -> Fraction:
        """Sum of the first k digits; differs from the value by at most base**-k."""
        num = 0
        for d in self.digits(k):
            num = num * self.base + d
        return Fraction(num, self.base ** k)

    def enclosure(self, k: int) -> RationalInterval:
        t = self.truncation(k)
        return RationalInterval(t, t + Fraction(1, self.base ** k))

    def exact_value(self) -> Optional[Fraction]:
        """Closed form when one exists (periodic streams only)."""
        return None

    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return self.spec()

    def __eq__(self, other):
        return isinstance(other, DigitStream) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())


class PeriodicStream(DigitStream):
    """0.(d1 ... dm) repeating; rational with denominator base**m - 1."""

    def __init__(self, base: int, pattern: Sequence[int]):
        super().__init__(base)
        pattern = tuple(int(d) for d in pattern)
        if not pattern:
            raise ConfigError("empty periodic pattern")
        if any(d < 0 or d >= base for d in pattern):
            raise ConfigError("pattern digit out of range for base %d" % base)
        self.pattern = pattern

    def _generate(self, upto: int) -> None:
        m = len(self.pattern)
        while len(self._digits) < upto:
            self._digits.append(self.pattern[len(self._digits) % m])

    def exact_value(self) -> Fraction:
        num = 0
        for d in self.pattern:
            num = num * self.base + d
        return Fraction(num, self.base ** len(self.pattern) - 1)

    def spec(self) -> str:
        return "dig:%d:per:%s" % (self.base, "".join(str(d) for d in self.pattern))


class ThueMorseStream(DigitStream):
    """Two-symbol Thue-Morse word over {d0, d1}; aperiodic, so irrational."""

    def __init__(self, base: int, d0: int, d1: int):
        super().__init__(base)
        if not (0 <= d0 < base and 0 <= d1 < base) or d0 == d1:
            raise ConfigError("Thue-Morse symbols must be distinct digits below the base")
        self.d0, self.d1 = d0, d1

    def _generate(self, upto: int) -> None:
        while len(self._digits) < upto:
            n = len(self._digits)
            self._digits.append(self.d1 if bin(n).count("1") % 2 else self.d0)

    def spec(self) -> str:
        return "dig:%d:tm:%d%d" % (self.base, self.d0, self.d1)


class SeededStream(DigitStream):
    """splitmix64-driven stream over a restricted alphabet.

    For base >= 3 the alphabet is {0, base - 1} so that base-3 streams
    land in the middle-thirds Cantor set; for base 2 it is {0, 1}.
    """

    def __init__(self, base: int, seed: int):
        super().__init__(base)
        self.seed = seed & _MASK64
        self.alphabet = (0, 1) if base == 2 else (0, base - 1)
        self._state = self.seed

    def _generate(self, upto: int) -> None:
        while len(self._digits) < upto:
            self._state, z = _splitmix64(self._state)
            self._digits.append(self.alphabet[z % len(self.alphabet)])

    def spec(self) -> str:
        return "dig:%d:seed:%d" % (self.base, self.seed)


Coordinate = Union[Fraction, QuadScalar, DigitStream]


class TargetPoint:
    """A point of R^d whose coordinates are exact scalars or digit streams."""

    def __init__(self, coords: Sequence[Coordinate]):
        cs = []
        for c in coords:
            if isinstance(c, (QuadScalar, DigitStream)):
                cs.append(c)
            else:
                cs.append(Fraction(c))
        if not cs:
            raise ConfigError("a point needs at least one coordinate")
        self.coords = tuple(cs)
        self.dim = len(cs)

    # -- exactness ------------------------------------------------------------

    def coord_exact(self, j: int) -> Optional[ExactScalar]:
        """Closed-form value of coordinate j, or None for an aperiodic stream."""
        c = self.coords[j]
        if isinstance(c, DigitStream):
            return c.exact_value()
        return c

    def is_certified_rational(self) -> bool:
        """True when every coordinate has a rational closed form."""
        for j in range(self.dim):
            v = self.coord_exact(j)
            if v is None or isinstance(v, QuadScalar):
                return False
        return True

    # -- approximation --------------------------------------------------------

    def approx(self, k: int) -> tuple[tuple[ExactScalar, ...], Fraction]:
        """Componentwise approximation with a sup-norm error bound.

        Exact coordinates are returned as themselves (contributing zero
        error); a stream contributes its k-digit truncation and an error
        of base**-k.
        """
        out: list[ExactScalar] = []
        eps = Fraction(0)
        for c in self.coords:
            if isinstance(c, DigitStream):
                v = c.exact_value()
                if v is not None:
                    out.append(v)
                else:
                    out.append(c.truncation(k))
                    eps = max(eps, Fraction(1, c.base ** k))
            else:
                out.append(c)
        return tuple(out), eps

    def enclosure(self, k: int) -> tuple[RationalInterval, ...]:
        """Componentwise rational enclosures at working precision k."""
        out = []
        for c in self.coords:
            if isinstance(c, DigitStream):
                v = c.exact_value()
                out.append(RationalInterval.point(v) if v is not None else c.enclosure(k))
            else:
                out.append(enclose(c, k))
        return tuple(out)

    def rational_proxy(self, k: int) -> tuple[tuple[Fraction, ...], Fraction]:
        """All-rational stand-in with sup-norm error bound, for screening."""
        out = []
        eps = Fraction(0)
        for iv in self.enclosure(k):
            out.append(iv.midpoint())
            eps = max(eps, iv.width() / 2)
        return tuple(out), eps

    def spec(self) -> str:
        return ",".join(format_scalar_spec(c) for c in self.coords)

    def __repr__(self):
        return "TargetPoint(%s)" % self.spec()

    def __eq__(self, other):
        return isinstance(other, TargetPoint) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())


# -- spec grammar -------------------------------------------------------------

_QUAD_RE = re.compile(r"^\((-?\d+)([+-]\d+)\*sqrt\((\d+)\)\)/(-?\d+)$")
_RAT_RE = re.compile(r"^(-?\d+)(?:/(-?\d+))?$")


def parse_scalar_spec(token: str) -> Coordinate:
    token = token.strip()
    if token.startswith("rat:"):
        m = _RAT_RE.match(token[4:])
        if not m:
            raise ConfigError("bad rational spec %r" % token)
        return Fraction(int(m.group(1)), int(m.group(2) or 1))
    if token.startswith("quad:"):
        m = _QUAD_RE.match(token[5:])
        if not m:
            raise ConfigError("bad quadratic spec %r" % token)
        a, b, d, c = int(m.group(1)), int(m.group(2)), int(m.group(3)), int(m.group(4))
        v = quad(a, b, c, d)
        if not isinstance(v, QuadScalar):
            raise ConfigError("quadratic spec %r denotes the rational %s; use rat:" % (token, v))
        return v
    if token.startswith("dig:"):
        parts = token.split(":")
        if len(parts) != 4:
            raise ConfigError("bad digit-stream spec %r" % token)
        _, base_s, kind, arg = parts
        try:
            base = int(base_s)
        except ValueError:
            raise ConfigError("bad base in %r" % token) from None
        if kind == "per":
            if not arg.isdigit():
                raise ConfigError("periodic pattern must be decimal digits in %r" % token)
            return PeriodicStream(base, [int(ch) for ch in arg])
        if kind == "tm":
            if not (arg.isdigit() and len(arg) == 2):
                raise ConfigError("Thue-Morse spec needs two digits in %r" % token)
            return ThueMorseStream(base, int(arg[0]), int(arg[1]))
        if kind == "seed":
            try:
                return SeededStream(base, int(arg))
            except ValueError:
                raise ConfigError("bad seed in %r" % token) from None
        raise ConfigError("unknown stream kind %r in %r" % (kind, token))
    raise ConfigError("unknown scalar spec %r" % token)


def format_scalar_spec(c: Coordinate) -> str:
    if isinstance(c, DigitStream):
        return c.spec()
    if isinstance(c, QuadScalar):
        return "quad:(%d%+d*sqrt(%d))/%d" % (c.a, c.b, c.d, c.c)
    f = Fraction(c)
    return "rat:%d/%d" % (f.numerator, f.denominator)


def parse_point(text: str) -> TargetPoint:
    tokens = [t for t in text.split(",") if t.strip()]
    if not tokens:
        raise ConfigError("empty point spec")
    return TargetPoint([parse_scalar_spec(t) for t in tokens])
