"""Good pairs of simultaneous approximation vectors, by denominator sweep.

A good pair for a target x in R^d is two linearly independent integer
vectors r = (p, q) in Z^{d+1} with 0 <= q_inf <= q_0 and

    max_j |q x_j - p_j|  <=  q_0^(-1/d)      for both vectors.

The search scans denominators in chunks [1, H] with H = Q, ceil(rho Q),
...; each q is tested with the nearest integer vector p to q x.  A
denominator q_0 >= Q closes a pair as soon as some smaller, linearly
independent q_inf satisfies the same bound at threshold q_0^(-1/d).
Pairing at the definitional threshold (rather than demanding both
vectors beat H^(-1/d) at a common height) keeps the search complete:
targets such as sqrt(2)/10, whose two-shortest-vector windows are
narrower than any geometric height step, still terminate.

The returned pair is re-certified from scratch before it leaves this
module.  Screening runs on integer enclosures so the inner loop is
big-int only; any comparison an enclosure cannot decide is retried
exactly (for closed-form coordinates) or at doubled stream precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import HeightCapExceeded, InvariantViolation, OutOfRange, RationalPoint
from .intervals import RationalInterval, nth_root_interval
from .scalars import ExactScalar, exact_floor, quad_sign
from .targets import DigitStream, TargetPoint

DEFAULT_HEIGHT_CAP = 10 ** 6


@dataclass(frozen=True)
class ApproxVector:
    """r = (p, q) in Z^{d+1}; q is the denominator."""

    p: tuple[int, ...]
    q: int

    @property
    def dim(self) -> int:
        return len(self.p)

    def point(self) -> tuple[Fraction, ...]:
        if self.q <= 0:
            raise OutOfRange("projective point needs q > 0")
        return tuple(Fraction(c, self.q) for c in self.p)

    def add_multiple(self, other: "ApproxVector", i: int) -> "ApproxVector":
        return ApproxVector(tuple(a + i * b for a, b in zip(self.p, other.p)),
                            self.q + i * other.q)

    def is_zero(self) -> bool:
        return self.q == 0 and all(c == 0 for c in self.p)


def independent(r: ApproxVector, s: ApproxVector) -> bool:
    """Rank-2 test on the (d+1)-dimensional integer vectors."""
    a = r.p + (r.q,)
    b = s.p + (s.q,)
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if a[i] * b[j] - a[j] * b[i] != 0:
                return True
    return False


@dataclass
class BoundCheck:
    vector: str                 # "r0" or "rinf"
    coord: int
    lhs_power_upper: Fraction   # certified upper bound on |q x_j - p_j|^d
    rhs: Fraction               # comparison threshold 1/q0


@dataclass
class GoodPair:
    r0: ApproxVector
    r_inf: ApproxVector
    height: int
    checks: list[BoundCheck]

    @property
    def dim(self) -> int:
        return self.r0.dim


def _nearest_int(num: int, den: int) -> int:
    """round(num/den) with ties to even; den > 0."""
    q2, rem = divmod(2 * num + den, 2 * den)
    if rem == 0:
        return q2 if q2 % 2 == 0 else q2 - 1
    return q2


def _enough_digits(base: int, height: int) -> int:
    """Digits k with base**-k <= 1/(64 height^2); keeps screening decisive."""
    need = 64 * height * height
    k, pw = 1, base
    while pw < need:
        pw *= base
        k += 1
    return k


class _CoordEnclosure:
    """Integer enclosure [A_lo, A_hi]/B of one coordinate."""

    def __init__(self, coord, height: int, extra_digits: int = 0):
        self.coord = coord
        self.exact = not (isinstance(coord, DigitStream) and coord.exact_value() is None)
        base = coord.base if isinstance(coord, DigitStream) else 10
        self.set_digits(_enough_digits(base, height) + extra_digits)

    def set_digits(self, digits: int) -> None:
        self.digits = digits
        c = self.coord
        if isinstance(c, DigitStream):
            v = c.exact_value()
            if v is not None:
                self.lo_num, self.hi_num, self.den = v.numerator, v.numerator, v.denominator
            else:
                t = c.truncation(digits)
                self.den = c.base ** digits
                self.lo_num = t.numerator * (self.den // t.denominator)
                self.hi_num = self.lo_num + 1
        elif isinstance(c, Fraction):
            self.lo_num, self.hi_num, self.den = c.numerator, c.numerator, c.denominator
        else:
            lo, hi = c.enclosure(digits)
            self.den = lo.denominator * hi.denominator
            self.lo_num = lo.numerator * hi.denominator
            self.hi_num = hi.numerator * lo.denominator

    def exact_value(self) -> Optional[ExactScalar]:
        c = self.coord
        if isinstance(c, DigitStream):
            return c.exact_value()
        return c


class _NeedRefine(Exception):
    pass


def _nearest_vector(encs: list[_CoordEnclosure], q: int) -> tuple[int, ...]:
    """Nearest integer vector to q x, from the enclosure midpoints."""
    ps = []
    for e in encs:
        ps.append(_nearest_int(q * (e.lo_num + e.hi_num), 2 * e.den))
    return tuple(ps)


def _within_threshold(encs: list[_CoordEnclosure], q: int, p: tuple[int, ...],
                      q0: int, d: int) -> bool:
    """Certified decision of max_j |q x_j - p_j| <= q0^(-1/d).

    Compares d-th powers so the threshold stays rational.  Raises
    _NeedRefine when an enclosure cannot decide and the coordinate has
    no closed form.
    """
    for e, pj in zip(encs, p):
        u1 = q * e.lo_num - pj * e.den
        u2 = q * e.hi_num - pj * e.den
        if u1 <= 0 <= u2:
            lo_abs, hi_abs = 0, max(-u1, u2)
        else:
            lo_abs, hi_abs = min(abs(u1), abs(u2)), max(abs(u1), abs(u2))
        if hi_abs ** d * q0 <= e.den ** d:
            continue                      # certified within
        if lo_abs ** d * q0 > e.den ** d:
            return False                  # certified outside
        v = e.exact_value()
        if v is None:
            raise _NeedRefine
        if quad_sign((abs(q * v - pj)) ** d * q0 - 1) > 0:
            return False
    return True


def good_pair_search(x: TargetPoint, min_q0: int, ratio: Fraction = Fraction(3, 2),
                     height_cap: int = DEFAULT_HEIGHT_CAP,
                     max_precision: int | None = None) -> GoodPair:
    """Good pair with minimal q_0 >= min_q0, deterministically.

    Denominators are scanned in chunks [1, H] with H = min_q0,
    ceil(ratio * min_q0), ... up to height_cap.  Raises RationalPoint
    for certified-rational targets and HeightCapExceeded when the
    schedule runs out.
    """
    from .contfrac import precision_cap

    if min_q0 < 1:
        raise OutOfRange("min_q0 must be >= 1")
    if ratio <= 1:
        raise OutOfRange("height ratio must exceed 1")
    if x.is_certified_rational():
        raise RationalPoint("target has rational closed form; good pairs degenerate")

    d = x.dim
    cap = precision_cap(max_precision)
    height = min_q0
    while height <= height_cap:
        extra = 0
        while True:
            encs = [_CoordEnclosure(c, height, extra) for c in x.coords]
            try:
                pair = _scan_chunk(encs, height, d, min_q0)
                break
            except _NeedRefine:
                extra = 16 if extra == 0 else extra * 2
                if extra > cap:
                    from .errors import PrecisionExhausted

                    raise PrecisionExhausted(0, cap) from None
        if pair is not None:
            r0, r_inf = pair
            gp = GoodPair(r0, r_inf, height, [])
            ok, checks = verify_good_pair(x, gp, max_precision)
            if not ok:
                raise InvariantViolation("screened pair failed exact certification")
            gp.checks = checks
            return gp
        height = max(height + 1, -((-height * ratio.numerator) // ratio.denominator))
    raise HeightCapExceeded(height_cap)


def _scan_chunk(encs, height: int, d: int, min_q0: int):
    """First denominator q0 in [min_q0, height] that closes a good pair.

    live holds earlier vectors still within the shrinking threshold
    q^(-1/d); a vector evicted once can never return, so each candidate
    is touched O(1) amortized times.
    """
    live: list[ApproxVector] = []
    for q in range(1, height + 1):
        live = [r for r in live if _within_threshold(encs, r.q, r.p, q, d)]
        p = _nearest_vector(encs, q)
        cand = ApproxVector(p, q)
        if not _within_threshold(encs, q, p, q, d):
            continue
        if q >= min_q0:
            for r in live:
                if independent(r, cand):
                    return cand, r          # (r0, r_inf) with q0 = q
        live.append(cand)
    return None


def verify_good_pair(x: TargetPoint, pair: GoodPair,
                     max_precision: int | None = None) -> tuple[bool, list[BoundCheck]]:
    """Re-derive every good-pair condition from scratch, exactly."""
    r0, ri = pair.r0, pair.r_inf
    d = x.dim
    if r0.dim != d or ri.dim != d:
        return False, []
    if r0.is_zero() or ri.is_zero() or not independent(r0, ri):
        return False, []
    if not (0 <= ri.q <= r0.q):
        return False, []
    rhs = Fraction(1, r0.q)     # threshold for |q x_j - p_j|^d
    checks = []
    for name, vec in (("r0", r0), ("rinf", ri)):
        for j, coord in enumerate(x.coords):
            ok, upper = _coord_bound_certified(coord, vec.q, vec.p[j], d, rhs, max_precision)
            if not ok:
                return False, checks
            checks.append(BoundCheck(name, j, upper, rhs))
    return True, checks


def _coord_bound_certified(coord, q: int, p: int, d: int, rhs: Fraction,
                           max_precision) -> tuple[bool, Fraction]:
    """Certify |q x_j - p|^d <= rhs; returns (ok, certified upper bound)."""
    from .contfrac import precision_cap

    if isinstance(coord, DigitStream) and coord.exact_value() is None:
        cap = precision_cap(max_precision)
        k = 32
        while True:
            iv = (abs(coord.enclosure(min(k, cap)) * q - p)) ** d
            if iv.below_or_equal(rhs):
                return True, iv.hi
            if iv.strictly_above(rhs):
                return False, iv.hi
            if k >= cap:
                from .errors import PrecisionExhausted

                raise PrecisionExhausted(0, cap)
            k *= 2
    v = coord.exact_value() if isinstance(coord, DigitStream) else coord
    lhs = abs(q * v - p) ** d
    ok = quad_sign(rhs - lhs) >= 0
    if isinstance(lhs, Fraction):
        return ok, lhs
    lo, hi = lhs.enclosure(40)
    return ok, hi


# -- progressions -------------------------------------------------------------

@dataclass
class Progression:
    """Entries r_i = r0 + i r_inf of a projectivized progression."""

    pair: GoodPair
    entries: list[ApproxVector]

    def point(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i].point()


def make_progression(pair: GoodPair, i_max: int) -> Progression:
    if i_max < 0:
        raise OutOfRange("progression length must be >= 0")
    entries = [pair.r0.add_multiple(pair.r_inf, i) for i in range(i_max + 1)]
    return Progression(pair, entries)


def certify_progression_entry(x: TargetPoint, pair: GoodPair, i: int,
                              max_precision: int | None = None) -> bool:
    """Certify max_j |x_j - p_{i,j}/q_i| <= ((1+i)/q_i)^(1 + 1/d), exactly.

    Both sides are raised to the d-th power so the right side stays
    rational: the check is ||x - r_i||^d <= ((1+i)^(d+1)) / q_i^(d+1).
    """
    from .contfrac import precision_cap

    d = x.dim
    r = pair.r0.add_multiple(pair.r_inf, i)
    if r.q <= 0:
        raise OutOfRange("entry has nonpositive denominator")
    rhs = Fraction((1 + i) ** (d + 1), r.q ** (d + 1))
    for j, coord in enumerate(x.coords):
        target = Fraction(r.p[j], r.q)
        if isinstance(coord, DigitStream) and coord.exact_value() is None:
            cap = precision_cap(max_precision)
            k = 32
            while True:
                iv = (abs(coord.enclosure(min(k, cap)) - target)) ** d
                if iv.below_or_equal(rhs):
                    break
                if iv.strictly_above(rhs):
                    return False
                if k >= cap:
                    from .errors import PrecisionExhausted

                    raise PrecisionExhausted(0, cap)
                k *= 2
        else:
            v = coord.exact_value() if isinstance(coord, DigitStream) else coord
            if quad_sign(rhs - abs(v - target) ** d) < 0:
                return False
    return True


def progression_collinear(prog: Progression) -> bool:
    """Projectivized entries with q_i > 0 lie on one line (trivial for d = 1)."""
    pts = [e.point() for e in prog.entries if e.q > 0]
    if len(pts) <= 2:
        return True
    x0 = pts[0]
    u = None
    for pt in pts[1:]:
        diff = tuple(a - b for a, b in zip(pt, x0))
        if any(diff):
            u = diff
            break
    if u is None:
        return True
    for pt in pts[1:]:
        diff = tuple(a - b for a, b in zip(pt, x0))
        for i in range(len(u)):
            for j in range(i + 1, len(u)):
                if diff[i] * u[j] - diff[j] * u[i] != 0:
                    return False
    return True


def quality(x: TargetPoint, r: ApproxVector, digits: int = 40,
            stream_digits: int | None = None) -> RationalInterval:
    """Enclosure of q^(1+1/d) * max_j |x_j - p_j/q|.

    The d-th root of q is irrational in general, so the result is an
    interval; digits controls its width.
    """
    d = x.dim
    if r.q <= 0:
        raise OutOfRange("quality needs q > 0")
    norm = None
    k = stream_digits if stream_digits is not None else max(64, digits * 4)
    for j, coord in enumerate(x.coords):
        target = Fraction(r.p[j], r.q)
        if isinstance(coord, DigitStream) and coord.exact_value() is None:
            iv = abs(coord.enclosure(k) - target)
        else:
            v = coord.exact_value() if isinstance(coord, DigitStream) else coord
            diff = abs(v - target)
            if isinstance(diff, Fraction):
                iv = RationalInterval.point(diff)
            else:
                lo, hi = diff.enclosure(digits)
                iv = RationalInterval(lo, hi)
        norm = iv if norm is None else RationalInterval(max(norm.lo, iv.lo), max(norm.hi, iv.hi))
    root = nth_root_interval(Fraction(r.q), d, digits)
    return norm * root * r.q
