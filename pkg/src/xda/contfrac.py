"""Continued fractions with certified digits.

For closed-form scalars (rationals, quadratic irrationals) the expansion
is computed by the exact Gauss map.  For digit streams we run the Gauss
map on a rational enclosure of the value and only accept a partial
quotient when both endpoints agree on its floor; disagreement triggers a
refinement of the stream enclosure, doubling the digit count up to a
cap.  A partial quotient certified at some precision never changes under
further refinement, because finer enclosures are nested.

Convergents use the seeds p(-1)/q(-1) = 1/0 and p(0)/q(0) = 0/1, so all
values handled here live in (0, 1) and partial quotients are indexed
from 1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import OutOfRange, PrecisionExhausted, UndecidableComparison
from .intervals import RationalInterval
from .scalars import ExactScalar, QuadScalar, exact_floor, quad_sign
from .targets import DigitStream

DEFAULT_PRECISION_CAP = 4096


def precision_cap(explicit: int | None = None) -> int:
    """Resolve the stream-refinement cap, honoring XDA_MAX_PRECISION."""
    if explicit is not None:
        return explicit
    env = os.environ.get("XDA_MAX_PRECISION")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return DEFAULT_PRECISION_CAP


@dataclass
class CFExpansion:
    """Partial quotients a_1..a_n of a value in (0, 1).

    precisions[i] is the stream digit count that certified a_{i+1}; it is
    0 for terms produced by exact arithmetic.
    """

    partials: list[int]
    precisions: list[int] = field(default_factory=list)
    exact: bool = True

    def __post_init__(self):
        if not self.precisions:
            self.precisions = [0] * len(self.partials)

    def __len__(self):
        return len(self.partials)


Expandable = Union[Fraction, QuadScalar, DigitStream]


def expand(x: Expandable, n: int, max_precision: int | None = None) -> CFExpansion:
    """First n partial quotients of x in (0, 1).

    Raises PrecisionExhausted when a stream cannot be certified to depth
    n within the precision cap, and OutOfRange when a rational target
    has fewer than n partial quotients.
    """
    if n < 0:
        raise OutOfRange("cannot expand to negative depth")
    if isinstance(x, DigitStream):
        v = x.exact_value()
        if v is None:
            return _expand_stream(x, n, precision_cap(max_precision))
        x = v
    if isinstance(x, QuadScalar):
        return _expand_quadratic(x, n)
    return _expand_rational(Fraction(x), n)


def _check_unit_interval(x) -> None:
    if quad_sign(x) <= 0 or quad_sign(1 - x) <= 0:
        raise OutOfRange("expansion target must lie strictly inside (0, 1)")


def _expand_rational(x: Fraction, n: int) -> CFExpansion:
    _check_unit_interval(x)
    terms = []
    num, den = x.numerator, x.denominator
    while num and len(terms) < n:
        a = den // num
        terms.append(a)
        den, num = num, den - a * num
    if len(terms) < n:
        raise OutOfRange("rational %s has only %d partial quotients, wanted %d"
                         % (x, len(terms), n))
    return CFExpansion(terms)


def _expand_quadratic(x: QuadScalar, n: int) -> CFExpansion:
    _check_unit_interval(x)
    terms = []
    cur: ExactScalar = x
    for _ in range(n):
        y = 1 / cur
        a = exact_floor(y)
        terms.append(a)
        cur = y - a
    return CFExpansion(terms)


def _gauss_prefix(iv: RationalInterval, n: int) -> list[int]:
    """Longest certified partial-quotient prefix (length <= n) for all of iv."""
    terms: list[int] = []
    lo, hi = iv.lo, iv.hi
    while len(terms) < n:
        if lo <= 0 or hi >= 1:
            break
        ylo, yhi = 1 / hi, 1 / lo
        a = ylo.numerator // ylo.denominator
        if yhi.numerator // yhi.denominator != a:
            break
        terms.append(a)
        lo, hi = ylo - a, yhi - a
    return terms


def _expand_stream(s: DigitStream, n: int, cap: int) -> CFExpansion:
    k = 64
    best: list[int] = []
    best_prec: list[int] = []
    while True:
        terms = _gauss_prefix(s.enclosure(min(k, cap)), n)
        if len(terms) > len(best):
            if best and terms[: len(best)] != best:
                raise AssertionError("certified prefix changed under refinement")
            best_prec = best_prec + [min(k, cap)] * (len(terms) - len(best))
            best = terms
        if len(best) >= n:
            return CFExpansion(best[:n], best_prec[:n], exact=False)
        if k >= cap:
            raise PrecisionExhausted(len(best) + 1, cap)
        k *= 2


def convergents(partials: Sequence[int] | CFExpansion) -> list[tuple[int, int]]:
    """(p_k, q_k) for k = 1..n, from seeds 1/0 and 0/1."""
    if isinstance(partials, CFExpansion):
        partials = partials.partials
    out = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    for a in partials:
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append((p_cur, q_cur))
    return out


def semiconvergent(partials: Sequence[int] | CFExpansion, n: int, b: int) -> tuple[int, int]:
    """p_{n-2} + b p_{n-1} over q_{n-2} + b q_{n-1}; b >= 1, 1-based n."""
    if isinstance(partials, CFExpansion):
        partials = partials.partials
    if n < 1 or n > len(partials):
        raise OutOfRange("semiconvergent level %d outside expansion of length %d"
                         % (n, len(partials)))
    if b < 1:
        raise OutOfRange("semiconvergent index must be >= 1")
    cs = [(1, 0), (0, 1)] + convergents(partials)
    p2, q2 = cs[n - 1]   # level n-2 (list shifted by two seed entries)
    p1, q1 = cs[n]       # level n-1
    return p2 + b * p1, q2 + b * q1


MUST_BE_CONVERGENT = "must-be-convergent"
CONVERGENT_QUALITY = "convergent-quality"
NEITHER = "neither"


def convergent_filter(x: Expandable, p: int, q: int,
                      max_precision: int | None = None) -> str:
    """Classify p/q against the Legendre thresholds 1/(2q^2) and 1/q^2.

    must-be-convergent:  |x - p/q| <  1/(2 q^2)   (p/q reduced, so it is one)
    convergent-quality:  |x - p/q| <  1/q^2
    neither:             otherwise
    Exact ties raise UndecidableComparison.
    """
    if q < 1:
        raise OutOfRange("denominator must be positive")
    t1 = Fraction(1, 2 * q * q)
    t2 = Fraction(1, q * q)
    target = Fraction(p, q)

    if isinstance(x, DigitStream) and x.exact_value() is None:
        cap = precision_cap(max_precision)
        k = 64
        while True:
            dist = abs(x.enclosure(min(k, cap)) - target)
            if dist.strictly_below(t1):
                return MUST_BE_CONVERGENT
            if dist.strictly_above(t1) and dist.strictly_below(t2):
                return CONVERGENT_QUALITY
            if dist.strictly_above(t2):
                return NEITHER
            if k >= cap:
                raise PrecisionExhausted(0, cap)
            k *= 2

    v = x.exact_value() if isinstance(x, DigitStream) else x
    dist = abs(v - target)
    s1 = quad_sign(dist - t1)
    s2 = quad_sign(dist - t2)
    if s1 == 0 or s2 == 0:
        raise UndecidableComparison("|x - %d/%d| equals a Legendre threshold" % (p, q))
    if s1 < 0:
        return MUST_BE_CONVERGENT
    if s2 < 0:
        return CONVERGENT_QUALITY
    return NEITHER


def convergent_pair_for_height(x: Expandable, height: int,
                               max_precision: int | None = None
                               ) -> tuple[tuple[int, int], tuple[int, int]]:
    """Consecutive convergents ((p_{k+1}, q_{k+1}), (p_k, q_k)) with q_k >= height.

    The smaller-denominator member is second, matching the (r_0, r_inf)
    ordering used by the lattice searches.
    """
    if height < 1:
        raise OutOfRange("height must be >= 1")
    n = 8
    while True:
        try:
            cf = expand(x, n, max_precision)
        except OutOfRange:
            # rational with a short expansion: take what exists
            cf = _rational_full(x)
            if len(cf) < 2:
                raise
        cs = convergents(cf)
        for k, (pk, qk) in enumerate(cs):
            if qk >= height and k + 1 < len(cs):
                return cs[k + 1], (pk, qk)
        if len(cf) < n:
            raise OutOfRange("expansion ended before reaching height %d" % height)
        n *= 2


def _rational_full(x) -> CFExpansion:
    v = x.exact_value() if isinstance(x, DigitStream) else Fraction(x)
    terms = []
    num, den = v.numerator, v.denominator
    while num:
        a = den // num
        terms.append(a)
        den, num = num, den - a * num
    return CFExpansion(terms)


@dataclass
class SemiFamilyReport:
    """Empirical behavior of the semiconvergent family b = a_n .. a_n + window."""

    n: int
    a_n: int
    entries: list[tuple[int, int, int]]          # (b, p, q)
    q_ratio_max: Fraction                        # max q_{n,b} / q_n over the family
    increment_identity_ok: bool                  # |p_{n,b}/q_{n,b} - p_n/q_n| == (b - a_n)/(q_n q_{n,b})
    min_feasible_c_squared: Fraction | None      # smallest C^2 making the family a C-RAP


def semiconvergent_family_report(partials: Sequence[int] | CFExpansion, n: int,
                                 window: int) -> SemiFamilyReport:
    """Check the family's spacing and near-progression structure, exactly.

    Nothing here is assumed downstream; callers read the report and
    decide.  The family is collinear by construction (points on a line),
    so only the ratio bounds are in question.
    """
    if isinstance(partials, CFExpansion):
        partials = partials.partials
    a_n = partials[n - 1]
    pn, qn = convergents(partials)[n - 1]
    entries = []
    identity_ok = True
    for b in range(a_n, a_n + window + 1):
        p, q = semiconvergent(partials, n, b)
        entries.append((b, p, q))
        lhs = abs(Fraction(p, q) - Fraction(pn, qn))
        if lhs != Fraction(b - a_n, qn * q):
            identity_ok = False
    qs = [q for (_, _, q) in entries]
    q_ratio_max = max(Fraction(q, qn) for q in qs)
    ts = [Fraction(p, q) for (_, p, q) in entries]
    c2 = _min_feasible_c_squared(ts)
    return SemiFamilyReport(n, a_n, entries, q_ratio_max, identity_ok, c2)


def _min_feasible_c_squared(ts: list[Fraction]) -> Fraction | None:
    """Smallest C^2 such that sorted ts is a C-roughly-arithmetic progression."""
    ts = sorted(ts)
    rates = []
    m = len(ts)
    for i in range(m):
        for j in range(i + 1, m):
            gap = ts[j] - ts[i]
            if gap == 0:
                return None
            rates.append(gap / (j - i))
    return max(rates) / min(rates)
