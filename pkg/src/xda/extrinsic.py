"""Certified searches for rational approximants lying off a target set,
distance obstructions for rational structures, and a unit-circle census
of intrinsic versus extrinsic approximations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence, Union

from .contfrac import expand, precision_cap, semiconvergent
from .errors import (
    ConfigError,
    InvariantViolation,
    OnCircle,
    OnLine,
    OutOfRange,
    PrecisionExhausted,
    RationalPoint,
)
from .ifs import MembershipVerdict, cantor_membership
from .intervals import RationalInterval
from .lattice import (
    ApproxVector,
    GoodPair,
    certify_progression_entry,
    good_pair_search,
    quality,
)
from .scalars import QuadScalar, quad_sign, scalar_lt, sqrt_scalar
from .targets import DigitStream, TargetPoint

ExactScalar = Union[Fraction, QuadScalar]


# ---------------------------------------------------------------------------
# Witness and profile types.


@dataclass(frozen=True)
class ExtrinsicWitness:
    """A rational point certified off the set, with its Dirichlet quality."""

    p: tuple
    q: int
    verdict: MembershipVerdict
    quality: RationalInterval
    certified: bool               # entry bound (1+i)^(1+1/d) checked exactly
    provenance: tuple             # ("semiconvergent", n, b) | ("progression", Q, i)

    def point(self) -> tuple:
        return tuple(Fraction(c, self.q) for c in self.p)


@dataclass(frozen=True)
class ScaleBucket:
    lo: int                       # bucket covers q in [lo, hi)
    hi: int
    min_quality: Fraction         # upper bound of the best enclosure seen
    witness: tuple                # (p, q, provenance) of the minimizer


@dataclass(frozen=True)
class ScaleProfile:
    buckets: tuple

    def __len__(self):
        return len(self.buckets)

    @property
    def worst_quality(self) -> Optional[Fraction]:
        if not self.buckets:
            return None
        return max(b.min_quality for b in self.buckets)


def scale_profile(items) -> ScaleProfile:
    """Group (q, quality_upper, witness) items into geometric decades and
    keep the best quality per bucket."""
    best = {}
    for q, qual, ref in items:
        k = len(str(q)) - 1
        cur = best.get(k)
        if cur is None or qual < cur[0]:
            best[k] = (qual, ref)
    buckets = tuple(
        ScaleBucket(10 ** k, 10 ** (k + 1), best[k][0], best[k][1])
        for k in sorted(best))
    return ScaleProfile(buckets)


# ---------------------------------------------------------------------------
# Cantor pipeline over semiconvergent windows.


@dataclass(frozen=True)
class SemiconvergentRow:
    n: int
    partial: int                  # a_n
    b: int
    p: int
    q: int
    status: str                   # "in" | "out" | "unknown"
    quality: RationalInterval     # enclosure of q^2 |x - p/q|
    bound: Fraction               # (1 + (b - a_n))^2, the certified ceiling
    certified: bool


@dataclass(frozen=True)
class CantorDirichletReport:
    rows: tuple
    profile: ScaleProfile
    window: int
    n_max: int
    widened: tuple                # (n, width) retries that happened
    all_intrinsic: tuple          # n values with no OUT member even widened

    def out_rows(self, n: int) -> tuple:
        return tuple(r for r in self.rows if r.n == n and r.status == "out")

    def min_quality(self, n: int) -> Optional[Fraction]:
        outs = self.out_rows(n)
        if not outs:
            return None
        return min(r.quality.hi for r in outs)


def _ternary_stream(x) -> tuple[TargetPoint, DigitStream]:
    if isinstance(x, DigitStream):
        x = TargetPoint((x,))
    if not isinstance(x, TargetPoint) or x.dim != 1:
        raise ConfigError("expected a one-dimensional digit-stream target")
    coord = x.coords[0]
    if not isinstance(coord, DigitStream):
        raise ConfigError("target coordinate must be a ternary digit stream")
    if coord.base != 3:
        raise ConfigError("digit stream must be ternary")
    if coord.exact_value() is not None:
        raise RationalPoint("stream value %s is rational" % coord.exact_value())
    for i in range(1, 65):
        if coord.digit(i) not in (0, 2):
            raise ConfigError("digit %d is %d; middle-thirds members use {0, 2}"
                              % (i, coord.digit(i)))
    return x, coord


def _cantor_verdict(p: int, q: int,
                    step_cap: Optional[int] = None) -> MembershipVerdict:
    val = Fraction(p, q)
    if val < 0 or val > 1:
        return MembershipVerdict("out", 0)
    return cantor_membership(val, step_cap)


def _abs_diff_at_most(coord, target: Fraction, rhs: Fraction,
                      max_precision: Optional[int] = None) -> bool:
    """Certify |coord - target| <= rhs exactly."""
    if isinstance(coord, DigitStream) and coord.exact_value() is None:
        cap = precision_cap(max_precision)
        k = 32
        while True:
            iv = abs(coord.enclosure(min(k, cap)) - target)
            if iv.below_or_equal(rhs):
                return True
            if iv.strictly_above(rhs):
                return False
            if k >= cap:
                raise PrecisionExhausted(0, cap)
            k *= 2
    v = coord.exact_value() if isinstance(coord, DigitStream) else coord
    return quad_sign(rhs - abs(v - target)) >= 0


def extrinsic_search_cantor(x, n_max: int, window: int, *,
                            max_widenings: int = 2,
                            max_precision: Optional[int] = None,
                            membership_steps: Optional[int] = 200_000
                            ) -> CantorDirichletReport:
    """Scan semiconvergent windows of a middle-thirds target for
    approximants off the set.

    For each level n the candidates are p_{n,b}/q_{n,b} with b running
    from a_n to a_n + window; each is classified exactly and its quality
    q^2 |x - p/q| certified against the ceiling (1 + b - a_n)^2.  Levels
    where every candidate lands inside the set are retried with a doubled
    window, then reported in all_intrinsic if they persist.  OUT rows
    always carry a finite escape certificate; membership_steps only
    bounds the cycle hunt for candidates that never escape, which turn
    into UNKNOWN rows instead of stalling on a huge orbit.
    """
    if n_max < 1:
        raise OutOfRange("need at least one level")
    if window < 0:
        raise OutOfRange("window must be nonnegative")
    point, coord = _ternary_stream(x)
    exp = expand(coord, n_max, max_precision)
    rows = []
    widened = []
    stubborn = []
    for n in range(1, n_max + 1):
        a_n = exp.partials[n - 1]
        width = window
        attempt = 0
        while True:
            batch = [_semiconvergent_row(point, coord, exp, n, a_n, j,
                                         max_precision, membership_steps)
                     for j in range(width + 1)]
            if any(r.status == "out" for r in batch) or attempt >= max_widenings:
                break
            attempt += 1
            width = 2 * width if width else 1
            widened.append((n, width))
        rows.extend(batch)
        if not any(r.status == "out" for r in batch):
            stubborn.append(n)
    profile = scale_profile(
        (r.q, r.quality.hi, (r.p, r.q, ("semiconvergent", r.n, r.b)))
        for r in rows if r.status == "out")
    return CantorDirichletReport(tuple(rows), profile, window, n_max,
                                 tuple(widened), tuple(stubborn))


def _semiconvergent_row(point, coord, exp, n, a_n, j, max_precision,
                        membership_steps=None):
    b = a_n + j
    p, q = semiconvergent(exp, n, b)
    verdict = _cantor_verdict(p, q, membership_steps)
    bound = Fraction((1 + j) ** 2)
    certified = _abs_diff_at_most(coord, Fraction(p, q),
                                  bound / (q * q), max_precision)
    digits = max(64, 32 + 2 * q.bit_length())
    qual = quality(point, ApproxVector((p,), q), stream_digits=digits)
    return SemiconvergentRow(n, a_n, b, p, q, verdict.status, qual,
                             bound, certified)


# ---------------------------------------------------------------------------
# General pipeline: good pair, progression window, oracle.


@dataclass(frozen=True)
class WindowExhausted:
    """All progression entries in a window were inside the set or
    undecided; for IN-dominated windows this is structural evidence."""

    min_q0: int
    statuses: tuple               # (i, status) pairs in scan order


@dataclass(frozen=True)
class GeneralSearchResult:
    witnesses: tuple
    events: tuple
    n: int
    schedule: tuple


Oracle = Callable[[tuple], MembershipVerdict]


def cantor_oracle(point: tuple) -> MembershipVerdict:
    return _cantor_verdict(point[0].numerator, point[0].denominator)


def ifs_oracle(system, depth_cap: int = 64) -> Oracle:
    from .ifs import membership

    def run(point: tuple) -> MembershipVerdict:
        return membership(system, point, depth_cap=depth_cap)
    return run


def extrinsic_search_general(x: TargetPoint, oracle: Oracle, n: int,
                             schedule: Sequence[int], *,
                             height_cap: Optional[int] = None,
                             max_precision: Optional[int] = None
                             ) -> GeneralSearchResult:
    """For each minimum height Q: find a good pair, walk the progression
    entries i = n..2n, and emit the first entry the oracle certifies OUT.

    UNKNOWN verdicts never produce witnesses; a window with no OUT entry
    is recorded as a WindowExhausted event and the schedule continues.
    """
    if n < 0:
        raise OutOfRange("window size must be nonnegative")
    witnesses = []
    events = []
    for q_min in schedule:
        kwargs = {}
        if height_cap is not None:
            kwargs["height_cap"] = height_cap
        if max_precision is not None:
            kwargs["max_precision"] = max_precision
        pair = good_pair_search(x, q_min, **kwargs)
        statuses = []
        found = None
        for i in range(n, 2 * n + 1):
            r = pair.r0.add_multiple(pair.r_inf, i)
            verdict = oracle(r.point())
            statuses.append((i, verdict.status))
            if verdict.status == "out":
                certified = certify_progression_entry(x, pair, i, max_precision)
                found = ExtrinsicWitness(
                    r.p, r.q, verdict, quality(x, r), certified,
                    ("progression", q_min, i))
                break
        if found is None:
            events.append(WindowExhausted(q_min, tuple(statuses)))
        else:
            witnesses.append(found)
    return GeneralSearchResult(tuple(witnesses), tuple(events), n,
                               tuple(schedule))


def verify_witness(x: TargetPoint, witness: ExtrinsicWitness,
                   oracle: Oracle) -> bool:
    """Re-run the oracle and the quality enclosure for a witness."""
    verdict = oracle(witness.point())
    if verdict.status != "out":
        return False
    again = quality(x, ApproxVector(witness.p, witness.q))
    return again.intersect(witness.quality) is not None


# ---------------------------------------------------------------------------
# Rational line obstruction.


@dataclass(frozen=True)
class SegmentObstruction:
    numerator: int                # |n . p - m q| over the common denominator
    q: int
    norm_squared: int
    distance: ExactScalar         # exact distance to the line
    floor: ExactScalar            # guaranteed lower bound 1/(q ||n||)


def rational_segment_obstruction(normal: Sequence[int], offset: int,
                                 point: Sequence) -> SegmentObstruction:
    """Exact distance from a rational point to the rational line
    {z : normal . z = offset}, with its universal 1/(q ||n||) floor.

    The normal form must be primitive: gcd of the normal entries and the
    offset equal to 1.
    """
    normal = tuple(int(v) for v in normal)
    offset = int(offset)
    if not normal or all(v == 0 for v in normal):
        raise ConfigError("normal vector must be nonzero")
    g = 0
    for v in normal + (offset,):
        g = gcd(g, abs(v))
    if g != 1:
        raise ConfigError("normal form must be primitive (gcd 1)")
    coords = tuple(Fraction(c) for c in point)
    if len(coords) != len(normal):
        raise ConfigError("point and normal dimensions differ")
    q = 1
    for c in coords:
        q = q * c.denominator // gcd(q, c.denominator)
    ints = tuple(int(c * q) for c in coords)
    num = abs(sum(nv * pv for nv, pv in zip(normal, ints)) - offset * q)
    if num == 0:
        raise OnLine("point lies on the line")
    s = sum(v * v for v in normal)
    root = sqrt_scalar(Fraction(s))
    return SegmentObstruction(num, q, s,
                              Fraction(num, q) / root,
                              Fraction(1, q) / root)


# ---------------------------------------------------------------------------
# Rational points on the unit circle.


@dataclass(frozen=True, order=True)
class CirclePoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.x * self.x + self.y * self.y != 1:
            raise OutOfRange("(%s, %s) is not on the unit circle"
                             % (self.x, self.y))

    @property
    def denominator(self) -> int:
        d1, d2 = self.x.denominator, self.y.denominator
        return d1 * d2 // gcd(d1, d2)

    def coords(self) -> tuple:
        return (self.x, self.y)


def pythagorean_points(height_bound: int) -> list:
    """All rational points on the unit circle with reduced denominator at
    most height_bound, from primitive triples plus the axis points."""
    if height_bound < 1:
        raise OutOfRange("height bound must be at least 1")
    found = {(Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0)),
             (Fraction(0), Fraction(1)), (Fraction(0), Fraction(-1))}
    s = 2
    while s * s + 1 <= height_bound:
        for t in range(1, s):
            if (s - t) % 2 == 0 or gcd(s, t) != 1:
                continue
            c = s * s + t * t
            if c > height_bound:
                continue
            a, b = s * s - t * t, 2 * s * t
            for aa in (a, -a):
                for bb in (b, -b):
                    found.add((Fraction(aa, c), Fraction(bb, c)))
                    found.add((Fraction(bb, c), Fraction(aa, c)))
        s += 1
    return [CirclePoint(x, y) for x, y in sorted(found)]


def circle_point_from_parameter(t) -> tuple:
    """Rational parametrization ((1 - t^2)/(1 + t^2), 2t/(1 + t^2)); an
    exact quadratic t gives an exact quadratic point on the circle."""
    if isinstance(t, float):
        raise ConfigError("parameter must be exact")
    if not isinstance(t, QuadScalar):
        t = Fraction(t)
    den = 1 + t * t
    return ((1 - t * t) / den, (2 * t) / den)


@dataclass(frozen=True)
class CircleExclusion:
    distance: ExactScalar         # exact Euclidean distance to the circle
    floor: ExactScalar            # 1/(q^2 (||p/q|| + 1))
    numerator: int                # | ||p||^2 - q^2 |
    q: int


def circle_exclusion(point: Sequence) -> CircleExclusion:
    """Exact distance from an off-circle rational point to the unit
    circle via the identity |r - 1| = |r^2 - 1| / (r + 1).

    Both evaluation routes are computed and compared; the integer
    numerator is at least 1, so the distance is at least the floor.
    """
    x, y = (Fraction(c) for c in point)
    q = x.denominator * y.denominator // gcd(x.denominator, y.denominator)
    p1, p2 = int(x * q), int(y * q)
    s = p1 * p1 + p2 * p2
    if s == q * q:
        raise OnCircle("point is on the unit circle")
    norm = sqrt_scalar(Fraction(s, q * q))
    direct = abs(norm - 1)
    via_identity = Fraction(abs(s - q * q), q * q) / (norm + 1)
    if direct != via_identity:
        raise InvariantViolation("distance identity failed at (%s, %s)"
                                 % (x, y))
    return CircleExclusion(direct, Fraction(1, q * q) / (norm + 1),
                           abs(s - q * q), q)


# ---------------------------------------------------------------------------
# Census of psi-approximability on the circle.


@dataclass(frozen=True)
class CensusHit:
    p: tuple
    q: int
    on_circle: bool

    def point(self) -> tuple:
        return (Fraction(self.p[0], self.q), Fraction(self.p[1], self.q))


@dataclass(frozen=True)
class CensusReport:
    c: Fraction
    q_max: int
    intrinsic: tuple
    extrinsic: tuple
    exclusion_consistent: bool

    @property
    def max_extrinsic_q(self) -> int:
        return max((h.q for h in self.extrinsic), default=0)


def psi_census(point, c, q_max: int) -> CensusReport:
    """Count rationals p/q, q <= q_max, with ||x - p/q||_max < q^(-(1+c)),
    split into on-circle (intrinsic) and off-circle (extrinsic) hits.

    Only gcd-reduced triples are counted, the target itself is skipped,
    and every extrinsic hit is checked against the circle exclusion
    bound (Euclidean distance within sqrt(2) of the max norm).
    """
    if isinstance(point, CirclePoint):
        coords = point.coords()
    else:
        coords = tuple(c0 if isinstance(c0, QuadScalar) else Fraction(c0)
                       for c0 in point)
    if len(coords) != 2:
        raise ConfigError("census target must be planar")
    if coords[0] * coords[0] + coords[1] * coords[1] != 1:
        raise OutOfRange("census target must lie on the unit circle")
    c = Fraction(c)
    if c <= 0:
        raise ConfigError("exponent must be positive")
    if q_max < 0:
        raise OutOfRange("q_max must be nonnegative")
    a, b = (1 + c).numerator, (1 + c).denominator
    intrinsic = []
    extrinsic = []
    for q in range(1, q_max + 1):
        for cand in _nearby_candidates(coords, q):
            p1, p2 = cand
            if gcd(gcd(abs(p1), abs(p2)), q) != 1:
                continue
            if coords[0] == Fraction(p1, q) and coords[1] == Fraction(p2, q):
                continue
            delta = _max_norm_error(coords, cand, q)
            if not _power_lt(delta, q, a, b):
                continue
            hit = CensusHit(cand, q, p1 * p1 + p2 * p2 == q * q)
            (intrinsic if hit.on_circle else extrinsic).append(hit)
    consistent = all(_exclusion_consistent(h, a, b) for h in extrinsic)
    if not consistent:
        raise InvariantViolation("extrinsic hit beat the exclusion bound")
    return CensusReport(c, q_max, tuple(intrinsic), tuple(extrinsic), True)


def _nearby_candidates(coords, q: int):
    from .scalars import exact_floor

    ranges = []
    for x in coords:
        m = exact_floor(q * x)
        ranges.append((m, m + 1))
    for p1 in ranges[0]:
        for p2 in ranges[1]:
            yield (p1, p2)


def _max_norm_error(coords, cand, q: int) -> ExactScalar:
    best = None
    for x, p in zip(coords, cand):
        d = abs(x - Fraction(p, q))
        if best is None or scalar_lt(best, d):
            best = d
    return best


def _power_lt(delta: ExactScalar, q: int, a: int, b: int) -> bool:
    """Whether delta < q^(-a/b), via delta^b q^a < 1 exactly."""
    return quad_sign(delta ** b * Fraction(q) ** a - 1) < 0


def _exclusion_consistent(hit: CensusHit, a: int, b: int) -> bool:
    """A reported extrinsic hit must be compatible with the circle
    exclusion floor: dist_euclid <= sqrt(2) ||.||_max < sqrt(2) q^(-a/b),
    so dist^(2b) < 2^b q^(-2a) must hold for the exact distance."""
    excl = circle_exclusion(hit.point())
    d2b = excl.distance ** (2 * b)
    return quad_sign(d2b * Fraction(hit.q ** (2 * a)) - 2 ** b) < 0
