"""Twelve acceptance batteries with one pass/fail line each.

Every criterion re-runs a complete experiment from fixed seeds and
checks a concrete claim about the outcome with exact arithmetic.
Expensive artifacts travel through a per-run cache: the good-pair
roster from the first battery feeds the progression checks, and the
empirical longest-RAP length from the endpoint search sets the window
sizes of the two witness batteries.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .errors import ConfigError
from .extrinsic import (cantor_oracle, circle_exclusion,
                        circle_point_from_parameter, extrinsic_search_cantor,
                        extrinsic_search_general, psi_census,
                        rational_segment_obstruction, verify_witness)
from .geometry import ConvexPolygon
from .ifs import (IFSystem, Similarity, cantor_level_endpoints,
                  cantor_membership, cantor_system, check_osc, koch_apex,
                  koch_system, membership, segment_scan,
                  sierpinski_right_system, verify_membership)
from .lattice import (ApproxVector, certify_progression_entry,
                      good_pair_search, verify_good_pair)
from .rap import (RAPCertificate, gap_bound, hausdorff_to_unit, longest_ap,
                  longest_rap, normalize, rap_window_from_pair)
from .scalars import quad, quad_sign, sqrt_scalar
from .targets import SeededStream, TargetPoint, ThueMorseStream

HEIGHTS = (10, 100, 1000, 10000)
RAP_BUDGET = 2_000_000


def roster() -> list:
    """Twenty irrational targets: five quadratic lines, five ternary
    streams, five planar and five spatial quadratic points."""
    s2 = quad(-1, 1, 1, 2)        # sqrt(2) - 1
    golden = quad(-1, 1, 2, 5)    # (sqrt(5) - 1)/2
    s3 = quad(-1, 1, 1, 3)        # sqrt(3) - 1
    s7 = quad(-2, 1, 1, 7)        # sqrt(7) - 2
    s13 = quad(-3, 1, 2, 13)      # (sqrt(13) - 3)/2
    h2 = quad(0, 1, 2, 2)         # sqrt(2)/2
    t3 = quad(0, 1, 3, 3)         # sqrt(3)/3
    f5 = quad(0, 1, 5, 5)         # sqrt(5)/5
    s5 = quad(-2, 1, 1, 5)        # sqrt(5) - 2
    lines = [s2, golden, s3, s7, s13]
    streams = [ThueMorseStream(3, 0, 2)] + [SeededStream(3, s)
                                            for s in (1, 2, 3, 4)]
    planar = [(h2, t3), (s2, s3), (s5, s7), (golden, h2), (t3, s13)]
    spatial = [(s2, s3, s5), (h2, t3, f5), (golden, s7, h2),
               (s3, s13, s2), (s7, s5, t3)]
    pts = [TargetPoint([c]) for c in lines]
    pts += [TargetPoint([s]) for s in streams]
    pts += [TargetPoint(list(p)) for p in planar + spatial]
    return pts


class SuiteCache:
    """Artifacts shared between criteria inside one run."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._targets = None
        self._pairs = None
        self._windows = None
        self._raps = {}

    def targets(self) -> list:
        if self._targets is None:
            self._targets = roster()
        return self._targets

    def pairs(self) -> dict:
        """(target index, minimum height) -> good pair, found once."""
        if self._pairs is None:
            found = {}
            for ti, x in enumerate(self.targets()):
                for q_min in HEIGHTS:
                    found[(ti, q_min)] = good_pair_search(x, q_min)
            self._pairs = found
        return self._pairs

    def windows(self) -> list:
        """1000 seeded projectivized windows as (steps, certificate)."""
        if self._windows is None:
            rng = random.Random(1_000_003 * 3 + self.seed)
            out = []
            for _ in range(1000):
                while True:
                    p0, q0 = rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)
                    pi, qi = rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)
                    if p0 * qi != pi * q0:
                        break
                n = rng.randint(1, 32)
                cert = rap_window_from_pair(ApproxVector((p0,), q0),
                                            ApproxVector((pi,), qi), n)
                out.append((n, cert))
            self._windows = out
        return self._windows

    def rap_at_depth(self, depth: int):
        if depth not in self._raps:
            self._raps[depth] = longest_rap(cantor_level_endpoints(depth), 2,
                                            budget=RAP_BUDGET)
        return self._raps[depth]

    def longest_endpoint_rap(self) -> int:
        """Points in the longest 2-RAP among depth-5 Cantor endpoints."""
        res = self.rap_at_depth(5)
        if not res.exhausted:
            raise RuntimeError("depth-5 RAP search ran out of budget")
        return len(res.certificate)


# ---------------------------------------------------------------------------
# The criteria.  Each returns (passed, one-line detail).


def _c01_good_pairs(cache: SuiteCache):
    targets = cache.targets()
    for (ti, q_min), pair in sorted(cache.pairs().items()):
        if pair.r0.q < q_min:
            return False, "target %d height %d: q0=%d below the floor" % (
                ti, q_min, pair.r0.q)
        verified, checks = verify_good_pair(targets[ti], pair)
        if not verified or len(checks) != 2 * targets[ti].dim:
            return False, "target %d height %d failed re-verification" % (
                ti, q_min)
    return True, "%d pairs re-verified from scratch" % len(cache.pairs())


def _c02_progressions(cache: SuiteCache):
    targets = cache.targets()
    count = 0
    for (ti, q_min), pair in sorted(cache.pairs().items()):
        for i in range(65):
            if not certify_progression_entry(targets[ti], pair, i):
                return False, "target %d height %d entry %d uncertified" % (
                    ti, q_min, i)
            count += 1
    return True, "%d entries certified" % count


def _c03_windows_certify(cache: SuiteCache):
    for trial, (n, cert) in enumerate(cache.windows()):
        if cert.c_bound != 2 or len(cert) != n + 1 or not cert.verify():
            return False, "trial %d: %d-step window failed" % (trial, n)
    return True, "1000 windows re-verified at C = 2"


def _c04_gap_bound(cache: SuiteCache):
    for n, cert in cache.windows():
        if hausdorff_to_unit(normalize(cert)) > gap_bound(2, n):
            return False, "a %d-step window broke the gap bound" % n
    for n in (1, 2, 3, 4, 5, 8, 16, 32):
        pts = tuple((Fraction(i, n),) for i in range(n + 1))
        ratios = {(i, j): Fraction(j - i)
                  for i in range(n + 1) for j in range(i + 1, n + 1)}
        grid = RAPCertificate(pts, (Fraction(1, n),), Fraction(2), ratios)
        if not grid.verify():
            return False, "uniform %d-step grid is not a 2-RAP" % n
        if hausdorff_to_unit(normalize(grid)) != Fraction(1, 2 * n):
            return False, "uniform %d-step grid missed 1/(2n)" % n
    return True, "1000 windows within bound, grid equality at 8 sizes"


def _c05_longest_ap(cache: SuiteCache):
    pts = cantor_level_endpoints(7)
    chain = longest_ap(pts)
    if len(chain) != 4:
        return False, "longest AP has %d points, expected 4" % len(chain)
    have = {(Fraction(p),) for p in pts}
    if any(p not in have for p in chain):
        return False, "reported chain leaves the endpoint set"
    steps = {b[0] - a[0] for a, b in zip(chain, chain[1:])}
    if len(steps) != 1 or not steps.pop():
        return False, "reported chain is not a proper progression"
    return True, "maximum length 4 over %d endpoints, exhaustively" % len(pts)


def _c06_rap_stability(cache: SuiteCache):
    for depth in (5, 6):
        res = cache.rap_at_depth(depth)
        if not res.exhausted:
            return False, "depth-%d search hit the %d-node budget" % (
                depth, RAP_BUDGET)
        if res.certificate is None or not res.certificate.verify():
            return False, "depth-%d certificate failed re-verification" % depth
    n5 = len(cache.rap_at_depth(5).certificate)
    n6 = len(cache.rap_at_depth(6).certificate)
    if n5 != n6:
        return False, "lengths differ: %d at depth 5, %d at depth 6" % (n5, n6)
    return True, "longest 2-RAP has %d points at depths 5 and 6" % n5


def _c07_semiconvergent_cover(cache: SuiteCache):
    window = max(8, cache.longest_endpoint_rap())
    cap = Fraction((1 + window) ** 2)
    worst = Fraction(0)
    for seed in range(1, 11):
        rep = extrinsic_search_cantor(SeededStream(3, seed), 40, window)
        if rep.all_intrinsic:
            return False, "seed %d: level %d has no OUT semiconvergent" % (
                seed, rep.all_intrinsic[0])
        for n in range(1, 41):
            mq = rep.min_quality(n)
            if mq is None:
                return False, "seed %d: level %d has no OUT row" % (seed, n)
            if mq > cap:
                return False, "seed %d level %d: quality %s above cap %s" % (
                    seed, n, mq, cap)
            worst = max(worst, mq)
    return True, "worst certified quality %.2f against cap %d" % (worst, cap)


def _c08_general_witnesses(cache: SuiteCache):
    window = cache.longest_endpoint_rap()
    cap = Fraction((1 + 2 * window) ** 2)
    schedule = (100, 1000, 10000)
    worst = Fraction(0)
    for seed in range(1, 11):
        x = TargetPoint([SeededStream(3, seed)])
        res = extrinsic_search_general(x, cantor_oracle, window, schedule)
        if len(res.witnesses) != len(schedule):
            return False, "seed %d: %d of %d heights gave witnesses" % (
                seed, len(res.witnesses), len(schedule))
        for q_min, w in zip(schedule, res.witnesses):
            if not w.certified or w.q < q_min:
                return False, "seed %d height %d: q=%d uncertified" % (
                    seed, q_min, w.q)
            if w.quality.hi > cap:
                return False, "seed %d height %d: quality above cap %s" % (
                    seed, q_min, cap)
            if not verify_witness(x, w, cantor_oracle):
                return False, "seed %d height %d: re-verification failed" % (
                    seed, q_min)
            worst = max(worst, w.quality.hi)
    return True, "30 witnesses certified, worst quality %.2f of cap %d" % (
        worst, cap)


def _c09_obstruction_identities(cache: SuiteCache):
    rng = random.Random(1_000_003 * 9 + cache.seed)
    for trial in range(10_000):
        while True:
            n1, n2 = rng.randint(-30, 30), rng.randint(-30, 30)
            if n1 or n2:
                break
        g = gcd(n1, n2)
        n1, n2 = n1 // g, n2 // g
        m = rng.randint(-60, 60)
        while True:
            x = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
            y = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
            if n1 * x + n2 * y != m:
                break
        ob = rational_segment_obstruction((n1, n2), m, (x, y))
        if ob.distance != ob.numerator * ob.floor:
            return False, "line trial %d: distance left the lattice" % trial
        norm = sqrt_scalar(Fraction(ob.norm_squared))
        if quad_sign(ob.floor * ob.q * norm - 1) != 0:
            return False, "line trial %d: floor is not 1/(q||n||)" % trial
        if quad_sign(ob.distance - ob.floor) < 0:
            return False, "line trial %d: distance under the floor" % trial
    for trial in range(10_000):
        while True:
            q = rng.randint(1, 200)
            p1 = rng.randint(-2 * q, 2 * q)
            p2 = rng.randint(-2 * q, 2 * q)
            if p1 * p1 + p2 * p2 != q * q:
                break
        pt = (Fraction(p1, q), Fraction(p2, q))
        ex = circle_exclusion(pt)
        direct = abs(sqrt_scalar(pt[0] * pt[0] + pt[1] * pt[1]) - 1)
        if ex.distance != direct:
            return False, "circle trial %d: distance mismatch at q=%d" % (
                trial, q)
        if ex.distance != ex.numerator * ex.floor:
            return False, "circle trial %d: floor identity broke" % trial
    return True, "10000 line and 10000 circle identities hold exactly"


_KOCH_EXTERIOR = [
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1, 3), Fraction(1, 3)),
    (Fraction(2, 3), Fraction(1, 3)),
    (Fraction(1, 2), Fraction(3, 10)),
    (Fraction(1, 2), Fraction(1, 7)),
    (Fraction(1, 2), Fraction(2, 7)),
    (Fraction(1, 4), Fraction(1, 100)),
    (Fraction(3, 4), Fraction(1, 100)),
    (Fraction(1, 5), Fraction(1, 5)),
    (Fraction(9, 10), Fraction(1, 12)),
]


def _skewed_koch() -> IFSystem:
    """Koch maps with the third translation moved left so that images
    2 and 3 of the open triangle overlap."""
    r = Fraction(1, 3)
    half = Fraction(1, 2)
    s = quad(0, 1, 2, 3)
    s6 = quad(0, 1, 6, 3)
    zero = Fraction(0)
    maps = {
        "1": Similarity.direct(r, 1, 0, (zero, zero)),
        "2": Similarity.direct(r, half, s, (Fraction(1, 3), zero)),
        "3": Similarity.direct(r, half, -s, (Fraction(1, 6), s6)),
        "4": Similarity.direct(r, 1, 0, (Fraction(2, 3), zero)),
    }
    w = ConvexPolygon(((zero, zero), (Fraction(1), zero), (half, s)))
    return IFSystem("skewed-koch", ("1", "2", "3", "4"), maps, w)


def _c10_planar_geometry(cache: SuiteCache):
    if not check_osc(cantor_system()).verified:
        return False, "middle-thirds separation rejected"
    k = koch_system()
    if not check_osc(k).verified:
        return False, "Koch separation rejected"
    bad = check_osc(_skewed_koch())
    if bad.verified or not any(v.kind == "overlap" for v in bad.violations):
        return False, "overlapping system slipped through"
    apex = membership(k, koch_apex(), depth_cap=64)
    if apex.status != "in" or not verify_membership(k, koch_apex(), apex):
        return False, "apex membership failed"
    for p in _KOCH_EXTERIOR:
        v = membership(k, p, depth_cap=64)
        if v.status != "out" or not verify_membership(k, p, v):
            return False, "exterior point %s not certified OUT" % (p,)
    tri = sierpinski_right_system()
    base = {(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))}
    for depth in (4, 5, 6):
        res = segment_scan(tri, depth, Fraction(1))
        if not any(set(h.endpoints) == base for h in res.hits):
            return False, "depth-%d scan missed the unit base segment" % depth
    if segment_scan(k, 8, Fraction(1, 20)).found is not None:
        return False, "Koch depth-8 scan reported a segment"
    return True, "separation, membership and segment scans all agree"


def _c11_membership_agreement(cache: SuiteCache):
    rng = random.Random(1_000_003 * 11 + cache.seed)
    sys3 = cantor_system()
    pts = [Fraction(k, 3 ** 7) for k in range(3 ** 7 + 1)]
    for _ in range(1000):
        q = rng.randint(1, 10 ** 4)
        pts.append(Fraction(rng.randint(0, q), q))
    for x in pts:
        fast = cantor_membership(x)
        slow = membership(sys3, (x,), depth_cap=12_000)
        if not fast.decided or not slow.decided:
            return False, "membership undecided at %s" % x
        if fast.status != slow.status:
            return False, "engines disagree at %s" % x
    return True, "%d points agree across both engines" % len(pts)


def _c12_circle_census(cache: SuiteCache):
    pts = [
        (Fraction(3, 5), Fraction(4, 5)),
        (Fraction(5, 13), Fraction(12, 13)),
        circle_point_from_parameter(Fraction(1, 3)),
        circle_point_from_parameter(sqrt_scalar(Fraction(2))),
        circle_point_from_parameter(sqrt_scalar(Fraction(3))),
    ]
    worst = 0
    for pt in pts:
        rep = psi_census(pt, 2, 10_000)
        if not rep.exclusion_consistent:
            return False, "a hit beat the exclusion bound near %s" % (pt,)
        if rep.max_extrinsic_q > 3:
            return False, "extrinsic hit at q=%d near %s" % (
                rep.max_extrinsic_q, pt)
        worst = max(worst, rep.max_extrinsic_q)
    return True, "no extrinsic hit beyond q=%d up to height 10^4" % worst


CRITERIA: dict = {
    1: ("good pairs found and re-verified at four heights", _c01_good_pairs),
    2: ("progression entries certified through i = 64", _c02_progressions),
    3: ("random projectivized windows certify C = 2", _c03_windows_certify),
    4: ("normalized windows obey the C^2/(2N) gap bound", _c04_gap_bound),
    5: ("longest AP among depth-7 endpoints has 4 points", _c05_longest_ap),
    6: ("longest 2-RAP length stable across depths 5 and 6",
        _c06_rap_stability),
    7: ("every level keeps an OUT semiconvergent in window",
        _c07_semiconvergent_cover),
    8: ("general search certifies witnesses at three heights",
        _c08_general_witnesses),
    9: ("line and circle obstruction identities on random inputs",
        _c09_obstruction_identities),
    10: ("planar systems: separation, membership, segment scans",
         _c10_planar_geometry),
    11: ("ternary membership matches the generic engine",
         _c11_membership_agreement),
    12: ("near-circle census stays trivial beyond q = 3", _c12_circle_census),
}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        body = "criterion %2d %s %s" % (self.number, tag, self.name)
        if self.detail:
            body += " -- " + self.detail
        return "%s (%.1fs)" % (body, self.seconds)


def run_criteria(selected: Optional[Sequence[int]] = None,
                 seed: int = 0) -> list:
    """Run the requested criteria (all twelve by default) over one shared
    cache; a criterion that raises reports FAIL instead of aborting."""
    cache = SuiteCache(seed)
    numbers = sorted(CRITERIA) if not selected else sorted(set(selected))
    results = []
    for num in numbers:
        if num not in CRITERIA:
            raise ConfigError("no criterion numbered %r" % (num,))
        name, fn = CRITERIA[num]
        t0 = time.perf_counter()
        try:
            passed, detail = fn(cache)
        except Exception as exc:
            passed = False
            detail = "raised %s: %s" % (type(exc).__name__, exc)
        results.append(CriterionResult(num, name, passed, detail,
                                       time.perf_counter() - t0))
    return results
