"""Roughly arithmetic progressions (RAPs) and their certificates.

Points x_0, ..., x_N on a line form a C-RAP when there is an increment
vector v != 0 and exact ratios c_ij with

    x_j - x_i = c_ij v   and   (j - i)/C <= c_ij <= C (j - i).

Certificates store v and every ratio so verification is a pure
re-computation.  Projectivized progressions r_0 + i r_inf give C = 2
RAPs on their upper index window; that construction is exact and is
checked here rather than trusted.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvariantViolation, NotCollinear, OutOfRange
from .lattice import ApproxVector

Point = tuple[Fraction, ...]


def _as_points(points) -> list[Point]:
    out = []
    for p in points:
        if isinstance(p, tuple):
            out.append(tuple(Fraction(c) for c in p))
        else:
            out.append((Fraction(p),))
    if out and any(len(p) != len(out[0]) for p in out):
        raise OutOfRange("points of mixed dimension")
    return out


@dataclass
class RAPCertificate:
    points: tuple[Point, ...]
    increment: Point
    c_bound: Fraction
    ratios: dict[tuple[int, int], Fraction]

    def verify(self) -> bool:
        """Recompute every defining condition; no stored value is trusted."""
        n = len(self.points)
        if n <= 1:
            return True
        v = self.increment
        if all(c == 0 for c in v):
            return False
        for i in range(n):
            for j in range(i + 1, n):
                c = self.ratios.get((i, j))
                if c is None:
                    return False
                diff = tuple(a - b for a, b in zip(self.points[j], self.points[i]))
                if diff != tuple(c * vc for vc in v):
                    return False
                if not (Fraction(j - i) / self.c_bound <= c <= self.c_bound * (j - i)):
                    return False
        return True

    def __len__(self):
        return len(self.points)


def _line_parameters(pts: list[Point]) -> tuple[Point, list[Fraction]]:
    """Direction u and exact parameters t_i with x_i = x_0 + t_i u.

    Raises NotCollinear if no single line carries all points.
    """
    x0 = pts[0]
    u = None
    for p in pts[1:]:
        diff = tuple(a - b for a, b in zip(p, x0))
        if any(diff):
            u = diff
            break
    if u is None:
        return (Fraction(0),) * len(x0), [Fraction(0)] * len(pts)
    axis = next(k for k, c in enumerate(u) if c)
    ts = []
    for p in pts:
        diff = tuple(a - b for a, b in zip(p, x0))
        t = diff[axis] / u[axis]
        if diff != tuple(t * c for c in u):
            raise NotCollinear("point %r off the line through %r and %r" % (p, x0, u))
        ts.append(t)
    return u, ts


def rap_check(points: Sequence, c_bound) -> Optional[RAPCertificate]:
    """Certificate that the points, in the given order, form a C-RAP.

    The increment v = x_1 - x_0 is tried first; if the ratio window
    allows no scale through it, the midpoint of the feasible scale
    interval is used.  Returns None when the window is empty, raises
    NotCollinear when no line fits at all.
    """
    C = Fraction(c_bound)
    if C < 1:
        raise OutOfRange("C must be >= 1")
    pts = _as_points(points)
    if len(pts) < 2:
        return RAPCertificate(tuple(pts), (Fraction(0),) * (len(pts[0]) if pts else 1),
                              C, {}) if pts else None
    u, ts = _line_parameters(pts)
    if all(c == 0 for c in u):
        return None                      # repeated points cannot progress
    if ts[1] < 0:
        u = tuple(-c for c in u)
        ts = [-t for t in ts]
    # feasible scales s (v = s u): (j-i)/C <= (t_j - t_i)/s <= C (j-i)
    s_lo, s_hi = Fraction(0), None
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            gap = ts[j] - ts[i]
            if gap <= 0:
                return None
            k = j - i
            s_lo = max(s_lo, gap / (C * k))
            hi = C * gap / k
            s_hi = hi if s_hi is None else min(s_hi, hi)
    if s_lo > s_hi:
        return None
    s = Fraction(1) if s_lo <= 1 <= s_hi else (s_lo + s_hi) / 2
    v = tuple(s * c for c in u)
    ratios = {}
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            ratios[(i, j)] = (ts[j] - ts[i]) / s
    cert = RAPCertificate(tuple(pts), v, C, ratios)
    if not cert.verify():
        raise InvariantViolation("constructed RAP certificate failed verification")
    return cert


def rap_window_from_pair(r0: ApproxVector, r_inf: ApproxVector, n: int) -> RAPCertificate:
    """The window i = n..2n of the progression r_0 + i r_inf as a 2-RAP.

    Increment and ratios come from the closed forms
        v      = (q_0 p_inf - q_inf p_0) / (q_n q_2n)
        c_kl   = (l - k) q_n q_2n / (q_{n+k} q_{n+l})
    and the certificate is verified before it is returned; a failure
    here is an arithmetic bug, not a property of the input.
    """
    if n < 0:
        raise OutOfRange("window index must be >= 0")
    entries = [r0.add_multiple(r_inf, i) for i in range(n, 2 * n + 1)]
    if any(e.q <= 0 for e in entries):
        raise OutOfRange("window contains a nonpositive denominator")
    pts = tuple(e.point() for e in entries)
    qn, q2n = entries[0].q, entries[-1].q
    w = tuple(r0.q * pi - r_inf.q * p0 for p0, pi in zip(r0.p, r_inf.p))
    v = tuple(Fraction(c, qn * q2n) for c in w)
    ratios = {}
    m = len(entries)
    for k in range(m):
        for l in range(k + 1, m):
            ratios[(k, l)] = Fraction((l - k) * qn * q2n,
                                      entries[k].q * entries[l].q)
    cert = RAPCertificate(pts, v, Fraction(2), ratios)
    if n >= 1 and not cert.verify():
        raise InvariantViolation("projectivized window failed its own closed form")
    return cert


@dataclass
class NormalizedRAP:
    """Scalar parameters of a RAP rescaled so the ends sit at 0 and 1."""

    taus: tuple[Fraction, ...]
    c_bound: Fraction

    @property
    def steps(self) -> int:
        return len(self.taus) - 1


def normalize(cert: RAPCertificate) -> NormalizedRAP:
    pts = list(cert.points)
    if len(pts) < 2:
        raise OutOfRange("need at least two points to normalize")
    _, ts = _line_parameters(pts)
    span = ts[-1] - ts[0]
    if span == 0:
        raise OutOfRange("degenerate span")
    taus = tuple((t - ts[0]) / span for t in ts)
    return NormalizedRAP(taus, cert.c_bound)


def hausdorff_to_unit(norm: NormalizedRAP) -> Fraction:
    """Hausdorff distance between {tau_i} and [0, 1]; ends must be 0 and 1."""
    taus = sorted(norm.taus)
    if taus[0] != 0 or taus[-1] != 1:
        raise OutOfRange("normalized RAP must span [0, 1]")
    biggest = max(b - a for a, b in zip(taus, taus[1:]))
    return biggest / 2


def gap_bound(c_bound, n: int) -> Fraction:
    """The guaranteed Hausdorff bound C^2 / (2 N) for an N-step C-RAP."""
    if n < 1:
        raise OutOfRange("need at least one step")
    C = Fraction(c_bound)
    return C * C / (2 * n)


# -- searches ----------------------------------------------------------------

def longest_ap(points: Sequence, max_len: int | None = None) -> list[Point]:
    """Longest exact arithmetic progression inside the point set.

    Deterministic: points are scanned in sorted order and the first
    progression of maximal length is kept.
    """
    pts = sorted(set(_as_points(points)))
    have = set(pts)
    if not pts:
        return []
    best = [pts[0]]
    for a in range(len(pts)):
        for b in range(len(pts)):
            if a == b:
                continue
            step = tuple(x - y for x, y in zip(pts[b], pts[a]))
            if all(c == 0 for c in step):
                continue
            # only count a chain from its first element
            prev = tuple(x - y for x, y in zip(pts[a], step))
            if prev in have:
                continue
            chain = [pts[a], pts[b]]
            cur = pts[b]
            while max_len is None or len(chain) < max_len:
                cur = tuple(x + y for x, y in zip(cur, step))
                if cur not in have:
                    break
                chain.append(cur)
            if len(chain) > len(best):
                best = chain
    return best


@dataclass
class RAPSearchResult:
    certificate: Optional[RAPCertificate]
    exhausted: bool
    nodes: int


def longest_rap(points: Sequence, c_bound, max_len: int | None = None,
                budget: int = 500_000) -> RAPSearchResult:
    """Longest C-RAP (as an ordered subsequence) inside the point set.

    Depth-first search over chains ordered by position, carrying the
    interval of scales s that satisfies every ratio constraint seen so
    far.  The budget counts node expansions; when it runs out the best
    chain found is returned with exhausted=False.
    """
    C = Fraction(c_bound)
    if C < 1:
        raise OutOfRange("C must be >= 1")
    pts = _as_points(points)
    if len(pts) == 0:
        return RAPSearchResult(None, True, 0)
    groups = _collinear_groups(pts)
    state = _Budget(budget)
    best_chain: list[Point] | None = None
    for base, u, ts in groups:
        chain = _scalar_longest(sorted(set(ts)), C, max_len, state)
        if chain and (best_chain is None or len(chain) > len(best_chain)):
            best_chain = [tuple(b + t * c for b, c in zip(base, u)) for t in chain]
    if best_chain is None:
        cert = rap_check([pts[0]], C) if pts else None
        return RAPSearchResult(cert, not state.spent, state.nodes)
    cert = rap_check(best_chain, C)
    if cert is None:
        raise InvariantViolation("search emitted an infeasible chain")
    return RAPSearchResult(cert, not state.spent, state.nodes)


class _Budget:
    __slots__ = ("left", "nodes", "spent")

    def __init__(self, amount: int):
        self.left = amount
        self.nodes = 0
        self.spent = False

    def tick(self) -> bool:
        if self.left <= 0:
            self.spent = True
            return False
        self.left -= 1
        self.nodes += 1
        return True


def _collinear_groups(pts: list[Point]):
    """Maximal collinear subsets as (base, direction, scalar parameters)."""
    if len(pts[0]) == 1:
        return [((Fraction(0),), (Fraction(1),), [p[0] for p in pts])]
    if len(pts[0]) > 2:
        raise OutOfRange("line grouping implemented for dimension <= 2")
    uniq = sorted(set(pts))
    if len(uniq) == 1:
        return [(uniq[0], (Fraction(0),) * len(uniq[0]), [Fraction(0)])]
    lines: dict[tuple, list[Point]] = {}
    for i in range(len(uniq)):
        for j in range(i + 1, len(uniq)):
            key = _line_key(uniq[i], uniq[j])
            lines.setdefault(key, [])
    for key in lines:
        lines[key] = [p for p in uniq if _on_line(key, p)]
    groups = []
    seen = set()
    for key in sorted(lines):
        members = tuple(lines[key])
        if len(members) < 2 or members in seen:
            continue
        seen.add(members)
        base = members[0]
        u = tuple(a - b for a, b in zip(members[1], base))
        axis = next(k for k, c in enumerate(u) if c)
        ts = [(p[axis] - base[axis]) / u[axis] for p in members]
        groups.append((base, u, ts))
    return groups


def _line_key(p: Point, q: Point) -> tuple:
    """Canonical (normal..., offset) key of the line through p and q (2-d)."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = (-dy, dx)
    c = n[0] * p[0] + n[1] * p[1]
    # scale so the first nonzero normal entry is 1
    lead = n[0] if n[0] != 0 else n[1]
    return (n[0] / lead, n[1] / lead, c / lead)


def _on_line(key: tuple, p: Point) -> bool:
    n0, n1, c = key
    return n0 * p[0] + n1 * p[1] == c


def _scalar_longest(ts: list[Fraction], C: Fraction, max_len: int | None,
                    state: _Budget) -> list[Fraction] | None:
    n = len(ts)
    if n == 0:
        return None
    if n == 1 or (max_len is not None and max_len <= 1):
        return [ts[0]]
    best: list[Fraction] = [ts[0]]
    t_last = ts[-1]

    def extend(chain: list[Fraction], s_lo: Fraction, s_hi: Fraction,
               idx_last: int) -> None:
        nonlocal best
        if not state.tick():
            return
        m = len(chain)
        if m > len(best):
            best = list(chain)
        if max_len is not None and m >= max_len:
            return
        last = chain[-1]
        # to beat the best chain we need this many further points, every
        # step at least s_lo / C and at most C * s_hi
        needed = len(best) + 1 - m
        if needed > 0:
            if s_lo > 0 and (t_last - last) * C < needed * s_lo:
                return
            ceiling = last + needed * C * s_hi
            avail = bisect_right(ts, ceiling) - idx_last - 1
            if avail < needed:
                return
        lo_t = last + s_lo / C
        hi_t = last + C * s_hi
        for idx in range(bisect_left(ts, lo_t, idx_last + 1),
                         bisect_right(ts, hi_t, idx_last + 1)):
            if m + n - idx <= len(best):
                break
            t = ts[idx]
            new_lo, new_hi = s_lo, s_hi
            ok = True
            for i, ti in enumerate(chain):
                gap = t - ti
                k = m - i
                new_lo = max(new_lo, gap / (C * k))
                new_hi = min(new_hi, C * gap / k)
                if new_lo > new_hi:
                    ok = False
                    break
            if ok:
                chain.append(t)
                extend(chain, new_lo, new_hi, idx)
                chain.pop()

    for a in range(n):
        if state.spent or n - a <= len(best):
            break
        for b in range(a + 1, n):
            if 1 + n - b <= len(best):
                break
            gap = ts[b] - ts[a]
            extend([ts[a], ts[b]], gap / C, C * gap, b)
    return best
