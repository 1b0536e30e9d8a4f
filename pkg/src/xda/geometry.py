"""Exact convex geometry in the plane.

Vertices are pairs of exact scalars (rationals or quadratic
irrationals over one shared radicand), predicates are sign
computations, and intersection points are field elements.  Nothing is
approximated, which is what lets open-set-condition checks and
cylinder pruning count as certificates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import OutOfRange
from .scalars import ExactScalar, quad_sign

Vec = tuple  # (x, y) of ExactScalar


def v_sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def v_add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def v_dot(a: Vec, b: Vec) -> ExactScalar:
    return a[0] * b[0] + a[1] * b[1]


def v_cross(a: Vec, b: Vec) -> ExactScalar:
    return a[0] * b[1] - a[1] * b[0]


def dist2(a: Vec, b: Vec) -> ExactScalar:
    d = v_sub(a, b)
    return v_dot(d, d)


class ConvexPolygon:
    """Convex polygon with vertices in counterclockwise order.

    Collinear consecutive vertices are tolerated; zero area is not.
    """

    def __init__(self, vertices: Sequence[Vec]):
        vs = [tuple(v) for v in vertices]
        if len(vs) < 3:
            raise OutOfRange("polygon needs at least 3 vertices")
        area2 = Fraction(0)
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            area2 = area2 + v_cross(a, b)
        s = quad_sign(area2)
        if s == 0:
            raise OutOfRange("degenerate polygon")
        if s < 0:
            vs.reverse()
        for i in range(len(vs)):
            a = vs[i]
            b = vs[(i + 1) % len(vs)]
            c = vs[(i + 2) % len(vs)]
            if quad_sign(v_cross(v_sub(b, a), v_sub(c, b))) < 0:
                raise OutOfRange("vertices are not convex")
        self.vertices = tuple(vs)

    def edges(self):
        vs = self.vertices
        for i in range(len(vs)):
            yield vs[i], vs[(i + 1) % len(vs)]

    def contains(self, p: Vec, strict: bool = False) -> bool:
        want = 1 if strict else 0
        for a, b in self.edges():
            if quad_sign(v_cross(v_sub(b, a), v_sub(p, a))) < want:
                return False
        return True

    def contains_polygon(self, other: "ConvexPolygon", strict: bool = False) -> bool:
        return all(self.contains(v, strict) for v in other.vertices)

    def centroid(self) -> Vec:
        n = len(self.vertices)
        sx = sum((v[0] for v in self.vertices), Fraction(0))
        sy = sum((v[1] for v in self.vertices), Fraction(0))
        return (sx / n, sy / n)

    def diameter_squared(self) -> ExactScalar:
        vs = self.vertices
        best = Fraction(0)
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                d = dist2(vs[i], vs[j])
                if quad_sign(d - best) > 0:
                    best = d
        return best

    def __repr__(self):
        return "ConvexPolygon(%r)" % (self.vertices,)


def interiors_disjoint(p: ConvexPolygon, q: ConvexPolygon) -> bool:
    """Separating-axis test; touching boundaries still count as disjoint."""
    for poly in (p, q):
        for a, b in poly.edges():
            e = v_sub(b, a)
            n = (-e[1], e[0])
            pmin, pmax = _project(p, n)
            qmin, qmax = _project(q, n)
            if quad_sign(qmin - pmax) >= 0 or quad_sign(pmin - qmax) >= 0:
                return True
    return False


def _project(poly: ConvexPolygon, axis: Vec):
    lo = hi = v_dot(poly.vertices[0], axis)
    for v in poly.vertices[1:]:
        d = v_dot(v, axis)
        if quad_sign(d - lo) < 0:
            lo = d
        if quad_sign(d - hi) > 0:
            hi = d
    return lo, hi


def clip_convex(subject: ConvexPolygon, clip: ConvexPolygon) -> list[Vec]:
    """Vertices of subject intersect clip (Sutherland-Hodgman), possibly empty
    or degenerate."""
    out = list(subject.vertices)
    for a, b in clip.edges():
        if not out:
            break
        e = v_sub(b, a)
        inp, out = out, []
        prev = inp[-1]
        prev_side = quad_sign(v_cross(e, v_sub(prev, a)))
        for cur in inp:
            cur_side = quad_sign(v_cross(e, v_sub(cur, a)))
            if (cur_side >= 0) != (prev_side >= 0):
                out.append(_line_segment_meet(a, e, prev, cur))
            if cur_side >= 0:
                out.append(cur)
            prev, prev_side = cur, cur_side
    return out


def _line_segment_meet(a: Vec, e: Vec, p: Vec, q: Vec) -> Vec:
    """Intersection of segment pq with the line through a along e."""
    denom = v_cross(e, v_sub(q, p))
    t = v_cross(e, v_sub(a, p)) / denom
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def overlap_witness(p: ConvexPolygon, q: ConvexPolygon) -> Optional[Vec]:
    """A point interior to both polygons, or None when interiors are disjoint."""
    if interiors_disjoint(p, q):
        return None
    pts = clip_convex(p, q)
    if len(pts) < 3:
        return None
    n = len(pts)
    cx = sum((v[0] for v in pts), Fraction(0)) / n
    cy = sum((v[1] for v in pts), Fraction(0)) / n
    w = (cx, cy)
    if p.contains(w, strict=True) and q.contains(w, strict=True):
        return w
    return None


def line_range(poly: ConvexPolygon, anchor: Vec, direction: Vec
               ) -> Optional[tuple[ExactScalar, ExactScalar]]:
    """Parameter interval {t : anchor + t direction in poly}, or None.

    Evaluates each edge constraint alpha + t beta >= 0 exactly; the
    result endpoints live in the same field as the inputs.
    """
    if quad_sign(direction[0]) == 0 and quad_sign(direction[1]) == 0:
        raise OutOfRange("direction must be nonzero")
    lo = hi = None
    for a, b in poly.edges():
        e = v_sub(b, a)
        alpha = v_cross(e, v_sub(anchor, a))
        beta = v_cross(e, direction)
        sb = quad_sign(beta)
        if sb == 0:
            if quad_sign(alpha) < 0:
                return None
            continue
        bound = (-1 * alpha) / beta
        if sb > 0:
            if lo is None or quad_sign(bound - lo) > 0:
                lo = bound
        else:
            if hi is None or quad_sign(bound - hi) < 0:
                hi = bound
    if lo is None or hi is None:
        raise OutOfRange("line constraints failed to bound the parameter")
    if quad_sign(hi - lo) < 0:
        return None
    return lo, hi


def point_segment_dist2(p: Vec, a: Vec, b: Vec) -> ExactScalar:
    ab = v_sub(b, a)
    denom = v_dot(ab, ab)
    if quad_sign(denom) == 0:
        return dist2(p, a)
    t = v_dot(v_sub(p, a), ab) / denom
    if quad_sign(t) < 0:
        return dist2(p, a)
    if quad_sign(t - 1) > 0:
        return dist2(p, b)
    foot = (a[0] + t * ab[0], a[1] + t * ab[1])
    return dist2(p, foot)


def polygon_point_dist2(poly: ConvexPolygon, p: Vec) -> ExactScalar:
    if poly.contains(p):
        return Fraction(0)
    best = None
    for a, b in poly.edges():
        d = point_segment_dist2(p, a, b)
        if best is None or quad_sign(d - best) < 0:
            best = d
    return best
