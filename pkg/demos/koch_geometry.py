"""Certify separation, membership and segment absence for planar systems.

The quadric Koch system lives over Q(sqrt 3), so every geometric
predicate here (open set condition, point membership, segment scans)
is decided with exact quadratic arithmetic.  A deliberately skewed
variant shows the separation check rejecting an overlap with a
concrete witness point.
"""

from fractions import Fraction

from xda.geometry import ConvexPolygon
from xda.ifs import (IFSystem, Similarity, check_osc, koch_apex, koch_system,
                     membership, segment_scan, sierpinski_right_system,
                     verify_membership)
from xda.scalars import quad


def skewed_koch():
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


def main():
    k = koch_system()
    print("open set condition, Koch: verified=%s" % check_osc(k).verified)
    bad = check_osc(skewed_koch())
    print("open set condition, skewed variant: verified=%s" % bad.verified)
    for v in bad.violations:
        print("   %s for maps %s, witness %s" % (v.kind, v.letters, v.witness))
    print()
    apex = koch_apex()
    verdict = membership(k, apex, depth_cap=64)
    print("apex (1/2, sqrt(3)/6): %s after %d letters, re-verified=%s"
          % (verdict.status, verdict.depth, verify_membership(k, apex, verdict)))
    for p in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 5), Fraction(1, 5))):
        v = membership(k, p, depth_cap=64)
        print("point (%s, %s): %s at depth %d" % (p[0], p[1], v.status, v.depth))
    print()
    tri = sierpinski_right_system()
    res = segment_scan(tri, 4, Fraction(1))
    print("sierpinski depth-4 hulls: %d candidate lines, %d unit segments"
          % (res.lines_examined, len(res.hits)))
    for h in res.hits:
        a, b = h.endpoints
        print("   segment (%s, %s) -> (%s, %s)" % (a[0], a[1], b[0], b[1]))
    res = segment_scan(k, 6, Fraction(1, 20))
    print("koch depth-6 hulls: segments of length >= 1/20 found: %s"
          % (res.found is not None))


if __name__ == "__main__":
    main()
