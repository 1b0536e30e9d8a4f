"""Measure how rational points crowd the unit circle.

Rational points on the circle are plentiful (every Pythagorean triple
gives one), yet rationals just off the circle keep a certified distance
of at least 1/(q^2 (|x| + 1)) from it.  This script prints a roster of
on-circle points, evaluates the exclusion bound for a few nearby
rationals, and runs a census showing that fast off-circle approximation
never happens beyond trivial denominators.
"""

from fractions import Fraction

from xda.extrinsic import (circle_exclusion, circle_point_from_parameter,
                           psi_census, pythagorean_points)
from xda.scalars import sqrt_scalar


def main():
    roster = pythagorean_points(13)
    print("rational circle points with denominator <= 13:")
    print("   " + ", ".join("(%s, %s)" % (p.x, p.y) for p in roster))
    print()
    for pt in ((Fraction(3, 5), Fraction(3, 5)), (Fraction(1, 2), Fraction(1, 2)),
               (Fraction(1), Fraction(1))):
        ex = circle_exclusion(pt)
        print("distance from (%s, %s) to the circle: %s ~ %.6f (floor %.6f)"
              % (pt[0], pt[1], ex.distance, float(ex.distance),
                 float(ex.floor)))
    print()
    targets = [
        (Fraction(3, 5), Fraction(4, 5)),
        circle_point_from_parameter(sqrt_scalar(Fraction(2))),
    ]
    for pt in targets:
        rep = psi_census(pt, 2, 2000)
        print("census around (%s, %s) with |x - p/q| < q^-3, q <= 2000:"
              % pt)
        print("   on-circle hits: %d, off-circle hits: %d, largest"
              " off-circle q: %d"
              % (len(rep.intrinsic), len(rep.extrinsic), rep.max_extrinsic_q))
        for h in rep.extrinsic:
            print("   off-circle neighbor %d/%d, %d/%d"
                  % (h.p[0], h.q, h.p[1], h.q))
    print()
    print("the census never finds an off-circle hit beyond q = 3; the"
          " exclusion bound explains why, and the acceptance suite checks"
          " it up to q = 10^4.")


if __name__ == "__main__":
    main()
