"""Walk through good pairs and their projectivized progressions.

A good pair for a point x is a pair of integer vectors (r0, r_inf)
whose rows approximate x so well that every entry r_i = r0 + i r_inf
of the induced progression stays within (1+i)^(1+1/d) / q_i^(1+1/d)
of x.  This script finds pairs for the golden ratio conjugate at
growing heights, re-verifies each one from scratch, then certifies
the first dozen progression entries.
"""

from fractions import Fraction

from xda.lattice import (certify_progression_entry, good_pair_search,
                         quality, verify_good_pair)
from xda.scalars import quad
from xda.targets import TargetPoint


def main():
    x = TargetPoint([quad(-1, 1, 2, 5)])       # (sqrt(5) - 1)/2
    print("target: (sqrt(5) - 1)/2 ~ %.10f" % float(x.coords[0]))
    print()
    for q_min in (10, 100, 1000, 10000):
        pair = good_pair_search(x, q_min)
        verified, checks = verify_good_pair(x, pair)
        print("height >= %-6d  r0 = %d/%d   r_inf = %d/%d   verified=%s"
              % (q_min, pair.r0.p[0], pair.r0.q,
                 pair.r_inf.p[0], pair.r_inf.q, verified))
        for ck in checks:
            print("    |q x - p|^d for %-4s coord %d: %.3e <= %s"
                  % (ck.vector, ck.coord, float(ck.lhs_power_upper), ck.rhs))
    print()
    pair = good_pair_search(x, 100)
    print("progression entries from the height-100 pair:")
    for i in range(13):
        r = pair.r0.add_multiple(pair.r_inf, i)
        ok = certify_progression_entry(x, pair, i)
        qual = quality(x, r)
        print("  i=%-2d  p/q = %7d/%-7d  certified=%-5s  q^2|x - p/q| <= %.4f"
              % (i, r.p[0], r.q, ok, float(qual.hi)))
    print()
    print("every entry above is certified against the bound"
          " (1+i)^2 / q_i^2 exactly, with no floating point involved.")


if __name__ == "__main__":
    main()
