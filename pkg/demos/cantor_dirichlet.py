"""Survey semiconvergents of a ternary stream against the middle-thirds set.

Points whose ternary digits avoid 1 lie in the middle-thirds set, yet
their best rational approximations usually do not.  For each level n of
the continued fraction this script scans the semiconvergent window,
asks exact membership for every candidate p/q, and reports the cheapest
certified OUT approximation per level together with a decade-by-decade
quality profile.
"""

from xda.extrinsic import extrinsic_search_cantor
from xda.targets import SeededStream


def main():
    x = SeededStream(3, seed=1)
    print("target: ternary stream with digits %s..." % x.digits(24))
    print()
    report = extrinsic_search_cantor(x, n_max=12, window=8)
    print("%-3s %-3s %-3s %14s  %-7s %10s  %s"
          % ("n", "a_n", "b", "p/q", "status", "quality", "certified"))
    for row in report.rows:
        frac = "%d/%d" % (row.p, row.q)
        print("%-3d %-3d %-3d %14s  %-7s %10.4f  %s"
              % (row.n, row.partial, row.b, frac, row.status,
                 float(row.quality.hi), row.certified))
    print()
    print("cheapest OUT quality per level:")
    for n in range(1, 13):
        mq = report.min_quality(n)
        print("  n=%-2d  min q^2|x - p/q| = %.4f" % (n, float(mq)))
    print()
    print("scale profile (one bucket per decade of q):")
    for bucket in report.profile.buckets:
        w = bucket.witness
        print("  q in [%d, %d): best quality %.4f at %d/%d"
              % (bucket.lo, bucket.hi, float(bucket.min_quality),
                 w.p, w.q))
    if report.widened:
        print()
        print("levels that needed a wider window: %s" % (report.widened,))


if __name__ == "__main__":
    main()
