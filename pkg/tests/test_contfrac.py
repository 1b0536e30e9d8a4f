from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from xda.contfrac import (
    CONVERGENT_QUALITY,
    MUST_BE_CONVERGENT,
    NEITHER,
    convergent_filter,
    convergent_pair_for_height,
    convergents,
    expand,
    semiconvergent,
    semiconvergent_family_report,
)
from xda.errors import OutOfRange, PrecisionExhausted, UndecidableComparison
from xda.scalars import quad
from xda.targets import PeriodicStream, SeededStream, ThueMorseStream

GOLDEN = quad(-1, 1, 2, 5)      # (sqrt(5) - 1)/2
ROOT2M1 = quad(-1, 1, 1, 2)     # sqrt(2) - 1


def cf_value(partials):
    v = Fraction(0)
    for a in reversed(partials):
        v = 1 / (a + v)
    return v


def test_expand_quadratic_frozen():
    assert expand(GOLDEN, 6).partials == [1, 1, 1, 1, 1, 1]
    assert expand(ROOT2M1, 5).partials == [2, 2, 2, 2, 2]


def test_expand_rational():
    assert expand(Fraction(2, 5), 2).partials == [2, 2]
    assert expand(Fraction(3, 5), 3).partials == [1, 1, 2]
    with pytest.raises(OutOfRange):
        expand(Fraction(1, 2), 3)
    with pytest.raises(OutOfRange):
        expand(Fraction(3, 2), 1)


def test_expand_periodic_stream_uses_closed_form():
    assert expand(PeriodicStream(3, [0, 2]), 1).partials == [4]  # value 1/4


def test_expand_stream_interval_certification():
    tm = ThueMorseStream(3, 0, 2)
    cf = expand(tm, 12)
    assert not cf.exact
    assert len(cf.partials) == 12
    assert all(p > 0 for p in cf.precisions)
    # cross-check against the Euclidean expansion of a deep truncation;
    # both enclosure endpoints must agree with the certified prefix
    for trunc in (tm.truncation(400), tm.truncation(400) + Fraction(1, 3 ** 400)):
        num, den = trunc.numerator, trunc.denominator
        euclid = []
        while num and len(euclid) < 12:
            a = den // num
            euclid.append(a)
            den, num = num, den - a * num
        assert euclid[:12] == cf.partials


def test_expand_stream_prefix_stable_under_deeper_request():
    s = SeededStream(3, 424242)
    a = expand(s, 8).partials
    b = expand(SeededStream(3, 424242), 16).partials
    assert b[:8] == a


def test_precision_cap_raises():
    with pytest.raises(PrecisionExhausted) as ei:
        expand(ThueMorseStream(3, 0, 2), 40, max_precision=16)
    assert ei.value.cap == 16
    assert ei.value.index >= 1


def test_convergents_golden_frozen():
    cf = expand(GOLDEN, 6)
    assert convergents(cf) == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]


def test_convergent_determinant_alternates():
    cs = [(0, 1)] + convergents(expand(ROOT2M1, 10))
    dets = [cs[i + 1][0] * cs[i][1] - cs[i][0] * cs[i + 1][1] for i in range(len(cs) - 1)]
    assert dets == [(-1) ** i for i in range(len(dets))]


def test_semiconvergent_walks_to_convergent():
    cf = expand(GOLDEN, 6)
    assert semiconvergent(cf, 4, 1) == (3, 5)          # b = a_4 gives the convergent
    assert semiconvergent(cf, 1, 3) == (1, 3)
    with pytest.raises(OutOfRange):
        semiconvergent(cf, 0, 1)
    with pytest.raises(OutOfRange):
        semiconvergent(cf, 2, 0)


def test_semiconvergent_gap_identity():
    # |p_{n,b}/q_{n,b} - p_n/q_n| == (b - a_n) / (q_n q_{n,b}) exactly
    cf = expand(ROOT2M1, 8)
    pn, qn = convergents(cf)[5]
    a_n = cf.partials[5]
    for b in range(a_n, a_n + 5):
        p, q = semiconvergent(cf, 6, b)
        assert abs(Fraction(p, q) - Fraction(pn, qn)) == Fraction(b - a_n, qn * q)


def test_convergent_filter_frozen_cases():
    assert convergent_filter(GOLDEN, 5, 8) == MUST_BE_CONVERGENT
    assert convergent_filter(GOLDEN, 3, 8) == NEITHER
    # 3/7 vs sqrt(2)-1: 946729 > 941192 puts it above the strict threshold,
    # 933156 < 941192 keeps it under 1/q^2
    assert convergent_filter(ROOT2M1, 3, 7) == CONVERGENT_QUALITY
    with pytest.raises(UndecidableComparison):
        convergent_filter(Fraction(5, 8), 1, 2)


def test_convergent_filter_stream():
    tm = ThueMorseStream(3, 0, 2)
    p, q = convergents(expand(tm, 8))[7]
    assert convergent_filter(tm, p, q) in (MUST_BE_CONVERGENT, CONVERGENT_QUALITY)
    assert convergent_filter(tm, p + 1, q) == NEITHER


def test_convergent_pair_for_height_frozen():
    assert convergent_pair_for_height(GOLDEN, 5) == ((5, 8), (3, 5))
    assert convergent_pair_for_height(ROOT2M1, 5) == ((5, 12), (2, 5))
    assert convergent_pair_for_height(Fraction(2, 5), 2) == ((2, 5), (1, 2))


def test_semiconvergent_family_report():
    rep = semiconvergent_family_report(expand(GOLDEN, 10), 6, 4)
    assert rep.increment_identity_ok
    assert rep.a_n == 1
    assert Fraction(1) <= rep.q_ratio_max <= Fraction(6)
    assert rep.min_feasible_c_squared is not None


@given(st.integers(min_value=1, max_value=400), st.integers(min_value=2, max_value=400))
def test_rational_expansion_reconstructs_value(num, den):
    x = Fraction(num, den)
    if not (0 < x < 1):
        return
    x = Fraction(x.numerator, x.denominator)
    # expand as deep as the value allows, then refold
    n = 1
    partials = None
    while True:
        try:
            partials = expand(x, n).partials
            n += 1
        except OutOfRange:
            break
    assert partials is not None
    assert cf_value(partials) == x


@settings(deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32), st.integers(min_value=2, max_value=10))
def test_stream_certified_prefix_matches_truncation_euclid(seed, n):
    s = SeededStream(3, seed)
    cf = expand(s, n)
    deep = s.truncation(600)
    num, den = deep.numerator, deep.denominator
    euclid = []
    while num and len(euclid) < n:
        a = den // num
        euclid.append(a)
        den, num = num, den - a * num
    assert euclid == cf.partials
