from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from xda.intervals import RationalInterval, enclose, nth_root_interval
from xda.scalars import quad


def iv(a, b):
    return RationalInterval.of(a, b)


def test_basic_arithmetic():
    a = iv(Fraction(1, 3), Fraction(1, 2))
    b = iv(-1, 2)
    assert (a + b) == iv(Fraction(-2, 3), Fraction(5, 2))
    assert (a - a).contains(Fraction(0))
    assert (a * b) == iv(Fraction(-1, 2), 1)
    assert abs(iv(-3, 1)) == iv(0, 3)
    assert (iv(-2, 3) ** 2) == iv(0, 9)
    assert (iv(-2, -1) ** 2) == iv(1, 4)
    assert (iv(-2, 1) ** 3) == iv(-8, 1)


def test_division_by_zero_straddling_interval():
    with pytest.raises(ZeroDivisionError):
        iv(1, 2) / iv(-1, 1)
    assert (1 / iv(2, 4)) == iv(Fraction(1, 4), Fraction(1, 2))


def test_contains_quadratic_scalar():
    r2 = quad(0, 1, 1, 2)
    assert iv(1, 2).contains(r2)
    assert not iv(0, 1).contains(r2)
    assert iv(1, 2).strictly_below(Fraction(3, 2)) is False
    assert iv(1, 2).strictly_below(3)


def test_enclose_exact_and_quadratic():
    assert enclose(Fraction(2, 7)) == iv(Fraction(2, 7), Fraction(2, 7))
    e = enclose(quad(0, 1, 1, 3), 25)
    assert e.contains(quad(0, 1, 1, 3))
    assert e.width() <= Fraction(1, 10 ** 24)


def test_nth_root_interval_exact_cases():
    assert nth_root_interval(Fraction(27), 3) == RationalInterval.point(3)
    assert nth_root_interval(Fraction(1, 4), 2) == RationalInterval.point(Fraction(1, 2))
    r = nth_root_interval(Fraction(2), 2, digits=40)
    assert r.lo ** 2 < 2 < r.hi ** 2
    assert r.width() <= Fraction(1, 10 ** 40)


frac = st.fractions(min_value=-20, max_value=20)


@given(frac, frac, frac, frac, frac, frac)
def test_containment_preserved_by_ops(a, b, c, d, x, y):
    lo1, hi1 = min(a, b), max(a, b)
    lo2, hi2 = min(c, d), max(c, d)
    i1, i2 = iv(lo1, hi1), iv(lo2, hi2)
    # clamp sample points into the intervals
    x = min(max(x, lo1), hi1)
    y = min(max(y, lo2), hi2)
    assert (i1 + i2).contains(x + y)
    assert (i1 - i2).contains(x - y)
    assert (i1 * i2).contains(x * y)
    assert abs(i1).contains(abs(x))
    assert (i1 ** 2).contains(x * x)
    if not (lo2 <= 0 <= hi2):
        assert (i1 / i2).contains(x / y)


@given(st.fractions(min_value=0, max_value=1000), st.integers(min_value=1, max_value=5))
def test_nth_root_interval_brackets(q, n):
    r = nth_root_interval(q, n, digits=15)
    assert r.lo ** n <= q <= r.hi ** n
