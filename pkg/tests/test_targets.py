from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from xda.errors import ConfigError
from xda.scalars import QuadScalar, quad
from xda.targets import (
    PeriodicStream,
    SeededStream,
    TargetPoint,
    ThueMorseStream,
    format_scalar_spec,
    parse_point,
    parse_scalar_spec,
)


def test_periodic_stream_exact_value():
    s = PeriodicStream(3, [0, 2])
    assert s.exact_value() == Fraction(1, 4)          # 0.020202... base 3
    assert s.digits(5) == [0, 2, 0, 2, 0]
    assert PeriodicStream(10, [3]).exact_value() == Fraction(1, 3)


def test_thue_morse_prefix():
    s = ThueMorseStream(3, 0, 2)
    assert s.digits(8) == [0, 2, 2, 0, 2, 0, 0, 2]
    assert s.exact_value() is None


def test_seeded_stream_is_deterministic_and_cantor_valued():
    a = SeededStream(3, 12345)
    b = SeededStream(3, 12345)
    assert a.digits(64) == b.digits(64)
    assert set(a.digits(64)) <= {0, 2}
    assert SeededStream(3, 1).digits(32) != SeededStream(3, 2).digits(32)


def test_truncation_brackets_value():
    s = PeriodicStream(3, [0, 2])
    x = s.exact_value()
    for k in (1, 2, 5, 9):
        t = s.truncation(k)
        assert t <= x <= t + Fraction(1, 3 ** k)
        assert s.enclosure(k).contains(x)


def test_parse_and_format_roundtrip():
    for spec in [
        "rat:-3/7",
        "quad:(-1+1*sqrt(5))/2",
        "dig:3:per:02",
        "dig:3:tm:02",
        "dig:3:seed:99",
    ]:
        c = parse_scalar_spec(spec)
        assert format_scalar_spec(c) == spec
    p = parse_point("quad:(0+1*sqrt(2))/2,rat:1/3")
    assert p.dim == 2
    assert isinstance(p.coords[0], QuadScalar)
    assert p.coords[1] == Fraction(1, 3)


def test_parse_rejects_garbage():
    for bad in ["rat:1/0x", "quad:(1+sqrt(5))/2", "dig:3:per:", "dig:3:tm:5",
                "dig:3:tm:00", "wat:17", "quad:(1+2*sqrt(4))/2"]:
        with pytest.raises((ConfigError, ZeroDivisionError)):
            parse_scalar_spec(bad)


def test_approx_exact_coordinates_have_zero_error():
    p = TargetPoint([quad(-1, 1, 2, 5), Fraction(1, 3)])
    xs, eps = p.approx(10)
    assert eps == 0
    assert xs[0] == quad(-1, 1, 2, 5)
    assert xs[1] == Fraction(1, 3)


def test_approx_stream_error_bound():
    p = TargetPoint([SeededStream(3, 7), Fraction(1, 2)])
    xs, eps = p.approx(20)
    assert eps == Fraction(1, 3 ** 20)
    assert xs[1] == Fraction(1, 2)
    # periodic streams report their closed form, not a truncation
    q = TargetPoint([PeriodicStream(3, [0, 2])])
    xs, eps = q.approx(3)
    assert xs[0] == Fraction(1, 4) and eps == 0


def test_rational_proxy_bounds():
    p = TargetPoint([quad(0, 1, 2, 2)])  # sqrt(2)/2
    xs, eps = p.rational_proxy(30)
    assert eps <= Fraction(1, 10 ** 29)
    assert abs(xs[0] * xs[0] - Fraction(1, 2)) < Fraction(1, 10 ** 20)


def test_is_certified_rational():
    assert TargetPoint([Fraction(1, 2), PeriodicStream(3, [1])]).is_certified_rational()
    assert not TargetPoint([quad(0, 1, 1, 2)]).is_certified_rational()
    assert not TargetPoint([ThueMorseStream(3, 0, 2)]).is_certified_rational()


@given(st.integers(min_value=0, max_value=2 ** 64 - 1), st.integers(min_value=1, max_value=40))
def test_seeded_prefix_stability(seed, k):
    # asking for more digits never changes the ones already produced
    s = SeededStream(3, seed)
    first = list(s.digits(k))
    s.digits(k + 17)
    assert s.digits(k) == first


@given(st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=6),
       st.integers(min_value=1, max_value=30))
def test_periodic_truncation_converges(pattern, k):
    s = PeriodicStream(3, pattern)
    x = s.exact_value()
    assert abs(x - s.truncation(k)) <= Fraction(1, 3 ** k)
