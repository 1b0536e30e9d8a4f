import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from xda.errors import NotCollinear, OutOfRange
from xda.lattice import ApproxVector
from xda.rap import (
    gap_bound,
    hausdorff_to_unit,
    longest_ap,
    longest_rap,
    normalize,
    rap_check,
    rap_window_from_pair,
)

F = Fraction


def test_rap_check_first_try_increment():
    cert = rap_check((F(2, 3), F(3, 4), F(4, 5)), 2)
    assert cert is not None
    assert cert.increment == (F(1, 12),)
    assert cert.ratios == {(0, 1): F(1), (0, 2): F(8, 5), (1, 2): F(3, 5)}
    assert cert.verify()


def test_rap_check_midpoint_fallback():
    # (0, 1, 10) at C = 3: s = 1 fails the long gap, a larger scale works
    cert = rap_check((F(0), F(1), F(10)), 3)
    assert cert is not None
    assert cert.increment[0] > 1
    assert cert.verify()


def test_rap_check_infeasible_returns_none():
    assert rap_check((F(0), F(1), F(100)), 2) is None
    assert rap_check((F(0), F(1), F(1, 2)), 2) is None    # not monotone
    assert rap_check((F(0), F(0), F(1)), 2) is None        # repeated point


def test_rap_check_not_collinear():
    with pytest.raises(NotCollinear):
        rap_check(((F(0), F(0)), (F(1), F(0)), (F(0), F(1))), 2)


def test_rap_check_descending_points_flip():
    cert = rap_check((F(4, 5), F(3, 4), F(2, 3)), 2)
    assert cert is not None
    assert cert.increment == (F(-1, 20),)    # x_1 - x_0, feasible first try
    assert cert.ratios[(0, 2)] == F(8, 3)
    assert cert.verify()


def test_rap_window_frozen_example():
    # base (0,) / 1 with increment (1,) / 1, window n = 2: points 2/3, 3/4, 4/5
    cert = rap_window_from_pair(ApproxVector((0,), 1), ApproxVector((1,), 1), 2)
    assert [p[0] for p in cert.points] == [F(2, 3), F(3, 4), F(4, 5)]
    assert cert.increment == (F(1, 15),)
    assert cert.ratios == {(0, 1): F(5, 4), (0, 2): F(2), (1, 2): F(3, 4)}
    assert cert.c_bound == 2
    assert cert.verify()


def test_rap_window_single_point():
    cert = rap_window_from_pair(ApproxVector((1,), 2), ApproxVector((1,), 3), 0)
    assert len(cert) == 1
    assert cert.points == ((F(1, 2),),)


def test_rap_window_randomized_trials():
    rng = random.Random(20260823)
    for _ in range(1000):
        r0 = ApproxVector((rng.randint(1, 10 ** 6),), rng.randint(1, 10 ** 6))
        ri = ApproxVector((rng.randint(1, 10 ** 6),), rng.randint(1, 10 ** 6))
        n = rng.randint(1, 40)
        cert = rap_window_from_pair(r0, ri, n)
        assert cert.c_bound == 2
        assert cert.verify(), (r0, ri, n)


def test_rap_window_two_dim():
    cert = rap_window_from_pair(ApproxVector((1, 0), 2), ApproxVector((1, 1), 3), 3)
    assert cert.verify()
    assert len(cert) == 4


def test_normalize_and_hausdorff():
    cert = rap_check((F(0), F(1, 3), F(1)), 2)
    assert cert is not None
    norm = normalize(cert)
    assert norm.taus == (F(0), F(1, 3), F(1))
    assert hausdorff_to_unit(norm) == F(1, 3)
    assert gap_bound(2, 2) == F(1)
    with pytest.raises(OutOfRange):
        hausdorff_to_unit(normalize(rap_check((F(1, 4), F(1, 2)), 2)) .__class__(
            taus=(F(1, 4), F(1, 2)), c_bound=F(2)))


def test_window_hausdorff_within_bound():
    r0 = ApproxVector((3,), 5)
    ri = ApproxVector((2,), 3)
    for n in (4, 8, 16):
        cert = rap_window_from_pair(r0, ri, n)
        h = hausdorff_to_unit(normalize(cert))
        assert h <= gap_bound(cert.c_bound, n)


def test_longest_ap():
    pts = [F(0), F(1, 4), F(1, 2), F(3, 4), F(1), F(2, 3)]
    ap = longest_ap(pts)
    assert ap == [(F(0),), (F(1, 4),), (F(1, 2),), (F(3, 4),), (F(1),)]
    assert longest_ap([]) == []
    assert len(longest_ap([F(1), F(2)], max_len=1)) <= 2


def test_longest_rap_full_depth2_cantor_endpoints():
    ninths = [F(k, 9) for k in (0, 1, 2, 3, 6, 7, 8, 9)]
    res = longest_rap(ninths, 2)
    assert res.exhausted
    assert res.certificate is not None
    assert len(res.certificate) == 8          # the whole set qualifies
    assert res.certificate.verify()


def test_longest_rap_budget_exhaustion():
    pts = [F(k, 64) for k in range(65)]
    res = longest_rap(pts, 2, budget=50)
    assert not res.exhausted
    assert res.certificate is not None        # best-so-far still returned


def test_longest_rap_two_dim_groups_lines():
    pts = [(F(k), F(0)) for k in range(4)] + [(F(0), F(1)), (F(1), F(2))]
    res = longest_rap(pts, 2)
    assert res.certificate is not None
    assert len(res.certificate) == 4
    assert res.certificate.verify()


def test_longest_rap_respects_max_len():
    pts = [F(k, 8) for k in range(9)]
    res = longest_rap(pts, 2, max_len=3)
    assert res.certificate is not None
    assert len(res.certificate) == 3


@settings(deadline=None, max_examples=40)
@given(st.lists(st.fractions(min_value=0, max_value=1), min_size=2, max_size=7, unique=True),
       st.integers(min_value=1, max_value=3))
def test_longest_rap_certificate_always_verifies(ts, c_mult):
    C = Fraction(2) * c_mult
    res = longest_rap(ts, C, budget=20000)
    if res.certificate is not None:
        assert res.certificate.verify()
        assert len(res.certificate) >= 1


@given(st.integers(min_value=1, max_value=30))
def test_gap_bound_monotone(n):
    assert gap_bound(2, n + 1) < gap_bound(2, n)
