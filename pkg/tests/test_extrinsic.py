"""Tests for extrinsic witnesses, line and circle obstructions, and the
unit-circle census."""

from fractions import Fraction as F
from math import gcd, hypot

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xda.contfrac import convergents, expand
from xda.errors import (
    ConfigError,
    OnCircle,
    OnLine,
    OutOfRange,
    RationalPoint,
)
from xda.extrinsic import (
    CensusHit,
    CirclePoint,
    ExtrinsicWitness,
    WindowExhausted,
    cantor_oracle,
    circle_exclusion,
    circle_point_from_parameter,
    extrinsic_search_cantor,
    extrinsic_search_general,
    ifs_oracle,
    psi_census,
    pythagorean_points,
    rational_segment_obstruction,
    scale_profile,
    verify_witness,
)
from xda.ifs import cantor_membership, koch_system, sierpinski_right_system
from xda.scalars import quad, quad_sign, scalar_le, sqrt_scalar
from xda.targets import PeriodicStream, SeededStream, TargetPoint, ThueMorseStream


def ternary_target(stream):
    return TargetPoint((stream,))


class TestCirclePoints:
    def test_axis_points_only_at_height_one(self):
        pts = pythagorean_points(1)
        assert len(pts) == 4
        assert {(p.x, p.y) for p in pts} == {
            (F(1), F(0)), (F(-1), F(0)), (F(0), F(1)), (F(0), F(-1))}

    def test_first_triple_appears_at_height_five(self):
        pts = pythagorean_points(5)
        assert len(pts) == 12
        coords = {(p.x, p.y) for p in pts}
        assert (F(3, 5), F(4, 5)) in coords
        assert (F(-4, 5), F(3, 5)) in coords

    def test_height_thirteen_adds_eight_points(self):
        pts = pythagorean_points(13)
        assert len(pts) == 20
        added = {(p.x, p.y) for p in pts} - {(p.x, p.y)
                                             for p in pythagorean_points(5)}
        assert len(added) == 8
        assert all(p.denominator == 13 for p in map(CirclePoint, *zip(*added)))

    def test_points_are_sorted_and_unique(self):
        pts = pythagorean_points(60)
        assert pts == sorted(pts)
        assert len(pts) == len(set(pts))

    def test_height_bound_is_respected(self):
        for p in pythagorean_points(40):
            assert p.denominator <= 40

    def test_rosters_are_monotone(self):
        small = set(pythagorean_points(25))
        assert small <= set(pythagorean_points(50))

    def test_off_circle_point_rejected(self):
        with pytest.raises(OutOfRange):
            CirclePoint(F(1, 2), F(1, 2))

    def test_zero_height_rejected(self):
        with pytest.raises(OutOfRange):
            pythagorean_points(0)

    @given(st.integers(min_value=1, max_value=80))
    def test_every_roster_point_is_on_the_circle(self, bound):
        for p in pythagorean_points(bound):
            assert p.x * p.x + p.y * p.y == 1


class TestParametrization:
    def test_rational_parameter_gives_pythagorean_point(self):
        x, y = circle_point_from_parameter(F(1, 2))
        assert (x, y) == (F(3, 5), F(4, 5))

    def test_sqrt_two_parameter(self):
        x, y = circle_point_from_parameter(quad(0, 1, 1, 2))
        assert x == F(-1, 3)
        assert y == quad(0, 2, 3, 2)

    def test_sqrt_three_parameter(self):
        x, y = circle_point_from_parameter(quad(0, 1, 1, 3))
        assert x == F(-1, 2)
        assert y == quad(0, 1, 2, 3)

    def test_zero_parameter(self):
        assert circle_point_from_parameter(0) == (F(1), F(0))

    def test_float_parameter_rejected(self):
        with pytest.raises(ConfigError):
            circle_point_from_parameter(0.5)

    @given(st.fractions(min_value=-8, max_value=8))
    def test_image_is_always_on_the_circle(self, t):
        x, y = circle_point_from_parameter(t)
        assert x * x + y * y == 1


class TestSegmentObstruction:
    def test_distance_to_horizontal_axis(self):
        ob = rational_segment_obstruction((0, 1), 0, (F(1, 3), F(1, 5)))
        assert ob.distance == F(1, 5)
        assert ob.floor == F(1, 15)
        assert ob.numerator == 3 and ob.q == 15

    def test_floor_attained_on_diagonal_line(self):
        ob = rational_segment_obstruction((1, 1), 1, (F(1, 2), F(1, 3)))
        assert ob.numerator == 1
        assert ob.distance == ob.floor == quad(0, 1, 12, 2)

    def test_three_dimensional_normal(self):
        ob = rational_segment_obstruction((1, 2, 2), 1, (F(0), F(0), F(0)))
        assert ob.distance == ob.floor == F(1, 3)

    def test_point_on_line_raises(self):
        with pytest.raises(OnLine):
            rational_segment_obstruction((7, 0), 5, (F(5, 7), F(9, 4)))

    def test_zero_normal_rejected(self):
        with pytest.raises(ConfigError):
            rational_segment_obstruction((0, 0), 1, (F(1), F(1)))

    def test_non_primitive_normal_rejected(self):
        with pytest.raises(ConfigError):
            rational_segment_obstruction((2, 0), 4, (F(1, 3), F(0)))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            rational_segment_obstruction((1, 1), 0, (F(1, 2),))

    @given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6),
           st.fractions(min_value=-4, max_value=4),
           st.fractions(min_value=-4, max_value=4))
    @settings(max_examples=150)
    def test_distance_is_numerator_times_unit(self, n1, n2, m, x, y):
        g = gcd(gcd(abs(n1), abs(n2)), abs(m))
        if (n1, n2) == (0, 0) or g != 1:
            return
        try:
            ob = rational_segment_obstruction((n1, n2), m, (x, y))
        except OnLine:
            assert n1 * x + n2 * y == m
            return
        assert ob.numerator >= 1
        assert ob.distance == ob.numerator * ob.floor
        assert scalar_le(ob.floor, ob.distance)
        expected = abs(n1 * x + n2 * y - m) / sqrt_scalar(F(n1 * n1 + n2 * n2))
        assert ob.distance == expected


class TestCircleExclusion:
    def test_interior_diagonal_point(self):
        ex = circle_exclusion((F(3, 5), F(3, 5)))
        assert ex.distance == (5 - 3 * quad(0, 1, 1, 2)) / 5
        assert ex.numerator == 7 and ex.q == 5
        assert ex.distance == 7 * ex.floor

    def test_half_half_point(self):
        ex = circle_exclusion((F(1, 2), F(1, 2)))
        assert ex.distance == (2 - quad(0, 1, 1, 2)) / 2
        assert ex.numerator == 2 and ex.q == 2

    def test_exterior_point(self):
        ex = circle_exclusion((F(1), F(1)))
        assert ex.distance == quad(0, 1, 1, 2) - 1
        assert ex.numerator == 1
        assert ex.distance == ex.floor

    def test_origin(self):
        ex = circle_exclusion((F(0), F(0)))
        assert ex.distance == F(1)

    def test_circle_points_raise(self):
        for p in pythagorean_points(50):
            with pytest.raises(OnCircle):
                circle_exclusion((p.x, p.y))

    @given(st.fractions(min_value=-3, max_value=3, max_denominator=60),
           st.fractions(min_value=-3, max_value=3, max_denominator=60))
    @settings(max_examples=200, deadline=None)
    def test_exact_distance_matches_float_estimate(self, x, y):
        if x * x + y * y == 1:
            return
        ex = circle_exclusion((x, y))
        assert ex.numerator >= 1
        assert ex.distance == ex.numerator * ex.floor
        approx = abs(hypot(float(x), float(y)) - 1.0)
        got = ex.distance
        if isinstance(got, F):
            val = float(got)
        else:
            val = (got.a + got.b * got.d ** 0.5) / got.c
        assert abs(val - approx) < 1e-9


class TestScaleProfile:
    def test_best_quality_per_decade(self):
        prof = scale_profile([(5, F(1, 2), "a"), (7, F(1, 3), "b"),
                              (70, F(2), "c")])
        assert len(prof) == 2
        lo_bucket, hi_bucket = prof.buckets
        assert (lo_bucket.lo, lo_bucket.hi) == (1, 10)
        assert lo_bucket.min_quality == F(1, 3) and lo_bucket.witness == "b"
        assert (hi_bucket.lo, hi_bucket.hi) == (10, 100)
        assert prof.worst_quality == F(2)

    def test_empty_profile(self):
        prof = scale_profile([])
        assert len(prof) == 0 and prof.worst_quality is None

    def test_buckets_are_disjoint_and_sorted(self):
        items = [(q, F(1, q), q) for q in (3, 14, 15, 9000, 92, 653)]
        prof = scale_profile(items)
        for a, b in zip(prof.buckets, prof.buckets[1:]):
            assert a.hi <= b.lo
        for bucket in prof.buckets:
            assert bucket.lo <= bucket.witness < bucket.hi


class TestCantorDirichlet:
    def test_rational_stream_rejected(self):
        quarter = PeriodicStream(3, (0, 2))
        with pytest.raises(RationalPoint):
            extrinsic_search_cantor(ternary_target(quarter), 4, 4)

    def test_wrong_base_rejected(self):
        with pytest.raises(ConfigError):
            extrinsic_search_cantor(ternary_target(ThueMorseStream(2, 0, 1)), 4, 4)

    def test_digits_outside_cantor_alphabet_rejected(self):
        with pytest.raises(ConfigError):
            extrinsic_search_cantor(ternary_target(ThueMorseStream(3, 0, 1)), 4, 4)

    def test_bad_ranges_rejected(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        with pytest.raises(OutOfRange):
            extrinsic_search_cantor(x, 0, 4)
        with pytest.raises(OutOfRange):
            extrinsic_search_cantor(x, 4, -1)

    def test_thue_morse_window_report(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        rep = extrinsic_search_cantor(x, 8, 8)
        assert rep.all_intrinsic == () and rep.widened == ()
        exp = expand(ThueMorseStream(3, 0, 2), 8)
        convs = convergents(exp)
        for n in range(1, 9):
            rows = [r for r in rep.rows if r.n == n]
            assert [r.b for r in rows] == [exp.partials[n - 1] + j
                                           for j in range(9)]
            assert (rows[0].p, rows[0].q) == convs[n - 1]
            assert all(r.certified for r in rows)
            assert all(r.status in ("in", "out") for r in rows)
            assert rep.min_quality(n) is not None
            assert rep.min_quality(n) <= 81

    def test_window_zero_widens_until_out(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        rep = extrinsic_search_cantor(x, 8, 0)
        assert rep.all_intrinsic == ()
        assert (1, 1) in rep.widened and (1, 2) in rep.widened
        level_one = [(r.b - r.partial, r.status)
                     for r in rep.rows if r.n == 1]
        assert level_one == [(0, "in"), (1, "in"), (2, "out")]

    def test_out_rows_reverify_against_membership(self):
        x = ternary_target(SeededStream(3, 7))
        rep = extrinsic_search_cantor(x, 6, 6)
        for row in rep.rows:
            val = F(row.p, row.q)
            if val < 0 or val > 1:
                assert row.status == "out"
            else:
                assert cantor_membership(val).status == row.status

    def test_quality_intervals_contain_certified_bound(self):
        x = ternary_target(SeededStream(3, 11))
        rep = extrinsic_search_cantor(x, 6, 4)
        for row in rep.rows:
            if row.certified:
                assert row.quality.lo <= row.bound

    def test_profile_witnesses_sit_in_their_buckets(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        rep = extrinsic_search_cantor(x, 8, 8)
        assert len(rep.profile) >= 3
        for bucket in rep.profile.buckets:
            p, q, provenance = bucket.witness
            assert bucket.lo <= q < bucket.hi
            assert provenance[0] == "semiconvergent"
            assert cantor_membership(F(p, q)).status == "out"

    @given(st.integers(min_value=1, max_value=50))
    @settings(max_examples=12, deadline=None)
    def test_seeded_streams_always_produce_out_rows(self, seed):
        x = ternary_target(SeededStream(3, seed))
        rep = extrinsic_search_cantor(x, 4, 8)
        for n in range(1, 5):
            assert rep.min_quality(n) is not None
            assert rep.min_quality(n) <= 81


class TestGeneralSearch:
    def test_thue_morse_schedule(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        res = extrinsic_search_general(x, cantor_oracle, 4, (10, 100, 1000))
        assert [w.q for w in res.witnesses] == [22, 469, 4273]
        assert res.events == ()
        for w, q_min in zip(res.witnesses, res.schedule):
            assert w.q >= q_min
            assert w.certified
            assert w.provenance == ("progression", q_min, 4)
            assert w.verdict.status == "out"
            assert w.quality.hi <= 81
            assert verify_witness(x, w, cantor_oracle)

    def test_witness_point_is_off_the_set(self):
        x = ternary_target(SeededStream(3, 5))
        res = extrinsic_search_general(x, cantor_oracle, 3, (50,))
        assert len(res.witnesses) == 1
        w = res.witnesses[0]
        val = w.point()[0]
        assert val < 0 or val > 1 or cantor_membership(val).status == "out"

    def test_zero_window_scans_single_entry(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        res = extrinsic_search_general(x, cantor_oracle, 0, (10,))
        assert res.witnesses == ()
        assert res.events == (WindowExhausted(10, ((0, "in"),)),)

    def test_negative_window_rejected(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        with pytest.raises(OutOfRange):
            extrinsic_search_general(x, cantor_oracle, -1, (10,))

    def test_point_on_sierpinski_base_exhausts_windows(self):
        x = TargetPoint((quad(-1, 1, 1, 2), F(0)))
        oracle = ifs_oracle(sierpinski_right_system(), 64)
        res = extrinsic_search_general(x, oracle, 3, (10, 100))
        assert res.witnesses == ()
        assert len(res.events) == 2
        for event in res.events:
            assert [i for i, _ in event.statuses] == [3, 4, 5, 6]
            assert all(s in ("in", "unknown") for _, s in event.statuses)

    def test_plane_point_off_koch_yields_witnesses(self):
        x = TargetPoint((quad(-1, 1, 2, 2), quad(0, 1, 3, 3)))
        oracle = ifs_oracle(koch_system(), 48)
        res = extrinsic_search_general(x, oracle, 2, (10, 100))
        assert len(res.witnesses) == 2
        for w in res.witnesses:
            assert w.certified
            assert oracle(w.point()).status == "out"
            assert verify_witness(x, w, oracle)

    def test_stale_witness_fails_verification(self):
        x = ternary_target(ThueMorseStream(3, 0, 2))
        res = extrinsic_search_general(x, cantor_oracle, 4, (10,))
        w = res.witnesses[0]
        inside = ExtrinsicWitness((1,), 4, w.verdict, w.quality,
                                  w.certified, w.provenance)
        assert not verify_witness(x, inside, cantor_oracle)


class TestCensus:
    def test_three_four_five_point(self):
        rep = psi_census((F(3, 5), F(4, 5)), 2, 500)
        assert {(h.p, h.q) for h in rep.intrinsic} == {((0, 1), 1), ((1, 0), 1)}
        assert {(h.p, h.q) for h in rep.extrinsic} == {((0, 0), 1), ((1, 1), 1)}
        assert all(not h.on_circle for h in rep.extrinsic)
        assert rep.max_extrinsic_q <= 3
        assert rep.exclusion_consistent

    def test_target_itself_never_counted(self):
        rep = psi_census((F(3, 5), F(4, 5)), F(1, 2), 100)
        assert ((3, 4), 5) not in {(h.p, h.q) for h in rep.intrinsic}

    def test_gentler_exponent_admits_more_hits(self):
        strict = psi_census((F(3, 5), F(4, 5)), 2, 200)
        gentle = psi_census((F(3, 5), F(4, 5)), F(1, 2), 200)
        n_strict = len(strict.intrinsic) + len(strict.extrinsic)
        n_gentle = len(gentle.intrinsic) + len(gentle.extrinsic)
        assert n_gentle >= n_strict
        assert gentle.exclusion_consistent

    def test_quadratic_point_census(self):
        point = circle_point_from_parameter(quad(0, 1, 1, 2))
        rep = psi_census(point, 2, 300)
        assert rep.exclusion_consistent
        assert rep.max_extrinsic_q <= 3
        for hit in rep.intrinsic + rep.extrinsic:
            assert gcd(gcd(abs(hit.p[0]), abs(hit.p[1])), hit.q) == 1

    def test_zero_budget(self):
        rep = psi_census((F(0), F(1)), 2, 0)
        assert rep.intrinsic == () and rep.extrinsic == ()
        assert rep.max_extrinsic_q == 0

    def test_off_circle_target_rejected(self):
        with pytest.raises(OutOfRange):
            psi_census((F(1, 2), F(1, 2)), 2, 10)

    def test_bad_exponent_rejected(self):
        with pytest.raises(ConfigError):
            psi_census((F(0), F(1)), 0, 10)

    def test_hits_satisfy_the_threshold_exactly(self):
        rep = psi_census((F(5, 13), F(12, 13)), F(3, 2), 300)
        for hit in rep.intrinsic + rep.extrinsic:
            dx = abs(F(5, 13) - F(hit.p[0], hit.q))
            dy = abs(F(12, 13) - F(hit.p[1], hit.q))
            delta = max(dx, dy)
            assert delta ** 2 * F(hit.q) ** 5 < 1

    @given(st.sampled_from(pythagorean_points(30)))
    @settings(max_examples=10, deadline=None)
    def test_census_of_roster_points(self, point):
        rep = psi_census(point.coords(), 2, 60)
        assert rep.exclusion_consistent
        for hit in rep.extrinsic:
            x, y = hit.point()
            assert x * x + y * y != 1


class TestOracles:
    def test_cantor_oracle_matches_membership(self):
        assert cantor_oracle((F(1, 4),)).status == "in"
        assert cantor_oracle((F(1, 2),)).status == "out"
        assert cantor_oracle((F(5, 4),)).status == "out"

    def test_ifs_oracle_wraps_membership(self):
        oracle = ifs_oracle(koch_system())
        assert oracle((F(0), F(0))).status == "in"
        assert oracle((F(1, 2), F(1, 2))).status == "out"
