import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nobeling.fixtures import random_point, straighten_fixture
from nobeling.geometry import AxisLine, dist, dist_point_line, point
from nobeling.moves import (
    IDENTITY,
    Bump,
    Composite,
    Cylinder,
    DomainError,
    InfeasibleError,
    MoveKind,
    bump_displacement,
    compose,
    move_from_json,
    move_to_json,
    push_away,
    straighten,
    xi,
    xi_inverse,
)

X_LINE = AxisLine(0, (0, 0, 0))
E1 = (0, 1, 0, 0)
rationals = st.fractions(min_value=-4, max_value=4, max_denominator=64)


class TestXi:
    def test_continuous_at_eps(self):
        eps = F(1, 2)
        assert xi(eps - F(1, 10**9), eps) < xi(eps, eps) == eps
        assert xi(eps + F(1, 10**9), eps) > eps
        # left limit: (eps + r)/2 -> eps as r -> eps
        assert (eps + eps) / 2 == eps

    @given(st.fractions(min_value=F(1, 1000), max_value=3), st.fractions(min_value=F(1, 1000), max_value=3))
    def test_strictly_increasing(self, r, s):
        eps = F(1, 2)
        if r < s:
            assert xi(r, eps) < xi(s, eps)

    @given(st.fractions(min_value=F(1, 1000), max_value=3))
    def test_inverse(self, r):
        eps = F(7, 10)
        assert xi_inverse(xi(r, eps), eps) == r


class TestPushAway:
    def test_far_point_unchanged(self):
        m = push_away(X_LINE, F(1, 2))
        p = point(3, F(1, 2), F(-1, 5), 0)
        assert m(p) == p

    def test_hand_example(self):
        m = push_away(X_LINE, F(1, 2))
        p = point(7, "1/8", 0, 0)
        # r = 1/8, xi(r) = (1/2 + 1/8)/2 = 5/16
        assert m(p) == point(7, "5/16", 0, 0)
        assert m.inverse(point(7, "5/16", 0, 0)) == p

    def test_on_line_is_domain_error(self):
        with pytest.raises(DomainError):
            push_away(X_LINE, F(1, 2))(point(3, 0, 0, 0))

    def test_recorded_bounds(self):
        m = push_away(X_LINE, F(1, 3))
        assert m.displacement_bound == F(1, 6)
        assert m.inverse_modulus == 2
        assert m.support_radius is None

    @given(st.tuples(rationals, rationals, rationals, rationals))
    def test_properties(self, p):
        eps = F(1, 2)
        m = push_away(X_LINE, eps)
        r = dist_point_line(p, X_LINE)
        if r == 0:
            return
        q = m(p)
        assert dist_point_line(q, X_LINE) >= eps / 2
        assert dist(p, q) <= eps / 2
        assert m.inverse(q) == p
        if r >= eps:
            assert q == p


class TestBump:
    @pytest.fixture
    def bump(self):
        cyl = Cylinder(X_LINE, 0, 2, 1)
        return bump_displacement(cyl, E1, F(1, 2))

    def test_outside_unchanged(self, bump):
        for p in [point(3, 0, 0, 0), point(1, 2, 0, 0), point(-1, 0, 0, 0), point(1, 0, 0, 1)]:
            assert bump(p) == p

    def test_core_midpoint(self, bump):
        assert bump(point(1, 0, 0, 0)) == point(1, "1/2", 0, 0)

    def test_half_profile(self, bump):
        # rho = 1/2 at the midpoint: profile 1 - (1/2)/1 = 1/2, shift 1/4
        p = point(1, 0, "1/2", 0)
        q = bump(p)
        assert q == point(1, "1/4", "1/2", 0)
        assert bump.inverse(q) == p

    def test_amplitude_must_be_below_radius(self):
        with pytest.raises(ValueError):
            Bump(Cylinder(X_LINE, 0, 2, 1), E1, 1)

    def test_direction_must_be_normal(self):
        with pytest.raises(ValueError):
            Bump(Cylinder(X_LINE, 0, 2, 1), (1, 0, 0, 0), F(1, 2))

    @settings(max_examples=200, deadline=None)
    @given(
        st.tuples(rationals, rationals, rationals, rationals),
        st.sampled_from([s for s in itertools.product((-1, 0, 1), repeat=3) if any(s)]),
        st.fractions(min_value=F(1, 64), max_value=F(63, 64), max_denominator=64),
    )
    def test_round_trip_any_direction(self, p, signs, amp):
        cyl = Cylinder(AxisLine(0, (F(1, 3), 0, F(-1, 2))), F(-1), F(2), F(1))
        m = Bump(cyl, (0,) + signs, amp, taper_width=F(1, 2))
        q = m(p)
        assert m.inverse(q) == p
        assert dist(p, q) <= m.displacement_bound

    def test_injective_on_a_grid(self):
        # Brute force oracle: a fine grid through the cylinder maps injectively.
        m = Bump(Cylinder(X_LINE, 0, 2, 1), (0, 1, -1, 0), F(3, 4))
        grid = [F(k, 4) for k in range(-5, 6)]
        pts = [(t, a, b, F(0)) for t in (F(1, 2), F(1)) for a in grid for b in grid]
        images = [m(p) for p in pts]
        assert len(set(images)) == len(pts)

    def test_inverse_modulus_witness(self):
        m = Bump(Cylinder(X_LINE, 0, 2, 1), E1, F(1, 2))
        rng = random.Random(5)

        def near():
            # concentrate samples on the cylinder [0, 2] x [-1, 1]^3
            return (F(rng.randint(-8, 40), 16),) + tuple(F(rng.randint(-20, 20), 16) for _ in range(3))

        for _ in range(2000):
            p, q = near(), near()
            assert dist(p, q) <= m.inverse_modulus * dist(m(p), m(q))


class TestCompose:
    def test_identity_is_neutral(self):
        m = push_away(X_LINE, F(1, 2))
        c = compose(IDENTITY, m)
        rng = random.Random(0)
        for _ in range(200):
            p = random_point(rng, 4, 8)
            if dist_point_line(p, X_LINE):
                assert c(p) == m(p)
                assert c.inverse(c(p)) == p

    def test_disjoint_bumps_move_by_at_most_one_amplitude(self):
        b1 = Bump(Cylinder(X_LINE, 0, 1, F(1, 2)), E1, F(1, 4))
        b2 = Bump(Cylinder(X_LINE, 1, 2, F(1, 2)), (0, 0, -1, 0), F(1, 3))
        c = compose(b2, b1)
        rng = random.Random(1)
        for _ in range(2000):
            p = (F(rng.randint(-8, 24), 8),) + tuple(F(rng.randint(-8, 8), 16) for _ in range(3))
            assert dist(p, c(p)) <= max(F(1, 4), F(1, 3))

    def test_bounds_add(self):
        samples = [point(1, 0, 0, 0), point(2, "1/100", 0, 0)]
        s = straighten(samples, X_LINE, F(1, 2), F(1, 20))
        m = compose(push_away(X_LINE, F(1, 10)), s)
        assert m.kind is MoveKind.COMPOSITE
        assert m.displacement_bound == F(1, 20) + s.displacement_bound
        assert m.displacement_bound <= F(1, 20) + F(1, 2)
        assert m.inverse_modulus == 2 * s.inverse_modulus

    def test_domain_error_propagates(self):
        m = compose(push_away(X_LINE, F(1, 2)), IDENTITY)
        with pytest.raises(DomainError):
            m(point(0, 0, 0, 0))


class TestStraighten:
    def test_far_samples_give_identity(self):
        s = straighten([point(0, 1, 0, 0), point(3, 0, -2, 0)], X_LINE, F(1, 2), F(1, 20))
        assert s is IDENTITY

    def test_single_sample_at_midpoint(self):
        p = point(1, 0, 0, 0)
        eps, c = F(1), F(1, 10)
        s = straighten([p], X_LINE, eps, c)
        (cyl,) = [b.cylinder for b in s.children]
        assert (cyl.t0 + cyl.t1) / 2 == 1
        assert cyl.diameter < eps
        q = s(p)
        assert dist_point_line(q, X_LINE) >= c
        assert dist(p, q) < eps
        rng = random.Random(2)
        for _ in range(500):
            x = random_point(rng, 4, 8)
            if not cyl.contains(x):
                assert s(x) == x

    def test_two_samples_one_on_line(self):
        a, b = point(1, 0, 0, 0), point(1, "1/50", 0, 0)
        eps, c = F(1, 2), F(1, 20)
        s = straighten([a, b], X_LINE, eps, c)
        qa, qb = s(a), s(b)
        assert qa != qb
        assert min(dist_point_line(qa, X_LINE), dist_point_line(qb, X_LINE)) >= c

    def test_clearance_too_large(self):
        with pytest.raises(InfeasibleError):
            straighten([point(1, 0, 0, 0)], X_LINE, F(1), F(1, 4))

    def test_empty_samples(self):
        with pytest.raises(ValueError):
            straighten([], X_LINE, F(1), F(1, 10))

    def test_tie_break_prefers_lowest_axis_positive_sign(self):
        # One lonely sample on the line: every axis and sign does equally
        # well, so the first fixed axis with + wins.
        s = straighten([point(0, 0, 0, 0)], X_LINE, F(1), F(1, 10))
        assert s.children[0].direction == (0, 1, 0, 0)

    @pytest.mark.parametrize("seed", range(15))
    def test_fixtures(self, seed):
        pts, line, eps, c = straighten_fixture(seed)
        s = straighten(pts, line, eps, c)
        images = [s(p) for p in pts]
        assert all(dist_point_line(q, line) >= c for q in images)
        assert len(set(images)) == len(images)
        assert all(dist(p, q) < eps for p, q in zip(pts, images))
        assert all(s.inverse(q) == p for p, q in zip(pts, images))
        if s is not IDENTITY:
            assert s.displacement_bound <= eps
            for b in s.children:
                assert b.cylinder.diameter < eps
                assert b.cylinder.t1 - b.cylinder.t0 < eps / 2
                assert all(b.cylinder.t0 != p[line.free_axis] != b.cylinder.t1 for p in pts)


class TestClosenessAndRoundTrip:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_many_points(self, seed):
        pts, line, eps, c = straighten_fixture(seed + 100)
        moves = [
            straighten(pts, line, eps, c),
            Bump(Cylinder(line, -1, 1, eps / 4), [0 if j == line.free_axis else 1 for j in range(4)], eps / 8),
        ]
        rng = random.Random(seed)
        lo, hi = -1, 1
        for m in moves:
            for _ in range(10**4):
                p = tuple(F(rng.randint(lo * 64, hi * 64), 64) for _ in range(4))
                q = m(p)
                assert dist(p, q) <= m.displacement_bound
                assert m.inverse(q) == p


def test_json_round_trip():
    pts, line, eps, c = straighten_fixture(3)
    s = straighten(pts, line, eps, c)
    m = compose(push_away(line, c / 2), s)
    again = move_from_json(move_to_json(m))
    assert move_to_json(again) == move_to_json(m)
    rng = random.Random(3)
    for _ in range(200):
        p = random_point(rng, 4, 8)
        if dist_point_line(s(p), line):
            assert again(p) == m(p)


def test_disjoint_composite_rejects_overlap():
    b = Bump(Cylinder(X_LINE, 0, 2, 1), E1, F(1, 2))
    with pytest.raises(ValueError):
        Composite([b, b], disjoint=True)
