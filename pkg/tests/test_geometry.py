import math

import numpy as np
import pytest

from layoutsynth.geometry import (
    ARC,
    Curve,
    SEGMENT,
    Vec2,
    closest_point_on_curve,
    closest_point_on_segment,
    normalize_angle,
    point_in_polygon,
    polygon_centroid,
    polygon_is_simple,
    polygon_signed_area,
    stable_radians,
    wrap_angle,
)

SQUARE = [Vec2(0, 0), Vec2(10, 0), Vec2(10, 10), Vec2(0, 10)]


def test_normalize_angle_range_and_idempotence():
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-50, 50, size=500):
        a = normalize_angle(theta)
        assert 0.0 <= a < 2.0 * math.pi
        assert normalize_angle(a) == a
        # represents the same angle modulo 2*pi
        assert math.isclose(math.cos(a), math.cos(theta), abs_tol=1e-9)
        assert math.isclose(math.sin(a), math.sin(theta), abs_tol=1e-9)


def test_wrap_angle_signed_range():
    rng = np.random.default_rng(1)
    for delta in rng.uniform(-20, 20, size=300):
        w = wrap_angle(delta)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.cos(w), math.cos(delta), abs_tol=1e-9)
    # antipodal ties wrap positive
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi


def test_stable_radians_fixed_point():
    rng = np.random.default_rng(2)
    for deg in list(rng.uniform(-720, 720, size=2000)) + [0, 45, 90, 105, 180, 270]:
        rad = stable_radians(float(deg))
        assert math.radians(math.degrees(rad)) == rad
        assert math.isclose(rad, math.radians(deg), rel_tol=0, abs_tol=1e-12)


def test_closest_point_on_segment_cases():
    a, b = Vec2(0, 0), Vec2(4, 0)
    q, t = closest_point_on_segment(a, b, (2, 3))
    assert q == Vec2(2, 0) and t == 0.5
    q, t = closest_point_on_segment(a, b, (9, 1))
    assert q == Vec2(4, 0) and t == 1.0
    q, t = closest_point_on_segment(a, b, (-5, -1))
    assert q == Vec2(0, 0) and t == 0.0


def test_polygon_area_centroid_square():
    assert polygon_signed_area(SQUARE) == pytest.approx(100.0)
    assert polygon_centroid(SQUARE) == pytest.approx((5.0, 5.0))


def test_polygon_centroid_matches_sampling_oracle():
    poly = [Vec2(0, 0), Vec2(6, 0), Vec2(6, 2), Vec2(2, 2), Vec2(2, 5), Vec2(0, 5)]
    rng = np.random.default_rng(3)
    pts = rng.uniform((0, 0), (6, 5), size=(200_000, 2))
    inside = np.array([point_in_polygon(poly, p) for p in pts])
    mc = pts[inside].mean(axis=0)
    c = polygon_centroid(poly)
    assert abs(c.x - mc[0]) < 0.02 and abs(c.y - mc[1]) < 0.02


def test_point_in_polygon_basic():
    assert point_in_polygon(SQUARE, (5, 5))
    assert not point_in_polygon(SQUARE, (15, 5))
    assert not point_in_polygon(SQUARE, (-0.001, 5))


def test_polygon_simplicity():
    assert polygon_is_simple(SQUARE)
    bowtie = [Vec2(0, 0), Vec2(4, 4), Vec2(4, 0), Vec2(0, 4)]
    assert not polygon_is_simple(bowtie)


class TestCurves:
    def test_segment_requires_length(self):
        with pytest.raises(ValueError):
            Curve(SEGMENT, Vec2(1, 1), Vec2(1, 1)).validate()

    def test_arc_requires_common_radius(self):
        with pytest.raises(ValueError):
            Curve(ARC, Vec2(1, 0), Vec2(0, 2), Vec2(0, 0)).validate()

    def test_segment_nearest_foot_and_clamp(self):
        seg = Curve(SEGMENT, Vec2(0, 0), Vec2(4, 0))
        q, t = closest_point_on_curve(seg, (2, 3))
        assert q == Vec2(2, 0) and t == 0.5
        q, t = closest_point_on_curve(seg, (9, 1))
        assert q == Vec2(4, 0) and t == 1.0

    def test_quarter_arc_nearest_against_dense_sampling(self):
        arc = Curve(ARC, Vec2(1, 0), Vec2(0, 1), Vec2(0, 0))
        arc.validate()
        q, t = closest_point_on_curve(arc, (2, 2))
        r = math.sqrt(2) / 2
        assert q.x == pytest.approx(r, abs=1e-12)
        assert q.y == pytest.approx(r, abs=1e-12)
        # dense sampling oracle over several query points
        samples = [arc.point_at(u) for u in np.linspace(0, 1, 20_001)]
        rng = np.random.default_rng(4)
        for p in rng.uniform(-2, 3, size=(40, 2)):
            q, _ = closest_point_on_curve(arc, p)
            best = min(math.hypot(s.x - p[0], s.y - p[1]) for s in samples)
            got = math.hypot(q.x - p[0], q.y - p[1])
            assert got <= best + 1e-6

    def test_arc_span_clamps_to_endpoints(self):
        arc = Curve(ARC, Vec2(1, 0), Vec2(0, 1), Vec2(0, 0))
        q, t = closest_point_on_curve(arc, (0.5, -2))
        assert (q, t) == (Vec2(1, 0), 0.0)

    def test_point_at_endpoints(self):
        arc = Curve(ARC, Vec2(1, 0), Vec2(0, 1), Vec2(0, 0))
        assert arc.point_at(0.0) == pytest.approx((1.0, 0.0))
        assert arc.point_at(1.0) == pytest.approx((0.0, 1.0))
        assert arc.length() == pytest.approx(math.pi / 2)

    def test_transformed_preserves_shape(self):
        seg = Curve(SEGMENT, Vec2(-1, 0), Vec2(1, 0))
        world = seg.transformed(Vec2(5, 5), math.pi / 2)
        assert world.a.x == pytest.approx(5.0)
        assert world.a.y == pytest.approx(4.0)
        assert world.b.y == pytest.approx(6.0)
        assert world.length() == pytest.approx(seg.length())
