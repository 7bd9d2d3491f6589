import math

import numpy as np
import pytest

from layoutsynth.geometry import Vec2
from layoutsynth.model import (
    INFINITE,
    AccessRegion,
    BoundingBox,
    Group,
    LayoutObject,
    Particle,
    RIGID,
    Room,
    Scene,
    boundary_clearance,
    mass_from_bbox,
    nearest_wall_point,
)

SQUARE = Room([Vec2(0, 0), Vec2(10, 0), Vec2(10, 10), Vec2(0, 10)])


class TestParticle:
    def test_inverse_mass_matches(self):
        p = Particle(Vec2(0, 0), mass=4.0)
        assert p.inverse_mass * p.mass == pytest.approx(1.0, abs=1e-9)

    def test_infinite_mass_means_zero_inverse(self):
        p = Particle(Vec2(0, 0), mass=INFINITE)
        assert p.inverse_mass == 0.0
        assert p.fixed

    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValueError):
            Particle(Vec2(0, 0), mass=0.0)
        with pytest.raises(ValueError):
            Particle(Vec2(0, 0), mass=-2.0)

    def test_rejects_nonfinite_position(self):
        with pytest.raises(ValueError):
            Particle(Vec2(math.nan, 0))

    def test_orientation_normalized(self):
        p = Particle(Vec2(0, 0), orientation=-math.pi / 2)
        assert 0.0 <= p.orientation < 2 * math.pi
        assert p.orientation == pytest.approx(1.5 * math.pi)


class TestBoundingBox:
    def test_derived_quantities(self):
        bbox = BoundingBox(Vec2(0.5, 0.5), 0.5)  # unit cube
        assert bbox.volume == pytest.approx(1.0)
        assert bbox.footprint_diagonal == pytest.approx(math.sqrt(2))
        assert bbox.bounding_radius == pytest.approx(math.sqrt(2) / 2)
        assert bbox.bounding_radius >= max(bbox.half_extents)

    def test_mass_from_bbox(self):
        assert mass_from_bbox(BoundingBox(Vec2(0.5, 0.5), 0.5)) == pytest.approx(1.0)
        assert mass_from_bbox(BoundingBox(Vec2(1, 1), 1)) == pytest.approx(8.0)
        assert mass_from_bbox(BoundingBox(Vec2(0.5, 1.0), 0.25)) == pytest.approx(1.0)
        assert mass_from_bbox(BoundingBox(Vec2(1, 1), 1), density=2.5) == pytest.approx(20.0)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            BoundingBox(Vec2(0.0, 1.0), 1.0)


class TestRoom:
    def test_normalizes_to_counterclockwise(self):
        cw = Room([Vec2(0, 0), Vec2(0, 10), Vec2(10, 10), Vec2(10, 0)])
        assert cw.area > 0

    def test_rejects_self_intersection(self):
        with pytest.raises(ValueError):
            Room([Vec2(0, 0), Vec2(4, 4), Vec2(4, 0), Vec2(0, 4)])

    def test_centroid(self):
        assert SQUARE.centroid == pytest.approx((5.0, 5.0))


class TestNearestWall:
    def test_interior_point(self):
        point, normal, tangent = nearest_wall_point(SQUARE, (3, 5))
        assert point == pytest.approx((0.0, 5.0))
        assert normal == pytest.approx((1.0, 0.0))
        assert tangent == pytest.approx(math.pi / 2)

    def test_on_wall_distance_zero(self):
        point, _, _ = nearest_wall_point(SQUARE, (0, 5))
        assert point == pytest.approx((0.0, 5.0))

    def test_centroid_tie_breaks_to_first_wall(self):
        point, normal, _ = nearest_wall_point(SQUARE, (5, 5))
        # first stored wall is (0,0)->(10,0)
        assert point == pytest.approx((5.0, 0.0))
        assert normal == pytest.approx((0.0, 1.0))

    def test_against_dense_boundary_sampling(self):
        room = Room([Vec2(0, 0), Vec2(8, 0), Vec2(8, 3), Vec2(5, 3), Vec2(5, 6), Vec2(0, 6)])
        samples = []
        for a, b in room.walls():
            for t in np.linspace(0, 1, 1250):
                samples.append((a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
        samples = np.array(samples)
        rng = np.random.default_rng(7)
        for p in rng.uniform((0, 0), (8, 6), size=(50, 2)):
            point, _, _ = nearest_wall_point(room, p)
            got = math.hypot(point.x - p[0], point.y - p[1])
            best = np.min(np.hypot(samples[:, 0] - p[0], samples[:, 1] - p[1]))
            assert got <= best + 1e-6
            assert boundary_clearance(room, point) == pytest.approx(0.0, abs=1e-9)

    def test_normal_points_into_room(self):
        rng = np.random.default_rng(8)
        for p in rng.uniform((0.5, 0.5), (9.5, 9.5), size=(25, 2)):
            point, normal, _ = nearest_wall_point(SQUARE, p)
            probe = (point.x + 1e-3 * normal.x, point.y + 1e-3 * normal.y)
            assert SQUARE.contains(probe)


class TestAccessRegion:
    def test_world_center_rotates(self):
        region = AccessRegion(Vec2(1.0, 0.0), diagonal=0.5)
        w = region.world_center(Vec2(2, 3), math.pi / 2)
        assert w.x == pytest.approx(2.0)
        assert w.y == pytest.approx(4.0)

    def test_rejects_negative_diagonal(self):
        with pytest.raises(ValueError):
            AccessRegion(Vec2(0, 0), diagonal=-0.1)


def _tiny_scene() -> Scene:
    scene = Scene(room=SQUARE)
    scene.particles.append(Particle(Vec2(5, 5)))
    scene.objects.append(
        LayoutObject(id="box", label="box", particle_index=0, bbox=BoundingBox(Vec2(0.5, 0.5), 0.5))
    )
    return scene


class TestScene:
    def test_validate_accepts_consistent(self):
        _tiny_scene().validate()

    def test_validate_rejects_bad_particle_index(self):
        scene = _tiny_scene()
        scene.objects[0].particle_index = 5
        with pytest.raises(ValueError):
            scene.validate()

    def test_validate_rejects_duplicate_ids(self):
        scene = _tiny_scene()
        scene.particles.append(Particle(Vec2(2, 2)))
        scene.objects.append(
            LayoutObject(id="box", label="box", particle_index=1, bbox=BoundingBox(Vec2(0.5, 0.5), 0.5))
        )
        with pytest.raises(ValueError):
            scene.validate()

    def test_validate_rejects_missing_group_member(self):
        scene = _tiny_scene()
        scene.particles.append(Particle(Vec2(1, 1)))
        scene.groups.append(
            Group(id="g", particle_index=1, member_object_ids=("ghost",),
                  rigidity=RIGID, member_offsets=((0.0, 0.0, 0.0),))
        )
        with pytest.raises(ValueError):
            scene.validate()

    def test_copy_is_deep_enough(self):
        scene = _tiny_scene()
        clone = scene.copy()
        clone.particles[0].position = Vec2(1, 1)
        assert scene.particles[0].position == Vec2(5, 5)
        assert clone != scene


class TestRigidGroupRoundTrip:
    def test_member_world_pose_composition(self):
        group = Group(
            id="g",
            particle_index=0,
            member_object_ids=("a", "b"),
            rigidity=RIGID,
            member_offsets=((1.0, 0.0, 0.0), (0.0, 2.0, math.pi / 2)),
        )
        rng = np.random.default_rng(9)
        for _ in range(200):
            gx, gy = rng.uniform(-5, 5, size=2)
            gth = rng.uniform(0, 2 * math.pi)
            # transforming the group then reading member poses equals
            # transforming each member's base world pose directly
            base = [group.member_world_pose(k, Vec2(0, 0), 0.0) for k in range(2)]
            moved = [group.member_world_pose(k, Vec2(gx, gy), gth) for k in range(2)]
            c, s = math.cos(gth), math.sin(gth)
            for (bp, bth), (mp, mth) in zip(base, moved):
                ex = gx + c * bp.x - s * bp.y
                ey = gy + s * bp.x + c * bp.y
                assert mp.x == pytest.approx(ex, abs=1e-9)
                assert mp.y == pytest.approx(ey, abs=1e-9)
                assert math.isclose(
                    math.cos(mth), math.cos(bth + gth), abs_tol=1e-9
                )

    def test_curve_ts_must_increase(self):
        from layoutsynth.geometry import Curve, SEGMENT

        with pytest.raises(ValueError):
            Group(
                id="g",
                particle_index=0,
                member_object_ids=("a", "b"),
                curve=Curve(SEGMENT, Vec2(0, 0), Vec2(1, 0)),
                member_ts=(0.7, 0.2),
            )
