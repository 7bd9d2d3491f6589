import math

import numpy as np
import pytest

from layoutsynth import constraints as cn
from layoutsynth import scenes
from layoutsynth.geometry import Curve, SEGMENT, Vec2
from layoutsynth.model import (
    BoundingBox,
    Group,
    LayoutObject,
    NONRIGID,
    Particle,
    RIGID,
    Room,
    Scene,
)
from layoutsynth.solver import (
    BATCH,
    LayoutState,
    SolveContext,
    SolverConfig,
    SolverNumericsError,
    evaluate_energy,
    initialize,
    step,
    synthesize,
)


def square_room(side=10.0):
    return Room([Vec2(0, 0), Vec2(side, 0), Vec2(side, side), Vec2(0, side)])


def box_scene(n_objects=2, side=10.0, half=0.5):
    scene = Scene(room=square_room(side))
    for i in range(n_objects):
        scene.particles.append(Particle(Vec2(side / 2, side / 2)))
        scene.objects.append(
            LayoutObject(
                id=f"box_{i}", label="box", particle_index=i,
                bbox=BoundingBox(Vec2(half, half), half),
            )
        )
    return scene


class TestInitialize:
    def test_deterministic(self):
        scene = box_scene(5)
        a = initialize(scene, 42)
        b = initialize(scene, 42)
        assert a.snapshot() == b.snapshot()

    def test_all_samples_inside_polygon(self):
        room = Room([Vec2(0, 0), Vec2(6, 0), Vec2(6, 2), Vec2(2, 2), Vec2(2, 5), Vec2(0, 5)])
        scene = Scene(room=room)
        for i in range(200):
            scene.particles.append(Particle(Vec2(1, 1)))
            scene.objects.append(
                LayoutObject(id=f"o{i}", label="box", particle_index=i,
                             bbox=BoundingBox(Vec2(0.1, 0.1), 0.1))
            )
        st = initialize(scene, 7)
        for x, y in zip(st.px, st.py):
            assert room.contains((x, y))

    def test_uniform_mean_near_rectangle_center(self):
        scene = box_scene(1)
        xs, ys = [], []
        for seed in range(4):
            rng_scene = box_scene(25_000)
            st = initialize(rng_scene, seed)
            xs.extend(st.px)
            ys.extend(st.py)
        assert abs(np.mean(xs) - 5.0) < 0.05
        assert abs(np.mean(ys) - 5.0) < 0.05

    def test_orientations_uniform(self):
        st = initialize(box_scene(20_000), 3)
        thetas = np.array(st.theta)
        assert 0.0 <= thetas.min() and thetas.max() < 2 * math.pi
        assert abs(np.mean(thetas) - math.pi) < 0.05

    def test_fixed_particles_keep_pose(self):
        scene = box_scene(2)
        scene.particles[0] = Particle(Vec2(1.5, 2.5), orientation=0.25, mass=math.inf)
        st = initialize(scene, 9)
        assert (st.px[0], st.py[0], st.theta[0]) == (1.5, 2.5, 0.25)

    def test_near_zero_area_room_fails_rejection_sampling(self):
        # a hair-thin diagonal sliver: the bounding rectangle is 10x10
        # but the polygon area is ~1e-8, so sampling cannot land inside
        sliver = Scene(room=Room([Vec2(0, 0), Vec2(10, 10), Vec2(10, 10 + 1e-9), Vec2(0, 1e-9)]))
        sliver.particles.append(Particle(Vec2(0, 0)))
        sliver.objects.append(
            LayoutObject(id="o", label="box", particle_index=0, bbox=BoundingBox(Vec2(0.1, 0.1), 0.1))
        )
        with pytest.raises(RuntimeError, match="rejection"):
            initialize(sliver, 0)


class TestEvaluateEnergy:
    def test_all_satisfied_zero(self):
        scene = box_scene(2)
        ctx = SolveContext(scene)
        st = LayoutState([2.0, 8.0], [5.0, 5.0], [0.0, 0.0], [0.0, 0.0])
        energy, sums, mo, mb = evaluate_energy(st, ctx)
        assert energy == 0.0 and sums == {} and mo == 0.0 and mb == 0.0

    def test_single_collision_violation_sqrt150(self):
        scene = box_scene(2, half=1.0)
        ctx = SolveContext(scene)
        # radius = sqrt(2); violation C = 2*sqrt(2) - separation = 1
        sep = 2 * math.sqrt(2.0) - 1.0
        st = LayoutState([4.0, 4.0 + sep], [5.0, 5.0], [0.0, 0.0], [0.0, 0.0])
        energy, sums, mo, _ = evaluate_energy(st, ctx)
        assert energy == pytest.approx(math.sqrt(150.0), abs=1e-9)
        assert mo == pytest.approx(1.0, abs=1e-12)

    def test_mixed_violations_sqrt159(self):
        scene = box_scene(2, half=1.0)
        scene.constraints.append(
            cn.make_constraint(cn.PAIRWISE_DISTANCE, (0, 1), distance=1.0, weight=1.0)
        )
        ctx = SolveContext(scene)
        sep = 2 * math.sqrt(2.0) - 1.0
        # distance violation C = sep - 1 ... choose positions for C=3:
        # place them 4 apart for the distance term, no collision then;
        # instead assert the two-term formula directly
        st = LayoutState([3.0, 3.0 + sep], [5.0, 5.0], [0.0, 0.0], [0.0, 0.0])
        energy, sums, _, _ = evaluate_energy(st, ctx)
        expected = math.sqrt(150.0 * 1.0 + 1.0 * (sep - 1.0) ** 2)
        assert energy == pytest.approx(expected, abs=1e-9)

    def test_satisfied_inequalities_contribute_zero(self):
        scene = box_scene(2)
        scene.constraints.append(
            cn.make_constraint(cn.PAIRWISE_DISTANCE, (0, 1), distance=1.0,
                               relation=cn.INEQUALITY, weight=5.0)
        )
        ctx = SolveContext(scene)
        st = LayoutState([2.0, 8.0], [5.0, 5.0], [0.0, 0.0], [0.0, 0.0])
        energy, _, _, _ = evaluate_energy(st, ctx)
        assert energy == 0.0


class TestStep:
    def test_unconstrained_scene_only_boundary(self):
        scene = box_scene(1)
        ctx = SolveContext(scene)
        st = LayoutState([0.1], [5.0], [0.0], [0.0])  # circle pokes out
        step(st, ctx, 1, SolverConfig())
        r = scene.objects[0].bbox.bounding_radius
        assert st.px[0] == pytest.approx(r, abs=1e-9)

    def test_interior_unconstrained_state_unchanged(self):
        scene = box_scene(2)
        ctx = SolveContext(scene)
        st = LayoutState([3.0, 7.0], [5.0, 5.0], [0.0, 0.0], [0.3, 0.4])
        before = st.snapshot()
        step(st, ctx, 1, SolverConfig())
        assert st.snapshot() == before

    def test_single_equality_satisfied_after_one_step(self):
        scene = box_scene(2)
        scene.constraints.append(
            cn.make_constraint(
                cn.PAIRWISE_DISTANCE, (0, 1), distance=3.0,
                schedule=cn.CONSTANT, stiffness_initial=1.0,
            )
        )
        ctx = SolveContext(scene)
        st = LayoutState([2.0, 8.0], [5.0, 5.0], [0.0, 0.0], [0.0, 0.0])
        step(st, ctx, 1, SolverConfig())
        d = math.hypot(st.px[0] - st.px[1], st.py[0] - st.py[1])
        assert d == pytest.approx(3.0, abs=1e-9)

    def test_sequential_matches_long_run_fixed_point(self):
        # two conflicting distance constraints sharing a particle: the
        # Gauss-Seidel limit equals a long reference run
        def build():
            scene = box_scene(3, side=20.0)
            scene.particles[1] = Particle(Vec2(4.0, 10.0), mass=math.inf)
            scene.particles[2] = Particle(Vec2(16.0, 10.0), mass=math.inf)
            for anchor, d in ((1, 2.0), (2, 3.0)):
                scene.constraints.append(
                    cn.make_constraint(
                        cn.PAIRWISE_DISTANCE, (0, anchor), distance=d,
                        schedule=cn.CONSTANT, stiffness_initial=1.0,
                    )
                )
            return scene

        scene = build()
        ctx = SolveContext(scene)
        st = LayoutState([10.0, 4.0, 16.0], [10.0, 10.0, 10.0], [0.0] * 3, [0.0] * 3)
        config = SolverConfig(interleave=False)
        for l in range(1, 101):
            step(st, ctx, l, config)
        reference = LayoutState([10.0, 4.0, 16.0], [10.0, 10.0, 10.0], [0.0] * 3, [0.0] * 3)
        ctx2 = SolveContext(build())
        for l in range(1, 10_001):
            step(reference, ctx2, l, config)
        assert st.px[0] == pytest.approx(reference.px[0], abs=1e-6)
        assert st.py[0] == pytest.approx(reference.py[0], abs=1e-6)

    def test_nan_guard_names_constraint(self):
        scene = box_scene(2)
        scene.constraints.append(
            cn.make_constraint(cn.PAIRWISE_DISTANCE, (0, 1), distance=1.0)
        )
        ctx = SolveContext(scene)
        st = LayoutState([math.inf, 1.0], [5.0, 5.0], [0.0, 0.0], [0.0, 0.0])
        with pytest.raises(SolverNumericsError, match="pairwise_distance"):
            step(st, ctx, 1, SolverConfig())

    def test_batch_mode_averages_with_overrelaxation(self):
        scene = box_scene(3, side=30.0)
        scene.particles[1] = Particle(Vec2(10.0, 15.0), mass=math.inf)
        scene.particles[2] = Particle(Vec2(20.0, 15.0), mass=math.inf)
        for anchor in (1, 2):
            scene.constraints.append(
                cn.make_constraint(
                    cn.PAIRWISE_DISTANCE, (0, anchor), distance=1.0,
                    schedule=cn.CONSTANT, stiffness_initial=1.0,
                )
            )
        ctx = SolveContext(scene)
        st = LayoutState([15.0, 10.0, 20.0], [15.0, 15.0, 15.0], [0.0] * 3, [0.0] * 3)
        # both constraints pull particle 0 toward their anchors by 4 each,
        # in opposite directions: batch mean is zero net, times omega
        step(st, ctx, 1, SolverConfig(projection_mode=BATCH))
        assert st.px[0] == pytest.approx(15.0, abs=1e-9)

    def test_orientations_renormalized(self):
        scene = box_scene(2)
        scene.constraints.append(
            cn.make_constraint(
                cn.PAIRWISE_ORIENTATION, (0, 1), orientation_mode=cn.ORIENT_FIXED,
                angle_target=0.1, schedule=cn.CONSTANT, stiffness_initial=1.0,
            )
        )
        ctx = SolveContext(scene)
        st = LayoutState([3.0, 7.0], [5.0, 5.0], [0.0, 0.0], [6.2, 1.0])
        step(st, ctx, 1, SolverConfig())
        assert all(0.0 <= t < 2 * math.pi for t in st.theta)


class TestGroups:
    def _rigid_scene(self):
        scene = box_scene(2, side=20.0)
        scene.particles.append(Particle(Vec2(10, 10), mass=2.0))
        scene.groups.append(
            Group(
                id="pair", particle_index=2, member_object_ids=("box_0", "box_1"),
                rigidity=RIGID,
                member_offsets=((-1.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
            )
        )
        return scene

    def test_rigid_group_translates_whole(self):
        scene = self._rigid_scene()
        scene.particles.append(Particle(Vec2(0, 0), mass=math.inf))
        scene.objects.append(
            LayoutObject(id="anchor", label="box", particle_index=3,
                         bbox=BoundingBox(Vec2(0.5, 0.5), 0.5))
        )
        scene.constraints.append(
            cn.make_constraint(
                cn.PAIRWISE_DISTANCE, (0, 3), distance=2.0,
                schedule=cn.CONSTANT, stiffness_initial=1.0,
            )
        )
        ctx = SolveContext(scene)
        st = LayoutState([9.0, 11.0, 10.0, 4.0], [10.0, 10.0, 10.0, 10.0], [0.0] * 4, [0.0] * 4)
        before_offset = (st.px[1] - st.px[0], st.py[1] - st.py[0])
        step(st, ctx, 1, SolverConfig())
        after_offset = (st.px[1] - st.px[0], st.py[1] - st.py[0])
        assert after_offset == pytest.approx(before_offset, abs=1e-9)
        # member 0 satisfied its constraint by dragging the group
        assert math.hypot(st.px[0] - st.px[3], st.py[0] - st.py[3]) == pytest.approx(2.0, abs=1e-9)

    def test_curve_members_land_on_segment_in_one_pass(self):
        scene = box_scene(5, side=20.0)
        scene.particles.append(Particle(Vec2(10, 10), mass=5.0))
        scene.groups.append(
            Group(
                id="row", particle_index=5,
                member_object_ids=tuple(f"box_{i}" for i in range(5)),
                rigidity=NONRIGID,
                curve=Curve(SEGMENT, Vec2(-4, 0), Vec2(4, 0)),
                member_ts=(0.1, 0.3, 0.5, 0.7, 0.9),
            )
        )
        ctx = SolveContext(scene)
        rng = np.random.default_rng(5)
        st = LayoutState(
            list(rng.uniform(6, 14, 5)) + [10.0],
            list(rng.uniform(6, 14, 5)) + [10.0],
            [0.0] * 6,
            [0.0] * 6,
        )
        for c in ctx.user_constraints:
            c.stiffness = 1.0
        from layoutsynth.solver import project_constraint, _Applier

        applier = _Applier(st, ctx)
        for c in ctx.user_constraints:
            assert c.kind == cn.GROUP_CURVE
            for corr in project_constraint(c, st, ctx):
                applier.apply(corr, c.kind)
        for i in range(5):
            assert st.py[i] == pytest.approx(10.0, abs=1e-9)
            assert 6.0 - 1e-9 <= st.px[i] <= 14.0 + 1e-9

    def test_arc_tier_spacing_equalizes(self):
        # members on an arc with neighbor distance constraints spread out
        scene = box_scene(4, side=40.0)
        scene.particles.append(Particle(Vec2(20, 20), mass=5.0))
        radius = 6.0
        curve = Curve(
            "arc",
            Vec2(radius + radius * math.cos(math.pi - 1.0), radius * math.sin(math.pi - 1.0)),
            Vec2(radius + radius * math.cos(math.pi + 1.0), radius * math.sin(math.pi + 1.0)),
            Vec2(radius, 0.0),
        )
        scene.groups.append(
            Group(
                id="tier", particle_index=4,
                member_object_ids=tuple(f"box_{i}" for i in range(4)),
                rigidity=NONRIGID, curve=curve,
                member_ts=(0.2, 0.4, 0.6, 0.8),
            )
        )
        spacing = 1.4
        for i in range(3):
            scene.constraints.append(
                cn.make_constraint(cn.PAIRWISE_DISTANCE, (i, i + 1), distance=spacing)
            )
        scene.collisions_enabled = False
        ctx = SolveContext(scene)
        rng = np.random.default_rng(6)
        st = LayoutState(
            list(rng.uniform(15, 25, 4)) + [20.0],
            list(rng.uniform(15, 25, 4)) + [20.0],
            [0.0] * 5,
            [0.0] * 5,
        )
        config = SolverConfig()
        for l in range(1, 101):
            step(st, ctx, l, config)
        gaps = [
            math.hypot(st.px[i + 1] - st.px[i], st.py[i + 1] - st.py[i]) for i in range(3)
        ]
        assert max(gaps) - min(gaps) < 1e-3


class TestSynthesize:
    def test_pre_satisfied_terminates_at_window_plus_one(self):
        scene = box_scene(0)
        scene.particles.append(Particle(Vec2(5, 5), mass=math.inf))
        scene.objects.append(
            LayoutObject(id="rock", label="box", particle_index=0,
                         bbox=BoundingBox(Vec2(0.5, 0.5), 0.5))
        )
        layout, trace = synthesize(scene, SolverConfig(seed=1))
        # rows: initial + 51 loop iterations + settle
        assert len(trace.energies) == 1 + 51 + 1
        assert trace.best_energy == 0.0
        assert layout[0][:2] == (5.0, 5.0)

    def test_same_seed_identical_output(self):
        scene = scenes.living_room()
        a_layout, a_trace = synthesize(scene, SolverConfig(seed=11))
        b_layout, b_trace = synthesize(scene, SolverConfig(seed=11))
        assert a_layout == b_layout
        assert a_trace.energies == b_trace.energies

    def test_best_snapshot_reproduces_best_energy(self):
        scene = scenes.living_room()
        layout, trace = synthesize(scene, SolverConfig(seed=4))
        ctx = SolveContext(scene)
        st = LayoutState(
            [p[0] for p in layout], [p[1] for p in layout],
            [p[2] for p in layout], [p[3] for p in layout],
        )
        energy, _, _, _ = evaluate_energy(st, ctx)
        assert energy == pytest.approx(trace.best_energy, abs=1e-9)

    def test_energy_decreases_from_initial(self):
        scene = scenes.living_room()
        _, trace = synthesize(scene, SolverConfig(seed=2))
        assert trace.best_energy < trace.energies[0]

    def test_returned_layout_is_hard_feasible(self):
        scene = scenes.tp_bedroom()
        layout, _ = synthesize(scene, SolverConfig(seed=3))
        ctx = SolveContext(scene)
        st = LayoutState(
            [p[0] for p in layout], [p[1] for p in layout],
            [p[2] for p in layout], [p[3] for p in layout],
        )
        _, _, max_overlap, max_boundary = evaluate_energy(st, ctx)
        assert max_overlap <= 1e-6
        assert max_boundary <= 1e-6

    def test_trace_lengths_consistent(self):
        scene = scenes.desk()
        _, trace = synthesize(scene, SolverConfig(seed=5))
        assert len(trace.energies) == len(trace.violation_sums)
        assert trace.settled
