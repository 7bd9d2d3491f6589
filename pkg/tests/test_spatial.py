import numpy as np
import pytest

from layoutsynth.spatial import NaiveIndex, SpatialHash, candidate_pairs, overlapping_pairs, rebuild


def brute_force_overlaps(px, py, radii):
    """O(n^2) oracle, vectorized."""
    x = np.asarray(px)
    y = np.asarray(py)
    r = np.asarray(radii)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    rsum = r[:, None] + r[None, :]
    hit = dx * dx + dy * dy < rsum * rsum
    ii, jj = np.where(np.triu(hit, k=1))
    return {(int(i), int(j)) for i, j in zip(ii, jj)}


def test_empty_index_is_quiet():
    grid = rebuild([], [], [])
    assert candidate_pairs(grid) == []
    assert grid.query(0.0, 0.0, 10.0) == []


def test_distant_particles_produce_no_pairs():
    grid = rebuild([0.0, 500.0], [0.0, 0.0], [1.0, 1.0])
    assert candidate_pairs(grid) == []


def test_single_overlapping_pair_deduplicated():
    grid = rebuild([0.0, 1.0], [0.0, 0.0], [1.0, 1.0])
    pairs = overlapping_pairs(grid, [0.0, 1.0], [0.0, 0.0], [1.0, 1.0])
    assert pairs == [(0, 1)]


def test_candidates_cover_all_true_overlaps_random():
    rng = np.random.default_rng(20)
    for _ in range(50):
        n = int(rng.integers(2, 200))
        px = rng.uniform(0, 30, n)
        py = rng.uniform(0, 30, n)
        radii = rng.uniform(0.1, 1.5, n)
        grid = rebuild(px, py, radii)
        cands = set(candidate_pairs(grid))
        truth = brute_force_overlaps(px, py, radii)
        assert truth <= cands
        assert set(overlapping_pairs(grid, px, py, radii)) == truth


def test_clustered_blob_matches_brute_force():
    rng = np.random.default_rng(21)
    px = rng.normal(0, 0.5, 10)
    py = rng.normal(0, 0.5, 10)
    radii = np.full(10, 0.4)
    grid = rebuild(px, py, radii)
    assert set(overlapping_pairs(grid, px, py, radii)) == brute_force_overlaps(px, py, radii)


def test_determinism_of_candidate_order():
    rng = np.random.default_rng(22)
    px = rng.uniform(0, 10, 100)
    py = rng.uniform(0, 10, 100)
    radii = rng.uniform(0.1, 0.6, 100)
    a = candidate_pairs(rebuild(px, py, radii))
    b = candidate_pairs(rebuild(px, py, radii))
    assert a == b
    assert a == sorted(a)


def test_query_returns_superset_of_neighbors():
    rng = np.random.default_rng(23)
    px = rng.uniform(0, 20, 150)
    py = rng.uniform(0, 20, 150)
    radii = rng.uniform(0.1, 0.8, 150)
    grid = rebuild(px, py, radii)
    for _ in range(20):
        qx, qy, qr = rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0.5, 3)
        got = set(grid.query(qx, qy, qr))
        for i in range(150):
            if np.hypot(px[i] - qx, py[i] - qy) < qr + radii[i]:
                assert i in got


def test_insert_covers_all_overlapped_cells():
    grid = SpatialHash(cell_size=1.0)
    grid.insert(0, 0.5, 0.5, 0.75)  # bounding box spans a 3x3 block
    assert sum(0 in bucket for bucket in grid.cells.values()) == 9
    got = set(grid.query(0.5, 0.5, 0.1))
    assert got == {0}


def test_naive_index_is_sound_and_exhaustive():
    idx = NaiveIndex([3, 1, 7])
    assert idx.candidate_pairs() == [(1, 3), (1, 7), (3, 7)]
    assert idx.query(0, 0, 1) == [1, 3, 7]


def test_rejects_bad_cell_size():
    with pytest.raises(ValueError):
        SpatialHash(0.0)


class TestGenerateCollisionConstraints:
    def _scene(self, positions, half=0.5):
        from layoutsynth.geometry import Vec2
        from layoutsynth.model import BoundingBox, LayoutObject, Particle, Room, Scene

        scene = Scene(room=Room([Vec2(-50, -50), Vec2(50, -50), Vec2(50, 50), Vec2(-50, 50)]))
        for i, (x, y) in enumerate(positions):
            scene.particles.append(Particle(Vec2(x, y)))
            scene.objects.append(
                LayoutObject(id=f"o{i}", label="box", particle_index=i,
                             bbox=BoundingBox(Vec2(half, half), half))
            )
        return scene

    def _constraints(self, scene):
        from layoutsynth.solver import LayoutState, SolveContext, generate_collision_constraints

        ctx = SolveContext(scene)
        st = LayoutState(
            [p.position.x for p in scene.particles],
            [p.position.y for p in scene.particles],
            [p.z for p in scene.particles],
            [p.orientation for p in scene.particles],
        )
        return generate_collision_constraints(st, ctx)

    def test_no_overlaps_empty(self):
        assert self._constraints(self._scene([(0, 0), (10, 0)])) == []

    def test_one_pair_ordered(self):
        out = self._constraints(self._scene([(0, 0), (1, 0)]))
        assert len(out) == 1
        assert out[0].kind == "collision"
        assert out[0].particles == (0, 1)

    def test_blob_matches_brute_force(self):
        import math

        rng = np.random.default_rng(30)
        positions = rng.normal(0, 0.8, size=(10, 2))
        out = self._constraints(self._scene([tuple(p) for p in positions]))
        pairs = {c.particles for c in out if c.kind == "collision"}
        radius = 0.5 * math.sqrt(2.0)
        truth = brute_force_overlaps(positions[:, 0], positions[:, 1], [radius] * 10)
        assert pairs == truth
