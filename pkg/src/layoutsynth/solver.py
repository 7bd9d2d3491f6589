"""Iterative layout synthesis by sequential constraint projection.

Each iteration refreshes every constraint's stiffness from its schedule,
projects the authored constraints (interleaved round-robin across kinds,
or batched with over-relaxed averaging), then regenerates and projects
contact constraints — collisions, accessibility, boundary containment —
from a fresh spatial hash, hard ones last.

The run returns the lowest-energy snapshot that satisfies the hard
constraints, together with the full energy trace.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import constraints as cn
from .constraints import Constraint, Correction
from .geometry import Vec2, closest_point_on_curve, normalize_angle, wrap_angle
from .model import Group, Scene, RIGID, nearest_wall_point
from .spatial import NaiveIndex, SpatialHash, rebuild

SEQUENTIAL = "sequential"
BATCH = "batch"

# lowest-energy iterates given a hard-constraint settling attempt
_SETTLE_CANDIDATES = 3

log = logging.getLogger(__name__)


class SolverNumericsError(RuntimeError):
    """A projection produced a non-finite pose."""


@dataclass
class SolverConfig:
    max_iterations: int = 300
    projection_mode: str = SEQUENTIAL
    batch_averaging: float = 1.2
    termination_window: int = 50
    seed: int = 0
    interleave: bool = True
    broad_phase: str = "hash"
    feasibility_tolerance: float = 1e-6
    settle_max_sweeps: int = 500

    def validate(self) -> None:
        if self.projection_mode not in (SEQUENTIAL, BATCH):
            raise ValueError(f"unknown projection mode {self.projection_mode!r}")
        if not self.batch_averaging > 0.0:
            raise ValueError("batch averaging coefficient must be positive")
        if self.termination_window < 1:
            raise ValueError("termination window must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.broad_phase not in ("hash", "naive"):
            raise ValueError(f"unknown broad phase {self.broad_phase!r}")


Pose = tuple[float, float, float, float]  # x, y, z, orientation


@dataclass
class EnergyTrace:
    """Per-iteration energies plus the best accepted snapshot.

    ``energies[l]`` is the layout energy after iteration l (index 0 is
    the initial state). ``best_energy`` belongs to the returned snapshot:
    the lowest-energy iterate that also satisfies the hard contact
    constraints, which is not necessarily the global minimum of
    ``energies``.
    """

    energies: list[float] = field(default_factory=list)
    violation_sums: list[dict[str, float]] = field(default_factory=list)
    best_energy: float = math.inf
    best_iteration: int = -1
    best_layout: list[Pose] = field(default_factory=list)
    degenerate_events: int = 0
    settled: bool = False
    restarts: int = 0


class LayoutState:
    """Mutable pose arrays for one synthesis run."""

    __slots__ = ("px", "py", "pz", "theta")

    def __init__(self, px, py, pz, theta):
        self.px = list(px)
        self.py = list(py)
        self.pz = list(pz)
        self.theta = list(theta)

    def snapshot(self) -> list[Pose]:
        return list(zip(self.px, self.py, self.pz, self.theta))

    def restore(self, poses: list[Pose]) -> None:
        for i, (x, y, z, th) in enumerate(poses):
            self.px[i] = x
            self.py[i] = y
            self.pz[i] = z
            self.theta[i] = th

    def copy(self) -> "LayoutState":
        return LayoutState(self.px, self.py, self.pz, self.theta)


class SolveContext:
    """Immutable-per-run view of the scene prepared for fast projection."""

    def __init__(self, scene: Scene):
        scene.validate()
        self.scene = scene
        self.room = scene.room
        self.centroid = scene.room.centroid
        n = len(scene.particles)
        self.n = n
        self.masses = [p.mass for p in scene.particles]
        self.inv_mass = [p.inverse_mass for p in scene.particles]

        self.radius = [0.0] * n
        self.b_diag = [0.0] * n
        self.half_height = [0.0] * n
        self.visual_weight = [0.0] * n
        self.zones: list[list[tuple[int, Vec2, float, float]]] = [[] for _ in range(n)]
        self.reach = [0.0] * n
        self.object_particles: list[int] = []
        for obj in scene.objects:
            i = obj.particle_index
            self.object_particles.append(i)
            self.radius[i] = obj.bbox.bounding_radius
            self.b_diag[i] = obj.bbox.footprint_diagonal
            self.half_height[i] = obj.bbox.half_height
            self.visual_weight[i] = obj.bbox.footprint_area
            for k, region in enumerate(obj.accessibility, start=1):
                if region.enabled:
                    half_side = region.diagonal / (2.0 * math.sqrt(2.0))
                    self.zones[i].append((k, region.local_center, region.diagonal, half_side))
                    self.reach[i] = max(
                        self.reach[i], region.local_center.norm() + 0.5 * region.diagonal
                    )
        self.object_particles.sort()
        self.zone_particles = [i for i in self.object_particles if self.zones[i]]
        self.max_radius = max((self.radius[i] for i in self.object_particles), default=1.0)
        # inflating the broad phase by each accessibility reach lets one
        # candidate-pair pass serve collisions and zone activations alike
        self.broad_radius = [self.radius[i] + self.reach[i] for i in range(n)]
        # cells keyed to the median extent rather than the max: a single
        # oversized object (a stage) must not coarsen everyone's buckets
        spans = sorted(self.broad_radius[i] for i in self.object_particles)
        self.cell_size = 2.0 * spans[len(spans) // 2] if spans else 1.0

        # rigid-group routing
        self.owner = [-1] * n
        self.members_of: dict[int, list[tuple[int, tuple[float, float, float]]]] = {}
        self.group_by_id: dict[str, Group] = {}
        for group in scene.groups:
            self.group_by_id[group.id] = group
            if group.rigidity == RIGID:
                g = group.particle_index
                rows = []
                for k, member_id in enumerate(group.member_object_ids):
                    m = scene.object_by_id(member_id).particle_index
                    self.owner[m] = g
                    rows.append((m, group.member_offsets[k]))
                self.members_of[g] = rows

        # inverse mass used when splitting corrections: rigid members
        # resist with their whole group's mass
        self.proj_w = list(self.inv_mass)
        for g, rows in self.members_of.items():
            for m, _ in rows:
                self.proj_w[m] = self.inv_mass[g]

        self.user_constraints: list[Constraint] = [c.copy() for c in scene.constraints]
        self.user_constraints.extend(group_curve_constraints(scene))
        self.has_wall = {
            c.particles[0] for c in self.user_constraints if c.kind == cn.WALL_DISTANCE
        }
        # a wall-hugging rigid group drags all its members along the wall,
        # so every member joins the wall-ghost bookkeeping
        wall_groups = {self.owner[i] for i in self.has_wall if self.owner[i] >= 0}
        for g, rows in self.members_of.items():
            if g in wall_groups:
                self.has_wall.update(m for m, _ in rows)
        # only objects stacked on another may leave the ground; everything
        # else keeps its authored height
        self.stack_top = {
            c.particles[1] for c in self.user_constraints if c.kind == cn.STACKING
        }
        # contact pushes against any member of a stack move the whole pile:
        # route them to the chain's base object
        parent = {
            c.particles[1]: c.particles[0]
            for c in self.user_constraints
            if c.kind == cn.STACKING
        }
        self.contact_root = list(range(n))
        for i in range(n):
            root, hops = i, 0
            while root in parent and hops < n:
                root = parent[root]
                hops += 1
            self.contact_root[i] = root
        self.stacking_constraints = [
            c for c in self.user_constraints if c.kind == cn.STACKING
        ]
        # objects whose boundary state can still change after the step's
        # boundary pass (corrections routed to a pile base or rigid group
        # can leave members, or the base itself, poking out)
        routed = {i for i in range(n) if self.contact_root[i] != i}
        routed.update(self.contact_root[i] for i in list(routed))
        routed.update(i for i in self.object_particles if self.owner[i] >= 0)
        self.boundary_recheck = sorted(routed & set(self.object_particles))

        # prototypes carrying the stiffness schedule of generated kinds
        self.generated_k = {
            cn.COLLISION: cn.make_constraint(cn.COLLISION, (0, 0)),
            cn.ACCESSIBILITY: cn.make_constraint(cn.ACCESSIBILITY, (0, 0), face=1),
            cn.WALL_GHOST_COLLISION: cn.make_constraint(cn.WALL_GHOST_COLLISION, (0, 0)),
            cn.BOUNDARY: cn.make_constraint(cn.BOUNDARY, (0,)),
        }

        # round-robin interleavings of the authored constraints, one per
        # starting kind; iteration l uses rotation (l-1) mod len(kinds)
        by_kind: dict[str, list[Constraint]] = {}
        for c in self.user_constraints:
            by_kind.setdefault(c.kind, []).append(c)
        kinds = [k for k in cn.KINDS if k in by_kind]
        self.interleavings: list[list[Constraint]] = []
        for start in range(max(1, len(kinds))):
            rotated = kinds[start:] + kinds[:start]
            order: list[Constraint] = []
            row = 0
            remaining = len(self.user_constraints)
            while remaining:
                for kind in rotated:
                    bucket = by_kind[kind]
                    if row < len(bucket):
                        order.append(bucket[row])
                        remaining -= 1
                row += 1
            self.interleavings.append(order)


def group_curve_constraints(scene: Scene) -> list[Constraint]:
    """Member-to-curve attachments for every curve-carrying group,
    ordered along the curve parameter."""
    out = []
    for group in scene.groups:
        if group.curve is None or group.rigidity == RIGID:
            continue
        for member_id in group.member_object_ids:
            m = scene.object_by_id(member_id).particle_index
            out.append(
                cn.make_constraint(
                    cn.GROUP_CURVE,
                    (m, group.particle_index),
                    distance=0.0,
                    group_id=group.id,
                )
            )
    return out


def initialize(scene: Scene, seed: int) -> LayoutState:
    """Random starting poses: positions uniform over the room polygon,
    orientations uniform over the circle. Infinite-mass particles and
    rigid members keep their authored poses; rigid members then follow
    their group."""
    rng = np.random.default_rng(seed)
    room = scene.room
    min_x, min_y, max_x, max_y = room.bounds()
    if not (max_x > min_x and max_y > min_y):
        raise ValueError("room is degenerate")

    ctx_owner = [-1] * len(scene.particles)
    for group in scene.groups:
        if group.rigidity == RIGID:
            for member_id in group.member_object_ids:
                ctx_owner[scene.object_by_id(member_id).particle_index] = group.particle_index

    px, py, pz, theta = [], [], [], []
    for i, particle in enumerate(scene.particles):
        if particle.fixed or ctx_owner[i] >= 0:
            px.append(particle.position.x)
            py.append(particle.position.y)
            pz.append(particle.z)
            theta.append(particle.orientation)
            continue
        for _ in range(10_000):
            x = rng.uniform(min_x, max_x)
            y = rng.uniform(min_y, max_y)
            if room.contains((x, y)):
                break
        else:
            raise RuntimeError("rejection sampling failed; room area is ~0")
        px.append(x)
        py.append(y)
        pz.append(particle.z)
        theta.append(rng.uniform(0.0, 2.0 * math.pi))

    state = LayoutState(px, py, pz, theta)
    for group in scene.groups:
        if group.rigidity == RIGID:
            _refresh_rigid_members(state, scene, group)
    return state


def _refresh_rigid_members(state: LayoutState, scene: Scene, group: Group) -> None:
    g = group.particle_index
    gp = Vec2(state.px[g], state.py[g])
    gth = state.theta[g]
    for k, member_id in enumerate(group.member_object_ids):
        m = scene.object_by_id(member_id).particle_index
        pos, th = group.member_world_pose(k, gp, gth)
        state.px[m] = pos.x
        state.py[m] = pos.y
        state.theta[m] = th


class _Applier:
    """Applies corrections to the state, routing rigid members to their
    group particle and guarding against non-finite poses."""

    def __init__(self, state: LayoutState, ctx: SolveContext):
        self.state = state
        self.ctx = ctx

    def apply(self, corr: Correction, label: str, scale: float = 1.0) -> None:
        st = self.state
        ctx = self.ctx
        i = corr.particle
        target = ctx.owner[i] if ctx.owner[i] >= 0 else i
        x = st.px[target] + corr.dx * scale
        y = st.py[target] + corr.dy * scale
        th = st.theta[target] + corr.dtheta * scale
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(th)):
            raise SolverNumericsError(f"non-finite pose after projecting {label}")
        st.px[target] = x
        st.py[target] = y
        st.theta[target] = th
        if corr.dz:
            z = st.pz[i] + corr.dz * scale
            if not math.isfinite(z):
                raise SolverNumericsError(f"non-finite height after projecting {label}")
            st.pz[i] = z
        if target != i or target in ctx.members_of:
            rows = ctx.members_of.get(target)
            if rows:
                gx, gy, gth = st.px[target], st.py[target], st.theta[target]
                c, s = math.cos(gth), math.sin(gth)
                for m, (dx, dy, dth) in rows:
                    st.px[m] = gx + c * dx - s * dy
                    st.py[m] = gy + s * dx + c * dy
                    st.theta[m] = gth + dth


def _orientation_target(c: Constraint, st: LayoutState) -> float | None:
    i, j = c.particles
    if c.orientation_mode == cn.ORIENT_FACE:
        dx = st.px[j] - st.px[i]
        dy = st.py[j] - st.py[i]
        if dx == 0.0 and dy == 0.0:
            return None
        return math.atan2(dy, dx) + c.angle_offset
    if c.orientation_mode == cn.ORIENT_MATCH:
        return st.theta[j] + c.angle_offset
    return c.angle_target


def _curve_anchor(c: Constraint, st: LayoutState, ctx: SolveContext) -> Vec2:
    group = ctx.group_by_id[c.group_id]
    g = group.particle_index
    world = group.curve.transformed(Vec2(st.px[g], st.py[g]), st.theta[g])
    point, _ = closest_point_on_curve(world, (st.px[c.particles[0]], st.py[c.particles[0]]))
    return point


def project_constraint(
    c: Constraint, st: LayoutState, ctx: SolveContext, tiebreak=None
) -> list[Correction]:
    """Corrections for one constraint at its current stiffness."""
    k = c.stiffness
    px, py, w = st.px, st.py, ctx.proj_w
    kind = c.kind
    if kind == cn.PAIRWISE_DISTANCE:
        i, j = c.particles
        return cn.project_pairwise_distance(
            i, j, (px[i], py[i]), (px[j], py[j]), w[i], w[j], c.distance, k, c.relation, tiebreak
        )
    if kind == cn.FOCAL_POINT:
        i, j = c.particles
        return cn.project_focal_point(
            i, j, (px[i], py[i]), (px[j], py[j]), w[i], w[j], c.distance, k,
            c.relation, c.pin_focal, tiebreak,
        )
    if kind == cn.TRAFFIC_LANE:
        i, j = c.particles
        wj = 0.0 if c.pin_focal else w[j]
        return cn.project_traffic_lane(
            i, j, (px[i], py[i]), (px[j], py[j]), w[i], wj, c.vector, c.distance, k
        )
    if kind == cn.HEAT_POINT:
        if c.point is not None:
            return cn.project_heat_point(c.particles, px, py, ctx.masses, w, c.point, k)
        # no fixed target: the first participant is the (anchored) target
        anchor = c.particles[0]
        return cn.project_heat_point(
            c.particles[1:], px, py, ctx.masses, w, (px[anchor], py[anchor]), k
        )
    if kind == cn.FOCAL_SYMMETRY:
        focal = c.particles[0]
        members = c.particles[1:]
        return cn.project_focal_symmetry(
            members, px, py, ctx.masses, w, (px[focal], py[focal]), c.vector, k
        )
    if kind == cn.VISUAL_BALANCE:
        return cn.project_visual_balance(
            c.particles, px, py, ctx.visual_weight, w, ctx.centroid, k
        )
    if kind == cn.WALL_DISTANCE:
        i = c.particles[0]
        return cn.project_wall_distance(i, (px[i], py[i]), w[i], ctx.room, c.distance, k, c.relation)
    if kind == cn.PAIRWISE_ORIENTATION:
        i, j = c.particles
        return cn.project_pairwise_orientation(
            i, j, st.theta[i], _orientation_target(c, st), st.theta[j], None, w[i], w[j], k
        )
    if kind == cn.WALL_ORIENTATION:
        i = c.particles[0]
        return cn.project_wall_orientation(
            i, st.theta[i], (px[i], py[i]), w[i], ctx.room, c.angle_offset, k
        )
    if kind == cn.STACKING:
        bottom, top = c.particles
        w_bottom = w[bottom] if bottom in ctx.stack_top else 0.0
        return cn.project_stacking(
            bottom, top, (px[bottom], py[bottom]), (px[top], py[top]),
            st.pz[bottom], st.pz[top], w_bottom, w[top], c.height_gap, k,
        )
    if kind == cn.GROUP_CURVE:
        m = c.particles[0]
        anchor = _curve_anchor(c, st, ctx)
        return cn.project_pairwise_distance(
            m, c.particles[1], (px[m], py[m]), anchor, w[m], 0.0, 0.0, k, cn.EQUALITY, tiebreak
        )
    if kind == cn.COLLISION:
        i, j = c.particles
        return cn.project_collision(
            i, j, (px[i], py[i]), (px[j], py[j]), w[i], w[j],
            ctx.radius[i], ctx.radius[j], k, tiebreak,
        )
    if kind == cn.ACCESSIBILITY:
        i, j = c.particles
        region = next((z for z in ctx.zones[j] if z[0] == c.face), None)
        if region is None:
            return []
        _, local_center, diagonal, _ = region
        center = _zone_world_center(st, j, local_center)
        return cn.project_accessibility(
            i, j, (px[i], py[i]), w[i], w[j], center, st.theta[j], diagonal,
            ctx.b_diag[i], ctx.radius[i], k, tiebreak,
        )
    if kind == cn.WALL_GHOST_COLLISION:
        i, j = c.particles
        gi, _, _ = nearest_wall_point(ctx.room, (px[i], py[i]))
        gj, _, _ = nearest_wall_point(ctx.room, (px[j], py[j]))
        return cn.project_wall_ghost_collision(
            i, j, gi, gj, w[i], w[j], ctx.radius[i], ctx.radius[j], k, tiebreak
        )
    if kind == cn.BOUNDARY:
        i = c.particles[0]
        return cn.project_boundary(i, (px[i], py[i]), w[i], ctx.radius[i], ctx.room, k)
    raise ValueError(f"unhandled constraint kind {kind!r}")


def _zone_world_center(st: LayoutState, j: int, local_center: Vec2) -> tuple[float, float]:
    c, s = math.cos(st.theta[j]), math.sin(st.theta[j])
    lx, ly = local_center
    return (st.px[j] + c * lx - s * ly, st.py[j] + s * lx + c * ly)


# ---------------------------------------------------------------------------
# contact generation


def _z_overlaps(st: LayoutState, ctx: SolveContext, i: int, j: int) -> bool:
    lo_i = st.pz[i] - ctx.half_height[i]
    hi_i = st.pz[i] + ctx.half_height[i]
    lo_j = st.pz[j] - ctx.half_height[j]
    hi_j = st.pz[j] + ctx.half_height[j]
    return lo_i < hi_j - 1e-12 and lo_j < hi_i - 1e-12


def build_hash(st: LayoutState, ctx: SolveContext, broad_phase: str = "hash"):
    if broad_phase == "naive":
        return NaiveIndex(ctx.object_particles)
    # insertion extents carry the accessibility reach so zone pairs also
    # share cells; soundness holds for any cell size
    return rebuild(
        st.px, st.py, ctx.broad_radius, ctx.object_particles,
        cell_size=ctx.cell_size,
    )


def generate_contacts(
    st: LayoutState,
    ctx: SolveContext,
    grid: SpatialHash,
    with_accessibility: bool = True,
) -> tuple[list[tuple[int, int]], list[tuple[int, int, int]], list[tuple[int, int]]]:
    """(collision pairs, accessibility activations, wall-ghost pairs) for
    the current poses.

    Pairs inside one rigid group and pairs separated vertically never
    collide. Ghost pairs are the colliding pairs whose two objects both
    carry wall-distance constraints.
    """
    collisions: list[tuple[int, int]] = []
    ghosts: list[tuple[int, int]] = []
    activations: list[tuple[int, int, int]] = []
    if not ctx.scene.collisions_enabled:
        return collisions, activations, ghosts

    px, py = st.px, st.py
    pz, half_height = st.pz, ctx.half_height
    radius, reach, owner, zones = ctx.radius, ctx.reach, ctx.owner, ctx.zones
    has_wall = ctx.has_wall
    zone_cache: dict[int, tuple] = {}

    def owner_faces(j: int) -> tuple:
        cached = zone_cache.get(j)
        if cached is None:
            cj, sj = math.cos(st.theta[j]), math.sin(st.theta[j])
            xj, yj = px[j], py[j]
            cached = (
                cj,
                sj,
                [
                    (face, xj + cj * lc.x - sj * lc.y, yj + sj * lc.x + cj * lc.y, half_side)
                    for face, lc, _, half_side in zones[j]
                ],
            )
            zone_cache[j] = cached
        return cached

    def activate(i: int, j: int) -> None:
        xi, yi = px[i], py[i]
        ri = radius[i]
        span = reach[j] + ri
        dx = xi - px[j]
        dy = yi - py[j]
        if dx * dx + dy * dy > span * span:
            return
        cj, sj, faces = owner_faces(j)
        for face, cx, cy, half_side in faces:
            relx = xi - cx
            rely = yi - cy
            lx = cj * relx + sj * rely
            ly = -sj * relx + cj * rely
            qx = half_side if lx > half_side else (-half_side if lx < -half_side else lx)
            qy = half_side if ly > half_side else (-half_side if ly < -half_side else ly)
            dqx = lx - qx
            dqy = ly - qy
            if dqx * dqx + dqy * dqy <= ri * ri:
                activations.append((i, j, face))

    for i, j in grid.candidate_pairs():
        if owner[i] >= 0 and owner[i] == owner[j]:
            continue
        lo = pz[i] - half_height[i]
        hi = pz[i] + half_height[i]
        lo_j = pz[j] - half_height[j]
        hi_j = pz[j] + half_height[j]
        if not (lo < hi_j - 1e-12 and lo_j < hi - 1e-12):
            continue
        dx = px[i] - px[j]
        dy = py[i] - py[j]
        d2 = dx * dx + dy * dy
        rsum = radius[i] + radius[j]
        if d2 < rsum * rsum:
            collisions.append((i, j))
            if i in has_wall and j in has_wall:
                ghosts.append((i, j))
        if with_accessibility:
            if zones[j]:
                activate(i, j)
            if zones[i]:
                activate(j, i)
    return collisions, activations, ghosts


def generate_collision_constraints(
    st: LayoutState, ctx: SolveContext, grid: SpatialHash | None = None
) -> list[Constraint]:
    """Constraint records for the current poses' contacts: one collision
    constraint per overlapping pair (i < j, deduplicated) and one
    accessibility constraint per activated zone. Regenerated every
    iteration, since the pairs change as objects move."""
    if grid is None:
        grid = build_hash(st, ctx)
    collisions, activations, _ = generate_contacts(st, ctx, grid)
    out = [cn.make_constraint(cn.COLLISION, pair) for pair in collisions]
    out.extend(
        cn.make_constraint(cn.ACCESSIBILITY, (i, j), face=face)
        for i, j, face in activations
    )
    return out


# ---------------------------------------------------------------------------
# energy


def _user_violation(c: Constraint, st: LayoutState, ctx: SolveContext) -> float:
    px, py = st.px, st.py
    kind = c.kind
    if kind in (cn.PAIRWISE_DISTANCE, cn.FOCAL_POINT):
        i, j = c.particles
        C = math.hypot(px[i] - px[j], py[i] - py[j]) - c.distance
    elif kind == cn.TRAFFIC_LANE:
        i, j = c.particles
        qx, qy = cn.lane_projection_point((px[j], py[j]), c.vector, (px[i], py[i]))
        C = math.hypot(px[i] - qx, py[i] - qy) - c.distance
    elif kind == cn.HEAT_POINT:
        if c.point is not None:
            members, tx, ty = c.particles, c.point.x, c.point.y
        else:
            anchor = c.particles[0]
            members, tx, ty = c.particles[1:], px[anchor], py[anchor]
        cx, cy, _ = cn.weighted_center(members, px, py, ctx.masses)
        C = 0.5 * ((cx - tx) ** 2 + (cy - ty) ** 2)
    elif kind == cn.FOCAL_SYMMETRY:
        focal = c.particles[0]
        members = c.particles[1:]
        cx, cy, _ = cn.weighted_center(members, px, py, ctx.masses)
        vx, vy = c.vector
        t = ((cx - px[focal]) * vx + (cy - py[focal]) * vy) / (vx * vx + vy * vy)
        t = max(0.0, t)
        C = 0.5 * ((cx - px[focal] - t * vx) ** 2 + (cy - py[focal] - t * vy) ** 2)
    elif kind == cn.VISUAL_BALANCE:
        cx, cy, _ = cn.weighted_center(c.particles, px, py, ctx.visual_weight)
        C = 0.5 * ((cx - ctx.centroid.x) ** 2 + (cy - ctx.centroid.y) ** 2)
    elif kind == cn.WALL_DISTANCE:
        i = c.particles[0]
        q, _, _ = nearest_wall_point(ctx.room, (px[i], py[i]))
        C = math.hypot(px[i] - q.x, py[i] - q.y) - c.distance
    elif kind == cn.PAIRWISE_ORIENTATION:
        target = _orientation_target(c, st)
        if target is None:
            return 0.0
        C = abs(wrap_angle(target - st.theta[c.particles[0]]))
    elif kind == cn.WALL_ORIENTATION:
        i = c.particles[0]
        target = cn.wall_orientation_target(ctx.room, (px[i], py[i]), st.theta[i], c.angle_offset)
        C = abs(wrap_angle(target - st.theta[i]))
    elif kind == cn.STACKING:
        bottom, top = c.particles
        Cz = st.pz[top] - (st.pz[bottom] + c.height_gap)
        C = math.sqrt(Cz * Cz + (px[top] - px[bottom]) ** 2 + (py[top] - py[bottom]) ** 2)
    elif kind == cn.GROUP_CURVE:
        m = c.particles[0]
        anchor = _curve_anchor(c, st, ctx)
        C = math.hypot(px[m] - anchor.x, py[m] - anchor.y)
    else:
        return 0.0
    if c.relation == cn.INEQUALITY:
        return max(0.0, -C)
    return abs(C)


def evaluate_energy(
    st: LayoutState,
    ctx: SolveContext,
    contacts: tuple | None = None,
    grid: SpatialHash | None = None,
    broad_phase: str = "hash",
) -> tuple[float, dict[str, float], float, float]:
    """Layout energy sqrt(sum of weight * C^2) plus bookkeeping.

    Returns (energy, per-kind violation sums, worst circle overlap,
    worst boundary violation). Satisfied inequalities contribute zero;
    the sums dict carries only the kinds that violated.
    """
    sums: dict[str, float] = {}
    total = 0.0
    for c in ctx.user_constraints:
        v = _user_violation(c, st, ctx)
        if v:
            sums[c.kind] = sums.get(c.kind, 0.0) + v
            total += c.weight * v * v

    # with contacts handed over from a just-finished step, the boundary
    # pass has already contained every un-routed object, so only routed
    # ones need a re-measure
    boundary_particles = ctx.object_particles
    if contacts is None:
        if grid is None:
            grid = build_hash(st, ctx, broad_phase)
        contacts = generate_contacts(st, ctx, grid)
    else:
        boundary_particles = ctx.boundary_recheck
    collisions, activations, _ = contacts

    w_col = cn.DEFAULT_WEIGHTS[cn.COLLISION]
    max_overlap = 0.0
    for i, j in collisions:
        gap = math.hypot(st.px[i] - st.px[j], st.py[i] - st.py[j]) - (
            ctx.radius[i] + ctx.radius[j]
        )
        v = max(0.0, -gap)
        if v:
            sums[cn.COLLISION] = sums.get(cn.COLLISION, 0.0) + v
            total += w_col * v * v
            max_overlap = max(max_overlap, v)

    w_acc = cn.DEFAULT_WEIGHTS[cn.ACCESSIBILITY]
    for i, j, face in activations:
        region = next(z for z in ctx.zones[j] if z[0] == face)
        _, local_center, diagonal, _ = region
        center = _zone_world_center(st, j, local_center)
        C = math.hypot(st.px[i] - center[0], st.py[i] - center[1]) - (
            ctx.b_diag[i] + diagonal
        )
        v = max(0.0, -C)
        if v:
            sums[cn.ACCESSIBILITY] = sums.get(cn.ACCESSIBILITY, 0.0) + v
            total += w_acc * v * v

    w_bnd = cn.DEFAULT_WEIGHTS[cn.BOUNDARY]
    max_boundary = 0.0
    for i in boundary_particles:
        v = cn.boundary_violation(ctx.room, (st.px[i], st.py[i]), ctx.radius[i])
        if v:
            sums[cn.BOUNDARY] = sums.get(cn.BOUNDARY, 0.0) + v
            total += w_bnd * v * v
            max_boundary = max(max_boundary, v)

    return math.sqrt(total), sums, max_overlap, max_boundary


# ---------------------------------------------------------------------------
# stepping


def _interleaved(ctx: SolveContext, iteration: int, interleave: bool) -> list[Constraint]:
    if not interleave or not ctx.user_constraints:
        return ctx.user_constraints
    return ctx.interleavings[(iteration - 1) % len(ctx.interleavings)]


def step(
    st: LayoutState,
    ctx: SolveContext,
    iteration: int,
    config: SolverConfig,
    tiebreak=None,
) -> tuple:
    """One solver iteration; returns the contacts it generated so the
    caller can reuse them for the energy evaluation."""
    applier = _Applier(st, ctx)
    for c in ctx.user_constraints:
        c.stiffness = cn.update_stiffness(c, iteration)
    for proto in ctx.generated_k.values():
        proto.stiffness = cn.update_stiffness(proto, iteration)

    ordered = _interleaved(ctx, iteration, config.interleave)
    batching = config.projection_mode == BATCH
    if batching:
        _project_batch(ordered, st, ctx, applier, config.batch_averaging, tiebreak)
    else:
        for c in ordered:
            for corr in project_constraint(c, st, ctx, tiebreak):
                applier.apply(corr, c.kind)

    grid = build_hash(st, ctx, config.broad_phase)
    contacts = generate_contacts(st, ctx, grid)
    collisions, activations, ghosts = contacts
    k_col = ctx.generated_k[cn.COLLISION].stiffness
    k_acc = ctx.generated_k[cn.ACCESSIBILITY].stiffness
    k_ghost = ctx.generated_k[cn.WALL_GHOST_COLLISION].stiffness

    generated: list[Correction] = []
    root = ctx.contact_root

    def emit(corrs: list[Correction], label: str) -> None:
        for corr in corrs:
            if root[corr.particle] != corr.particle:
                corr = corr._replace(particle=root[corr.particle])
            if batching:
                generated.append(corr)
            else:
                applier.apply(corr, label)

    ghost_set = set(ghosts)
    for i, j in collisions:
        emit(
            cn.project_collision(
                i, j, (st.px[i], st.py[i]), (st.px[j], st.py[j]),
                ctx.proj_w[i], ctx.proj_w[j], ctx.radius[i], ctx.radius[j], k_col, tiebreak,
            ),
            cn.COLLISION,
        )
        if (i, j) in ghost_set:
            gi, _, _ = nearest_wall_point(ctx.room, (st.px[i], st.py[i]))
            gj, _, _ = nearest_wall_point(ctx.room, (st.px[j], st.py[j]))
            emit(
                cn.project_wall_ghost_collision(
                    i, j, gi, gj, ctx.proj_w[i], ctx.proj_w[j],
                    ctx.radius[i], ctx.radius[j], k_ghost, tiebreak,
                ),
                cn.WALL_GHOST_COLLISION,
            )
    for i, j, face in activations:
        region = next(z for z in ctx.zones[j] if z[0] == face)
        _, local_center, diagonal, _ = region
        center = _zone_world_center(st, j, local_center)
        emit(
            cn.project_accessibility(
                i, j, (st.px[i], st.py[i]), ctx.proj_w[i], ctx.proj_w[j], center,
                st.theta[j], diagonal, ctx.b_diag[i], ctx.radius[i], k_acc, tiebreak,
            ),
            cn.ACCESSIBILITY,
        )
    if batching and generated:
        _apply_batched(generated, applier, config.batch_averaging)

    # boundary containment gets the final word, always at full stiffness
    boundary_corrs: list[Correction] = []
    for i in ctx.object_particles:
        corrs = cn.project_boundary(
            i, (st.px[i], st.py[i]), ctx.proj_w[i], ctx.radius[i], ctx.room, 1.0
        )
        for corr in corrs:
            if root[corr.particle] != corr.particle:
                corr = corr._replace(particle=root[corr.particle])
            if batching:
                boundary_corrs.append(corr)
            else:
                applier.apply(corr, cn.BOUNDARY)
    if batching and boundary_corrs:
        _apply_batched(boundary_corrs, applier, config.batch_averaging)

    # stacked piles are hard relations too: re-align them after contacts
    # so evaluation never sees a scattered stack
    for c in ctx.stacking_constraints:
        for corr in project_constraint(c, st, ctx, tiebreak):
            applier.apply(corr, cn.STACKING)

    for i in range(ctx.n):
        st.theta[i] = normalize_angle(st.theta[i])
    return contacts


def _project_batch(ordered, st, ctx, applier, omega, tiebreak) -> None:
    corrections: list[Correction] = []
    for c in ordered:
        corrections.extend(project_constraint(c, st, ctx, tiebreak))
    _apply_batched(corrections, applier, omega)


def _apply_batched(corrections: list[Correction], applier: _Applier, omega: float) -> None:
    acc: dict[int, list[float]] = {}
    for corr in corrections:
        row = acc.setdefault(corr.particle, [0.0, 0.0, 0.0, 0.0, 0.0])
        row[0] += corr.dx
        row[1] += corr.dy
        row[2] += corr.dz
        row[3] += corr.dtheta
        row[4] += 1.0
    for particle in sorted(acc):
        sx, sy, sz, sth, count = acc[particle]
        scale = omega / count
        applier.apply(Correction(particle, sx, sy, sz, sth), "batched corrections", scale)


# ---------------------------------------------------------------------------
# full synthesis


def _settle_hard_constraints(
    st: LayoutState, ctx: SolveContext, config: SolverConfig, tiebreak=None
) -> bool:
    """Project only collisions (with wall-ghost assists), stacking, and
    boundary containment at full stiffness until the layout is clean,
    then re-snap orientation constraints (which never move positions).
    Returns True when every hard violation falls below 1e-9."""
    applier = _Applier(st, ctx)
    root = ctx.contact_root
    k = 1.0
    for sweep in range(config.settle_max_sweeps):
        for c in ctx.stacking_constraints:
            for corr in project_constraint(c, st, ctx, tiebreak):
                applier.apply(corr, cn.STACKING)
        grid = build_hash(st, ctx, config.broad_phase)
        collisions, _, ghosts = generate_contacts(st, ctx, grid, with_accessibility=False)
        ghost_set = set(ghosts)
        if collisions and sweep:
            # rotating the sweep order breaks Gauss-Seidel limit cycles
            offset = sweep % len(collisions)
            collisions = collisions[offset:] + collisions[:offset]
        dirty = False
        for i, j in collisions:
            # the hair of extra separation keeps resolved contacts from
            # re-arming off boundary clamps and float noise
            corrs = cn.project_collision(
                i, j, (st.px[i], st.py[i]), (st.px[j], st.py[j]),
                ctx.proj_w[i], ctx.proj_w[j],
                ctx.radius[i] + 5e-4, ctx.radius[j] + 5e-4, k, tiebreak,
            )
            if corrs:
                dirty = True
                for corr in corrs:
                    applier.apply(corr._replace(particle=root[corr.particle]), cn.COLLISION)
                if (i, j) in ghost_set or (
                    cn.boundary_violation(ctx.room, (st.px[i], st.py[i]), ctx.radius[i] + 0.02) > 0.0
                    and cn.boundary_violation(ctx.room, (st.px[j], st.py[j]), ctx.radius[j] + 0.02) > 0.0
                ):
                    # both near a wall: also separate their wall ghost
                    # points so the pair slides apart along the wall
                    gi, _, _ = nearest_wall_point(ctx.room, (st.px[i], st.py[i]))
                    gj, _, _ = nearest_wall_point(ctx.room, (st.px[j], st.py[j]))
                    for corr in cn.project_wall_ghost_collision(
                        i, j, gi, gj, ctx.proj_w[i], ctx.proj_w[j],
                        ctx.radius[i], ctx.radius[j], k, tiebreak,
                    ):
                        applier.apply(corr._replace(particle=root[corr.particle]), cn.WALL_GHOST_COLLISION)
        for i in ctx.object_particles:
            corrs = cn.project_boundary(
                i, (st.px[i], st.py[i]), ctx.proj_w[i], ctx.radius[i], ctx.room, 1.0
            )
            if corrs:
                dirty = True
                for corr in corrs:
                    applier.apply(corr._replace(particle=root[corr.particle]), cn.BOUNDARY)
        if not dirty:
            break
    # settling may have slid objects along or across walls, so their
    # orientation targets can be stale; for free particles an angular
    # snap cannot move positions, so it preserves feasibility (rotating
    # a rigid group would swing its members, so those are left alone)
    for c in ctx.user_constraints:
        if c.kind in (cn.PAIRWISE_ORIENTATION, cn.WALL_ORIENTATION):
            target = c.particles[0]
            if ctx.owner[target] >= 0 or target in ctx.members_of:
                continue
            saved = c.stiffness
            c.stiffness = 1.0
            for corr in project_constraint(c, st, ctx, tiebreak):
                applier.apply(corr, c.kind)
            c.stiffness = saved
    for i in range(ctx.n):
        st.theta[i] = normalize_angle(st.theta[i])
    _, _, max_overlap, max_boundary = evaluate_energy(st, ctx)
    return max_overlap <= 1e-9 and max_boundary <= 1e-9


def synthesize(scene: Scene, config: SolverConfig | None = None) -> tuple[list[Pose], EnergyTrace]:
    """Run the full synthesis loop on a scene.

    Iterates until the iteration budget is spent or the minimum energy
    has not improved significantly for the configured window, then
    returns the best hard-feasible snapshot (a final hard-constraint
    settling pass provides one). A run whose iterates cannot be settled
    collision-free (a topological tangle) deterministically restarts
    from a reseeded initialization, up to three times.
    """
    config = config or SolverConfig()
    config.validate()
    ctx = SolveContext(scene)
    attempt_seed = config.seed
    for attempt in range(4):
        snapshot, trace, feasible = _synthesize_attempt(scene, ctx, config, attempt_seed)
        trace.restarts = attempt
        if feasible:
            return snapshot, trace
        attempt_seed = (config.seed ^ ((attempt + 1) * 0x9E3779B9)) & 0x7FFFFFFF
        if attempt < 3:
            log.warning("layout could not be settled collision-free; restarting")
    return snapshot, trace


def _synthesize_attempt(
    scene: Scene, ctx: SolveContext, config: SolverConfig, seed: int
) -> tuple[list[Pose], EnergyTrace, bool]:
    rng = np.random.default_rng(seed ^ 0x5EED)
    trace = EnergyTrace()

    def tiebreak() -> tuple[float, float]:
        trace.degenerate_events += 1
        angle = rng.uniform(0.0, 2.0 * math.pi)
        return math.cos(angle), math.sin(angle)

    st = initialize(scene, seed)
    energy, sums, max_overlap, max_boundary = evaluate_energy(st, ctx)
    trace.energies.append(energy)
    trace.violation_sums.append(sums)
    initial_energy = energy if energy > 0.0 else 1.0

    tol = config.feasibility_tolerance
    candidates: list[tuple[float, int, list[Pose]]] = [(energy, 0, st.snapshot())]
    best_any = math.inf
    best_feasible = math.inf
    best_feasible_iter = -1
    best_feasible_snapshot: list[Pose] | None = None
    if max_overlap <= tol and max_boundary <= tol:
        best_feasible = energy
        best_feasible_iter = 0
        best_feasible_snapshot = st.snapshot()

    stall = 0
    for iteration in range(1, config.max_iterations + 1):
        # the step's own contact lists price this iteration's energy; a
        # fresh regeneration double-checks any new best-feasible candidate
        contacts = step(st, ctx, iteration, config, tiebreak)
        energy, sums, max_overlap, max_boundary = evaluate_energy(st, ctx, contacts=contacts)
        if max_overlap <= tol and max_boundary <= tol and energy < best_feasible:
            energy, sums, max_overlap, max_boundary = evaluate_energy(
                st, ctx, broad_phase=config.broad_phase
            )
            if max_overlap <= tol and max_boundary <= tol and energy < best_feasible:
                best_feasible = energy
                best_feasible_iter = iteration
                best_feasible_snapshot = st.snapshot()
        trace.energies.append(energy)
        trace.violation_sums.append(sums)
        if energy < best_any:
            # asymptotic stiffness decay polishes the minimum forever, so
            # progress for the stall window means a 0.1% drop (the
            # annealing baseline's threshold) or one visible at the
            # problem's initial energy scale
            if best_any == math.inf or best_any - energy > max(
                1e-3 * best_any, 1e-4 * initial_energy
            ):
                stall = 0
            else:
                stall += 1
            best_any = energy
        else:
            stall += 1
        if energy < candidates[-1][0] or len(candidates) < _SETTLE_CANDIDATES:
            candidates.append((energy, iteration, st.snapshot()))
            candidates.sort(key=lambda row: row[0])
            del candidates[_SETTLE_CANDIDATES:]
        if stall >= config.termination_window:
            break

    # settle the lowest-energy iterates so the returned layout is
    # hard-feasible, and keep whichever settles best
    settled_best: tuple[float, list[Pose]] | None = None
    for candidate_energy, _, snapshot in candidates:
        if settled_best is not None and settled_best[0] <= candidate_energy:
            break  # settling cannot beat its own starting energy by much
        st.restore(snapshot)
        ok = _settle_hard_constraints(st, ctx, config, tiebreak)
        energy, _, _, _ = evaluate_energy(st, ctx)
        if ok and (settled_best is None or energy < settled_best[0]):
            settled_best = (energy, st.snapshot())
    if settled_best is None:
        # no candidate settled fully; keep the least-violating attempt
        st.restore(candidates[0][2])
        _settle_hard_constraints(st, ctx, config, tiebreak)
        energy, _, _, _ = evaluate_energy(st, ctx)
        settled_best = (energy, st.snapshot())

    st.restore(settled_best[1])
    energy, sums, max_overlap, max_boundary = evaluate_energy(st, ctx)
    trace.energies.append(energy)
    trace.violation_sums.append(sums)
    trace.settled = True
    settle_iter = len(trace.energies) - 1
    if max_overlap <= tol and max_boundary <= tol and energy < best_feasible:
        best_feasible = energy
        best_feasible_iter = settle_iter
        best_feasible_snapshot = st.snapshot()

    feasible = best_feasible_snapshot is not None
    if not feasible:
        best_feasible = energy
        best_feasible_iter = settle_iter
        best_feasible_snapshot = st.snapshot()

    trace.best_energy = best_feasible
    trace.best_iteration = best_feasible_iter
    trace.best_layout = best_feasible_snapshot
    return best_feasible_snapshot, trace, feasible
