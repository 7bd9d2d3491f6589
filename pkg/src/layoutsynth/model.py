"""Scene data model: particles, objects, groups, rooms.

Everything here is value-semantic. The solver never mutates a Scene; it
reads the structure and keeps its own pose state, so copies of a Scene can
be handed to independent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .geometry import (
    Curve,
    Vec2,
    closest_point_on_segment,
    normalize_angle,
    point_in_polygon,
    polygon_centroid,
    polygon_is_simple,
    polygon_signed_area,
)

INFINITE = math.inf

RIGID = "rigid"
NONRIGID = "nonrigid"

# accessibility face order; index k-1 into FACES gives the face name
FACES = ("back", "left", "front", "right")


@dataclass
class Particle:
    """Oriented point mass standing in for one object (or one group).

    ``mass`` may be the sentinel ``INFINITE``, in which case the inverse
    mass is exactly zero and the particle never receives corrections.
    """

    position: Vec2
    z: float = 0.0
    orientation: float = 0.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.position.is_finite():
            raise ValueError("particle position must be finite")
        if self.mass != INFINITE and not self.mass > 0.0:
            raise ValueError(f"mass must be positive or INFINITE, got {self.mass}")
        self.orientation = normalize_angle(self.orientation)

    @property
    def inverse_mass(self) -> float:
        return 0.0 if self.mass == INFINITE else 1.0 / self.mass

    @property
    def fixed(self) -> bool:
        return self.mass == INFINITE


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in the object's local frame, given as half sizes."""

    half_extents: Vec2
    half_height: float

    def __post_init__(self):
        if not (self.half_extents.x > 0 and self.half_extents.y > 0 and self.half_height > 0):
            raise ValueError("bounding box extents must be positive")

    @property
    def footprint_diagonal(self) -> float:
        return 2.0 * math.hypot(self.half_extents.x, self.half_extents.y)

    @property
    def bounding_radius(self) -> float:
        return 0.5 * self.footprint_diagonal

    @property
    def height(self) -> float:
        return 2.0 * self.half_height

    @property
    def volume(self) -> float:
        return 8.0 * self.half_extents.x * self.half_extents.y * self.half_height

    @property
    def footprint_area(self) -> float:
        return 4.0 * self.half_extents.x * self.half_extents.y


def mass_from_bbox(bbox: BoundingBox, density: float = 1.0) -> float:
    """Mass of an object as density times bounding-box volume."""
    volume = bbox.volume
    if volume <= 0.0:
        raise ValueError("cannot derive mass from a zero-volume box")
    return density * volume


@dataclass(frozen=True)
class AccessRegion:
    """Clearance zone attached to one face of an object.

    ``local_center`` is the zone's center in the object frame;
    ``diagonal`` is the ground diagonal of the clearance cuboid. A zero
    diagonal disables the face.
    """

    local_center: Vec2
    diagonal: float = 0.0

    def __post_init__(self):
        if self.diagonal < 0.0:
            raise ValueError("accessibility diagonal must be >= 0")

    @property
    def enabled(self) -> bool:
        return self.diagonal > 0.0

    def world_center(self, position: Vec2, orientation: float) -> Vec2:
        c, s = math.cos(orientation), math.sin(orientation)
        lx, ly = self.local_center
        return Vec2(position.x + c * lx - s * ly, position.y + s * lx + c * ly)


def _disabled_regions() -> tuple[AccessRegion, ...]:
    return tuple(AccessRegion(Vec2(0.0, 0.0), 0.0) for _ in FACES)


@dataclass
class LayoutObject:
    id: str
    label: str
    particle_index: int
    bbox: BoundingBox
    accessibility: tuple[AccessRegion, ...] = field(default_factory=_disabled_regions)

    def __post_init__(self):
        if len(self.accessibility) != 4:
            raise ValueError("objects carry exactly four accessibility regions")

    def footprint_corners(self, position: Vec2, orientation: float) -> list[Vec2]:
        hx, hy = self.bbox.half_extents
        c, s = math.cos(orientation), math.sin(orientation)
        corners = []
        for lx, ly in ((hx, hy), (-hx, hy), (-hx, -hy), (hx, -hy)):
            corners.append(Vec2(position.x + c * lx - s * ly, position.y + s * lx + c * ly))
        return corners


@dataclass
class Group:
    """A set of member objects tied to one oriented group particle.

    Rigid groups store fixed member offsets (dx, dy, dtheta) in the group
    frame; member world poses always equal group pose composed with the
    offset. Nonrigid groups may carry a placement curve, expressed in the
    group frame, along which members are constrained; ``member_ts`` orders
    members along the curve.
    """

    id: str
    particle_index: int
    member_object_ids: tuple[str, ...]
    rigidity: str = NONRIGID
    curve: Optional[Curve] = None
    member_offsets: Optional[tuple[tuple[float, float, float], ...]] = None
    member_ts: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.rigidity not in (RIGID, NONRIGID):
            raise ValueError(f"unknown rigidity {self.rigidity!r}")
        if self.rigidity == RIGID:
            if self.member_offsets is None or len(self.member_offsets) != len(self.member_object_ids):
                raise ValueError("rigid groups need one offset per member")
        if self.curve is not None:
            self.curve.validate()
            if self.member_ts is not None:
                if len(self.member_ts) != len(self.member_object_ids):
                    raise ValueError("curve groups need one t per member")
                if any(b <= a for a, b in zip(self.member_ts, self.member_ts[1:])):
                    raise ValueError("curve coordinates must increase with member order")

    def member_world_pose(self, k: int, group_pos: Vec2, group_theta: float) -> tuple[Vec2, float]:
        dx, dy, dth = self.member_offsets[k]
        c, s = math.cos(group_theta), math.sin(group_theta)
        return (
            Vec2(group_pos.x + c * dx - s * dy, group_pos.y + s * dx + c * dy),
            normalize_angle(group_theta + dth),
        )


@dataclass
class Room:
    """Bounded region whose counterclockwise boundary polygon is the walls."""

    boundary: list[Vec2]

    def __post_init__(self):
        self.boundary = [Vec2(float(p[0]), float(p[1])) for p in self.boundary]
        if len(self.boundary) < 3:
            raise ValueError("room boundary needs at least three vertices")
        if not polygon_is_simple(self.boundary):
            raise ValueError("room boundary must be a simple polygon")
        if polygon_signed_area(self.boundary) < 0.0:
            self.boundary.reverse()
        self._wall_pairs = [
            (self.boundary[i], self.boundary[(i + 1) % len(self.boundary)])
            for i in range(len(self.boundary))
        ]
        # flat per-wall scalars for the hot paths:
        # (ax, ay, dx, dy, 1/len^2, inward nx, inward ny, tangent angle)
        self._wall_data = []
        for a, b in self._wall_pairs:
            dx = b.x - a.x
            dy = b.y - a.y
            length = math.hypot(dx, dy)
            if length <= 0.0:
                raise ValueError("room boundary has a zero-length wall")
            nx, ny = -dy / length, dx / length
            tangent = normalize_angle(math.atan2(ny, nx) + 0.5 * math.pi)
            self._wall_data.append((a.x, a.y, dx, dy, 1.0 / (length * length), nx, ny, tangent))
        # axis-aligned rectangles (the common case) get a bounds-only
        # containment test
        xs = {v.x for v in self.boundary}
        ys = {v.y for v in self.boundary}
        self._rect = None
        if len(self.boundary) == 4 and len(xs) == 2 and len(ys) == 2:
            self._rect = (min(xs), min(ys), max(xs), max(ys))

    @property
    def centroid(self) -> Vec2:
        return polygon_centroid(self.boundary)

    @property
    def area(self) -> float:
        return polygon_signed_area(self.boundary)

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.boundary]
        ys = [v.y for v in self.boundary]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, p) -> bool:
        if self._rect is not None:
            x0, y0, x1, y1 = self._rect
            return x0 <= p[0] <= x1 and y0 <= p[1] <= y1
        return point_in_polygon(self.boundary, p)

    def walls(self) -> list[tuple[Vec2, Vec2]]:
        return self._wall_pairs


def nearest_wall_point(room: Room, p) -> tuple[Vec2, Vec2, float]:
    """Closest boundary point to p, the wall's inward normal, and the
    wall tangent angle.

    Ties go to the first wall segment in storage order. The CCW boundary
    keeps the interior left of the travel direction, so the inward normal
    is the travel direction rotated a quarter turn counterclockwise; the
    tangent angle is the normal rotated another quarter turn, so an
    object parallel to the wall at x=0 of a counterclockwise room reports
    a tangent of pi/2.
    """
    px, py = p[0], p[1]
    best_d2 = math.inf
    best = None
    best_q = (0.0, 0.0)
    for wall in room._wall_data:
        ax, ay, dx, dy, inv_len2, nx, ny, tangent = wall
        t = ((px - ax) * dx + (py - ay) * dy) * inv_len2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx = ax + t * dx
        qy = ay + t * dy
        ex = px - qx
        ey = py - qy
        d2 = ex * ex + ey * ey
        if d2 < best_d2 - 1e-15:
            best_d2 = d2
            best = wall
            best_q = (qx, qy)
    return Vec2(*best_q), Vec2(best[5], best[6]), best[7]


def boundary_clearance(room: Room, p) -> float:
    """Signed distance from p to the boundary: positive inside."""
    d = min(
        math.hypot(q.x - p[0], q.y - p[1])
        for q, _ in (closest_point_on_segment(a, b, p) for a, b in room.walls())
    )
    return d if room.contains(p) else -d


@dataclass
class Scene:
    room: Room
    objects: list[LayoutObject] = field(default_factory=list)
    particles: list[Particle] = field(default_factory=list)
    groups: list[Group] = field(default_factory=list)
    constraints: list = field(default_factory=list)
    collisions_enabled: bool = True
    solver_defaults: dict = field(default_factory=dict)
    catalogue: dict = field(default_factory=dict)

    def object_by_id(self, object_id: str) -> LayoutObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(object_id)

    def validate(self) -> None:
        n = len(self.particles)
        seen_ids = set()
        for obj in self.objects:
            if obj.id in seen_ids:
                raise ValueError(f"duplicate object id {obj.id!r}")
            seen_ids.add(obj.id)
            if not (0 <= obj.particle_index < n):
                raise ValueError(f"object {obj.id!r} references missing particle {obj.particle_index}")
        for group in self.groups:
            if group.id in seen_ids:
                raise ValueError(f"duplicate id {group.id!r}")
            seen_ids.add(group.id)
            if not (0 <= group.particle_index < n):
                raise ValueError(f"group {group.id!r} references missing particle {group.particle_index}")
            for member in group.member_object_ids:
                try:
                    self.object_by_id(member)
                except KeyError:
                    raise ValueError(f"group {group.id!r} references missing object {member!r}") from None
        for i, constraint in enumerate(self.constraints):
            for idx in constraint.particles:
                if not (0 <= idx < n):
                    raise ValueError(f"constraint #{i} ({constraint.kind}) references missing particle {idx}")
            constraint.validate()

    def copy(self) -> "Scene":
        return Scene(
            room=Room([Vec2(v.x, v.y) for v in self.room.boundary]),
            objects=[replace(obj) for obj in self.objects],
            particles=[replace(p) for p in self.particles],
            groups=[replace(g) for g in self.groups],
            constraints=[c.copy() for c in self.constraints],
            collisions_enabled=self.collisions_enabled,
            solver_defaults=dict(self.solver_defaults),
            catalogue={k: dict(v) for k, v in self.catalogue.items()},
        )
