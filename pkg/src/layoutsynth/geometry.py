"""Planar geometry primitives: vectors, angles, polygons, and placement curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2(self.x - other[0], self.y - other[1])

    def scaled(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


def normalize_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi). Idempotent."""
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= TWO_PI:  # fmod noise at the boundary
        theta -= TWO_PI
    return theta


def wrap_angle(delta: float) -> float:
    """Map a signed angular difference to (-pi, pi].

    An exact half-turn maps to +pi, so antipodal corrections rotate in the
    positive direction.
    """
    delta = math.fmod(delta, TWO_PI)
    if delta > math.pi:
        delta -= TWO_PI
    elif delta <= -math.pi:
        delta += TWO_PI
    return delta


def stable_radians(degrees: float) -> float:
    """Convert degrees to radians, settled on a fixed point of the
    radians -> degrees -> radians round trip.

    Scene files store angles in degrees; settling here makes
    serialize/parse cycles reproduce orientations bit-for-bit.
    """
    rad = math.radians(degrees)
    for _ in range(4):
        again = math.radians(math.degrees(rad))
        if again == rad:
            break
        rad = again
    return rad


def closest_point_on_segment(a: Vec2, b: Vec2, p) -> tuple[Vec2, float]:
    """Closest point to p on segment a-b and its parameter t in [0, 1]."""
    abx = b.x - a.x
    aby = b.y - a.y
    denom = abx * abx + aby * aby
    if denom <= 0.0:
        return a, 0.0
    t = ((p[0] - a.x) * abx + (p[1] - a.y) * aby) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return Vec2(a.x + t * abx, a.y + t * aby), t


def segment_distance_sq(ax: float, ay: float, bx: float, by: float, px: float, py: float) -> float:
    """Squared distance from (px, py) to segment a-b, allocation-free."""
    abx = bx - ax
    aby = by - ay
    denom = abx * abx + aby * aby
    if denom <= 0.0:
        dx = px - ax
        dy = py - ay
        return dx * dx + dy * dy
    t = ((px - ax) * abx + (py - ay) * aby) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    dx = px - (ax + t * abx)
    dy = py - (ay + t * aby)
    return dx * dx + dy * dy


def polygon_signed_area(vertices: list[Vec2]) -> float:
    area = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        area += x0 * y1 - x1 * y0
    return 0.5 * area


def polygon_centroid(vertices: list[Vec2]) -> Vec2:
    """Area centroid of a simple polygon."""
    cx = cy = 0.0
    signed = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        signed += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    if abs(signed) < 1e-12:
        return Vec2(
            sum(v.x for v in vertices) / n,
            sum(v.y for v in vertices) / n,
        )
    return Vec2(cx / (3.0 * signed), cy / (3.0 * signed))


def point_in_polygon(vertices: list[Vec2], p) -> bool:
    """Ray-casting containment test. Points within ~1e-12 of the boundary
    may land on either side; callers treat that band as contact."""
    px, py = p[0], p[1]
    inside = False
    n = len(vertices)
    x1, y1 = vertices[-1]
    for i in range(n):
        x0, y0 = x1, y1
        x1, y1 = vertices[i]
        if (y0 > py) != (y1 > py):
            if px < x0 + (py - y0) * (x1 - x0) / (y1 - y0):
                inside = not inside
    return inside


def _segments_properly_intersect(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def polygon_is_simple(vertices: list[Vec2]) -> bool:
    """True when no two non-adjacent edges cross. O(n^2); rooms are small."""
    n = len(vertices)
    if n < 3:
        return False
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_properly_intersect(*edges[i], *edges[j]):
                return False
    return True


SEGMENT = "segment"
ARC = "arc"


@dataclass(frozen=True)
class Curve:
    """Placement curve: a line segment or a circular arc.

    Segments run from ``a`` to ``b``. Arcs sweep counterclockwise around
    ``center`` from ``a`` to ``b``; both endpoints must lie at the same
    radius (within 1e-6).
    """

    kind: str
    a: Vec2
    b: Vec2
    center: Vec2 | None = None

    def validate(self) -> None:
        if self.kind == SEGMENT:
            if (self.b - self.a).norm() <= 0.0:
                raise ValueError("segment curve has zero length")
        elif self.kind == ARC:
            if self.center is None:
                raise ValueError("arc curve needs a center")
            ra = (self.a - self.center).norm()
            rb = (self.b - self.center).norm()
            if abs(ra - rb) > 1e-6:
                raise ValueError(f"arc endpoints at different radii: {ra} vs {rb}")
            if ra <= 0.0:
                raise ValueError("arc has zero radius")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def _arc_angles(self) -> tuple[float, float, float]:
        """(start angle, sweep in (0, 2*pi], radius)."""
        cx, cy = self.center
        a0 = math.atan2(self.a.y - cy, self.a.x - cx)
        a1 = math.atan2(self.b.y - cy, self.b.x - cx)
        sweep = a1 - a0
        while sweep <= 0.0:
            sweep += TWO_PI
        return a0, sweep, (self.a - self.center).norm()

    def point_at(self, t: float) -> Vec2:
        t = min(1.0, max(0.0, t))
        if self.kind == SEGMENT:
            return Vec2(
                self.a.x + t * (self.b.x - self.a.x),
                self.a.y + t * (self.b.y - self.a.y),
            )
        a0, sweep, radius = self._arc_angles()
        ang = a0 + t * sweep
        cx, cy = self.center
        return Vec2(cx + radius * math.cos(ang), cy + radius * math.sin(ang))

    def length(self) -> float:
        if self.kind == SEGMENT:
            return (self.b - self.a).norm()
        _, sweep, radius = self._arc_angles()
        return sweep * radius

    def transformed(self, origin: Vec2, theta: float) -> "Curve":
        """Curve rotated by theta then translated by origin."""
        c, s = math.cos(theta), math.sin(theta)

        def xf(p: Vec2) -> Vec2:
            return Vec2(origin.x + c * p.x - s * p.y, origin.y + s * p.x + c * p.y)

        return Curve(
            self.kind,
            xf(self.a),
            xf(self.b),
            xf(self.center) if self.center is not None else None,
        )


def closest_point_on_curve(curve: Curve, p) -> tuple[Vec2, float]:
    """Euclidean closest point on a curve and its parameter t in [0, 1].

    For arcs the point is constrained to the swept span; positions whose
    nearest circle point falls outside the span clamp to an endpoint.
    """
    if curve.kind == SEGMENT:
        return closest_point_on_segment(curve.a, curve.b, p)

    a0, sweep, radius = curve._arc_angles()
    cx, cy = curve.center
    ang = math.atan2(p[1] - cy, p[0] - cx)
    rel = ang - a0
    while rel < 0.0:
        rel += TWO_PI
    if rel <= sweep:
        t = rel / sweep
        return Vec2(cx + radius * math.cos(ang), cy + radius * math.sin(ang)), t
    # off-span: nearer endpoint wins
    da = math.hypot(p[0] - curve.a.x, p[1] - curve.a.y)
    db = math.hypot(p[0] - curve.b.x, p[1] - curve.b.y)
    if da <= db:
        return curve.a, 0.0
    return curve.b, 1.0
