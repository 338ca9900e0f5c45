"""Planar geometry used by the relocation rules.

All coordinates are metres in double precision. ``EPS_GEOM`` is the
tolerance for every geometric comparison in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

EPS_GEOM = 1e-9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinate ({self.x!r}, {self.y!r})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def distance(a: Position, b: Position) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def approach(start: Position, target: Position, stop_dist: float) -> Position:
    """Move ``start`` along the segment toward ``target``.

    The result sits exactly ``stop_dist`` from ``target``. A node that is
    already at or within ``stop_dist`` does not move.
    """
    if not math.isfinite(stop_dist) or stop_dist < 0:
        raise GeometryError(f"stop distance must be finite and >= 0, got {stop_dist!r}")
    d = distance(start, target)
    if d <= stop_dist:
        return start
    if d == 0.0:
        # unreachable while stop_dist >= 0, kept for clarity of the contract
        raise GeometryError("direction undefined: start coincides with target")
    scale = stop_dist / d
    return Position(
        target.x + (start.x - target.x) * scale,
        target.y + (start.y - target.y) * scale,
    )


def circle_intersections(
    center_a: Position, center_b: Position, radius: float
) -> tuple[Position, ...]:
    """Intersection points of two circles that share ``radius``.

    Returns 0, 1 (tangent within ``EPS_GEOM``) or 2 points, sorted
    lexicographically so callers see a stable order.
    """
    if not radius > 0:
        raise GeometryError(f"radius must be positive, got {radius!r}")
    d = distance(center_a, center_b)
    if d == 0.0:
        raise GeometryError("coincident centres have infinitely many intersections")
    if d > 2 * radius + EPS_GEOM:
        return ()
    mx = (center_a.x + center_b.x) / 2
    my = (center_a.y + center_b.y) / 2
    if abs(d - 2 * radius) <= EPS_GEOM:
        return (Position(mx, my),)
    h = math.sqrt(radius * radius - (d / 2) ** 2)
    # unit normal to the centre line
    nx = -(center_b.y - center_a.y) / d
    ny = (center_b.x - center_a.x) / d
    pts = (Position(mx + h * nx, my + h * ny), Position(mx - h * nx, my - h * ny))
    return tuple(sorted(pts))


def closest_point(candidates: Iterable[Position], reference: Position) -> Position:
    """Candidate nearest to ``reference``; exact ties go to the smaller (x, y)."""
    pts = list(candidates)
    if not pts:
        raise GeometryError("no candidate points")
    return min(pts, key=lambda p: (distance(p, reference), p.x, p.y))


def within(a: Position, b: Position, reach: float) -> bool:
    """True when ``a`` and ``b`` are at most ``reach`` apart (with EPS_GEOM slack)."""
    return distance(a, b) <= reach + EPS_GEOM


def closest_point_in_disks(
    start: Position, centers: Iterable[Position], radius: float
) -> Position | None:
    """Nearest point to ``start`` lying within ``radius`` of every centre.

    The optimum is either ``start`` itself, its projection onto one circle,
    or a vertex where two circles cross, so only those are enumerated.
    Returns None when the disks have no common point.
    """
    cs = sorted(set(centers))
    if all(within(start, c, radius) for c in cs):
        return start
    cands: list[Position] = []
    for c in cs:
        if start != c:
            cands.append(approach(start, c, radius))
    for i, a in enumerate(cs):
        for b in cs[i + 1:]:
            cands.extend(circle_intersections(a, b, radius))
    feasible = [p for p in cands if all(within(p, c, radius) for c in cs)]
    if not feasible:
        return None
    return closest_point(feasible, start)
