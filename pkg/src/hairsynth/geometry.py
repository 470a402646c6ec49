"""Polygon geometry shared by the stroke, mask and scene modules.

Coordinates are real-valued image coordinates: x grows rightward, y grows
downward, pixel (x, y) covers the unit square with center (x+0.5, y+0.5).
Polygons are plain sequences of (x, y) vertex pairs, implicitly closed.
"""

from __future__ import annotations

import math
from typing import Sequence

Point = tuple[float, float]


class DegeneratePolygonError(ValueError):
    """Polygon has fewer than 3 vertices or zero area."""


def polygon_area(polygon: Sequence[Point]) -> float:
    """Absolute polygon area via the shoelace formula.

    Orientation-independent. Raises DegeneratePolygonError for <3 vertices
    or collinear (zero-area) input.
    """
    if len(polygon) < 3:
        raise DegeneratePolygonError(
            f"polygon needs >=3 vertices, got {len(polygon)}"
        )
    acc = 0.0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    area = abs(acc) / 2.0
    if area <= 0.0:
        raise DegeneratePolygonError("polygon is degenerate (zero area)")
    return area


def point_in_polygon(x: float, y: float, polygon: Sequence[Point]) -> bool:
    """Even-odd rule point test (crossing number, half-open edge intervals)."""
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 <= y < y2) or (y2 <= y < y1):
            x_int = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_int:
                inside = not inside
    return inside


def polygon_bounds(polygon: Sequence[Point]) -> tuple[float, float, float, float]:
    """(min_x, min_y, max_x, max_y) of the vertex set."""
    xs = [p[0] for p in polygon]
    ys = [p[1] for p in polygon]
    return min(xs), min(ys), max(xs), max(ys)


def polygon_is_simple(polygon: Sequence[Point]) -> bool:
    """True when no two non-adjacent edges intersect (O(n^2) check)."""
    n = len(polygon)
    if n < 3:
        return False
    edges = [(polygon[i], polygon[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            # Adjacent edges share a vertex; touching there is fine.
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(edges[i][0], edges[i][1], edges[j][0], edges[j][1]):
                return False
    return True


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    return (
        min(a[0], b[0]) - 1e-12 <= p[0] <= max(a[0], b[0]) + 1e-12
        and min(a[1], b[1]) - 1e-12 <= p[1] <= max(a[1], b[1]) + 1e-12
    )


def _segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 != 0 and o2 != 0 and o3 != 0 and o4 != 0:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def clip_polygon_to_rect(
    polygon: Sequence[Point], width: float, height: float
) -> list[Point]:
    """Sutherland-Hodgman clip against the rectangle [0,width]x[0,height].

    Returns the clipped vertex list; may be empty if the polygon lies
    entirely outside the rectangle.
    """
    def clip_edge(points: list[Point], inside, intersect) -> list[Point]:
        out: list[Point] = []
        n = len(points)
        for i in range(n):
            cur = points[i]
            prev = points[i - 1]
            cur_in = inside(cur)
            prev_in = inside(prev)
            if cur_in:
                if not prev_in:
                    out.append(intersect(prev, cur))
                out.append(cur)
            elif prev_in:
                out.append(intersect(prev, cur))
        return out

    def x_cross(p: Point, q: Point, x: float) -> Point:
        t = (x - p[0]) / (q[0] - p[0])
        return (x, p[1] + t * (q[1] - p[1]))

    def y_cross(p: Point, q: Point, y: float) -> Point:
        t = (y - p[1]) / (q[1] - p[1])
        return (p[0] + t * (q[0] - p[0]), y)

    pts = list(polygon)
    pts = clip_edge(pts, lambda p: p[0] >= 0.0, lambda p, q: x_cross(p, q, 0.0))
    if pts:
        pts = clip_edge(pts, lambda p: p[0] <= width, lambda p, q: x_cross(p, q, width))
    if pts:
        pts = clip_edge(pts, lambda p: p[1] >= 0.0, lambda p, q: y_cross(p, q, 0.0))
    if pts:
        pts = clip_edge(pts, lambda p: p[1] <= height, lambda p, q: y_cross(p, q, height))
    return pts


def dist_point_segment(px: float, py: float, a: Point, b: Point) -> float:
    """Euclidean distance from point to closed segment ab."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg2
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))
