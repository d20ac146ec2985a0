"""Exact and tolerant planar geometry for segment arrangements."""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from dimer_forge.utils.helpers import Point

ExactPoint = tuple[Fraction, Fraction]


def add(a: ExactPoint, b: ExactPoint) -> ExactPoint:
    return a[0] + b[0], a[1] + b[1]


def sub(a: ExactPoint, b: ExactPoint) -> ExactPoint:
    return a[0] - b[0], a[1] - b[1]


def scale(a: ExactPoint, factor: Fraction) -> ExactPoint:
    return a[0] * factor, a[1] * factor


def dot(a: ExactPoint, b: ExactPoint) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def to_float(a: ExactPoint) -> Point:
    return float(a[0]), float(a[1])


def reduce_mod_one(a: ExactPoint) -> ExactPoint:
    """Reduce a point into the unit square [0, 1)^2."""
    return a[0] - math.floor(a[0]), a[1] - math.floor(a[1])


def cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def distance(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def project(point: ExactPoint, p: ExactPoint, q: ExactPoint) -> tuple[Fraction, float]:
    """Return the exact parameter of the projection of ``point`` onto line pq and its distance."""
    direction = sub(q, p)
    t = dot(sub(point, p), direction) / dot(direction, direction)
    foot = add(p, scale(direction, t))
    return t, distance(to_float(point), to_float(foot))


def point_segment_distance(point: Point, p: Point, q: Point) -> float:
    """Distance from ``point`` to the closed segment pq."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    length2 = dx * dx + dy * dy
    if length2 == 0:
        return distance(point, p)
    t = ((point[0] - p[0]) * dx + (point[1] - p[1]) * dy) / length2
    t = min(max(t, 0.0), 1.0)
    return distance(point, (p[0] + t * dx, p[1] + t * dy))


def strict_hull(points: Sequence[Point], tolerance: float) -> list[int]:
    """Return indices of strict convex hull vertices in counterclockwise order.

    Corners whose turn is at most ``tolerance`` are dropped.
    """
    order = sorted(range(len(points)), key=lambda index: points[index])
    if len(order) <= 2:
        return order
    try:
        hull = [int(index) for index in ConvexHull(np.asarray(points, dtype=float)).vertices]
    except QhullError:
        return [order[0], order[-1]]
    index = 0
    while len(hull) > 2 and index < len(hull):
        before, after = points[hull[index - 1]], points[hull[(index + 1) % len(hull)]]
        if cross(before, points[hull[index]], after) <= tolerance:
            del hull[index]
            index = 0
        else:
            index += 1
    return hull


def segments_cross(
    a: tuple[Point, Point], b: tuple[Point, Point], tolerance: float
) -> bool:
    """True when the open segments meet in a proper crossing or a collinear overlap."""
    (p1, q1), (p2, q2) = a, b
    o1, o2 = cross(p1, q1, p2), cross(p1, q1, q2)
    o3, o4 = cross(p2, q2, p1), cross(p2, q2, q1)
    scale_a = distance(p1, q1)
    scale_b = distance(p2, q2)
    near = [abs(o1) <= tolerance * scale_a, abs(o2) <= tolerance * scale_a,
            abs(o3) <= tolerance * scale_b, abs(o4) <= tolerance * scale_b]
    if all(near):
        direction = (q1[0] - p1[0], q1[1] - p1[1])
        length2 = direction[0] ** 2 + direction[1] ** 2
        s0 = ((p2[0] - p1[0]) * direction[0] + (p2[1] - p1[1]) * direction[1]) / length2
        s1 = ((q2[0] - p1[0]) * direction[0] + (q2[1] - p1[1]) * direction[1]) / length2
        low, high = min(s0, s1), max(s0, s1)
        slack = tolerance / max(math.sqrt(length2), 1e-300)
        return min(high, 1.0) - max(low, 0.0) > slack
    if any(near):
        return False
    return (o1 > 0) != (o2 > 0) and (o3 > 0) != (o4 > 0)
