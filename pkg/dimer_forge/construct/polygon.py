"""Target polygons for the T-graph construction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dimer_forge.config.schema import Config
from dimer_forge.errors import DegeneratePolygon
from dimer_forge.utils.helpers import Point, complex_to_json, signed_area


@dataclass(frozen=True)
class Polygon:
    """Convex polygon with counterclockwise vertices v_0..v_m as complex numbers."""

    vertices: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise DegeneratePolygon(f"a polygon needs at least 3 vertices, got {len(self.vertices)}")

    @property
    def m(self) -> int:
        return len(self.vertices) - 1

    @property
    def edge_vectors(self) -> tuple[complex, ...]:
        """q_k = v_k - v_(k-1), with q_0 = v_0 - v_m."""
        return tuple(self.vertices[k] - self.vertices[k - 1] for k in range(len(self.vertices)))

    @property
    def points(self) -> list[Point]:
        return [(value.real, value.imag) for value in self.vertices]

    @property
    def area(self) -> float:
        return signed_area(self.points)

    @property
    def diameter(self) -> float:
        return max(abs(a - b) for a in self.vertices for b in self.vertices)

    def is_convex(self) -> bool:
        q = self.edge_vectors
        turns = [(q[k].conjugate() * q[(k + 1) % len(q)]).imag for k in range(len(q))]
        return all(turn > 0 for turn in turns)

    def to_json(self) -> list[list[float]]:
        return [complex_to_json(value) for value in self.vertices]


def choose_polygon(m: int, seed: int = 0, config: Config | None = None) -> Polygon:
    """Seeded jitter of the regular (m+1)-gon inscribed in the unit circle."""
    config = config or Config()
    if m < 2:
        raise DegeneratePolygon(f"m = {m} gives a polygon with fewer than three vertices")
    rng = np.random.default_rng(seed)
    jitter = config.construct.polygon_jitter
    count = m + 1
    vertices = []
    for k in range(count):
        angle = math.pi / 2 + 2 * math.pi * k / count + jitter * rng.uniform(-1, 1)
        radius = 1.0 + jitter * rng.uniform(-1, 1)
        vertices.append(complex(radius * math.cos(angle), radius * math.sin(angle)))
    polygon = Polygon(tuple(vertices))
    if not polygon.is_convex():
        raise DegeneratePolygon("jittered polygon is not strictly convex")
    return polygon


def polygon_from_points(points: list[Point]) -> Polygon:
    polygon = Polygon(tuple(complex(x, y) for x, y in points))
    if not polygon.is_convex():
        raise DegeneratePolygon("polygon vertices must be strictly convex and counterclockwise")
    return polygon
