"""Integrate the rotated Kasteleyn flow of a plane map into the map psi onto a T-graph."""

from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from dimer_forge.config.schema import Config
from dimer_forge.construct.polygon import Polygon, choose_polygon
from dimer_forge.dimers.kasteleyn import GaugeNormalization, assign_signs, gauge_normalize
from dimer_forge.dimers.planarmap import Dart, PlanarMap
from dimer_forge.errors import DegeneratePolygon, FormatError, NotClosed
from dimer_forge.utils.helpers import Point, complex_to_json, signed_area

logger = logging.getLogger(__name__)

# ("face", id) for interior faces, ("outer", k) for the outer piece P_k
DualVertex = tuple[str, int]


@dataclass(frozen=True)
class PsiDiagnostics:
    flow_residual: float
    closure_residual: float
    collinearity_residual: float
    convex: bool
    orientation_consistent: bool
    area_sum: float
    polygon_area: float
    max_principle_violations: int
    flat: bool

    @property
    def area_defect(self) -> float:
        return abs(abs(self.area_sum) - abs(self.polygon_area))

    def to_json(self) -> dict[str, Any]:
        return {
            "flow_residual": self.flow_residual,
            "closure_residual": self.closure_residual,
            "collinearity_residual": self.collinearity_residual,
            "convex": self.convex,
            "orientation_consistent": self.orientation_consistent,
            "area_sum": self.area_sum,
            "polygon_area": self.polygon_area,
            "max_principle_violations": self.max_principle_violations,
            "flat": self.flat,
        }


@dataclass(frozen=True)
class PsiMapping:
    """Result of the construction: psi on dual vertices, one segment per black, one polygon per white."""

    graph: PlanarMap
    polygon: Polygon
    b0: int
    cuts: tuple[int, ...]
    values: Mapping[DualVertex, complex]
    normalization: GaugeNormalization
    flows: Mapping[int, complex]
    edge_duals: Mapping[int, tuple[DualVertex, DualVertex]]
    segments: Mapping[int, tuple[complex, complex]]
    white_polygons: Mapping[int, tuple[complex, ...]]
    diagnostics: PsiDiagnostics

    @property
    def blacks(self) -> list[int]:
        return sorted(self.segments)

    def segment_list(self) -> list[tuple[Point, Point]]:
        """Segments in increasing black id order, as float coordinate pairs."""
        return [
            ((p.real, p.imag), (q.real, q.imag))
            for p, q in (self.segments[black] for black in self.blacks)
        ]

    def to_json(self) -> dict[str, Any]:
        return {
            "b0": self.b0,
            "cuts": list(self.cuts),
            "polygon": self.polygon.to_json(),
            "segments": {
                str(black): [complex_to_json(p), complex_to_json(q)]
                for black, (p, q) in sorted(self.segments.items())
            },
            "white_polygons": {
                str(white): [complex_to_json(point) for point in points]
                for white, points in sorted(self.white_polygons.items())
            },
            "psi": [
                {"kind": kind, "id": index, "value": complex_to_json(value)}
                for (kind, index), value in sorted(self.values.items())
            ],
            "k_tilde": self.normalization.matrix.to_json(),
            "diagnostics": self.diagnostics.to_json(),
        }


@dataclass(frozen=True)
class BoundaryCuts:
    """Clockwise boundary from b0 and the outer piece index of each outer-face dart."""

    b0: int
    whites: tuple[int, ...]
    piece_of: Mapping[Dart, int]


def boundary_cuts(graph: PlanarMap, b0: int | None = None) -> BoundaryCuts:
    """Cut the outer face at b0 and at each boundary white, in clockwise order from b0."""
    profile = graph.boundary_profile()
    vertices = list(profile.vertices)
    darts = list(profile.darts)
    if len(set(vertices)) != len(vertices):
        raise DegeneratePolygon("outer boundary of the map is not a simple cycle")
    if b0 is None:
        b0 = vertices[0]
    if b0 not in vertices or graph.colors[b0] != "b":
        raise FormatError(f"b0 = {b0} is not a black vertex on the outer boundary")
    start = vertices.index(b0)
    vertices = vertices[start:] + vertices[:start]
    darts = darts[start:] + darts[:start]
    whites: list[int] = []
    piece_of: dict[Dart, int] = {}
    for vertex, dart in zip(vertices, darts):
        if graph.colors[vertex] == "w":
            whites.append(vertex)
        piece_of[graph.twin(dart)] = len(whites)
    return BoundaryCuts(b0, tuple(whites), piece_of)


def build_psi(
    graph: PlanarMap,
    polygon: Polygon | None = None,
    b0: int | None = None,
    seed: int | None = None,
    config: Config | None = None,
) -> PsiMapping:
    """Gauge-normalize the Kasteleyn matrix and integrate psi from psi(P_0) = v_0."""
    config = config or Config()
    cuts = boundary_cuts(graph, b0)
    m = len(cuts.whites)
    if polygon is None:
        polygon = choose_polygon(m, config.sampler.seed if seed is None else seed, config)
    if polygon.m != m:
        raise DegeneratePolygon(f"polygon has {polygon.m + 1} vertices, boundary needs {m + 1}")

    matrix = assign_signs(graph)
    q = polygon.edge_vectors
    a_black = [1 if black == cuts.b0 else 0 for black in matrix.blacks]
    boundary_index = {white: k + 1 for k, white in enumerate(cuts.whites)}
    a_white = [
        1j * q[boundary_index[white]] if white in boundary_index else 0j
        for white in matrix.whites
    ]
    normalization = gauge_normalize(matrix, a_black, a_white, config)

    flows: dict[int, complex] = {}
    for edge_id, edge in graph.edges.items():
        black, white = (edge.u, edge.v) if graph.colors[edge.u] == "b" else (edge.v, edge.u)
        flows[edge_id] = (
            normalization.g[matrix.row_of(black)]
            * matrix.signs[edge_id]
            * float(edge.weight)
            * float(normalization.f[matrix.column_of(white)])
        )

    def dual(dart: Dart) -> DualVertex:
        face = graph.faces[graph.face_of[dart]]
        return ("outer", cuts.piece_of[dart]) if face.outer else ("face", face.id)

    edge_duals: dict[int, tuple[DualVertex, DualVertex]] = {}
    relations: list[tuple[DualVertex, DualVertex, complex]] = []
    for edge_id, edge in graph.edges.items():
        black = edge.u if graph.colors[edge.u] == "b" else edge.v
        right = dual((edge_id, black))
        left = dual(graph.twin((edge_id, black)))
        edge_duals[edge_id] = (right, left)
        relations.append((right, left, 1j * flows[edge_id]))

    values = _integrate(relations, polygon.vertices[0])
    scale = max(polygon.diameter, 1.0)
    closure = max(
        (abs(values[left] - values[right] - step) for right, left, step in relations),
        default=0.0,
    )
    closure = max(
        [closure] + [abs(values[("outer", k)] - polygon.vertices[k]) for k in range(m + 1)]
    )
    if closure > config.construct.closure_tolerance * scale:
        raise NotClosed(f"psi does not close: residual {closure:.3g}")

    segments, collinearity = _segments(graph, dual, values)
    white_polygons = {
        white: _star(graph, white, dual, values, config.construct.closure_tolerance * scale)
        for white in graph.whites
    }
    diagnostics = _diagnostics(
        graph, cuts, polygon, normalization, values, relations, white_polygons,
        closure, collinearity, config,
    )
    logger.info(
        "built psi for %d blacks: convex=%s flat=%s area defect %.3g",
        len(segments), diagnostics.convex, diagnostics.flat, diagnostics.area_defect,
    )
    return PsiMapping(
        graph=graph,
        polygon=polygon,
        b0=cuts.b0,
        cuts=(cuts.b0, *cuts.whites),
        values=values,
        normalization=normalization,
        flows=flows,
        edge_duals=edge_duals,
        segments=segments,
        white_polygons=white_polygons,
        diagnostics=diagnostics,
    )


def _integrate(
    relations: Sequence[tuple[DualVertex, DualVertex, complex]], base: complex
) -> dict[DualVertex, complex]:
    """Breadth-first integration of psi(left) - psi(right) = step from psi(P_0) = base."""
    adjacency: dict[DualVertex, list[tuple[DualVertex, complex]]] = {}
    for right, left, step in relations:
        adjacency.setdefault(right, []).append((left, step))
        adjacency.setdefault(left, []).append((right, -step))
    values: dict[DualVertex, complex] = {("outer", 0): base}
    queue = deque([("outer", 0)])
    while queue:
        vertex = queue.popleft()
        for neighbor, step in adjacency.get(vertex, []):
            if neighbor not in values:
                values[neighbor] = values[vertex] + step
                queue.append(neighbor)
    if len(values) != len(adjacency):
        raise NotClosed("dual graph is not connected to the base piece")
    return values


def _around(graph: PlanarMap, vertex: int, dual) -> list[DualVertex]:
    """Dual vertices met counterclockwise around ``vertex``, split slots kept apart."""
    sequence: list[DualVertex] = []
    for dart in graph.darts_at(vertex):
        sequence.append(dual(dart))
        sequence.append(dual(graph.twin(dart)))
    result: list[DualVertex] = []
    for item in sequence:
        if not result or result[-1] != item:
            result.append(item)
    while len(result) > 1 and result[0] == result[-1]:
        result.pop()
    return result


def _star(graph: PlanarMap, white: int, dual, values, tolerance: float) -> tuple[complex, ...]:
    points: list[complex] = []
    for item in _around(graph, white, dual):
        point = values[item]
        if not points or abs(points[-1] - point) > tolerance:
            points.append(point)
    while len(points) > 1 and abs(points[0] - points[-1]) <= tolerance:
        points.pop()
    return tuple(points)


def _segments(graph: PlanarMap, dual, values) -> tuple[dict[int, tuple[complex, complex]], float]:
    """Each black star is collinear; its extreme points span the complete edge."""
    segments: dict[int, tuple[complex, complex]] = {}
    worst = 0.0
    for black in graph.blacks:
        points = [values[item] for item in _around(graph, black, dual)]
        p, q = max(
            ((a, b) for a in points for b in points), key=lambda pair: abs(pair[0] - pair[1])
        )
        direction = q - p
        if abs(direction) > 0:
            unit = direction / abs(direction)
            worst = max(worst, max(abs(((point - p) * unit.conjugate()).imag) for point in points))
        segments[black] = (p, q)
    return segments, worst


def _turns(points: Sequence[complex]) -> list[float]:
    count = len(points)
    return [
        ((points[(k + 1) % count] - points[k]).conjugate()
         * (points[(k + 2) % count] - points[(k + 1) % count])).imag
        for k in range(count)
    ]


def _diagnostics(
    graph: PlanarMap,
    cuts: BoundaryCuts,
    polygon: Polygon,
    normalization: GaugeNormalization,
    values: Mapping[DualVertex, complex],
    relations: Sequence[tuple[DualVertex, DualVertex, complex]],
    white_polygons: Mapping[int, tuple[complex, ...]],
    closure: float,
    collinearity: float,
    config: Config,
) -> PsiDiagnostics:
    matrix = normalization.matrix
    rows = normalization.row_sums()
    columns = normalization.column_sums()
    flow = max(
        [abs(rows[i]) for i, black in enumerate(matrix.blacks) if black != cuts.b0]
        + [abs(columns[j]) for j, white in enumerate(matrix.whites) if white not in cuts.whites],
        default=0.0,
    )
    area_tolerance = config.construct.area_tolerance * abs(polygon.area)
    areas: list[float] = []
    convex = True
    flat = False
    for points in white_polygons.values():
        area = signed_area([(p.real, p.imag) for p in points]) if len(points) >= 3 else 0.0
        if abs(area) <= area_tolerance:
            flat = True
            continue
        areas.append(area)
        turns = _turns(points)
        scale = max(abs(turn) for turn in turns)
        if any(turn * math.copysign(1.0, area) < -1e-9 * scale for turn in turns):
            convex = False
    consistent = all(area > 0 for area in areas) or all(area < 0 for area in areas)
    return PsiDiagnostics(
        flow_residual=float(flow),
        closure_residual=float(closure),
        collinearity_residual=float(collinearity),
        convex=convex,
        orientation_consistent=consistent,
        area_sum=float(sum(areas)),
        polygon_area=polygon.area,
        max_principle_violations=_max_principle(graph, values, relations, config),
        flat=flat,
    )


def _max_principle(
    graph: PlanarMap,
    values: Mapping[DualVertex, complex],
    relations: Sequence[tuple[DualVertex, DualVertex, complex]],
    config: Config,
) -> int:
    """Count interior dual vertices that are strict extrema of <psi, u> for seeded directions u."""
    neighbors: dict[DualVertex, set[DualVertex]] = {}
    for right, left, _ in relations:
        neighbors.setdefault(right, set()).add(left)
        neighbors.setdefault(left, set()).add(right)
    rng = np.random.default_rng(config.sampler.seed)
    angles = rng.uniform(0, 2 * math.pi, config.construct.max_principle_directions)
    tolerance = config.construct.closure_tolerance
    violations = 0
    for angle in angles:
        u = complex(math.cos(angle), math.sin(angle))
        for vertex, around in neighbors.items():
            if vertex[0] != "face":
                continue
            height = (values[vertex] * u.conjugate()).real
            others = [(values[other] * u.conjugate()).real for other in around]
            if all(h < height - tolerance for h in others) or all(
                h > height + tolerance for h in others
            ):
                violations += 1
    return violations
