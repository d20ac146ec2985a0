"""T-graphs: open segment families, their random walks, faces and derived dimer graphs."""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Literal

import networkx as nx
import numpy as np

from dimer_forge.config.schema import Config
from dimer_forge.dimers.planarmap import Color, Edge, PlanarMap, TorusMap
from dimer_forge.errors import BadDualRoot, FormatError, NotTGraph, Overlapping
from dimer_forge.tgraph.geometry import (
    ExactPoint,
    add,
    point_segment_distance,
    project,
    reduce_mod_one,
    scale,
    segments_cross,
    strict_hull,
    sub,
    to_float,
)
from dimer_forge.utils.helpers import Point, format_fraction, parse_fraction, signed_area

logger = logging.getLogger(__name__)

Ambient = Literal["plane", "torus"]
TDart = tuple[int, int]


@dataclass(frozen=True)
class Segment:
    """An open segment from ``p`` to ``q`` with exact rational endpoints."""

    id: int
    p: ExactPoint
    q: ExactPoint

    def __post_init__(self) -> None:
        if self.p == self.q:
            raise NotTGraph(f"segment {self.id} has zero length")

    @property
    def direction(self) -> ExactPoint:
        return sub(self.q, self.p)

    @property
    def length(self) -> float:
        return math.hypot(float(self.q[0] - self.p[0]), float(self.q[1] - self.p[1]))

    def at(self, t: Fraction) -> ExactPoint:
        return add(self.p, scale(self.direction, t))


@dataclass(frozen=True)
class TVertex:
    """A T-graph vertex; interior vertices record the segment they lie inside."""

    id: int
    position: ExactPoint
    segment: int | None = None
    t: Fraction | None = None

    @property
    def is_root(self) -> bool:
        return self.segment is None


@dataclass(frozen=True)
class Subsegment:
    """Piece of a segment between consecutive vertices, oriented by increasing t."""

    id: int
    segment: int
    tail: int
    head: int
    t0: Fraction
    t1: Fraction
    displacement: ExactPoint

    @property
    def t_length(self) -> Fraction:
        return self.t1 - self.t0


@dataclass(frozen=True)
class Move:
    """A directed edge of the walk with its exact transition probability."""

    source: int
    target: int
    subsegment: int
    probability: Fraction
    direction: int = 1

    @property
    def dart(self) -> TDart:
        return self.subsegment, self.direction


@dataclass(frozen=True)
class TFace:
    """Face of the arrangement; outer faces are the boundary pieces between roots."""

    id: int
    darts: tuple[TDart, ...]
    outer: bool
    polygon: tuple[Point, ...]


@dataclass(frozen=True)
class DimerEdge:
    """Edge between a face and a segment, with the contiguous subsegments it spans."""

    id: int
    face: int
    segment: int
    side: int
    subsegments: tuple[int, ...]
    weight: Fraction
    length: float


@dataclass(frozen=True)
class TransitionChain:
    vertices: tuple[int, ...]
    rows: Mapping[int, Mapping[int, Fraction]]

    def as_array(self) -> np.ndarray:
        index = {vertex: position for position, vertex in enumerate(self.vertices)}
        matrix = np.zeros((len(self.vertices), len(self.vertices)))
        for source, row in self.rows.items():
            for target, probability in row.items():
                matrix[index[source], index[target]] += float(probability)
        return matrix


@dataclass(frozen=True)
class DerivedDimerGraph:
    """Face/segment incidence graph; black ids are segment ids, white ids are n + face id."""

    full_map: PlanarMap
    dimer_map: PlanarMap
    dual_root: int | None
    edges: Mapping[int, DimerEdge]
    segment_count: int

    def white_of(self, face_id: int) -> int:
        return self.segment_count + face_id

    def face_of(self, white: int) -> int:
        return white - self.segment_count


@dataclass(frozen=True, eq=False)
class TGraph:
    """A validated T-graph with its walk, faces and derived dimer graph."""

    ambient: Ambient
    segments: tuple[Segment, ...]
    vertices: tuple[TVertex, ...]
    subsegments: tuple[Subsegment, ...]
    moves: Mapping[int, tuple[Move, ...]]
    roots: tuple[int, ...]
    faces: tuple[TFace, ...]
    rotations: Mapping[int, tuple[TDart, ...]]
    tolerance: float

    @property
    def n(self) -> int:
        return len(self.segments)

    @property
    def m(self) -> int:
        return len(self.roots)

    @property
    def interior_vertices(self) -> list[int]:
        return [vertex.id for vertex in self.vertices if not vertex.is_root]

    @property
    def outer_faces(self) -> list[TFace]:
        return [face for face in self.faces if face.outer]

    @property
    def default_dual_root(self) -> int | None:
        outer = self.outer_faces
        return min(face.id for face in outer) if outer else None

    def dart_tail(self, dart: TDart) -> int:
        piece = self.subsegments[dart[0]]
        return piece.tail if dart[1] > 0 else piece.head

    def dart_head(self, dart: TDart) -> int:
        piece = self.subsegments[dart[0]]
        return piece.head if dart[1] > 0 else piece.tail

    def dart_vector(self, dart: TDart) -> ExactPoint:
        dx, dy = self.subsegments[dart[0]].displacement
        return (dx, dy) if dart[1] > 0 else (-dx, -dy)

    @cached_property
    def face_of(self) -> dict[TDart, int]:
        return {dart: face.id for face in self.faces for dart in face.darts}

    @cached_property
    def _derived(self) -> tuple[tuple[DimerEdge, ...], PlanarMap]:
        return _build_full_map(self)

    @property
    def dimer_edges(self) -> tuple[DimerEdge, ...]:
        return self._derived[0]

    @property
    def full_map(self) -> PlanarMap:
        """Segments as blacks, faces as whites n + face id; nothing removed."""
        return self._derived[1]

    @cached_property
    def stability_radius(self) -> float:
        return stability_radius(self)

    @cached_property
    def dimer_graph(self) -> DerivedDimerGraph:
        return derived_dimer_graph(self)

    def to_json(self) -> dict[str, Any]:
        return segments_to_dict(self.segments, self.ambient)


def make_segments(items: Sequence[Any]) -> list[Segment]:
    """Accept Segment objects or (p, q) coordinate pairs."""
    segments: list[Segment] = []
    for index, item in enumerate(items):
        if isinstance(item, Segment):
            segments.append(Segment(index, item.p, item.q))
            continue
        p, q = item
        segments.append(
            Segment(
                index,
                (parse_fraction(p[0]), parse_fraction(p[1])),
                (parse_fraction(q[0]), parse_fraction(q[1])),
            )
        )
    return segments


def build_from_segments(
    segments: Sequence[Any],
    ambient: Ambient = "plane",
    config: Config | None = None,
) -> TGraph:
    """Validate a family of open segments and derive its walk, faces and dimer graph."""
    config = config or Config()
    if ambient not in ("plane", "torus"):
        raise FormatError(f"unknown ambient {ambient!r}")
    items = make_segments(segments)
    if not items:
        raise NotTGraph("a T-graph needs at least one segment")
    return _Arrangement(items, ambient, config).build()


def _lifts(point: ExactPoint, segment: Segment, torus: bool) -> list[ExactPoint]:
    """Translates of ``point`` by integer vectors that can come near ``segment``."""
    if not torus:
        return [point]
    low_x = math.floor(min(segment.p[0], segment.q[0])) - 1
    high_x = math.ceil(max(segment.p[0], segment.q[0])) + 1
    low_y = math.floor(min(segment.p[1], segment.q[1])) - 1
    high_y = math.ceil(max(segment.p[1], segment.q[1])) + 1
    return [
        (point[0] + kx, point[1] + ky)
        for kx in range(low_x, high_x + 1)
        for ky in range(low_y, high_y + 1)
    ]


class _Arrangement:
    def __init__(self, segments: list[Segment], ambient: Ambient, config: Config) -> None:
        self.segments = segments
        self.ambient = ambient
        self.torus = ambient == "torus"
        if self.torus:
            diameter = 1.0
        else:
            xs = [float(x) for s in segments for x in (s.p[0], s.q[0])]
            ys = [float(y) for s in segments for y in (s.p[1], s.q[1])]
            diameter = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
        self.tolerance = config.geometry.relative_tolerance * diameter
        self.positions: list[ExactPoint] = []

    def _canonical(self, point: ExactPoint) -> ExactPoint:
        return reduce_mod_one(point) if self.torus else point

    def _gap(self, a: ExactPoint, b: ExactPoint) -> float:
        dx, dy = float(a[0] - b[0]), float(a[1] - b[1])
        if self.torus:
            dx -= round(dx)
            dy -= round(dy)
        return math.hypot(dx, dy)

    def _vertex_for(self, point: ExactPoint) -> int:
        point = self._canonical(point)
        for index, known in enumerate(self.positions):
            if self._gap(point, known) <= self.tolerance:
                return index
        self.positions.append(point)
        return len(self.positions) - 1

    def _lifts(self, point: ExactPoint, segment: Segment) -> list[ExactPoint]:
        return _lifts(point, segment, self.torus)

    def build(self) -> TGraph:
        endpoint_vertex = {
            (segment.id, side): self._vertex_for(point)
            for segment in self.segments
            for side, point in ((0, segment.p), (1, segment.q))
        }
        stops: dict[int, list[tuple[Fraction, int]]] = {
            segment.id: [(Fraction(0), endpoint_vertex[(segment.id, 0)]),
                         (Fraction(1), endpoint_vertex[(segment.id, 1)])]
            for segment in self.segments
        }
        containing: dict[int, list[tuple[int, Fraction]]] = {
            index: [] for index in range(len(self.positions))
        }
        for segment in self.segments:
            slack = self.tolerance / segment.length
            for index, position in enumerate(self.positions):
                for lift in self._lifts(position, segment):
                    t, gap = project(lift, segment.p, segment.q)
                    if gap <= self.tolerance and slack < t < 1 - slack:
                        containing[index].append((segment.id, t))
                        stops[segment.id].append((t, index))

        vertices: list[TVertex] = []
        for index, position in enumerate(self.positions):
            found = containing[index]
            if len(found) > 1:
                raise Overlapping(
                    f"vertex at {to_float(position)} lies inside segments "
                    f"{sorted(segment for segment, _ in found)}"
                )
            if found:
                vertices.append(TVertex(index, position, found[0][0], found[0][1]))
            else:
                if self.torus:
                    raise NotTGraph(f"endpoint at {to_float(position)} does not tee into a segment")
                vertices.append(TVertex(index, position))
        self._check_crossings()
        roots = tuple(vertex.id for vertex in vertices if vertex.is_root)
        if not self.torus:
            self._check_roots(roots)

        subsegments: list[Subsegment] = []
        per_segment: dict[int, list[Subsegment]] = {}
        for segment in self.segments:
            ordered = sorted(stops[segment.id])
            pieces: list[Subsegment] = []
            for (t0, tail), (t1, head) in zip(ordered, ordered[1:]):
                piece = Subsegment(
                    id=len(subsegments),
                    segment=segment.id,
                    tail=tail,
                    head=head,
                    t0=t0,
                    t1=t1,
                    displacement=scale(segment.direction, t1 - t0),
                )
                subsegments.append(piece)
                pieces.append(piece)
            per_segment[segment.id] = pieces

        moves = self._moves(vertices, per_segment)
        walk = nx.Graph()
        walk.add_nodes_from(range(len(vertices)))
        walk.add_edges_from((piece.tail, piece.head) for piece in subsegments)
        if not nx.is_connected(walk):
            raise NotTGraph("the union of the segments is not connected")

        rotations = self._rotations(vertices, subsegments)
        faces = self._faces(vertices, subsegments, rotations, roots)
        expected = len(self.segments) if self.torus else len(self.segments) + 1
        if len(faces) != expected:
            raise NotTGraph(f"arrangement has {len(faces)} faces, expected {expected}")

        graph = TGraph(
            ambient=self.ambient,
            segments=tuple(self.segments),
            vertices=tuple(vertices),
            subsegments=tuple(subsegments),
            moves=moves,
            roots=roots,
            faces=tuple(faces),
            rotations=rotations,
            tolerance=self.tolerance,
        )
        if not graph.dimer_edges:
            raise NotTGraph("arrangement derives no dimer edges")
        if not self.torus and not roots_reachable(graph):
            raise NotTGraph("some interior vertex cannot reach a root")
        logger.debug("built %s T-graph: %d segments, %d vertices, %d faces",
                     self.ambient, len(self.segments), len(vertices), len(faces))
        return graph

    def _check_crossings(self) -> None:
        shifts = [(kx, ky) for kx in (-1, 0, 1) for ky in (-1, 0, 1)] if self.torus else [(0, 0)]
        floats = [(to_float(s.p), to_float(s.q)) for s in self.segments]
        for first in range(len(floats)):
            for second in range(first + 1, len(floats)):
                p2, q2 = floats[second]
                for kx, ky in shifts:
                    moved = ((p2[0] + kx, p2[1] + ky), (q2[0] + kx, q2[1] + ky))
                    if segments_cross(floats[first], moved, self.tolerance):
                        raise Overlapping(f"segments {first} and {second} intersect")

    def _check_roots(self, roots: tuple[int, ...]) -> None:
        points = [to_float(position) for position in self.positions]
        hull = set(strict_hull(points, self.tolerance * self.tolerance))
        for root in roots:
            if root not in hull:
                raise NotTGraph(
                    f"endpoint at {points[root]} is interior to no segment and is not a "
                    "vertex of the outer boundary"
                )

    @staticmethod
    def _moves(
        vertices: list[TVertex], per_segment: dict[int, list[Subsegment]]
    ) -> dict[int, tuple[Move, ...]]:
        moves: dict[int, tuple[Move, ...]] = {}
        for vertex in vertices:
            if vertex.is_root:
                moves[vertex.id] = ()
                continue
            pieces = per_segment[vertex.segment]
            lower = next(piece for piece in pieces if piece.t1 == vertex.t)
            upper = next(piece for piece in pieces if piece.t0 == vertex.t)
            span = upper.t1 - lower.t0
            moves[vertex.id] = (
                Move(vertex.id, lower.tail, lower.id, (upper.t1 - vertex.t) / span, -1),
                Move(vertex.id, upper.head, upper.id, (vertex.t - lower.t0) / span, 1),
            )
        return moves

    @staticmethod
    def _rotations(
        vertices: list[TVertex], subsegments: list[Subsegment]
    ) -> dict[int, tuple[TDart, ...]]:
        around: dict[int, list[tuple[float, TDart]]] = {vertex.id: [] for vertex in vertices}
        for piece in subsegments:
            dx, dy = to_float(piece.displacement)
            around[piece.tail].append((math.atan2(dy, dx), (piece.id, 1)))
            around[piece.head].append((math.atan2(-dy, -dx), (piece.id, -1)))
        rotations: dict[int, tuple[TDart, ...]] = {}
        for vertex, ring in around.items():
            ring.sort()
            for (a, first), (b, second) in zip(ring, ring[1:]):
                if abs(a - b) < 1e-12:
                    raise Overlapping(f"subsegments {first[0]} and {second[0]} overlap")
            rotations[vertex] = tuple(dart for _, dart in ring)
        return rotations

    def _faces(
        self,
        vertices: list[TVertex],
        subsegments: list[Subsegment],
        rotations: dict[int, tuple[TDart, ...]],
        roots: tuple[int, ...],
    ) -> list[TFace]:
        position = {
            dart: (vertex, index)
            for vertex, ring in rotations.items()
            for index, dart in enumerate(ring)
        }

        def head(dart: TDart) -> int:
            piece = subsegments[dart[0]]
            return piece.head if dart[1] > 0 else piece.tail

        def step(dart: TDart) -> TDart:
            twin = (dart[0], -dart[1])
            vertex, index = position[twin]
            ring = rotations[vertex]
            return ring[(index + 1) % len(ring)]

        def vector(dart: TDart) -> ExactPoint:
            dx, dy = subsegments[dart[0]].displacement
            return (dx, dy) if dart[1] > 0 else (-dx, -dy)

        def tail(dart: TDart) -> int:
            return head((dart[0], -dart[1]))

        def polygon(darts: Sequence[TDart], closed: bool) -> tuple[Point, ...]:
            point = vertices[tail(darts[0])].position
            points = [to_float(point)]
            for dart in darts:
                point = add(point, vector(dart))
                points.append(to_float(point))
            if closed:
                points.pop()
            return tuple(points)

        seen: set[TDart] = set()
        orbits: list[list[TDart]] = []
        for start in sorted(position):
            if start in seen:
                continue
            orbit: list[TDart] = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                orbit.append(dart)
                dart = step(dart)
            orbits.append(orbit)

        if self.torus:
            faces: list[TFace] = []
            for orbit in orbits:
                total = (Fraction(0), Fraction(0))
                for dart in orbit:
                    total = add(total, vector(dart))
                if total != (Fraction(0), Fraction(0)):
                    raise NotTGraph("a face of the arrangement wraps around the torus")
                faces.append(TFace(len(faces), tuple(orbit), False, polygon(orbit, True)))
            return faces

        areas = [signed_area(polygon(orbit, True)) for orbit in orbits]
        outer_index = max(range(len(orbits)), key=lambda index: areas[index])
        faces = []
        for index, orbit in enumerate(orbits):
            if index == outer_index:
                continue
            if areas[index] >= -self.tolerance * self.tolerance:
                raise NotTGraph("arrangement has a degenerate bounded face")
            faces.append(TFace(len(faces), tuple(orbit), False, polygon(orbit, True)))

        walk = orbits[outer_index]
        root_set = set(roots)
        starts = [index for index, dart in enumerate(walk) if tail(dart) in root_set]
        visits = [tail(walk[index]) for index in starts]
        for root in roots:
            if visits.count(root) != 1:
                raise NotTGraph(
                    f"root at {to_float(vertices[root].position)} appears "
                    f"{visits.count(root)} times on the outer boundary"
                )
        first = starts[visits.index(min(roots))]
        walk = walk[first:] + walk[:first]
        starts = [index for index, dart in enumerate(walk) if tail(dart) in root_set]
        for number, begin in enumerate(starts):
            end = starts[number + 1] if number + 1 < len(starts) else len(walk)
            piece = tuple(walk[begin:end])
            faces.append(TFace(len(faces), piece, True, polygon(piece, False)))
        return faces


def _runs(graph: TGraph, face: TFace) -> list[list[TDart]]:
    darts = list(face.darts)

    def key(dart: TDart) -> tuple[int, int]:
        return graph.subsegments[dart[0]].segment, dart[1]

    if not face.outer and len(darts) > 1:
        for shift in range(len(darts)):
            if key(darts[shift]) != key(darts[shift - 1]):
                darts = darts[shift:] + darts[:shift]
                break
    runs: list[list[TDart]] = []
    for dart in darts:
        if runs and key(runs[-1][-1]) == key(dart):
            runs[-1].append(dart)
        else:
            runs.append([dart])
    return runs


def _build_full_map(graph: TGraph) -> tuple[tuple[DimerEdge, ...], PlanarMap]:
    n = graph.n
    edges: list[DimerEdge] = []
    first_dart: dict[int, TDart] = {}
    white_rings: dict[int, list[int]] = {}
    for face in graph.faces:
        ring: list[int] = []
        for run in _runs(graph, face):
            segment = graph.subsegments[run[0][0]].segment
            pieces = tuple(sorted((dart[0] for dart in run),
                                  key=lambda piece: graph.subsegments[piece].t0))
            weight = sum((graph.subsegments[piece].t_length for piece in pieces), Fraction(0))
            edge = DimerEdge(
                id=len(edges),
                face=face.id,
                segment=segment,
                side=run[0][1],
                subsegments=pieces,
                weight=weight,
                length=float(weight) * graph.segments[segment].length,
            )
            first_dart[edge.id] = run[0]
            edges.append(edge)
            ring.append(edge.id)
        white_rings[n + face.id] = list(reversed(ring))

    black_rings: dict[int, list[int]] = {}
    for segment in graph.segments:
        mine = [edge for edge in edges if edge.segment == segment.id]

        def start(edge: DimerEdge) -> Fraction:
            return graph.subsegments[edge.subsegments[0]].t0

        right = sorted((edge for edge in mine if edge.side > 0), key=start)
        left = sorted((edge for edge in mine if edge.side < 0), key=start, reverse=True)
        black_rings[segment.id] = [edge.id for edge in right + left]

    colors: dict[int, Color] = {segment.id: "b" for segment in graph.segments}
    colors.update({n + face.id: "w" for face in graph.faces})
    crossings = _crossings(graph, edges, first_dart) if graph.ambient == "torus" else {}
    map_edges = {
        edge.id: Edge(edge.id, edge.segment, n + edge.face, edge.weight,
                      crossings.get(edge.id, (0, 0)))
        for edge in edges
    }
    rotations = {**{b: tuple(r) for b, r in black_rings.items()},
                 **{w: tuple(r) for w, r in white_rings.items()}}
    if graph.ambient == "torus":
        return tuple(edges), TorusMap(colors, map_edges, rotations)
    outer = _outer_dart(graph, edges, black_rings, removed=set())
    return tuple(edges), PlanarMap(colors, map_edges, rotations, outer)


def _outer_dart(
    graph: TGraph,
    edges: Sequence[DimerEdge],
    black_rings: Mapping[int, Sequence[int]],
    removed: set[int],
) -> tuple[int, int]:
    """Pick a dart of the face that contains the corner at the smallest root."""
    root = min(graph.roots)
    for segment in graph.segments:
        ring = list(black_rings[segment.id])
        stops = [graph.vertices[v].id for v in _segment_ends(graph, segment.id)]
        if root not in stops:
            continue
        if stops[1] == root:
            right = [e for e in ring if edges[e].side > 0]
            begin = len(right)
        else:
            begin = 0
        for offset in range(len(ring)):
            candidate = ring[(begin + offset) % len(ring)]
            if candidate not in removed:
                return candidate, segment.id
    raise NotTGraph("no segment ends at a root")


def _segment_ends(graph: TGraph, segment_id: int) -> tuple[int, int]:
    pieces = [piece for piece in graph.subsegments if piece.segment == segment_id]
    return min(pieces, key=lambda p: p.t0).tail, max(pieces, key=lambda p: p.t1).head


def _crossings(
    graph: TGraph, edges: Sequence[DimerEdge], first_dart: Mapping[int, TDart]
) -> dict[int, tuple[int, int]]:
    offsets: dict[TDart, ExactPoint] = {}
    for face in graph.faces:
        total = (Fraction(0), Fraction(0))
        for dart in face.darts:
            offsets[dart] = total
            total = add(total, graph.dart_vector(dart))
    half = Fraction(1, 2)
    result: dict[int, tuple[int, int]] = {}
    for edge in edges:
        dart = first_dart[edge.id]
        segment = graph.segments[edge.segment]
        piece = graph.subsegments[dart[0]]
        t = piece.t0 if dart[1] > 0 else piece.t1
        anchor = graph.vertices[graph.dart_tail(graph.faces[edge.face].darts[0])].position
        midpoint = reduce_mod_one(scale(add(segment.p, segment.q), half))
        gap = sub(scale(offsets[dart], Fraction(-1)), scale(segment.direction, half - t))
        shift = add(sub(gap, anchor), midpoint)
        if shift[0].denominator != 1 or shift[1].denominator != 1:
            raise NotTGraph(f"inconsistent lift for derived edge {edge.id}")
        result[edge.id] = (int(shift[0]), int(shift[1]))
    return result


def stability_radius(graph: TGraph) -> float:
    """Largest endpoint perturbation that keeps the combinatorics of the arrangement.

    Moving every endpoint by less than this keeps each snapped incidence within
    the tolerance and keeps every other vertex-vertex and vertex-segment pair
    further apart than the tolerance, so vertices, subsegments and faces are
    the same. Zero means the instance is already at the edge of the tolerance.
    """
    torus = graph.ambient == "torus"
    tolerance = graph.tolerance
    points = [to_float(vertex.position) for vertex in graph.vertices]

    def gap(a: Point, b: Point) -> float:
        dx, dy = a[0] - b[0], a[1] - b[1]
        if torus:
            dx -= round(dx)
            dy -= round(dy)
        return math.hypot(dx, dy)

    snapped = 0.0
    incident: dict[int, set[int]] = {}
    for segment in graph.segments:
        tail, head = _segment_ends(graph, segment.id)
        incident[segment.id] = {tail, head}
        snapped = max(snapped, gap(to_float(segment.p), points[tail]),
                      gap(to_float(segment.q), points[head]))
    for vertex in graph.vertices:
        if vertex.is_root:
            continue
        segment = graph.segments[vertex.segment]
        incident[segment.id].add(vertex.id)
        snapped = max(snapped, min(
            project(lift, segment.p, segment.q)[1]
            for lift in _lifts(vertex.position, segment, torus)
        ))

    separation = math.inf
    for first in range(len(points)):
        for second in range(first + 1, len(points)):
            separation = min(separation, gap(points[first], points[second]))
    for segment in graph.segments:
        ends = to_float(segment.p), to_float(segment.q)
        for vertex in graph.vertices:
            if vertex.id in incident[segment.id]:
                continue
            for lift in _lifts(vertex.position, segment, torus):
                separation = min(separation, point_segment_distance(to_float(lift), *ends))
    if not torus and len(graph.roots) > 2:
        corners = [points[root] for root in graph.roots]
        hull = strict_hull(corners, 0.0)
        for index, corner in enumerate(hull):
            before, after = corners[hull[index - 1]], corners[hull[(index + 1) % len(hull)]]
            separation = min(separation, point_segment_distance(corners[corner], before, after))

    radius = min((tolerance - snapped) / 2, (separation - tolerance) / 2)
    return max(radius, 0.0)


def derived_dimer_graph(graph: TGraph, dual_root: int | None = None) -> DerivedDimerGraph:
    """Return the derived dimer graph, removing the chosen outer face on the plane."""
    edges = {edge.id: edge for edge in graph.dimer_edges}
    n = graph.n
    if graph.ambient == "torus":
        if dual_root is not None:
            raise BadDualRoot("torus T-graphs have no dual root")
        return DerivedDimerGraph(graph.full_map, graph.full_map, None, edges, n)
    root = graph.default_dual_root if dual_root is None else dual_root
    if root is None or root < 0 or root >= len(graph.faces) or not graph.faces[root].outer:
        raise BadDualRoot(f"face {dual_root} is not an outer face")
    white = n + root
    removed = {edge.id for edge in graph.dimer_edges if edge.face == root}
    full = graph.full_map
    colors = {vertex: color for vertex, color in full.colors.items() if vertex != white}
    kept = {edge_id: edge for edge_id, edge in full.edges.items() if edge_id not in removed}
    rotations = {
        vertex: tuple(edge_id for edge_id in ring if edge_id not in removed)
        for vertex, ring in full.rotations.items()
        if vertex != white
    }
    black_rings = {segment.id: full.rotations[segment.id] for segment in graph.segments}
    outer = _outer_dart(graph, graph.dimer_edges, black_rings, removed)
    dimer = PlanarMap(colors, kept, rotations, outer)
    return DerivedDimerGraph(full, dimer, root, edges, n)


def transition_chain(graph: TGraph) -> TransitionChain:
    """Return the walk's stochastic matrix; roots are absorbing."""
    rows: dict[int, dict[int, Fraction]] = {}
    for vertex in graph.vertices:
        if vertex.is_root:
            rows[vertex.id] = {vertex.id: Fraction(1)}
            continue
        row: dict[int, Fraction] = {}
        for move in graph.moves[vertex.id]:
            row[move.target] = row.get(move.target, Fraction(0)) + move.probability
        rows[vertex.id] = row
    return TransitionChain(tuple(vertex.id for vertex in graph.vertices), rows)


def martingale_residual(graph: TGraph) -> Fraction:
    """Largest |sum p_i (v_i - v)| over interior vertices; exactly zero for a T-graph."""
    worst = Fraction(0)
    for vertex in graph.interior_vertices:
        drift = (Fraction(0), Fraction(0))
        for move in graph.moves[vertex]:
            dx, dy = graph.subsegments[move.subsegment].displacement
            sign = move.direction
            drift = add(drift, (sign * dx * move.probability, sign * dy * move.probability))
        worst = max(worst, abs(drift[0]), abs(drift[1]))
    return worst


def roots_reachable(graph: TGraph) -> bool:
    """True when every interior vertex has a directed path to a root."""
    walk = nx.DiGraph()
    walk.add_nodes_from(vertex.id for vertex in graph.vertices)
    for moves in graph.moves.values():
        walk.add_edges_from((move.source, move.target) for move in moves)
    reached: set[int] = set(graph.roots)
    for root in graph.roots:
        reached |= nx.ancestors(walk, root)
    return len(reached) == len(graph.vertices)


def segments_to_dict(segments: Sequence[Segment], ambient: Ambient) -> dict[str, Any]:
    return {
        "ambient": ambient,
        "segments": [
            {
                "p": [format_fraction(segment.p[0]), format_fraction(segment.p[1])],
                "q": [format_fraction(segment.q[0]), format_fraction(segment.q[1])],
            }
            for segment in segments
        ],
    }


def load_segments(text: str) -> tuple[list[Segment], Ambient]:
    """Parse a segment file into segments and ambient."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"segment file is not valid JSON: {exc.msg}") from exc
    return segments_from_dict(data)


def segments_from_dict(data: Any) -> tuple[list[Segment], Ambient]:
    """Build segments from the decoded segment-file structure."""
    try:
        ambient = data.get("ambient", "plane")
        pairs = [(item["p"], item["q"]) for item in data["segments"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"segment file is missing or mistypes field {exc}") from exc
    if ambient not in ("plane", "torus"):
        raise FormatError(f"unknown ambient {ambient!r}")
    try:
        return make_segments(pairs), ambient
    except (ValueError, TypeError) as exc:
        if isinstance(exc, NotTGraph):
            raise
        raise FormatError(str(exc)) from exc


def parse_tgraph(text: str, config: Config | None = None) -> TGraph:
    segments, ambient = load_segments(text)
    return build_from_segments(segments, ambient, config)


def dump_segments(segments: Sequence[Segment], ambient: Ambient) -> str:
    return json.dumps(segments_to_dict(segments, ambient), ensure_ascii=False, indent=2) + "\n"
