"""Bipartite weighted maps given as rotation systems on the plane or the torus."""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Literal

import networkx as nx

from dimer_forge.errors import (
    BadRotation,
    EulerMismatch,
    FormatError,
    NonPositiveWeight,
    NotBipartite,
)
from dimer_forge.utils.helpers import Point, format_fraction, parse_fraction, signed_area

logger = logging.getLogger(__name__)

Color = Literal["b", "w"]
Surface = Literal["plane", "torus"]
Dart = tuple[int, int]
Crossing = tuple[int, int]


@dataclass(frozen=True)
class Edge:
    """An edge with a positive rational weight.

    ``crossing`` is the fundamental-domain displacement from ``u`` to ``v`` on the torus.
    """

    id: int
    u: int
    v: int
    weight: Fraction
    crossing: Crossing = (0, 0)

    def other(self, vertex: int) -> int:
        """Return the endpoint opposite to ``vertex``."""
        if vertex == self.u:
            return self.v
        if vertex == self.v:
            return self.u
        raise ValueError(f"vertex {vertex} is not an endpoint of edge {self.id}")


@dataclass(frozen=True)
class Face:
    """A face as the cyclic sequence of darts that have it on their right."""

    id: int
    darts: tuple[Dart, ...]
    outer: bool = False

    @property
    def degree(self) -> int:
        return len(self.darts)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(tail for _, tail in self.darts)


@dataclass(frozen=True)
class BoundaryProfile:
    """Outer boundary of a plane map in clockwise order."""

    vertices: tuple[int, ...]
    darts: tuple[Dart, ...]
    m: int


@dataclass(frozen=True)
class PlanarMap:
    """A connected bipartite map; rotation lists are counterclockwise edge ids."""

    colors: Mapping[int, Color]
    edges: Mapping[int, Edge]
    rotations: Mapping[int, tuple[int, ...]]
    outer_face_dart: Dart | None = None
    surface: Surface = field(default="plane")

    def __post_init__(self) -> None:
        object.__setattr__(self, "colors", dict(sorted(self.colors.items())))
        object.__setattr__(self, "edges", dict(sorted(self.edges.items())))
        object.__setattr__(
            self,
            "rotations",
            {vertex: tuple(self.rotations.get(vertex, ())) for vertex in self.colors},
        )
        self._validate()

    @property
    def blacks(self) -> list[int]:
        return [vertex for vertex, color in self.colors.items() if color == "b"]

    @property
    def whites(self) -> list[int]:
        return [vertex for vertex, color in self.colors.items() if color == "w"]

    @property
    def vertex_count(self) -> int:
        return len(self.colors)

    def twin(self, dart: Dart) -> Dart:
        """Return the opposite half-edge."""
        edge_id, tail = dart
        return edge_id, self.edges[edge_id].other(tail)

    def head(self, dart: Dart) -> int:
        return self.edges[dart[0]].other(dart[1])

    def rotate(self, dart: Dart) -> Dart:
        """Return the next dart counterclockwise around the tail of ``dart``."""
        edge_id, tail = dart
        ring = self.rotations[tail]
        return ring[(self._ring_index[dart] + 1) % len(ring)], tail

    def rotate_back(self, dart: Dart) -> Dart:
        """Return the previous dart counterclockwise around the tail of ``dart``."""
        edge_id, tail = dart
        ring = self.rotations[tail]
        return ring[(self._ring_index[dart] - 1) % len(ring)], tail

    def face_step(self, dart: Dart) -> Dart:
        """Return the dart after ``dart`` on the face to its right."""
        return self.rotate(self.twin(dart))

    def crossing(self, dart: Dart) -> Crossing:
        """Return the torus displacement travelled along ``dart``."""
        edge = self.edges[dart[0]]
        h, v = edge.crossing
        return (h, v) if dart[1] == edge.u else (-h, -v)

    def darts_at(self, vertex: int) -> list[Dart]:
        return [(edge_id, vertex) for edge_id in self.rotations[vertex]]

    @cached_property
    def darts(self) -> list[Dart]:
        return sorted((edge_id, tail) for tail, ring in self.rotations.items() for edge_id in ring)

    @cached_property
    def _ring_index(self) -> dict[Dart, int]:
        return {
            (edge_id, tail): index
            for tail, ring in self.rotations.items()
            for index, edge_id in enumerate(ring)
        }

    @cached_property
    def faces(self) -> list[Face]:
        """Faces as orbits of the face permutation, in order of their smallest dart."""
        seen: set[Dart] = set()
        orbits: list[tuple[Dart, ...]] = []
        for start in self.darts:
            if start in seen:
                continue
            orbit: list[Dart] = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                orbit.append(dart)
                dart = self.face_step(dart)
            orbits.append(tuple(orbit))
        outer = self._outer_orbit_index(orbits)
        faces: list[Face] = []
        for index, orbit in enumerate(orbits):
            if index == outer and self.outer_face_dart is not None:
                start = orbit.index(self.outer_face_dart)
                orbit = orbit[start:] + orbit[:start]
            faces.append(Face(id=index, darts=orbit, outer=index == outer))
        return faces

    @cached_property
    def face_of(self) -> dict[Dart, int]:
        """Map each dart to the id of the face on its right."""
        return {dart: face.id for face in self.faces for dart in face.darts}

    @property
    def outer_face(self) -> Face | None:
        return next((face for face in self.faces if face.outer), None)

    def interior_faces(self) -> list[Face]:
        return [face for face in self.faces if not face.outer]

    def outer_walk(self) -> list[Dart]:
        """Return the outer face darts in face order, starting at the declared outer dart."""
        face = self.outer_face
        if face is None:
            raise ValueError("torus maps have no outer face")
        return list(face.darts)

    def boundary_profile(self) -> BoundaryProfile:
        """Return the outer boundary cycle in clockwise order and its white count m."""
        walk = self.outer_walk()
        clockwise = [self.twin(dart) for dart in reversed(walk)]
        vertices = [tail for _, tail in clockwise]
        blacks = [vertex for vertex in vertices if self.colors[vertex] == "b"]
        start = vertices.index(min(blacks)) if blacks else 0
        vertices = vertices[start:] + vertices[:start]
        clockwise = clockwise[start:] + clockwise[:start]
        m = len({vertex for vertex in vertices if self.colors[vertex] == "w"})
        return BoundaryProfile(vertices=tuple(vertices), darts=tuple(clockwise), m=m)

    def euler_characteristic(self) -> int:
        return len(self.colors) - len(self.edges) + len(self.faces)

    def to_networkx(self) -> nx.MultiGraph:
        """Return the underlying multigraph with colors and float weights."""
        graph = nx.MultiGraph()
        for vertex, color in self.colors.items():
            graph.add_node(vertex, color=color)
        for edge in self.edges.values():
            graph.add_edge(edge.u, edge.v, key=edge.id, weight=float(edge.weight))
        return graph

    def with_weights(self, weights: Mapping[int, Fraction]) -> PlanarMap:
        """Return a copy of the map with some edge weights replaced."""
        edges = {
            edge_id: Edge(edge.id, edge.u, edge.v, Fraction(weights.get(edge_id, edge.weight)),
                          edge.crossing)
            for edge_id, edge in self.edges.items()
        }
        return type(self)(self.colors, edges, self.rotations, self.outer_face_dart, self.surface)

    def _outer_orbit_index(self, orbits: Sequence[tuple[Dart, ...]]) -> int | None:
        if self.surface == "torus":
            return None
        if self.outer_face_dart is not None:
            for index, orbit in enumerate(orbits):
                if self.outer_face_dart in orbit:
                    return index
            raise BadRotation(f"outer face dart {self.outer_face_dart} is not a dart of the map")
        largest = max(range(len(orbits)), key=lambda index: (len(orbits[index]), -index))
        logger.warning("no outer face declared; using the largest face %d", largest)
        return largest

    def _validate(self) -> None:
        for edge in self.edges.values():
            if edge.u not in self.colors or edge.v not in self.colors:
                raise FormatError(f"edge {edge.id} references an unknown vertex")
            if self.colors[edge.u] == self.colors[edge.v]:
                raise NotBipartite(f"edge {edge.id} joins two vertices of color {self.colors[edge.u]}")
            if edge.weight <= 0:
                raise NonPositiveWeight(f"edge {edge.id} has non-positive weight {edge.weight}")
        incident: dict[int, list[int]] = {vertex: [] for vertex in self.colors}
        for edge in self.edges.values():
            incident[edge.u].append(edge.id)
            incident[edge.v].append(edge.id)
        for vertex, ring in self.rotations.items():
            if len(set(ring)) != len(ring):
                raise BadRotation(f"rotation at vertex {vertex} repeats a dart")
            if sorted(ring) != sorted(incident[vertex]):
                raise BadRotation(f"rotation at vertex {vertex} does not list its incident edges")
        if self.outer_face_dart is not None:
            edge_id, tail = self.outer_face_dart
            edge = self.edges.get(edge_id)
            if edge is None or tail not in (edge.u, edge.v):
                raise BadRotation(f"outer face dart {self.outer_face_dart} is not a dart of the map")
        if self.colors and not nx.is_connected(self.to_networkx()):
            raise EulerMismatch("map is not connected")
        expected = 2 if self.surface == "plane" else 0
        chi = self.euler_characteristic()
        if chi != expected:
            raise EulerMismatch(
                f"{self.surface} map has V - E + F = {chi}, expected {expected}"
            )


class TorusMap(PlanarMap):
    """A map on the torus; edges carry crossing labels."""

    def __init__(
        self,
        colors: Mapping[int, Color],
        edges: Mapping[int, Edge],
        rotations: Mapping[int, tuple[int, ...]],
        outer_face_dart: Dart | None = None,
        surface: Surface = "torus",
    ) -> None:
        super().__init__(colors, edges, rotations, None, "torus")


def from_embedding(
    colors: Mapping[int, Color],
    positions: Mapping[int, Point],
    edges: Iterable[tuple[int, int, Any]],
) -> PlanarMap:
    """Build a plane map from straight-line vertex coordinates.

    ``edges`` holds ``(u, v, weight)`` triples; edge ids follow their order.
    """
    edge_map = {
        index: Edge(index, u, v, parse_fraction(weight))
        for index, (u, v, weight) in enumerate(edges)
    }

    def vector(edge: Edge, tail: int) -> Point:
        head = edge.other(tail)
        return (positions[head][0] - positions[tail][0], positions[head][1] - positions[tail][1])

    rotations = _rotations_by_angle(colors, edge_map, vector)
    probe = PlanarMap(colors, edge_map, rotations, _any_dart(edge_map))
    best: tuple[float, Dart] | None = None
    for face in probe.faces:
        area = signed_area([positions[vertex] for vertex in face.vertices])
        if best is None or area > best[0]:
            best = (area, min(face.darts))
    outer = best[1] if best is not None else None
    return PlanarMap(colors, edge_map, rotations, outer)


def torus_from_embedding(
    colors: Mapping[int, Color],
    positions: Mapping[int, Point],
    edges: Iterable[tuple[int, int, Any, Crossing]],
    generators: tuple[Point, Point],
) -> TorusMap:
    """Build a torus map from positions in a fundamental domain and per-edge crossings."""
    (g1x, g1y), (g2x, g2y) = generators
    edge_map = {
        index: Edge(index, u, v, parse_fraction(weight), (int(cross[0]), int(cross[1])))
        for index, (u, v, weight, cross) in enumerate(edges)
    }

    def vector(edge: Edge, tail: int) -> Point:
        h, v = edge.crossing
        dx = positions[edge.v][0] + h * g1x + v * g2x - positions[edge.u][0]
        dy = positions[edge.v][1] + h * g1y + v * g2y - positions[edge.u][1]
        return (dx, dy) if tail == edge.u else (-dx, -dy)

    return TorusMap(colors, edge_map, _rotations_by_angle(colors, edge_map, vector))


def _rotations_by_angle(colors, edge_map, vector) -> dict[int, tuple[int, ...]]:
    rotations: dict[int, list[tuple[float, int]]] = {vertex: [] for vertex in colors}
    for edge in edge_map.values():
        for tail in (edge.u, edge.v):
            dx, dy = vector(edge, tail)
            rotations[tail].append((math.atan2(dy, dx), edge.id))
    return {vertex: tuple(edge_id for _, edge_id in sorted(ring)) for vertex, ring in rotations.items()}


def _any_dart(edge_map: Mapping[int, Edge]) -> Dart | None:
    if not edge_map:
        return None
    first = edge_map[min(edge_map)]
    return first.id, first.u


def parse_graph(text: str) -> PlanarMap:
    """Parse a graph file into a validated plane or torus map."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"graph file is not valid JSON: {exc.msg}") from exc
    return graph_from_dict(data)


def graph_from_dict(data: Mapping[str, Any]) -> PlanarMap:
    """Build a map from the decoded graph-file structure."""
    if not isinstance(data, Mapping):
        raise FormatError("graph file must contain a JSON object")
    surface = data.get("type", "plane")
    if surface not in ("plane", "torus"):
        raise FormatError(f"unknown map type {surface!r}")
    try:
        colors: dict[int, Color] = {}
        for item in data["vertices"]:
            color = item["color"]
            if color not in ("b", "w"):
                raise FormatError(f"vertex {item['id']} has unknown color {color!r}")
            colors[int(item["id"])] = color
        edges: dict[int, Edge] = {}
        for item in data["edges"]:
            crossing = tuple(int(x) for x in item.get("crossing", (0, 0)))
            if surface == "plane" and crossing != (0, 0):
                raise FormatError(f"edge {item['id']} has a crossing label on a plane map")
            edge = Edge(
                int(item["id"]),
                int(item["u"]),
                int(item["v"]),
                parse_fraction(item.get("weight", 1)),
                (crossing[0], crossing[1]),
            )
            if edge.id in edges:
                raise FormatError(f"duplicate edge id {edge.id}")
            edges[edge.id] = edge
        rotations = {
            int(vertex): tuple(int(edge_id) for edge_id in ring)
            for vertex, ring in data["rotations"].items()
        }
    except (KeyError, TypeError) as exc:
        raise FormatError(f"graph file is missing or mistypes field {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from exc
    if surface == "torus":
        return TorusMap(colors, edges, rotations)
    outer = data.get("outer_face_dart")
    outer_dart = (int(outer[0]), int(outer[1])) if outer is not None else None
    return PlanarMap(colors, edges, rotations, outer_dart)


def graph_to_dict(graph: PlanarMap) -> dict[str, Any]:
    """Return the graph-file structure of a map."""
    edges: list[dict[str, Any]] = []
    for edge in graph.edges.values():
        item: dict[str, Any] = {
            "id": edge.id,
            "u": edge.u,
            "v": edge.v,
            "weight": format_fraction(edge.weight),
        }
        if graph.surface == "torus":
            item["crossing"] = list(edge.crossing)
        edges.append(item)
    data: dict[str, Any] = {
        "type": graph.surface,
        "vertices": [{"id": vertex, "color": color} for vertex, color in graph.colors.items()],
        "edges": edges,
        "rotations": {str(vertex): list(ring) for vertex, ring in graph.rotations.items()},
    }
    if graph.surface == "plane" and graph.outer_face is not None:
        data["outer_face_dart"] = list(graph.outer_face.darts[0])
    return data


def dump_graph(graph: PlanarMap) -> str:
    """Serialize a map to graph-file text."""
    return json.dumps(graph_to_dict(graph), ensure_ascii=False, indent=2) + "\n"


def faces(graph: PlanarMap) -> list[Face]:
    """Return the faces of a map; the outer face is flagged on plane maps."""
    return list(graph.faces)


def boundary_profile(graph: PlanarMap) -> BoundaryProfile:
    """Return the clockwise outer boundary of a plane map."""
    return graph.boundary_profile()
