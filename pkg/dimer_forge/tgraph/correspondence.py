"""Marked matchings of the derived dimer graph versus directed spanning forests of the walk."""

from __future__ import annotations

import itertools
import logging
from collections import deque
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import networkx as nx

from dimer_forge.config.schema import Config
from dimer_forge.dimers.kasteleyn import enumerate_matchings
from dimer_forge.errors import BadDualRoot, InvalidForest, InvalidMarking, NotTGraph, TooLarge
from dimer_forge.tgraph.geometry import ExactPoint, add
from dimer_forge.tgraph.tgraph import DerivedDimerGraph, TDart, TGraph, derived_dimer_graph
from dimer_forge.utils.helpers import format_fraction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarkedMatching:
    """A perfect matching of the dimer graph plus one marked subsegment per matched edge."""

    marks: tuple[tuple[int, int], ...]

    @classmethod
    def from_marks(cls, marks: Mapping[int, int]) -> MarkedMatching:
        return cls(tuple(sorted(marks.items())))

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(edge for edge, _ in self.marks)

    def mark_of(self, edge: int) -> int:
        return dict(self.marks)[edge]

    def weight(self, graph: TGraph) -> Fraction:
        total = Fraction(1)
        for _, piece in self.marks:
            total *= graph.subsegments[piece].t_length
        return total


@dataclass(frozen=True)
class SpanningForest:
    """One outgoing dart per interior vertex; roots carry none."""

    choices: tuple[tuple[int, TDart], ...]

    @classmethod
    def from_choices(cls, choices: Mapping[int, TDart]) -> SpanningForest:
        return cls(tuple(sorted(choices.items())))

    def as_dict(self) -> dict[int, TDart]:
        return dict(self.choices)

    @property
    def subsegments(self) -> frozenset[int]:
        return frozenset(dart[0] for _, dart in self.choices)

    def weight(self, graph: TGraph) -> Fraction:
        total = Fraction(1)
        for vertex, dart in self.choices:
            total *= _probability(graph, vertex, dart)
        return total


@dataclass(frozen=True)
class CorrespondenceReport:
    bijective: bool
    marked_matchings: int
    forests: int
    max_discrepancy: Fraction
    matching_mass: Fraction
    forest_mass: Fraction
    round_trip: bool
    dual_root: int | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "bijective": self.bijective,
            "marked_matchings": self.marked_matchings,
            "forests": self.forests,
            "max_discrepancy": format_fraction(self.max_discrepancy),
            "matching_mass": format_fraction(self.matching_mass),
            "forest_mass": format_fraction(self.forest_mass),
            "round_trip": self.round_trip,
            "dual_root": self.dual_root,
        }


@dataclass(frozen=True)
class TorusCorrespondenceReport:
    consistent: bool
    forests: int
    marked_matchings: int
    fibres_by_cycles: dict[int, int] = field(default_factory=dict)
    ratio: Fraction | None = None
    max_discrepancy: Fraction = Fraction(0)
    covered: bool = True

    def to_json(self) -> dict[str, Any]:
        return {
            "consistent": self.consistent,
            "forests": self.forests,
            "marked_matchings": self.marked_matchings,
            "fibres_by_cycles": {str(j): count for j, count in sorted(self.fibres_by_cycles.items())},
            "ratio": None if self.ratio is None else format_fraction(self.ratio),
            "max_discrepancy": format_fraction(self.max_discrepancy),
            "covered": self.covered,
        }


@dataclass(frozen=True)
class DualityReport:
    forests: int
    all_dual_trees: bool

    def to_json(self) -> dict[str, Any]:
        return {"forests": self.forests, "all_dual_trees": self.all_dual_trees}


def _probability(graph: TGraph, vertex: int, dart: TDart) -> Fraction:
    for move in graph.moves[vertex]:
        if move.dart == dart:
            return move.probability
    raise InvalidForest(f"vertex {vertex} has no move along dart {dart}")


def _follow(choices: Mapping[int, TDart], graph: TGraph, start: int) -> list[int] | None:
    """Return the cycle through ``start`` if following choices from it comes back, else None."""
    path = [start]
    vertex = graph.dart_head(choices[start])
    while vertex in choices:
        if vertex == start:
            return path
        path.append(vertex)
        vertex = graph.dart_head(choices[vertex])
        if len(path) > len(choices):
            return None
    return None


def _cycle_displacement(
    graph: TGraph, choices: Mapping[int, TDart], cycle: list[int]
) -> ExactPoint:
    total = (Fraction(0), Fraction(0))
    for vertex in cycle:
        total = add(total, graph.dart_vector(choices[vertex]))
    return total


def _check_forest(graph: TGraph, choices: Mapping[int, TDart]) -> None:
    interior = set(graph.interior_vertices)
    if set(choices) != interior:
        raise InvalidForest("every interior vertex needs exactly one outgoing edge")
    for vertex, dart in choices.items():
        _probability(graph, vertex, dart)
    for vertex in choices:
        cycle = _follow(choices, graph, vertex)
        if cycle is None:
            continue
        if graph.ambient == "plane":
            raise InvalidForest(f"forest contains a cycle through vertex {vertex}")
        if _cycle_displacement(graph, choices, cycle) == (0, 0):
            raise InvalidForest(f"forest contains a contractible cycle through vertex {vertex}")


def forest_from_marked_matching(marked: MarkedMatching, graph: TGraph,
                                dimer: DerivedDimerGraph | None = None) -> SpanningForest:
    """Point each interior vertex away from the marked subsegment of its complete edge."""
    dimer = dimer or graph.dimer_graph
    matched_blacks: dict[int, int] = {}
    for edge_id, piece in marked.marks:
        if edge_id not in dimer.dimer_map.edges:
            raise InvalidMarking(f"edge {edge_id} is not an edge of the dimer graph")
        edge = dimer.edges[edge_id]
        if piece not in edge.subsegments:
            raise InvalidMarking(f"subsegment {piece} is not part of edge {edge_id}")
        if edge.segment in matched_blacks:
            raise InvalidMarking(f"complete edge {edge.segment} is matched twice")
        matched_blacks[edge.segment] = piece
    faces = [dimer.edges[edge_id].face for edge_id in marked.edges]
    if len(set(faces)) != len(faces) or len(matched_blacks) != graph.n:
        raise InvalidMarking("marked edges do not form a perfect matching")

    choices: dict[int, TDart] = {}
    for vertex in graph.interior_vertices:
        lower, upper = graph.moves[vertex]
        mark = graph.subsegments[matched_blacks[graph.vertices[vertex].segment]]
        choices[vertex] = upper.dart if mark.t1 <= graph.vertices[vertex].t else lower.dart
    try:
        _check_forest(graph, choices)
    except InvalidForest as exc:
        raise InvalidMarking(f"marking does not give a forest: {exc}") from exc
    return SpanningForest.from_choices(choices)


def _marks_from_forest(graph: TGraph, forest: SpanningForest) -> dict[int, int]:
    used = forest.subsegments
    marks: dict[int, int] = {}
    for piece in graph.subsegments:
        if piece.id in used:
            continue
        if piece.segment in marks:
            raise InvalidForest(f"complete edge {piece.segment} has two unused subsegments")
        marks[piece.segment] = piece.id
    if len(marks) != graph.n:
        raise InvalidForest("some complete edge is fully covered by the forest")
    return marks


def _dual_edges(graph: TGraph, pieces: Mapping[int, int]) -> list[tuple[int, int, int]]:
    """(face, face, subsegment) for each listed subsegment, faces on its right and left."""
    return [
        (graph.face_of[(piece, 1)], graph.face_of[(piece, -1)], piece)
        for piece in pieces.values()
    ]


def _edge_for(graph: TGraph, dimer: DerivedDimerGraph, face: int, piece: int) -> int:
    for edge in dimer.edges.values():
        if edge.face == face and piece in edge.subsegments:
            return edge.id
    raise InvalidForest(f"face {face} does not border subsegment {piece}")


def marked_matching_from_forest(forest: SpanningForest, graph: TGraph,
                                dimer: DerivedDimerGraph | None = None) -> MarkedMatching:
    """Invert the forest map: orient the dual tree of unused subsegments toward the dual root."""
    dimer = dimer or graph.dimer_graph
    if graph.ambient != "plane":
        raise InvalidForest("a torus forest corresponds to a fibre of marked matchings")
    _check_forest(graph, forest.as_dict())
    marks = _marks_from_forest(graph, forest)
    tree = nx.MultiGraph()
    tree.add_nodes_from(face.id for face in graph.faces)
    for right, left, piece in _dual_edges(graph, marks):
        tree.add_edge(right, left, key=piece)
    if not nx.is_tree(tree):
        raise InvalidForest("unused subsegments do not form a dual spanning tree")
    result: dict[int, int] = {}
    seen = {dimer.dual_root}
    queue = deque([dimer.dual_root])
    while queue:
        face = queue.popleft()
        for _, neighbor, piece in tree.edges(face, keys=True):
            if neighbor in seen:
                continue
            seen.add(neighbor)
            queue.append(neighbor)
            result[_edge_for(graph, dimer, neighbor, piece)] = piece
    return MarkedMatching.from_marks(result)


def enumerate_marked_matchings(
    graph: TGraph, dimer: DerivedDimerGraph | None = None, config: Config | None = None
) -> Iterator[MarkedMatching]:
    """Perfect matchings of the dimer graph times the subsegment choices of each matched edge."""
    dimer = dimer or graph.dimer_graph
    for matching in enumerate_matchings(dimer.dimer_map, config).matchings:
        options = [[(edge_id, piece) for piece in dimer.edges[edge_id].subsegments]
                   for edge_id in matching.edges]
        for combo in itertools.product(*options):
            yield MarkedMatching(tuple(sorted(combo)))


def enumerate_forests(graph: TGraph) -> Iterator[SpanningForest]:
    """Directed spanning forests by per-vertex choice, rejecting cycles as they close."""
    interior = graph.interior_vertices
    choices: dict[int, TDart] = {}

    def extend(index: int) -> Iterator[SpanningForest]:
        if index == len(interior):
            yield SpanningForest.from_choices(choices)
            return
        vertex = interior[index]
        for move in graph.moves[vertex]:
            choices[vertex] = move.dart
            cycle = _follow(choices, graph, vertex)
            if cycle is None or (
                graph.ambient == "torus"
                and _cycle_displacement(graph, choices, cycle) != (0, 0)
            ):
                yield from extend(index + 1)
            del choices[vertex]

    yield from extend(0)


def verify_measure_preservation(
    graph: TGraph, dual_root: int | None = None, config: Config | None = None
) -> CorrespondenceReport:
    """Exhaustively compare marked-matching and forest measures through the bijection."""
    config = config or Config()
    limit = config.geometry.bijection_segment_limit
    if graph.n > limit:
        raise TooLarge(f"bijection check is limited to {limit} complete edges")
    if graph.ambient != "plane":
        raise BadDualRoot("measure preservation with a dual root needs a plane T-graph")
    dimer = derived_dimer_graph(graph, dual_root)
    marked = list(enumerate_marked_matchings(graph, dimer, config))
    forests = list(enumerate_forests(graph))
    matching_total = sum((m.weight(graph) for m in marked), Fraction(0))
    forest_total = sum((f.weight(graph) for f in forests), Fraction(0))

    images: set[SpanningForest] = set()
    discrepancy = Fraction(0)
    round_trip = True
    forest_set = set(forests)
    bijective = len(marked) == len(forests)
    for item in marked:
        try:
            image = forest_from_marked_matching(item, graph, dimer)
        except InvalidMarking:
            bijective = False
            continue
        if image not in forest_set or image in images:
            bijective = False
        images.add(image)
        discrepancy = max(
            discrepancy,
            abs(item.weight(graph) / matching_total - image.weight(graph) / forest_total),
        )
        if marked_matching_from_forest(image, graph, dimer) != item:
            round_trip = False
    logger.info("bijection check: %d marked matchings, %d forests, discrepancy %s",
                len(marked), len(forests), discrepancy)
    return CorrespondenceReport(
        bijective=bijective and len(images) == len(forests),
        marked_matchings=len(marked),
        forests=len(forests),
        max_discrepancy=discrepancy,
        matching_mass=sum((m.weight(graph) / matching_total for m in marked), Fraction(0)),
        forest_mass=sum((f.weight(graph) / forest_total for f in forests), Fraction(0)),
        round_trip=round_trip,
        dual_root=dimer.dual_root,
    )


def _orientations(
    faces: list[int], dual: list[tuple[int, int, int]]
) -> tuple[int, list[dict[int, int]]]:
    """Orient a unicyclic dual graph so every face has one outgoing edge.

    Returns the number of cycles j and the 2^j outgoing-edge assignments (face -> subsegment).
    """
    if len(dual) != len(faces):
        raise InvalidForest("dual graph is not unicyclic")
    incident: dict[int, list[tuple[int, int]]] = {face: [] for face in faces}
    for index, (right, left, _) in enumerate(dual):
        incident[right].append((index, left))
        incident[left].append((index, right))
    alive = set(range(len(dual)))
    degree = {face: len(items) for face, items in incident.items()}
    fixed: dict[int, int] = {}
    leaves = deque(face for face, count in degree.items() if count == 1)
    while leaves:
        face = leaves.popleft()
        if degree[face] != 1:
            continue
        index, other = next((i, o) for i, o in incident[face] if i in alive)
        fixed[face] = dual[index][2]
        alive.discard(index)
        degree[face] = 0
        degree[other] -= 1
        if degree[other] == 1:
            leaves.append(other)

    pending = {face for face in faces if face not in fixed}
    if any(degree[face] != 2 for face in pending):
        raise InvalidForest("dual graph is not a union of unicyclic components")
    cycles: list[list[tuple[int, int]]] = []
    while pending:
        start = min(pending)
        walk: list[tuple[int, int]] = []
        face, came = start, None
        while True:
            index, other = next((i, o) for i, o in incident[face] if i in alive and i != came)
            walk.append((face, dual[index][2]))
            pending.discard(face)
            face, came = other, index
            if face == start:
                break
        cycles.append(walk)

    assignments: list[dict[int, int]] = []
    for flips in itertools.product((False, True), repeat=len(cycles)):
        chosen = dict(fixed)
        for walk, flip in zip(cycles, flips):
            for position, (face, piece) in enumerate(walk):
                chosen[face] = walk[position - 1][1] if flip else piece
        assignments.append(chosen)
    return len(cycles), assignments


def torus_correspondence_check(
    graph: TGraph, config: Config | None = None
) -> TorusCorrespondenceReport:
    """Match cycle-rooted spanning forests with fibres of 2^j marked matchings."""
    config = config or Config()
    limit = config.geometry.torus_segment_limit
    if graph.ambient != "torus":
        raise NotTGraph("torus correspondence needs a torus T-graph")
    if graph.n > limit:
        raise TooLarge(f"torus correspondence is limited to {limit} segments")
    dimer = graph.dimer_graph
    faces = [face.id for face in graph.faces]
    forests = list(enumerate_forests(graph))
    forest_total = sum((f.weight(graph) for f in forests), Fraction(0))
    marked = set(enumerate_marked_matchings(graph, dimer, config))
    matching_total = sum((m.weight(graph) for m in marked), Fraction(0))

    fibres: dict[int, int] = {}
    covered: set[MarkedMatching] = set()
    ratio: Fraction | None = None
    discrepancy = Fraction(0)
    consistent = True
    for forest in forests:
        marks = _marks_from_forest(graph, forest)
        cycles, assignments = _orientations(faces, _dual_edges(graph, marks))
        fibres[cycles] = fibres.get(cycles, 0) + 1
        forest_measure = forest.weight(graph) / forest_total
        for assignment in assignments:
            item = MarkedMatching.from_marks(
                {_edge_for(graph, dimer, face, piece): piece for face, piece in assignment.items()}
            )
            if item not in marked or item in covered:
                consistent = False
                continue
            covered.add(item)
            current = (item.weight(graph) / matching_total) / forest_measure
            if ratio is None:
                ratio = current
            discrepancy = max(discrepancy, abs(current - ratio))
    logger.info("torus check: %d forests, fibres %s", len(forests), fibres)
    return TorusCorrespondenceReport(
        consistent=consistent and discrepancy == 0,
        forests=len(forests),
        marked_matchings=len(covered),
        fibres_by_cycles=fibres,
        ratio=ratio,
        max_discrepancy=discrepancy,
        covered=len(covered) == len(marked),
    )


def duality_check(graph: TGraph) -> DualityReport:
    """Check that the unused subsegments of every spanning forest form a dual spanning tree."""
    if graph.ambient != "plane":
        raise BadDualRoot("duality check needs a plane T-graph")
    count = 0
    ok = True
    for forest in enumerate_forests(graph):
        count += 1
        try:
            marks = _marks_from_forest(graph, forest)
        except InvalidForest:
            ok = False
            continue
        tree = nx.MultiGraph()
        tree.add_nodes_from(face.id for face in graph.faces)
        for right, left, piece in _dual_edges(graph, marks):
            tree.add_edge(right, left, key=piece)
        ok = ok and nx.is_tree(tree)
    return DualityReport(count, ok)
