"""Parallel components: groups of degenerate white faces and their collinear complete edges."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import networkx as nx

from dimer_forge.construct.psi import PsiMapping
from dimer_forge.utils.helpers import complex_to_json, signed_area

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParallelComponent:
    """Flat whites with all their black neighbors; the blacks share one extended complete edge."""

    vertices: tuple[int, ...]
    blacks: tuple[int, ...]
    whites: tuple[int, ...]
    extended_edge: tuple[complex, complex]
    is_one_cut: bool
    collinear: bool

    @property
    def excess(self) -> int:
        return len(self.blacks) - len(self.whites)

    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "blacks": list(self.blacks),
            "whites": list(self.whites),
            "extended_edge": [complex_to_json(point) for point in self.extended_edge],
            "is_one_cut": self.is_one_cut,
            "collinear": self.collinear,
            "excess": self.excess,
            "overlaps": True,
        }


def _is_flat(points: tuple[complex, ...], tolerance: float) -> bool:
    if len(points) < 3:
        return True
    return abs(signed_area([(p.real, p.imag) for p in points])) <= tolerance


def detect_flat_faces(psi: PsiMapping) -> list[ParallelComponent]:
    """Group white faces with zero-area images into parallel components."""
    graph = psi.graph
    tolerance = 1e-9 * abs(psi.polygon.area)
    flat = {white for white, points in psi.white_polygons.items() if _is_flat(points, tolerance)}
    if not flat:
        return []
    linked = nx.Graph()
    for edge in graph.edges.values():
        white = edge.u if graph.colors[edge.u] == "w" else edge.v
        if white in flat:
            linked.add_edge(edge.u, edge.v)

    components: list[ParallelComponent] = []
    scale = psi.polygon.diameter
    for nodes in sorted(nx.connected_components(linked), key=min):
        blacks = tuple(sorted(vertex for vertex in nodes if graph.colors[vertex] == "b"))
        whites = tuple(sorted(vertex for vertex in nodes if graph.colors[vertex] == "w"))
        points = [point for black in blacks for point in psi.segments[black]]
        p, q = max(((a, b) for a in points for b in points), key=lambda pair: abs(pair[0] - pair[1]))
        unit = (q - p) / abs(q - p) if abs(q - p) > 0 else 1
        collinear = all(
            abs(((point - p) * unit.conjugate()).imag) <= 1e-9 * scale for point in points
        )
        neighbors_inside = all(
            graph.edges[edge_id].other(white) in nodes
            for white in whites
            for edge_id in graph.rotations[white]
        )
        components.append(
            ParallelComponent(
                vertices=tuple(sorted(nodes)),
                blacks=blacks,
                whites=whites,
                extended_edge=(p, q),
                is_one_cut=neighbors_inside and len(blacks) == len(whites) + 1,
                collinear=collinear,
            )
        )
    logger.info("found %d parallel components", len(components))
    return components
