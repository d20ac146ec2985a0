"""Rebuild the T-graph from psi and compare its derived dimer graph with the input map."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from dimer_forge.config.schema import Config
from dimer_forge.construct.polygon import Polygon
from dimer_forge.construct.psi import PsiMapping, build_psi
from dimer_forge.dimers.planarmap import PlanarMap
from dimer_forge.errors import NotTGraph
from dimer_forge.tgraph.correspondence import CorrespondenceReport, verify_measure_preservation
from dimer_forge.tgraph.geometry import to_float
from dimer_forge.tgraph.tgraph import TGraph, build_from_segments, derived_dimer_graph
from dimer_forge.utils.helpers import signed_area

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundtripReport:
    isomorphic: bool
    gauge_residual: float
    dual_root: int
    face_of_white: dict[int, int]
    bijection: CorrespondenceReport | None

    @property
    def ok(self) -> bool:
        bijective = self.bijection is None or self.bijection.bijective
        return self.isomorphic and self.gauge_residual < 1e-9 and bijective

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "isomorphic": self.isomorphic,
            "gauge_residual": self.gauge_residual,
            "dual_root": self.dual_root,
            "face_of_white": {str(white): face for white, face in sorted(self.face_of_white.items())},
            "bijection": None if self.bijection is None else self.bijection.to_json(),
        }


def tgraph_from_psi(psi: PsiMapping, config: Config | None = None) -> TGraph:
    """Complete edges in black id order become segments 0..n-1."""
    return build_from_segments(psi.segment_list(), "plane", config)


def white_faces(psi: PsiMapping, tgraph: TGraph) -> dict[int, int]:
    """Face of the rebuilt T-graph that carries each white vertex.

    An edge (b, w) with nonzero flow is a stretch of segment b whose two sides
    are psi of its dual endpoints; the face on the side of the white polygon is
    the white's face. All edges of a white have to agree.
    """
    graph = psi.graph
    index_of = {black: index for index, black in enumerate(psi.blacks)}
    area_floor = tgraph.tolerance * max(psi.polygon.diameter, 1.0)
    located: dict[int, int] = {}
    for white in graph.whites:
        points = psi.white_polygons[white]
        area = signed_area([(p.real, p.imag) for p in points]) if len(points) >= 3 else 0.0
        if abs(area) <= area_floor:
            raise NotTGraph(f"white {white} has a flat face")
        found: set[int] = set()
        for edge_id, _ in graph.darts_at(white):
            edge = graph.edges[edge_id]
            black = edge.u if edge.v == white else edge.v
            right, left = psi.edge_duals[edge_id]
            start, end = psi.values[left], psi.values[right]
            if abs(end - start) <= tgraph.tolerance:
                continue
            segment = tgraph.segments[index_of[black]]
            p, q = complex(*to_float(segment.p)), complex(*to_float(segment.q))
            direction = q - p
            middle = (start + end) / 2
            t = ((middle - p) * direction.conjugate()).real / abs(direction) ** 2
            piece = next(
                (
                    piece
                    for piece in tgraph.subsegments
                    if piece.segment == segment.id and float(piece.t0) <= t <= float(piece.t1)
                ),
                None,
            )
            if piece is None:
                raise NotTGraph(f"edge {edge_id} falls outside segment {segment.id}")
            along = 1 if ((end - start) * direction.conjugate()).real > 0 else -1
            side = along if area < 0 else -along
            found.add(tgraph.face_of[(piece.id, side)])
        if len(found) != 1:
            raise NotTGraph(f"white {white} touches {len(found)} faces of the rebuilt T-graph")
        located[white] = found.pop()
    return located


def _gauge_residual(pairs: list[tuple[int, int, float, float]]) -> float:
    """Least-squares fit of log(out/in) = a_w + c_b; returns the largest residual."""
    if not pairs:
        return 0.0
    blacks = sorted({black for black, _, _, _ in pairs})
    whites = sorted({white for _, white, _, _ in pairs})
    columns = {black: index for index, black in enumerate(blacks)}
    columns.update({("w", white): len(blacks) + index for index, white in enumerate(whites)})
    design = np.zeros((len(pairs), len(blacks) + len(whites)))
    target = np.zeros(len(pairs))
    for row, (black, white, weight_in, weight_out) in enumerate(pairs):
        design[row, columns[black]] = 1.0
        design[row, columns[("w", white)]] = 1.0
        target[row] = math.log(weight_out) - math.log(weight_in)
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    return float(np.max(np.abs(design @ solution - target)))


def roundtrip_check(
    graph: PlanarMap,
    polygon: Polygon | None = None,
    b0: int | None = None,
    seed: int | None = None,
    config: Config | None = None,
    verify_bijection: bool = True,
) -> RoundtripReport:
    """Check that the T-graph built from the map gives back the map up to gauge."""
    config = config or Config()
    psi = build_psi(graph, polygon, b0, seed, config)
    tgraph = tgraph_from_psi(psi, config)
    blacks = psi.blacks
    face_of_white = white_faces(psi, tgraph)
    leftover = [face.id for face in tgraph.outer_faces if face.id not in face_of_white.values()]
    if len(leftover) != 1 or len(set(face_of_white.values())) != len(face_of_white):
        raise NotTGraph("rebuilt T-graph faces do not match the white vertices one to one")
    dual_root = leftover[0]
    dimer = derived_dimer_graph(tgraph, dual_root)
    white_of_face = {face: white for white, face in face_of_white.items()}

    weights_in: dict[tuple[int, int], float] = {}
    for edge in graph.edges.values():
        black, white = (edge.u, edge.v) if graph.colors[edge.u] == "b" else (edge.v, edge.u)
        weights_in[(black, white)] = weights_in.get((black, white), 0.0) + float(edge.weight)
    weights_out: dict[tuple[int, int], float] = {}
    for edge in dimer.edges.values():
        if edge.face == dual_root:
            continue
        key = (blacks[edge.segment], white_of_face[edge.face])
        weights_out[key] = weights_out.get(key, 0.0) + float(edge.weight)

    isomorphic = set(weights_in) == set(weights_out)
    pairs = [
        (black, white, weights_in[(black, white)], weights_out[(black, white)])
        for black, white in sorted(weights_in)
        if (black, white) in weights_out
    ]
    residual = _gauge_residual(pairs)
    bijection = None
    if verify_bijection and tgraph.n <= config.geometry.bijection_segment_limit:
        bijection = verify_measure_preservation(tgraph, dual_root, config)
    logger.info("roundtrip: isomorphic=%s gauge residual %.3g", isomorphic, residual)
    return RoundtripReport(isomorphic, residual, dual_root, face_of_white, bijection)
