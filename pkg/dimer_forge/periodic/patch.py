"""Almost periodic T-graph patches from the nullvectors at a unit-torus root."""

from __future__ import annotations

import cmath
import logging
import math
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.spatial.distance import pdist

from dimer_forge.config.schema import Config
from dimer_forge.dimers.kasteleyn import kasteleyn_signs
from dimer_forge.dimers.planarmap import Crossing, Dart, PlanarMap
from dimer_forge.errors import NotClosed, ZeroComponent
from dimer_forge.periodic.spectral import Nullvectors, SpectralRoot, nullvectors
from dimer_forge.utils.helpers import complex_to_json

logger = logging.getLogger(__name__)

Cell = tuple[int, int]
LiftedFace = tuple[int, Cell]
LiftedVertex = tuple[int, Cell]


def _shift(cell: Cell, by: Crossing, sign: int = 1) -> Cell:
    return cell[0] + sign * by[0], cell[1] + sign * by[1]


def _face_offsets(graph: PlanarMap) -> dict[Dart, Crossing]:
    """Crossing accumulated from the first dart of each face to every dart of it."""
    offsets: dict[Dart, Crossing] = {}
    for face in graph.faces:
        current: Crossing = (0, 0)
        for dart in face.darts:
            offsets[dart] = current
            current = _shift(current, graph.crossing(dart))
        if current != (0, 0):
            raise NotClosed(f"face {face.id} winds around the torus")
    return offsets


@dataclass(frozen=True)
class AlmostPeriodicPatch:
    """psi on the lifted window, with the complete edges and white faces it carries."""

    window: Cell
    root: tuple[complex, complex]
    nullvectors: Nullvectors
    seed: int
    values: dict[LiftedFace, complex]
    parts: dict[LiftedFace, tuple[complex, complex]]
    weights: dict[tuple[int, Cell], complex]
    segments: dict[LiftedVertex, tuple[complex, complex]]
    white_polygons: dict[LiftedVertex, tuple[complex, ...]]
    martingale_residual: float
    rotation_residual: float
    closure_residual: float
    diameter: float

    def segment_direction(self, black: int, cell: Cell) -> float:
        p, q = self.segments[(black, cell)]
        return cmath.phase(q - p)

    def to_json(self) -> dict[str, Any]:
        return {
            "window": list(self.window),
            "root": [complex_to_json(value) for value in self.root],
            "seed": self.seed,
            "nullvectors": self.nullvectors.to_json(),
            "faces": [
                {"face": face, "cell": list(cell), "psi": complex_to_json(value)}
                for (face, cell), value in sorted(self.values.items())
            ],
            "segments": [
                {"black": black, "cell": list(cell),
                 "p": complex_to_json(p), "q": complex_to_json(q)}
                for (black, cell), (p, q) in sorted(self.segments.items())
            ],
            "white_faces": [
                {"white": white, "cell": list(cell),
                 "polygon": [complex_to_json(point) for point in polygon]}
                for (white, cell), polygon in sorted(self.white_polygons.items())
            ],
            "martingale_residual": self.martingale_residual,
            "rotation_residual": self.rotation_residual,
            "closure_residual": self.closure_residual,
            "diameter": self.diameter,
        }


def almost_periodic_patch(
    graph: PlanarMap,
    root: SpectralRoot | tuple[complex, complex],
    window: Cell,
    seed: int | None = None,
    config: Config | None = None,
) -> AlmostPeriodicPatch:
    """Integrate K~(b, w) = 2 f(b) Re(g(w)) K(b, w) over the lifted graph inside ``window``.

    A lifted black (b, (j, k)) is kept when 0 <= j < J and 0 <= k < K; its edges are kept with
    it. psi is fixed to 0 at the face right of the first dart of the smallest black in cell
    (0, 0).
    """
    config = config or Config()
    seed = config.sampler.seed if seed is None else seed
    cols, rows = window
    if cols < 1 or rows < 1:
        raise ValueError(f"window must be at least 1x1, got {cols}x{rows}")
    alpha, beta = (root.alpha, root.beta) if isinstance(root, SpectralRoot) else root
    vectors = nullvectors(graph, (alpha, beta), seed, config)
    tolerance = config.spectral.nullvector_tolerance
    if vectors.f_zero:
        raise ZeroComponent(f"f vanishes at black vertices {list(vectors.f_zero)}")
    if vectors.g_zero:
        raise ZeroComponent(f"re g vanishes at white vertices {list(vectors.g_zero)}")

    signs = kasteleyn_signs(graph)
    offsets = _face_offsets(graph)
    face_of = graph.face_of

    def lifted_face(dart: Dart, cell: Cell) -> LiftedFace:
        return face_of[dart], _shift(cell, offsets[dart], -1)

    def power(cell: Cell) -> complex:
        return alpha ** cell[0] * beta ** cell[1]

    cells = [(j, k) for j in range(cols) for k in range(rows)]
    weights: dict[tuple[int, Cell], complex] = {}
    adjacency: dict[LiftedFace, list[tuple[LiftedFace, complex, complex]]] = {}
    for edge_id, edge in graph.edges.items():
        black, white = (edge.u, edge.v) if graph.colors[edge.u] == "b" else (edge.v, edge.u)
        crossing = graph.crossing((edge_id, black))
        kernel = signs[edge_id] * float(edge.weight)
        for cell in cells:
            f_b = power(cell) * vectors.f_of(black)
            g_w = power(_shift(cell, crossing)) * vectors.g_of(white)
            first = f_b * g_w * kernel
            second = f_b * g_w.conjugate() * kernel
            weights[(edge_id, cell)] = first + second
            right = lifted_face((edge_id, black), cell)
            left = lifted_face((edge_id, white), _shift(cell, crossing))
            adjacency.setdefault(right, []).append((left, 1j * first, 1j * second))
            adjacency.setdefault(left, []).append((right, -1j * first, -1j * second))

    start_black = min(graph.blacks)
    base = lifted_face((graph.rotations[start_black][0], start_black), (0, 0))
    parts, closure = _integrate(adjacency, base)
    scale = max((abs(value) for value in weights.values()), default=1.0)
    if closure > config.construct.closure_tolerance * max(scale, 1.0) * len(cells):
        raise NotClosed(f"lifted flow has curl {closure:.3g}")
    values = {face: first + second for face, (first, second) in parts.items()}

    segments: dict[LiftedVertex, tuple[complex, complex]] = {}
    for black in graph.blacks:
        for cell in cells:
            points = [values[lifted_face((edge_id, black), cell)]
                      for edge_id in graph.rotations[black]]
            segments[(black, cell)] = max(
                ((a, b) for a in points for b in points), key=lambda pair: abs(pair[0] - pair[1])
            )

    white_polygons: dict[LiftedVertex, tuple[complex, ...]] = {}
    for white in graph.whites:
        for cell in _complete_cells(graph, white, cols, rows):
            faces = [lifted_face((edge_id, white), cell) for edge_id in graph.rotations[white]]
            if all(face in values for face in faces):
                white_polygons[(white, cell)] = tuple(values[face] for face in faces)

    diameter = _diameter(values)
    patch = AlmostPeriodicPatch(
        window=(cols, rows),
        root=(alpha, beta),
        nullvectors=vectors,
        seed=seed,
        values=values,
        parts=parts,
        weights=weights,
        segments=segments,
        white_polygons=white_polygons,
        martingale_residual=junction_drift(
            segments.values(), config.geometry.relative_tolerance * diameter, 1e-4 * diameter
        ),
        rotation_residual=_rotation(segments, graph.blacks, alpha, beta, tolerance),
        closure_residual=closure,
        diameter=diameter,
    )
    logger.info(
        "patch %dx%d: %d faces, %d segments, diameter %.3f",
        cols, rows, len(values), len(segments), patch.diameter,
    )
    return patch


def _integrate(
    adjacency: dict[LiftedFace, list[tuple[LiftedFace, complex, complex]]], base: LiftedFace
) -> tuple[dict[LiftedFace, tuple[complex, complex]], float]:
    """Breadth-first integration of both flow components; returns the worst curl seen."""
    parts: dict[LiftedFace, tuple[complex, complex]] = {base: (0j, 0j)}
    queue = deque([base])
    worst = 0.0
    while queue:
        face = queue.popleft()
        first, second = parts[face]
        for neighbor, step_first, step_second in adjacency.get(face, []):
            candidate = (first + step_first, second + step_second)
            known = parts.get(neighbor)
            if known is None:
                parts[neighbor] = candidate
                queue.append(neighbor)
            else:
                worst = max(worst, abs(known[0] + known[1] - candidate[0] - candidate[1]))
    return parts, worst


def _complete_cells(graph: PlanarMap, white: int, cols: int, rows: int) -> list[Cell]:
    """Cells where every black neighbour of the lifted white lies inside the window."""
    crossings = []
    for edge_id in graph.rotations[white]:
        edge = graph.edges[edge_id]
        black = edge.other(white)
        crossings.append(graph.crossing((edge_id, black)))
    result = []
    for j in range(-2, cols + 2):
        for k in range(-2, rows + 2):
            if all(0 <= j - h < cols and 0 <= k - v < rows for h, v in crossings):
                result.append((j, k))
    return result


def junction_drift(segments: Iterable[tuple[complex, complex]], tolerance: float,
                   reach: float) -> float:
    """Worst drift of the walk at segment endpoints that tee into another segment.

    An endpoint within ``reach`` of the inside of another segment walks to the nearest
    vertices of that host on either side, with probabilities inversely proportional to
    the distances. The drift is the expected displacement of one step, which is the
    offset of the endpoint from its host line.
    """
    pieces = np.array([(p, q) for p, q in segments if abs(q - p) > tolerance],
                      dtype=complex).reshape(-1, 2)
    if len(pieces) < 2:
        return 0.0
    starts = pieces[:, 0]
    directions = pieces[:, 1] - starts
    lengths = np.abs(directions)
    slack = tolerance / lengths
    points = pieces.reshape(-1)
    worst = 0.0
    for index, point in enumerate(points):
        relative = (point - starts) * directions.conjugate() / lengths**2
        offset = np.abs(relative.imag) * lengths
        inside = (offset <= reach) & (relative.real > slack) & (relative.real < 1 - slack)
        inside[index // 2] = False
        hosts = np.flatnonzero(inside)
        if hosts.size == 0:
            continue
        host = hosts[np.argmin(offset[hosts])]
        here = relative.real[host]
        along = (points - starts[host]) * directions[host].conjugate() / lengths[host] ** 2
        on_host = np.abs(along.imag) * lengths[host] <= reach
        below = np.flatnonzero(on_host & (along.real < here - slack[host]))
        above = np.flatnonzero(on_host & (along.real > here + slack[host]))
        before = below[np.argmax(along.real[below])]
        after = above[np.argmin(along.real[above])]
        d_before, d_after = here - along.real[before], along.real[after] - here
        drift = (d_after * (points[before] - point) + d_before * (points[after] - point)) / (
            d_before + d_after
        )
        worst = max(worst, float(abs(drift)))
    return worst


def _rotation(segments: dict[LiftedVertex, tuple[complex, complex]], blacks: list[int],
              alpha: complex, beta: complex, tolerance: float) -> float:
    """Worst deviation of the direction step from arg alpha (or arg beta) modulo pi."""
    worst = 0.0
    for (black, (j, k)), (p, q) in segments.items():
        if abs(q - p) <= tolerance:
            continue
        for step, factor in (((1, 0), alpha), ((0, 1), beta)):
            other = segments.get((black, (j + step[0], k + step[1])))
            if other is None or abs(other[1] - other[0]) <= tolerance:
                continue
            turn = cmath.phase(other[1] - other[0]) - cmath.phase(q - p) - cmath.phase(factor)
            turn = math.remainder(turn, math.pi)
            worst = max(worst, abs(turn))
    return worst


def _diameter(values: dict[LiftedFace, complex]) -> float:
    if len(values) < 2:
        return 0.0
    points = np.array([[value.real, value.imag] for value in values.values()])
    return float(np.max(pdist(points)))
