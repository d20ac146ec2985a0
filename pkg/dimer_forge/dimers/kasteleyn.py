"""Kasteleyn signs, determinants, matching enumeration and gauge normalization."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from fractions import Fraction
from typing import Any, Literal

import networkx as nx
import numpy as np
import sympy

from dimer_forge.config.schema import Config
from dimer_forge.dimers.planarmap import PlanarMap
from dimer_forge.errors import Singular, TooLarge, Unbalanced, ZeroComponent
from dimer_forge.utils.helpers import complex_to_json, format_fraction

logger = logging.getLogger(__name__)

Field = Literal["rational", "complex"]


@dataclass(frozen=True)
class KasteleynMatrix:
    """Signed weight matrix with rows indexed by blacks and columns by whites."""

    entries: tuple[tuple[Any, ...], ...]
    blacks: tuple[int, ...]
    whites: tuple[int, ...]
    field: Field = "rational"
    signs: Mapping[int, int] = dataclass_field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.blacks)

    def row_of(self, black: int) -> int:
        return self.blacks.index(black)

    def column_of(self, white: int) -> int:
        return self.whites.index(white)

    def entry(self, black: int, white: int) -> Any:
        return self.entries[self.row_of(black)][self.column_of(white)]

    def as_sympy(self) -> sympy.Matrix:
        """Return an exact sympy matrix; only defined over the rationals."""
        if self.field != "rational":
            raise ValueError("only rational matrices have an exact form")
        return sympy.Matrix(
            [[sympy.Rational(value.numerator, value.denominator) for value in row]
             for row in self.entries]
        )

    def as_array(self) -> np.ndarray:
        dtype = complex if self.field == "complex" else float
        if not self.entries:
            return np.zeros((0, 0), dtype=dtype)
        return np.array([[dtype(value) for value in row] for row in self.entries], dtype=dtype)

    def to_json(self) -> dict[str, Any]:
        if self.field == "rational":
            rows = [[format_fraction(value) for value in row] for row in self.entries]
        else:
            rows = [[complex_to_json(complex(value)) for value in row] for row in self.entries]
        return {
            "field": self.field,
            "blacks": list(self.blacks),
            "whites": list(self.whites),
            "entries": rows,
        }


@dataclass(frozen=True)
class Matching:
    """A perfect matching given by edge ids, with weight and probability."""

    edges: tuple[int, ...]
    weight: Fraction
    probability: Fraction


@dataclass(frozen=True)
class MatchingEnumeration:
    matchings: tuple[Matching, ...]
    partition_function: Fraction

    def __len__(self) -> int:
        return len(self.matchings)


@dataclass(frozen=True)
class GaugeNormalization:
    """Normalized matrix K~ = diag(g) K diag(f) with K~ 1 = scalar * A_b and 1^t K~ = A_w."""

    matrix: KasteleynMatrix
    f: tuple[Fraction, ...]
    g: tuple[complex, ...]
    scalar: complex

    def row_sums(self) -> np.ndarray:
        return self.matrix.as_array().sum(axis=1)

    def column_sums(self) -> np.ndarray:
        return self.matrix.as_array().sum(axis=0)


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(int(sympy.fraction(value)[0]), int(sympy.fraction(value)[1]))


def kasteleyn_signs(graph: PlanarMap) -> dict[int, int]:
    """Choose edge signs so every non-root face of degree d has sign product (-1)^(d/2+1).

    Spanning-tree edges and edges outside the dual tree are +1; dual-tree edges are fixed by
    peeling faces leaf-first toward the root face (the outer face, or face 0 on the torus).
    """
    multigraph = graph.to_networkx()
    for edge_id, edge in graph.edges.items():
        multigraph.edges[edge.u, edge.v, edge_id]["order"] = edge_id
    tree = {
        key
        for _, _, key in nx.minimum_spanning_edges(
            multigraph, algorithm="kruskal", weight="order", keys=True, data=False
        )
    }
    faces = graph.faces
    outer = graph.outer_face
    root = outer.id if outer is not None else faces[0].id

    dual = nx.MultiGraph()
    dual.add_nodes_from(face.id for face in faces)
    for edge_id, edge in graph.edges.items():
        if edge_id in tree:
            continue
        left = graph.face_of[(edge_id, edge.u)]
        right = graph.face_of[(edge_id, edge.v)]
        dual.add_edge(left, right, key=edge_id, order=edge_id)
    dual_tree_edges = list(
        nx.minimum_spanning_edges(dual, algorithm="kruskal", weight="order", keys=True, data=False)
    )
    adjacency: dict[int, list[tuple[int, int]]] = {face.id: [] for face in faces}
    for left, right, edge_id in dual_tree_edges:
        adjacency[left].append((right, edge_id))
        adjacency[right].append((left, edge_id))

    signs = {edge_id: 1 for edge_id in graph.edges}
    parent_edge: dict[int, int] = {}
    order = [root]
    queue = deque([root])
    visited = {root}
    while queue:
        face_id = queue.popleft()
        for neighbor, edge_id in adjacency[face_id]:
            if neighbor not in visited:
                visited.add(neighbor)
                parent_edge[neighbor] = edge_id
                order.append(neighbor)
                queue.append(neighbor)
    leftover = len(graph.edges) - len(tree) - len(dual_tree_edges)
    logger.debug("sign peeling: %d tree edges, %d dual edges, %d free edges",
                 len(tree), len(dual_tree_edges), leftover)

    for face_id in reversed(order[1:]):
        face = faces[face_id]
        target = -1 if (face.degree // 2) % 2 == 0 else 1
        free = parent_edge[face_id]
        product = 1
        for edge_id, _ in face.darts:
            if edge_id != free:
                product *= signs[edge_id]
        signs[free] = target * product
    return signs


def assign_signs(graph: PlanarMap) -> KasteleynMatrix:
    """Return the exact Kasteleyn matrix of a balanced map."""
    blacks, whites = graph.blacks, graph.whites
    if len(blacks) != len(whites):
        raise Unbalanced(f"map has {len(blacks)} black and {len(whites)} white vertices")
    signs = kasteleyn_signs(graph)
    rows = {black: index for index, black in enumerate(blacks)}
    columns = {white: index for index, white in enumerate(whites)}
    entries = [[Fraction(0)] * len(whites) for _ in blacks]
    for edge_id, edge in graph.edges.items():
        black, white = (edge.u, edge.v) if graph.colors[edge.u] == "b" else (edge.v, edge.u)
        entries[rows[black]][columns[white]] += signs[edge_id] * edge.weight
    return KasteleynMatrix(
        entries=tuple(tuple(row) for row in entries),
        blacks=tuple(blacks),
        whites=tuple(whites),
        field="rational",
        signs=signs,
    )


def determinant(matrix: KasteleynMatrix, config: Config | None = None) -> Fraction | complex:
    """Exact determinant for rational matrices within the size limit, float otherwise."""
    config = config or Config()
    if matrix.n == 0:
        return Fraction(1)
    if matrix.field == "rational" and matrix.n <= config.kasteleyn.exact_limit:
        return _to_fraction(matrix.as_sympy().det(method="bareiss"))
    array = matrix.as_array()
    condition = np.linalg.cond(array)
    if condition > config.kasteleyn.condition_warning:
        logger.warning("kasteleyn matrix is ill-conditioned (cond=%.3g)", condition)
    return complex(np.linalg.det(array))


def adjugate(
    matrix: KasteleynMatrix, config: Config | None = None, corank: int = 0
) -> np.ndarray:
    """Adjugate of K, rows indexed by whites and columns by blacks.

    Rational matrices within ``exact_limit`` go through fraction-free elimination
    and come back as an object array of Fractions. Anything else is computed from
    a singular value decomposition in complex double. ``corank`` says how many
    vanishing singular values are expected when judging the conditioning.
    """
    config = config or Config()
    n = matrix.n
    if matrix.field == "rational" and n <= config.kasteleyn.exact_limit:
        result = np.empty((n, n), dtype=object)
        if n <= 1:
            result.fill(Fraction(1))
            return result
        exact = matrix.as_sympy().adjugate(method="bareiss")
        for i in range(n):
            for j in range(n):
                result[i, j] = _to_fraction(exact[i, j])
        return result
    array = matrix.as_array().astype(complex)
    if n == 0:
        return array
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    u, sigma, vh = np.linalg.svd(array)
    kept = sigma[: max(n - corank, 1)]
    if kept[-1] == 0 or kept[0] / kept[-1] > config.kasteleyn.condition_warning:
        logger.warning("adjugate of an ill-conditioned matrix (n=%d)", n)
    cofactors = np.array([np.prod(np.delete(sigma, index)) for index in range(n)])
    phase = np.linalg.det(u) * np.linalg.det(vh)
    return phase * (vh.conj().T * cofactors) @ u.conj().T


def partition_function(matrix: KasteleynMatrix, config: Config | None = None) -> Fraction:
    """Return |det K|, the weighted number of perfect matchings."""
    value = determinant(matrix, config)
    if isinstance(value, Fraction):
        return abs(value)
    logger.warning("partition function computed in floating point for n=%d", matrix.n)
    return Fraction(abs(value)).limit_denominator(10**12)


def enumerate_matchings(graph: PlanarMap, config: Config | None = None) -> MatchingEnumeration:
    """List every perfect matching with its weight and probability nu(M)/Z."""
    config = config or Config()
    limit = config.kasteleyn.enumeration_limit
    if graph.vertex_count > limit:
        raise TooLarge(f"matching enumeration is limited to {limit} vertices")
    blacks = graph.blacks
    if len(blacks) != len(graph.whites):
        return MatchingEnumeration((), Fraction(0))
    options: dict[int, list[tuple[int, int]]] = {black: [] for black in blacks}
    for edge_id, edge in graph.edges.items():
        black, white = (edge.u, edge.v) if graph.colors[edge.u] == "b" else (edge.v, edge.u)
        options[black].append((edge_id, white))

    found: list[tuple[tuple[int, ...], Fraction]] = []

    def extend(index: int, used: set[int], chosen: list[int], weight: Fraction) -> None:
        if index == len(blacks):
            found.append((tuple(sorted(chosen)), weight))
            return
        for edge_id, white in options[blacks[index]]:
            if white in used:
                continue
            used.add(white)
            chosen.append(edge_id)
            extend(index + 1, used, chosen, weight * graph.edges[edge_id].weight)
            chosen.pop()
            used.discard(white)

    extend(0, set(), [], Fraction(1))
    total = sum((weight for _, weight in found), Fraction(0))
    matchings = tuple(
        Matching(edges=edges, weight=weight, probability=weight / total)
        for edges, weight in found
    )
    return MatchingEnumeration(matchings, total)


def gauge_normalize(
    matrix: KasteleynMatrix,
    a_black: Sequence[Any],
    a_white: Sequence[complex],
    config: Config | None = None,
) -> GaugeNormalization:
    """Rescale rows and columns of K so that K~ 1 is parallel to A_b and 1^t K~ = A_w.

    ``a_black`` is indexed like ``matrix.blacks`` and must be rational; ``a_white`` like
    ``matrix.whites``.
    """
    config = config or Config()
    if matrix.field != "rational":
        raise ValueError("gauge normalization expects an exact rational matrix")
    n = matrix.n
    if len(a_black) != n or len(a_white) != n:
        raise ValueError("gauge vectors must match the matrix size")
    exact = matrix.as_sympy()
    if exact.det(method="bareiss") == 0:
        raise Singular("kasteleyn matrix is singular")
    rhs = sympy.Matrix([sympy.Rational(Fraction(value).numerator, Fraction(value).denominator)
                        for value in a_black])
    solution = exact.LUsolve(rhs)
    f = tuple(_to_fraction(value) for value in solution)
    for index, value in enumerate(f):
        if value == 0:
            raise ZeroComponent(f"gauge vector vanishes at white vertex {matrix.whites[index]}")

    column_scaled = matrix.as_array() * np.array([float(value) for value in f])[None, :]
    g = np.linalg.solve(column_scaled.T.astype(complex), np.asarray(a_white, dtype=complex))
    scale = float(np.max(np.abs(g))) if n else 0.0
    for index, value in enumerate(g):
        if abs(value) <= config.construct.zero_tolerance * max(scale, 1.0):
            raise ZeroComponent(f"gauge covector vanishes at black vertex {matrix.blacks[index]}")

    normalized = g[:, None] * column_scaled
    a_b = np.array([float(Fraction(value)) for value in a_black], dtype=complex)
    row_sums = normalized.sum(axis=1)
    scalar = complex(np.vdot(a_b, row_sums) / np.vdot(a_b, a_b)) if np.any(a_b) else 0j
    tilde = KasteleynMatrix(
        entries=tuple(tuple(complex(value) for value in row) for row in normalized),
        blacks=matrix.blacks,
        whites=matrix.whites,
        field="complex",
        signs=matrix.signs,
    )
    return GaugeNormalization(matrix=tilde, f=f, g=tuple(complex(value) for value in g),
                              scalar=scalar)


def random_generic_weights(graph: PlanarMap, seed: int, config: Config | None = None) -> PlanarMap:
    """Return a copy of the map with seeded random rational weights."""
    config = config or Config()
    rng = np.random.default_rng(seed)
    bound = config.kasteleyn.weight_bound
    weights = {
        edge_id: Fraction(int(rng.integers(1, bound + 1)), int(rng.integers(1, bound + 1)))
        for edge_id in graph.edges
    }
    return graph.with_weights(weights)
