"""Builders for the standard plane and torus maps used as examples."""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Any, Literal

import networkx as nx
import numpy as np

from dimer_forge.dimers.planarmap import (
    Color,
    PlanarMap,
    TorusMap,
    from_embedding,
    torus_from_embedding,
)
from dimer_forge.utils.helpers import Point


def _weights(count: int, weights: Sequence[Any] | None) -> list[Any]:
    if weights is None:
        return [1] * count
    if len(weights) != count:
        raise ValueError(f"expected {count} weights, got {len(weights)}")
    return list(weights)


def single_edge(weight: Any = 1) -> PlanarMap:
    return from_embedding({0: "b", 1: "w"}, {0: (0.0, 0.0), 1: (1.0, 0.0)}, [(0, 1, weight)])


def cycle(half_length: int, weights: Sequence[Any] | None = None) -> PlanarMap:
    """Even cycle with ``2 * half_length`` vertices, black at even positions."""
    size = 2 * half_length
    if half_length < 2:
        raise ValueError("a bipartite cycle needs at least four vertices")
    colors: dict[int, Color] = {index: "b" if index % 2 == 0 else "w" for index in range(size)}
    positions = {
        index: (math.cos(2 * math.pi * index / size), math.sin(2 * math.pi * index / size))
        for index in range(size)
    }
    values = _weights(size, weights)
    return from_embedding(
        colors, positions, [(index, (index + 1) % size, values[index]) for index in range(size)]
    )


def grid(
    rows: int,
    cols: int,
    removed: Sequence[tuple[int, int]] = (),
    weights: Sequence[Any] | None = None,
) -> PlanarMap:
    """Rectangular grid graph; vertex (r, c) has id ``r * cols + c`` and is black when r + c is even."""
    skip = set(removed)
    cells = [(r, c) for r in range(rows) for c in range(cols) if (r, c) not in skip]
    colors: dict[int, Color] = {
        r * cols + c: "b" if (r + c) % 2 == 0 else "w" for r, c in cells
    }
    positions: dict[int, Point] = {r * cols + c: (float(c), float(r)) for r, c in cells}
    pairs: list[tuple[int, int]] = []
    present = set(cells)
    for r, c in cells:
        for dr, dc in ((0, 1), (1, 0)):
            if (r + dr, c + dc) in present:
                pairs.append((r * cols + c, (r + dr) * cols + c + dc))
    values = _weights(len(pairs), weights)
    return from_embedding(colors, positions, [(u, v, w) for (u, v), w in zip(pairs, values)])


def grid_minus_corner(weights: Sequence[Any] | None = None) -> PlanarMap:
    """3x3 grid with the black corner (2, 2) removed: four blacks, four whites."""
    return grid(3, 3, removed=[(2, 2)], weights=weights)


def split_center(weights: Sequence[Any] | None = None) -> PlanarMap:
    """3x3 grid minus a corner with its center split through a degree-two white.

    The center black becomes ``b1`` (joined to the east and north whites) and ``b2`` (west and
    south), both joined to a new white ``w*``; {w*, b1, b2} is an interior 1-cut.
    """
    colors: dict[int, Color] = {0: "b", 1: "w", 2: "b", 3: "w", 5: "w", 6: "b", 7: "w",
                                9: "b", 10: "b", 11: "w"}
    positions: dict[int, Point] = {
        0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0), 3: (0.0, 1.0), 5: (2.0, 1.0),
        6: (0.0, 2.0), 7: (1.0, 2.0), 9: (1.25, 1.25), 10: (0.75, 0.75), 11: (1.0, 1.0),
    }
    pairs = [(0, 1), (1, 2), (0, 3), (2, 5), (3, 6), (6, 7),
             (9, 5), (9, 7), (10, 3), (10, 1), (9, 11), (10, 11)]
    values = _weights(len(pairs), weights)
    return from_embedding(colors, positions, [(u, v, w) for (u, v), w in zip(pairs, values)])


def split_grid(
    rows: int,
    cols: int,
    cell: tuple[int, int],
    removed: Sequence[tuple[int, int]] = (),
    diagonal: Literal["ne", "se"] = "ne",
    weights: Sequence[Any] | None = None,
) -> PlanarMap:
    """Grid with the interior black at ``cell`` split through a new degree-two white.

    The first black keeps the east neighbour and the north (``"ne"``) or south (``"se"``) one;
    the second black keeps the other two. The blacks get ids ``rows * cols`` and
    ``rows * cols + 1``, the white ``rows * cols + 2``; together they form an interior 1-cut.
    """
    r0, c0 = cell
    if (r0 + c0) % 2 or not (0 < r0 < rows - 1 and 0 < c0 < cols - 1):
        raise ValueError(f"cell {cell} is not an interior black")
    base = grid(rows, cols, removed)
    center = r0 * cols + c0
    upward = 1 if diagonal == "ne" else -1
    first_whites = (center + 1, center + upward * cols)
    second_whites = (center - 1, center - upward * cols)
    if any(white not in base.colors for white in first_whites + second_whites):
        raise ValueError(f"cell {cell} lost a neighbour to the removed cells")
    first, second, joint = rows * cols, rows * cols + 1, rows * cols + 2
    colors: dict[int, Color] = {v: c for v, c in base.colors.items() if v != center}
    colors.update({first: "b", second: "b", joint: "w"})
    positions: dict[int, Point] = {
        vertex: (float(vertex % cols), float(vertex // cols)) for vertex in colors if vertex < first
    }
    positions[first] = (c0 + 0.25, r0 + 0.25 * upward)
    positions[second] = (c0 - 0.25, r0 - 0.25 * upward)
    positions[joint] = (float(c0), float(r0))
    pairs = [(edge.u, edge.v) for edge in base.edges.values() if center not in (edge.u, edge.v)]
    pairs += [(first, white) for white in first_whites]
    pairs += [(second, white) for white in second_whites]
    pairs += [(first, joint), (second, joint)]
    values = _weights(len(pairs), weights)
    return from_embedding(colors, positions, [(u, v, w) for (u, v), w in zip(pairs, values)])


def forced_edge_example() -> PlanarMap:
    """A 4-cycle with a pendant white joined to a degree-one black."""
    colors: dict[int, Color] = {0: "b", 1: "w", 2: "b", 3: "w", 4: "w", 5: "b"}
    positions: dict[int, Point] = {
        0: (0.0, 0.0), 1: (1.0, 0.0), 2: (1.0, 1.0), 3: (0.0, 1.0), 4: (-1.0, -1.0),
        5: (-2.0, -2.0),
    }
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5)]
    return from_embedding(colors, positions, [(u, v, 1) for u, v in pairs])


def hall_violation_example() -> PlanarMap:
    """A tree whose two leaf whites share their only black neighbor."""
    colors: dict[int, Color] = {0: "b", 1: "b", 2: "b", 3: "w", 4: "w", 5: "w"}
    positions: dict[int, Point] = {
        3: (0.0, 0.0), 0: (-1.0, 1.0), 1: (1.0, 1.0), 2: (0.0, -1.0),
        4: (-1.0, -2.0), 5: (1.0, -2.0),
    }
    pairs = [(0, 3), (1, 3), (2, 3), (2, 4), (2, 5)]
    return from_embedding(colors, positions, [(u, v, 1) for u, v in pairs])


def random_grid_map(seed: int, rows: int = 3, cols: int = 4, max_weight: int = 9) -> PlanarMap:
    """Random connected spanning subgraph of a grid with seeded rational weights."""
    rng = np.random.default_rng(seed)
    full = grid(rows, cols)
    graph = nx.MultiGraph()
    graph.add_nodes_from(full.colors)
    kept = []
    for edge in full.edges.values():
        graph.add_edge(edge.u, edge.v, key=edge.id)
        kept.append(edge.id)
    for edge_id in rng.permutation(sorted(full.edges)):
        edge = full.edges[int(edge_id)]
        if rng.random() < 0.35:
            graph.remove_edge(edge.u, edge.v, key=edge.id)
            if nx.is_connected(graph):
                kept.remove(edge.id)
            else:
                graph.add_edge(edge.u, edge.v, key=edge.id)
    positions = {r * cols + c: (float(c), float(r)) for r in range(rows) for c in range(cols)}
    triples = [
        (
            full.edges[edge_id].u,
            full.edges[edge_id].v,
            Fraction(int(rng.integers(1, max_weight + 1)), int(rng.integers(1, max_weight + 1))),
        )
        for edge_id in sorted(kept)
    ]
    return from_embedding(dict(full.colors), positions, triples)


HONEYCOMB_GENERATORS: tuple[Point, Point] = (
    (math.sqrt(3) / 2, -1.5),
    (-math.sqrt(3) / 2, -1.5),
)


def honeycomb(a: Any = 1, b: Any = 1, c: Any = 1) -> TorusMap:
    """Honeycomb fundamental domain: one black, one white, crossings (0,0), (1,0), (0,1)."""
    return torus_from_embedding(
        {0: "b", 1: "w"},
        {0: (0.0, 0.0), 1: (0.0, 1.0)},
        [(0, 1, a, (0, 0)), (0, 1, b, (1, 0)), (0, 1, c, (0, 1))],
        HONEYCOMB_GENERATORS,
    )


SQUARE_OCTAGON_GENERATORS: tuple[Point, Point] = ((2.0, 0.0), (1.0, 1.0))


def square_octagon(weights: Sequence[Any] | None = None) -> TorusMap:
    """Square-octagon fundamental domain with two squares, twelve edges and four faces."""
    d = 0.3
    # blacks: 0 L_A, 1 R_A, 2 B_B, 3 T_B; whites: 4 B_A, 5 T_A, 6 L_B, 7 R_B
    colors: dict[int, Color] = {0: "b", 1: "b", 2: "b", 3: "b", 4: "w", 5: "w", 6: "w", 7: "w"}
    positions: dict[int, Point] = {
        0: (-d, 0.0), 1: (d, 0.0), 2: (1.0, -d), 3: (1.0, d),
        4: (0.0, -d), 5: (0.0, d), 6: (1.0 - d, 0.0), 7: (1.0 + d, 0.0),
    }
    pairs = [
        (0, 4, (0, 0)), (0, 5, (0, 0)), (1, 4, (0, 0)), (1, 5, (0, 0)),
        (2, 6, (0, 0)), (2, 7, (0, 0)), (3, 6, (0, 0)), (3, 7, (0, 0)),
        (1, 6, (0, 0)), (0, 7, (-1, 0)), (2, 5, (1, -1)), (3, 4, (0, 1)),
    ]
    values = _weights(len(pairs), weights)
    return torus_from_embedding(
        colors,
        positions,
        [(u, v, w, cross) for (u, v, cross), w in zip(pairs, values)],
        SQUARE_OCTAGON_GENERATORS,
    )
