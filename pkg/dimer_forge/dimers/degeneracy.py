"""k-cut, k-breaker and unused-edge analysis of balanced bipartite maps."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

import networkx as nx
import numpy as np

from dimer_forge.config.schema import Config
from dimer_forge.dimers.kasteleyn import adjugate, assign_signs, random_generic_weights
from dimer_forge.dimers.planarmap import PlanarMap
from dimer_forge.errors import Unbalanced

logger = logging.getLogger(__name__)

Cut = tuple[int, ...]


@dataclass(frozen=True)
class DegeneracyReport:
    """Matching-theoretic degeneracy data.

    ``k_nondegenerate[k]`` is true when the map has no k-breaker, which for generic weights
    means every k-by-k minor of K^-1 is nonzero. Cuts are listed as sorted vertex tuples
    W' + N(W') whose black count exceeds the white count by exactly k; ``min_deficiency`` is the
    smallest such excess over all proper white subsets, so a k-cut exists iff it is at most k.
    """

    has_perfect_matching: bool
    unused_edges: tuple[int, ...]
    forced_edges: tuple[int, ...]
    minus_one_cuts: tuple[Cut, ...] = ()
    zero_cuts: tuple[Cut, ...] = ()
    one_cuts: tuple[Cut, ...] = ()
    interior_one_cuts: tuple[Cut, ...] = ()
    min_deficiency: int | None = None
    k_nondegenerate: dict[int, bool] = field(default_factory=dict)
    probabilistic: bool = False

    def has_cut(self, k: int) -> bool | None:
        if self.min_deficiency is None:
            return None
        return self.min_deficiency <= k

    def to_json(self) -> dict[str, Any]:
        return {
            "has_perfect_matching": self.has_perfect_matching,
            "unused_edges": list(self.unused_edges),
            "forced_edges": list(self.forced_edges),
            "minus_one_cuts": [list(cut) for cut in self.minus_one_cuts],
            "zero_cuts": [list(cut) for cut in self.zero_cuts],
            "one_cuts": [list(cut) for cut in self.one_cuts],
            "interior_one_cuts": [list(cut) for cut in self.interior_one_cuts],
            "min_deficiency": self.min_deficiency,
            "k_nondegenerate": {str(k): value for k, value in sorted(self.k_nondegenerate.items())},
            "probabilistic": self.probabilistic,
        }


def _simple_graph(graph: PlanarMap) -> nx.Graph:
    simple = nx.Graph()
    for vertex, color in graph.colors.items():
        simple.add_node(vertex, color=color)
    simple.add_edges_from((edge.u, edge.v) for edge in graph.edges.values())
    return simple


def _has_perfect_matching(simple: nx.Graph, removed: Iterable[int] = ()) -> bool:
    removed = set(removed)
    rest = simple.subgraph(node for node in simple.nodes if node not in removed)
    if rest.number_of_nodes() == 0:
        return True
    tops = [node for node, color in rest.nodes(data="color") if color == "b"]
    if 2 * len(tops) != rest.number_of_nodes():
        return False
    matching = nx.bipartite.hopcroft_karp_matching(rest, top_nodes=tops)
    return len(matching) == rest.number_of_nodes()


def degeneracy_report(graph: PlanarMap, config: Config | None = None) -> DegeneracyReport:
    """Classify perfect-matching degeneracies of a balanced map."""
    config = config or Config()
    blacks, whites = graph.blacks, graph.whites
    if len(blacks) != len(whites):
        raise Unbalanced(f"map has {len(blacks)} black and {len(whites)} white vertices")
    simple = _simple_graph(graph)
    has_pm = _has_perfect_matching(simple)

    multiplicity: dict[frozenset[int], int] = {}
    for edge in graph.edges.values():
        key = frozenset((edge.u, edge.v))
        multiplicity[key] = multiplicity.get(key, 0) + 1
    unused: list[int] = []
    forced: list[int] = []
    for edge_id, edge in graph.edges.items():
        if not has_pm or not _has_perfect_matching(simple, (edge.u, edge.v)):
            unused.append(edge_id)
            continue
        if multiplicity[frozenset((edge.u, edge.v))] == 1:
            reduced = simple.copy()
            reduced.remove_edge(edge.u, edge.v)
            if not _has_perfect_matching(reduced):
                forced.append(edge_id)

    if len(whites) > config.kasteleyn.cut_search_limit:
        logger.info("cut search skipped for %d whites; using randomized minor test", len(whites))
        flags = {0: has_pm, 1: False, 2: False}
        if has_pm:
            flags[1], flags[2] = _randomized_minor_test(graph, config)
        return DegeneracyReport(
            has_perfect_matching=has_pm,
            unused_edges=tuple(unused),
            forced_edges=tuple(forced),
            k_nondegenerate=flags,
            probabilistic=True,
        )

    cuts, min_deficiency = _tight_cuts(graph, simple)
    boundary = _boundary_whites(graph)
    interior = tuple(
        cut
        for cut in cuts[1]
        if not any(vertex in boundary for vertex in cut if graph.colors[vertex] == "w")
    )
    flags = {
        0: has_pm,
        1: not _has_breaker(simple, blacks, whites, 1),
        2: not _has_breaker(simple, blacks, whites, 2),
    }
    return DegeneracyReport(
        has_perfect_matching=has_pm,
        unused_edges=tuple(unused),
        forced_edges=tuple(forced),
        minus_one_cuts=cuts[-1],
        zero_cuts=cuts[0],
        one_cuts=cuts[1],
        interior_one_cuts=interior,
        min_deficiency=min_deficiency,
        k_nondegenerate=flags,
    )


def _tight_cuts(graph: PlanarMap, simple: nx.Graph) -> tuple[dict[int, tuple[Cut, ...]], int | None]:
    whites = graph.whites
    found: dict[int, set[Cut]] = {-1: set(), 0: set(), 1: set()}
    min_deficiency: int | None = None
    for size in range(1, len(whites)):
        for subset in itertools.combinations(whites, size):
            neighbors: set[int] = set()
            for white in subset:
                neighbors.update(simple[white])
            deficiency = len(neighbors) - size
            if min_deficiency is None or deficiency < min_deficiency:
                min_deficiency = deficiency
            if deficiency not in found:
                continue
            cut = set(subset) | neighbors
            if nx.is_connected(simple.subgraph(cut)):
                found[deficiency].add(tuple(sorted(cut)))
    return {key: tuple(sorted(value)) for key, value in found.items()}, min_deficiency


def _boundary_whites(graph: PlanarMap) -> set[int]:
    outer = graph.outer_face
    if outer is None:
        return set()
    return {vertex for vertex in outer.vertices if graph.colors[vertex] == "w"}


def _has_breaker(simple: nx.Graph, blacks: list[int], whites: list[int], k: int) -> bool:
    if k > len(blacks):
        return False
    for removed_blacks in itertools.combinations(blacks, k):
        for removed_whites in itertools.combinations(whites, k):
            if not _has_perfect_matching(simple, removed_blacks + removed_whites):
                return True
    return False


def _randomized_minor_test(graph: PlanarMap, config: Config) -> tuple[bool, bool]:
    """Check the entries and 2x2 minors of adj K under seeded random rational weights.

    Within the exact limit the adjugate holds Fractions and zero means zero.
    """
    weighted = random_generic_weights(graph, seed=config.sampler.seed, config=config)
    adj = adjugate(assign_signs(weighted), config)
    if adj.dtype == object:
        scale, tolerance = 1, 0
    else:
        scale = float(np.max(np.abs(adj)))
        tolerance = 1e-9 * scale
    entries_ok = bool(np.all(np.abs(adj) > tolerance))
    n = adj.shape[0]
    rows, columns = np.triu_indices(n, k=1)
    minors_ok = True
    for first, second in zip(rows, columns, strict=True):
        outer = np.outer(adj[first], adj[second])
        minors = (outer - outer.T)[rows, columns]
        if np.any(np.abs(minors) <= tolerance * scale):
            minors_ok = False
            break
    return entries_ok, minors_ok
