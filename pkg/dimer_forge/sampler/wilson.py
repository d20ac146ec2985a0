"""Wilson's algorithm on the T-graph walk and the induced dimer samples."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from dimer_forge.errors import NoRootReachable, NotTGraph
from dimer_forge.tgraph.correspondence import (
    MarkedMatching,
    SpanningForest,
    marked_matching_from_forest,
)
from dimer_forge.tgraph.tgraph import DerivedDimerGraph, TDart, TGraph, derived_dimer_graph, roots_reachable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RngConfig:
    """Seed plus bit generator name; equal configs give equal streams."""

    seed: int = 0
    algorithm: str = "PCG64"
    spawn_key: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        try:
            bit_generator = getattr(np.random, self.algorithm)
        except AttributeError as exc:
            raise ValueError(f"unknown bit generator {self.algorithm!r}") from exc
        return np.random.Generator(
            bit_generator(np.random.SeedSequence(self.seed, spawn_key=self.spawn_key))
        )

    def spawn(self, count: int) -> list[RngConfig]:
        """Independent child streams, as SeedSequence.spawn would derive them."""
        return [RngConfig(self.seed, self.algorithm, (*self.spawn_key, index))
                for index in range(count)]


@dataclass
class ForestSampler:
    """Reusable Wilson sampler; keeps one generator and counts walk steps."""

    graph: TGraph
    rng: np.random.Generator
    steps: int = 0
    samples: int = 0
    _order: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.graph.ambient != "plane":
            raise NotTGraph("forest sampling needs a plane T-graph")
        if not roots_reachable(self.graph):
            raise NoRootReachable("some interior vertex cannot reach a root")
        self._order = sorted(self.graph.interior_vertices)

    @property
    def mean_steps(self) -> float:
        return self.steps / self.samples if self.samples else 0.0

    def sample(self) -> SpanningForest:
        graph = self.graph
        in_tree = set(graph.roots)
        successor: dict[int, TDart] = {}
        for start in self._order:
            vertex = start
            while vertex not in in_tree:
                lower, upper = graph.moves[vertex]
                move = lower if self.rng.random() < float(lower.probability) else upper
                successor[vertex] = move.dart
                vertex = move.target
                self.steps += 1
            vertex = start
            while vertex not in in_tree:
                in_tree.add(vertex)
                vertex = graph.dart_head(successor[vertex])
        self.samples += 1
        return SpanningForest.from_choices(
            {vertex: successor[vertex] for vertex in self._order}
        )


def wilson_sample_forest(graph: TGraph, rng: RngConfig | np.random.Generator) -> SpanningForest:
    """Draw one directed spanning forest rooted at the roots, with law proportional to walk weights."""
    generator = rng.generator() if isinstance(rng, RngConfig) else rng
    return ForestSampler(graph, generator).sample()


def sample_matching(
    graph: TGraph,
    rng: RngConfig | np.random.Generator,
    dimer: DerivedDimerGraph | None = None,
) -> tuple[MarkedMatching, tuple[int, ...]]:
    """Push a sampled forest through the bijection; returns the marked and plain matchings."""
    dimer = dimer or derived_dimer_graph(graph)
    marked = marked_matching_from_forest(wilson_sample_forest(graph, rng), graph, dimer)
    return marked, marked.edges
