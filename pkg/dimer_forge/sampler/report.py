"""Empirical histograms of sampled matchings and forests against their exact laws."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
from scipy import stats

from dimer_forge.config.schema import Config
from dimer_forge.sampler.wilson import ForestSampler, RngConfig
from dimer_forge.tgraph.correspondence import (
    MarkedMatching,
    SpanningForest,
    enumerate_forests,
    enumerate_marked_matchings,
    marked_matching_from_forest,
)
from dimer_forge.tgraph.tgraph import DerivedDimerGraph, TGraph, derived_dimer_graph

logger = logging.getLogger(__name__)

MatchingKey = tuple[int, ...]


@dataclass(frozen=True)
class EmpiricalReport:
    samples: int
    matching_histogram: dict[MatchingKey, int] = field(default_factory=dict)
    forest_histogram: dict[SpanningForest, int] = field(default_factory=dict)
    matching_tv: float | None = None
    forest_tv: float | None = None
    chi_square: float | None = None
    p_value: float | None = None
    mean_steps: float = 0.0
    trap_warning: bool = False

    def to_json(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "histogram": [
                {"edges": list(key), "count": count}
                for key, count in sorted(self.matching_histogram.items())
            ],
            "distinct_forests": len(self.forest_histogram),
            "matching_tv": self.matching_tv,
            "forest_tv": self.forest_tv,
            "chi_square": self.chi_square,
            "p_value": self.p_value,
            "mean_steps": self.mean_steps,
            "trap_warning": self.trap_warning,
        }


def exact_matching_law(graph: TGraph, dimer: DerivedDimerGraph,
                       config: Config | None = None) -> dict[MatchingKey, Fraction]:
    """Matching probabilities nu(M)/Z, summed over the marks of each matching."""
    weights: dict[MatchingKey, Fraction] = {}
    for marked in enumerate_marked_matchings(graph, dimer, config):
        weights[marked.edges] = weights.get(marked.edges, Fraction(0)) + marked.weight(graph)
    total = sum(weights.values(), Fraction(0))
    return {key: value / total for key, value in weights.items()}


def exact_forest_law(graph: TGraph) -> dict[SpanningForest, Fraction]:
    weights = {forest: forest.weight(graph) for forest in enumerate_forests(graph)}
    total = sum(weights.values(), Fraction(0))
    return {forest: value / total for forest, value in weights.items()}


def _tv(counts: dict[Any, int], law: dict[Any, Fraction], samples: int) -> float:
    keys = set(counts) | set(law)
    return 0.5 * sum(abs(counts.get(key, 0) / samples - float(law.get(key, 0))) for key in keys)


def sample_stream(
    graph: TGraph, samples: int, rng: RngConfig, dimer: DerivedDimerGraph | None = None
) -> Iterator[tuple[SpanningForest, MarkedMatching]]:
    """Yield forests with their marked matchings; the bijection is cached per forest."""
    dimer = dimer or derived_dimer_graph(graph)
    sampler = ForestSampler(graph, rng.generator())
    cache: dict[SpanningForest, MarkedMatching] = {}
    for _ in range(samples):
        forest = sampler.sample()
        marked = cache.get(forest)
        if marked is None:
            marked = cache[forest] = marked_matching_from_forest(forest, graph, dimer)
        yield forest, marked


def empirical_report(
    graph: TGraph,
    samples: int,
    rng: RngConfig | None = None,
    dual_root: int | None = None,
    config: Config | None = None,
) -> EmpiricalReport:
    """Sample, tally and compare with the enumerated laws when the instance is small enough."""
    config = config or Config()
    rng = rng or RngConfig(config.sampler.seed, config.sampler.algorithm)
    if samples <= 0:
        return EmpiricalReport(samples=0)
    dimer = derived_dimer_graph(graph, dual_root)
    sampler = ForestSampler(graph, rng.generator())
    cache: dict[SpanningForest, MatchingKey] = {}
    forests: Counter[SpanningForest] = Counter()
    matchings: Counter[MatchingKey] = Counter()
    for _ in range(samples):
        forest = sampler.sample()
        key = cache.get(forest)
        if key is None:
            key = cache[forest] = marked_matching_from_forest(forest, graph, dimer).edges
        forests[forest] += 1
        matchings[key] += 1

    mean_steps = sampler.mean_steps
    trap = mean_steps > config.sampler.trap_ratio * len(graph.vertices)
    if trap:
        logger.warning("mean walk length %.1f suggests traps in the walk", mean_steps)

    if graph.n > config.geometry.bijection_segment_limit:
        return EmpiricalReport(samples, dict(matchings), dict(forests),
                               mean_steps=mean_steps, trap_warning=trap)

    matching_law = exact_matching_law(graph, dimer, config)
    forest_law = exact_forest_law(graph)
    keys = sorted(matching_law)
    observed = np.array([matchings.get(key, 0) for key in keys], dtype=float)
    expected = np.array([float(matching_law[key]) * samples for key in keys])
    if len(keys) > 1:
        chi_square, p_value = stats.chisquare(observed, expected)
        chi_square, p_value = float(chi_square), float(p_value)
    else:
        chi_square, p_value = 0.0, 1.0
    return EmpiricalReport(
        samples=samples,
        matching_histogram=dict(matchings),
        forest_histogram=dict(forests),
        matching_tv=_tv(matchings, matching_law, samples),
        forest_tv=_tv(forests, forest_law, samples),
        chi_square=chi_square,
        p_value=p_value,
        mean_steps=mean_steps,
        trap_warning=trap,
    )
