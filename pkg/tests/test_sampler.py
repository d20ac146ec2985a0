from fractions import Fraction

import pytest

from dimer_forge.construct import build_psi, tgraph_from_psi, white_faces
from dimer_forge.dimers.lattices import grid_minus_corner
from dimer_forge.errors import NotTGraph
from dimer_forge.sampler.report import (
    empirical_report,
    exact_forest_law,
    exact_matching_law,
    sample_stream,
)
from dimer_forge.sampler.wilson import (
    ForestSampler,
    RngConfig,
    sample_matching,
    wilson_sample_forest,
)
from dimer_forge.tgraph.correspondence import enumerate_forests
from dimer_forge.tgraph.families import cevian, t_shape, torus_cross, triangle
from dimer_forge.tgraph.tgraph import derived_dimer_graph


def test_equal_rng_configs_give_equal_streams() -> None:
    graph = cevian()

    first = [forest for forest, _ in sample_stream(graph, 20, RngConfig(seed=3))]
    second = [forest for forest, _ in sample_stream(graph, 20, RngConfig(seed=3))]

    assert first == second


def test_spawned_streams_are_distinct() -> None:
    children = RngConfig(seed=1).spawn(2)

    assert children[0].spawn_key == (0,)
    assert children[0].generator().random() != children[1].generator().random()


def test_unknown_bit_generator_is_rejected() -> None:
    with pytest.raises(ValueError, match="bit generator"):
        RngConfig(algorithm="NoSuchGenerator").generator()


def test_sampled_forest_is_an_enumerated_forest() -> None:
    graph = cevian()

    forest = wilson_sample_forest(graph, RngConfig(seed=0))

    assert forest in set(enumerate_forests(graph))


def test_sampled_matching_is_perfect() -> None:
    graph = t_shape()

    marked, edges = sample_matching(graph, RngConfig(seed=2))

    assert edges == marked.edges
    assert len(edges) == graph.n
    faces = {graph.dimer_graph.edges[edge].face for edge in edges}
    assert len(faces) == graph.n


def test_root_only_graph_gives_the_empty_forest() -> None:
    graph = triangle()

    forest = wilson_sample_forest(graph, RngConfig(seed=0))

    assert forest.choices == ()


def test_torus_graphs_cannot_be_sampled() -> None:
    with pytest.raises(NotTGraph):
        ForestSampler(torus_cross(), RngConfig().generator())


def test_exact_laws_on_the_cevian() -> None:
    graph = cevian()

    forest_law = exact_forest_law(graph)
    matching_law = exact_matching_law(graph, graph.dimer_graph)

    assert sorted(forest_law.values()) == [Fraction(1, 3), Fraction(2, 3)]
    assert sum(matching_law.values()) == 1


def test_empirical_law_matches_the_exact_law() -> None:
    report = empirical_report(cevian(), 20000, RngConfig(seed=1))

    assert report.samples == 20000
    assert sum(report.matching_histogram.values()) == 20000
    assert report.matching_tv is not None and report.matching_tv < 0.02
    assert report.forest_tv is not None and report.forest_tv < 0.02
    assert report.p_value is not None and report.p_value > 1e-3
    assert not report.trap_warning


def test_zero_samples_give_an_empty_report() -> None:
    report = empirical_report(t_shape(), 0)

    assert report.samples == 0
    assert report.matching_histogram == {}
    assert report.p_value is None


@pytest.mark.slow
def test_t_shape_foot_steps_to_the_near_end_three_times_in_four() -> None:
    law = exact_forest_law(t_shape())
    (near,) = [forest for forest, value in law.items() if value == Fraction(3, 4)]

    report = empirical_report(t_shape(), 100_000, RngConfig(seed=11))

    assert abs(report.forest_histogram.get(near, 0) / 100_000 - 0.75) < 0.01


@pytest.mark.slow
def test_cevian_law_at_full_sample_size() -> None:
    report = empirical_report(cevian(), 100_000, RngConfig(seed=5))

    assert report.matching_tv is not None and report.matching_tv < 0.02
    assert report.p_value is not None and report.p_value > 1e-3


@pytest.mark.slow
def test_constructed_grid_minus_corner_samples_matchings_uniformly() -> None:
    graph = grid_minus_corner()
    psi = build_psi(graph, seed=0)
    tgraph = tgraph_from_psi(psi)
    white_of_face = {face: white for white, face in white_faces(psi, tgraph).items()}
    (dual_root,) = [face.id for face in tgraph.outer_faces if face.id not in white_of_face]
    dimer = derived_dimer_graph(tgraph, dual_root)

    report = empirical_report(tgraph, 100_000, RngConfig(seed=7), dual_root=dual_root)

    frequencies: dict[frozenset[tuple[int, int]], float] = {}
    for key, count in report.matching_histogram.items():
        edges = [dimer.edges[edge] for edge in key]
        pairs = frozenset(
            (psi.blacks[edge.segment], white_of_face[edge.face])
            for edge in edges
            if edge.face != dual_root
        )
        frequencies[pairs] = frequencies.get(pairs, 0.0) + count / report.samples
    assert len(frequencies) == 4
    assert all(abs(value - 0.25) < 0.01 for value in frequencies.values())
    assert report.matching_tv is not None and report.matching_tv < 0.02
    assert report.p_value is not None and report.p_value > 1e-3
