from fractions import Fraction

import pytest

from dimer_forge.config.schema import Config, GeometryConfig
from dimer_forge.errors import InvalidMarking, TooLarge
from dimer_forge.tgraph.correspondence import (
    MarkedMatching,
    duality_check,
    enumerate_forests,
    enumerate_marked_matchings,
    forest_from_marked_matching,
    marked_matching_from_forest,
    torus_correspondence_check,
    verify_measure_preservation,
)
from dimer_forge.tgraph.families import cevian, single_segment, t_shape, torus_cross, triangle


@pytest.mark.parametrize("factory", [single_segment, t_shape, triangle, cevian])
def test_forest_map_preserves_measure(factory) -> None:
    report = verify_measure_preservation(factory())

    assert report.bijective
    assert report.round_trip
    assert report.max_discrepancy == 0
    assert report.matching_mass == report.forest_mass == 1
    assert report.marked_matchings == report.forests


def test_cevian_forests_follow_the_foot_walk() -> None:
    graph = cevian()

    forests = list(enumerate_forests(graph))

    assert len(forests) == 2
    assert sorted(forest.weight(graph) for forest in forests) == [Fraction(1, 3), Fraction(2, 3)]


def test_forests_and_marked_matchings_invert_each_other() -> None:
    graph = cevian()
    dimer = graph.dimer_graph

    for forest in enumerate_forests(graph):
        marked = marked_matching_from_forest(forest, graph, dimer)
        assert forest_from_marked_matching(marked, graph, dimer) == forest


def test_marked_matching_weight_is_the_product_of_t_lengths() -> None:
    graph = t_shape()

    for marked in enumerate_marked_matchings(graph):
        expected = Fraction(1)
        for _, piece in marked.marks:
            expected *= graph.subsegments[piece].t_length
        assert marked.weight(graph) == expected


def test_marking_outside_the_edge_is_rejected() -> None:
    graph = t_shape()
    marked = next(enumerate_marked_matchings(graph))
    edge, _ = marked.marks[0]
    foreign = next(
        piece.id for piece in graph.subsegments
        if piece.id not in graph.dimer_graph.edges[edge].subsegments
    )

    with pytest.raises(InvalidMarking):
        forest_from_marked_matching(MarkedMatching(((edge, foreign),) + marked.marks[1:]), graph)


def test_unused_subsegments_form_dual_trees() -> None:
    report = duality_check(cevian())

    assert report.forests == 2
    assert report.all_dual_trees


@pytest.mark.parametrize(
    "offsets",
    [
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1, 3), Fraction(2, 3)),
        (Fraction(1, 4), Fraction(1, 2)),
    ],
)
def test_torus_cross_fibres_are_consistent(offsets) -> None:
    report = torus_correspondence_check(torus_cross(*offsets))

    assert report.consistent
    assert report.covered
    assert report.forests > 0
    assert sum(report.fibres_by_cycles.values()) == report.forests


def test_bijection_check_respects_its_limit() -> None:
    config = Config(geometry=GeometryConfig(bijection_segment_limit=2))

    with pytest.raises(TooLarge):
        verify_measure_preservation(cevian(), config=config)
