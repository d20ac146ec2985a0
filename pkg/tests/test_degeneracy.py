import pytest

from dimer_forge.config.schema import Config, KasteleynConfig
from dimer_forge.dimers.degeneracy import degeneracy_report
from dimer_forge.dimers.lattices import (
    cycle,
    forced_edge_example,
    grid,
    hall_violation_example,
    split_center,
)
from dimer_forge.dimers.planarmap import from_embedding
from dimer_forge.errors import Unbalanced


def test_forced_and_unused_edges() -> None:
    report = degeneracy_report(forced_edge_example())

    assert report.has_perfect_matching
    assert report.forced_edges == (5,)
    assert report.unused_edges == (4,)
    assert report.has_cut(0)


def test_hall_violation_has_no_perfect_matching() -> None:
    report = degeneracy_report(hall_violation_example())

    assert not report.has_perfect_matching
    assert report.unused_edges == (0, 1, 2, 3, 4)
    assert report.min_deficiency == -1
    assert report.has_cut(-1)
    assert report.k_nondegenerate[0] is False


def test_four_cycle_cuts_touch_the_boundary_only() -> None:
    report = degeneracy_report(cycle(2))

    assert report.forced_edges == ()
    assert report.unused_edges == ()
    assert report.min_deficiency == 1
    assert report.one_cuts
    assert report.interior_one_cuts == ()
    assert report.k_nondegenerate == {0: True, 1: True, 2: True}


def test_split_center_has_an_interior_one_cut() -> None:
    report = degeneracy_report(split_center())

    assert (9, 10, 11) in report.interior_one_cuts
    assert report.has_cut(1)
    assert report.to_json()["interior_one_cuts"] == [list(cut) for cut in report.interior_one_cuts]


def test_large_maps_fall_back_to_the_randomized_test() -> None:
    config = Config(kasteleyn=KasteleynConfig(cut_search_limit=1))

    report = degeneracy_report(grid(2, 4), config)

    assert report.probabilistic
    assert report.min_deficiency is None
    assert report.has_cut(1) is None
    assert report.k_nondegenerate[0] is True


def test_unbalanced_maps_are_rejected() -> None:
    graph = from_embedding(
        {0: "b", 1: "w", 2: "b"},
        {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)},
        [(0, 1, 1), (1, 2, 1)],
    )

    with pytest.raises(Unbalanced):
        degeneracy_report(graph)


@pytest.mark.parametrize("graph", [grid(2, 4), split_center()])
def test_randomized_test_agrees_in_exact_and_float_arithmetic(graph) -> None:
    exact = Config(kasteleyn=KasteleynConfig(cut_search_limit=1))
    floating = Config(kasteleyn=KasteleynConfig(cut_search_limit=1, exact_limit=1))

    first = degeneracy_report(graph, exact)
    second = degeneracy_report(graph, floating)

    assert first.probabilistic and second.probabilistic
    assert first.k_nondegenerate == second.k_nondegenerate
