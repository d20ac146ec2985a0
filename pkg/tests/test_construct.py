from fractions import Fraction

import numpy as np
import sympy
import pytest

from dimer_forge.construct.flat import detect_flat_faces
from dimer_forge.construct.polygon import choose_polygon, polygon_from_points
from dimer_forge.construct.psi import boundary_cuts, build_psi
from dimer_forge.construct.roundtrip import roundtrip_check, tgraph_from_psi, white_faces
from dimer_forge.dimers.degeneracy import degeneracy_report
from dimer_forge.dimers.lattices import cycle, grid_minus_corner, split_center, split_grid
from dimer_forge.errors import DegeneratePolygon, FormatError
from dimer_forge.tgraph.tgraph import martingale_residual


def test_choose_polygon_is_seeded_and_convex() -> None:
    first = choose_polygon(3, seed=4)
    again = choose_polygon(3, seed=4)
    other = choose_polygon(3, seed=5)

    assert first == again
    assert first != other
    assert first.m == 3
    assert first.is_convex()
    assert first.area > 0


def test_polygon_needs_three_vertices() -> None:
    with pytest.raises(DegeneratePolygon):
        choose_polygon(1)
    with pytest.raises(DegeneratePolygon):
        polygon_from_points([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)])


def test_boundary_cuts_start_at_the_smallest_black() -> None:
    cuts = boundary_cuts(cycle(2))

    assert cuts.b0 == 0
    assert sorted(cuts.whites) == [1, 3]
    assert set(cuts.piece_of.values()) == {0, 1, 2}

    with pytest.raises(FormatError, match="b0 = 1"):
        boundary_cuts(cycle(2), b0=1)


def test_four_cycle_becomes_a_t_shape() -> None:
    psi = build_psi(cycle(2), seed=0)

    assert psi.b0 == 0
    assert psi.diagnostics.closure_residual < 1e-9
    assert psi.diagnostics.convex
    assert psi.diagnostics.area_defect < 1e-9
    assert not psi.diagnostics.flat
    tgraph = tgraph_from_psi(psi)
    assert tgraph.n == 2
    assert tgraph.m == 3
    assert martingale_residual(tgraph) < 1e-9


def test_polygon_size_must_match_the_boundary() -> None:
    with pytest.raises(DegeneratePolygon, match="boundary needs 3"):
        build_psi(cycle(2), polygon=choose_polygon(3))


@pytest.mark.parametrize("graph", [cycle(2), cycle(3, weights=[1, 2, 3, 4, 5, 6]),
                                   grid_minus_corner()])
def test_roundtrip_recovers_the_map_up_to_gauge(graph) -> None:
    report = roundtrip_check(graph, seed=0)

    assert report.isomorphic
    assert report.gauge_residual < 1e-9
    assert report.bijection is not None and report.bijection.bijective
    assert report.ok
    assert sorted(report.face_of_white) == graph.whites


def test_interior_one_cut_shows_up_as_a_flat_white() -> None:
    graph = split_center(weights=[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37])
    psi = build_psi(graph, seed=0)

    components = detect_flat_faces(psi)

    assert psi.diagnostics.flat
    center = next(component for component in components if 11 in component.whites)
    assert center.vertices == (9, 10, 11)
    assert center.is_one_cut
    assert center.excess == 1
    assert center.vertices in degeneracy_report(graph).interior_one_cuts


@pytest.mark.parametrize("graph", [cycle(2), grid_minus_corner()])
def test_white_faces_follow_the_construction(graph) -> None:
    psi = build_psi(graph, seed=0)
    tgraph = tgraph_from_psi(psi)

    located = white_faces(psi, tgraph)

    assert sorted(located) == graph.whites
    assert len(set(located.values())) == len(located)
    for white, face_id in located.items():
        corners = tgraph.faces[face_id].polygon
        for point in psi.white_polygons[white]:
            assert min(abs(complex(*corner) - point) for corner in corners) < 1e-7


def test_whites_with_equal_neighbourhoods_get_their_own_faces() -> None:
    graph = cycle(2)
    neighbours = {
        white: sorted(
            edge.u if edge.v == white else edge.v
            for edge in graph.edges.values()
            if white in (edge.u, edge.v)
        )
        for white in graph.whites
    }
    assert neighbours[1] == neighbours[3]

    report = roundtrip_check(graph, seed=0)

    assert report.face_of_white[1] != report.face_of_white[3]
    assert report.dual_root not in report.face_of_white.values()


GENERIC_BASES = (cycle(2), cycle(3), grid_minus_corner())


def _generic(seed: int):
    base = GENERIC_BASES[seed % len(GENERIC_BASES)]
    rng = np.random.default_rng(seed)
    return base.with_weights({
        edge_id: Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
        for edge_id in base.edges
    })


@pytest.mark.parametrize("seed", range(40))
def test_constructed_tgraphs_have_n_plus_one_faces(seed: int) -> None:
    tgraph = tgraph_from_psi(build_psi(_generic(seed), seed=seed))

    assert len(tgraph.faces) == tgraph.n + 1
    assert len(tgraph.outer_faces) == tgraph.m


@pytest.mark.parametrize("seed", range(20))
def test_roundtrip_on_seeded_generic_weights(seed: int) -> None:
    graph = _generic(seed)
    assert len(graph.colors) <= 10
    assert degeneracy_report(graph).interior_one_cuts == ()

    psi = build_psi(graph, seed=seed)
    report = roundtrip_check(graph, seed=seed)

    diagnostics = psi.diagnostics
    assert diagnostics.convex
    assert diagnostics.area_defect < 1e-9
    assert diagnostics.max_principle_violations == 0
    assert diagnostics.flow_residual < 1e-9
    assert report.isomorphic
    assert report.gauge_residual < 1e-9
    assert report.ok


def _prime_weights(graph):
    return graph.with_weights({
        edge_id: Fraction(int(sympy.prime(index + 1)))
        for index, edge_id in enumerate(sorted(graph.edges))
    })


@pytest.mark.parametrize(
    ("graph", "cut"),
    [
        (split_center(), (9, 10, 11)),
        (split_grid(3, 3, (1, 1), removed=[(2, 2)], diagonal="se"), (9, 10, 11)),
        (split_grid(3, 4, (1, 1)), (12, 13, 14)),
        (split_grid(3, 5, (1, 1), removed=[(2, 4)]), (15, 16, 17)),
        (split_grid(3, 5, (1, 3), removed=[(2, 4)], diagonal="se"), (15, 16, 17)),
    ],
)
def test_flat_components_match_the_one_cuts(graph, cut) -> None:
    graph = _prime_weights(graph)
    report = degeneracy_report(graph)
    assert cut in report.interior_one_cuts

    components = detect_flat_faces(build_psi(graph, seed=0))

    split = next(component for component in components if cut[-1] in component.whites)
    assert split.vertices == cut
    assert split.is_one_cut
    assert split.excess == 1
    for component in components:
        if component.is_one_cut:
            assert component.vertices in report.one_cuts
