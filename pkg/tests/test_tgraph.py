from fractions import Fraction

import numpy as np
import pytest

from dimer_forge.errors import BadDualRoot, FormatError, NotTGraph, Overlapping
from dimer_forge.tgraph.families import cevian, single_segment, t_shape, torus_cross, triangle
from dimer_forge.tgraph.geometry import strict_hull
from dimer_forge.tgraph.tgraph import (
    build_from_segments,
    derived_dimer_graph,
    dump_segments,
    martingale_residual,
    parse_tgraph,
    roots_reachable,
    segments_from_dict,
    stability_radius,
    transition_chain,
)
from dimer_forge.utils.helpers import signed_area


def _vertex_at(graph, point: tuple[int, int]) -> int:
    target = (Fraction(point[0]), Fraction(point[1]))
    return next(vertex.id for vertex in graph.vertices if vertex.position == target)


def test_t_shape_walk_probabilities() -> None:
    graph = t_shape()

    assert graph.n == 2
    assert graph.m == 3
    assert len(graph.faces) == graph.n + 1
    foot = _vertex_at(graph, (1, 0))
    assert graph.interior_vertices == [foot]
    targets = {graph.vertices[move.target].position: move.probability
               for move in graph.moves[foot]}
    assert targets == {
        (Fraction(0), Fraction(0)): Fraction(3, 4),
        (Fraction(4), Fraction(0)): Fraction(1, 4),
    }
    assert martingale_residual(graph) == 0
    assert roots_reachable(graph)


@pytest.mark.parametrize(
    ("factory", "faces", "roots"),
    [(single_segment, 2, 2), (t_shape, 3, 3), (triangle, 4, 3), (cevian, 5, 3)],
)
def test_plane_families_have_n_plus_one_faces(factory, faces: int, roots: int) -> None:
    graph = factory()

    assert len(graph.faces) == faces == graph.n + 1
    assert graph.m == roots
    assert graph.outer_faces


def test_torus_cross_has_one_face_per_segment() -> None:
    graph = torus_cross()

    assert graph.ambient == "torus"
    assert len(graph.faces) == graph.n == 4
    assert graph.roots == ()
    assert graph.outer_faces == []
    assert martingale_residual(graph) == 0


def test_transition_chain_is_stochastic() -> None:
    chain = transition_chain(cevian())

    assert np.allclose(chain.as_array().sum(axis=1), 1.0)
    for vertex in cevian().roots:
        assert chain.rows[vertex] == {vertex: Fraction(1)}


def test_dimer_graph_is_balanced_after_removing_the_dual_root() -> None:
    graph = cevian()

    dimer = derived_dimer_graph(graph)

    assert dimer.dual_root == graph.default_dual_root
    assert len(dimer.dimer_map.blacks) == len(dimer.dimer_map.whites) == graph.n
    assert dimer.white_of(dimer.dual_root) not in dimer.dimer_map.colors


def test_interior_face_cannot_be_the_dual_root() -> None:
    graph = cevian()
    interior = next(face.id for face in graph.faces if not face.outer)

    with pytest.raises(BadDualRoot):
        derived_dimer_graph(graph, interior)
    with pytest.raises(BadDualRoot):
        derived_dimer_graph(torus_cross(), 0)


@pytest.mark.parametrize(
    ("segments", "error"),
    [
        ([((0, 0), (2, 2)), ((0, 2), (2, 0))], Overlapping),
        ([((0, 0), (0, 0))], NotTGraph),
        ([((0, 0), (1, 0)), ((3, 0), (4, 0))], NotTGraph),
        ([((0, 0), (4, 0)), ((4, 0), (2, 4)), ((2, 4), (0, 0)), ((2, 1), (2, 3))], NotTGraph),
        ([], NotTGraph),
    ],
)
def test_invalid_segment_families_are_rejected(segments, error) -> None:
    with pytest.raises(error):
        build_from_segments(segments)


def test_segment_file_round_trip() -> None:
    graph = cevian()

    reparsed = parse_tgraph(dump_segments(graph.segments, graph.ambient))

    assert [(s.p, s.q) for s in reparsed.segments] == [(s.p, s.q) for s in graph.segments]
    assert len(reparsed.faces) == len(graph.faces)


def test_segment_file_accepts_rational_strings() -> None:
    segments, ambient = segments_from_dict(
        {"ambient": "torus", "segments": [{"p": ["1/3", 0], "q": ["4/3", 0]}]}
    )

    assert ambient == "torus"
    assert segments[0].p == (Fraction(1, 3), Fraction(0))


@pytest.mark.parametrize(
    "data",
    [
        {"segments": [{"p": [0, 0]}]},
        {"ambient": "sphere", "segments": []},
        {"segments": [{"p": ["x", 0], "q": [1, 0]}]},
        [],
    ],
)
def test_malformed_segment_files(data) -> None:
    with pytest.raises(FormatError):
        segments_from_dict(data)


def _shape(graph) -> tuple:
    faces = [
        tuple((graph.subsegments[piece].segment, side) for piece, side in face.darts)
        for face in graph.faces
    ]
    return len(graph.vertices), len(graph.subsegments), graph.roots, faces


@pytest.mark.parametrize("factory", [t_shape, triangle, cevian])
def test_perturbing_within_the_stability_radius_keeps_the_faces(factory) -> None:
    graph = factory()
    radius = graph.stability_radius
    assert radius > 0
    assert radius == stability_radius(graph)
    rng = np.random.default_rng(3)

    moved = []
    for segment in graph.segments:
        ends = []
        for x, y in (segment.p, segment.q):
            angle = rng.uniform(0, 2 * np.pi)
            ends.append((float(x) + radius / 2 * np.cos(angle),
                         float(y) + radius / 2 * np.sin(angle)))
        moved.append(tuple(ends))
    perturbed = build_from_segments(moved)

    assert _shape(perturbed) == _shape(graph)
    for source, moves in graph.moves.items():
        again = {move.target: float(move.probability) for move in perturbed.moves[source]}
        for move in moves:
            assert abs(again[move.target] - float(move.probability)) < 1e-6


def test_a_loosely_snapped_tee_shrinks_the_stability_radius() -> None:
    exact = t_shape()
    loose = build_from_segments([((0, 0), (4, 0)), ((1, "1/1000000000"), (1, 2))])

    assert len(loose.faces) == 3
    assert 0 < loose.stability_radius < exact.stability_radius
    assert abs(exact.stability_radius - exact.tolerance / 2) < 1e-18


def test_torus_stability_radius_is_reported() -> None:
    graph = torus_cross()

    assert 0 < graph.stability_radius <= graph.tolerance / 2


def test_strict_hull_drops_collinear_points() -> None:
    points = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0), (1.0, 1.0)]

    hull = strict_hull(points, 1e-12)

    assert sorted(hull) == [0, 2, 3, 4]
    assert signed_area([points[index] for index in hull]) > 0
    assert strict_hull([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)], 1e-12) == [0, 2]


def _cevian_fan(seed: int) -> list:
    rng = np.random.default_rng(seed)
    length = int(rng.integers(2, 10))
    apex = (Fraction(int(rng.integers(-30, 10 * length + 30)), 10), int(rng.integers(1, 10)))
    left, right = (0, 0), (length, 0)
    count = int(rng.integers(1, 5))
    feet = sorted(int(value) for value in rng.choice(range(1, 10 * length), count, replace=False))
    return [(apex, left), (apex, right), (left, right)] + [
        (apex, (Fraction(foot, 10), 0)) for foot in feet
    ]


@pytest.mark.parametrize("seed", range(40))
def test_random_cevian_fans_have_n_plus_one_faces(seed: int) -> None:
    graph = build_from_segments(_cevian_fan(seed))

    assert len(graph.faces) == graph.n + 1
    assert graph.m == 3
    assert len(graph.outer_faces) == 3


@pytest.mark.parametrize("seed", range(20))
def test_random_torus_crosses_have_n_faces(seed: int) -> None:
    rng = np.random.default_rng(seed)
    a, b = (Fraction(int(value), 20) for value in rng.integers(1, 20, 2))

    graph = torus_cross(a, b)

    assert len(graph.faces) == graph.n
    assert martingale_residual(graph) == 0
