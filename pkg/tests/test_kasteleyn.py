import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from dimer_forge.config.schema import Config, KasteleynConfig
from dimer_forge.dimers.kasteleyn import (
    KasteleynMatrix,
    adjugate,
    assign_signs,
    determinant,
    enumerate_matchings,
    gauge_normalize,
    kasteleyn_signs,
    partition_function,
    random_generic_weights,
)
from dimer_forge.dimers.lattices import (
    cycle,
    grid,
    grid_minus_corner,
    hall_violation_example,
    honeycomb,
    random_grid_map,
    single_edge,
)
from dimer_forge.dimers.planarmap import from_embedding
from dimer_forge.errors import Singular, TooLarge, Unbalanced, ZeroComponent


@pytest.mark.parametrize(
    ("graph", "expected"),
    [
        (single_edge(3), Fraction(3)),
        (cycle(2), Fraction(2)),
        (grid(2, 3), Fraction(3)),
        (grid_minus_corner(), Fraction(4)),
        (grid(4, 4), Fraction(36)),
    ],
)
def test_partition_function_counts_tilings(graph, expected: Fraction) -> None:
    assert partition_function(assign_signs(graph)) == expected


def test_weighted_hexagon_sums_both_matchings() -> None:
    graph = cycle(3, weights=[1, 2, 3, 4, 5, 6])

    matrix = assign_signs(graph)

    assert partition_function(matrix) == Fraction(1 * 3 * 5 + 2 * 4 * 6)
    assert isinstance(determinant(matrix), Fraction)


def test_interior_faces_satisfy_the_sign_condition() -> None:
    graph = grid(3, 4)
    signs = kasteleyn_signs(graph)

    for face in graph.interior_faces():
        product = 1
        for edge_id, _ in face.darts:
            product *= signs[edge_id]
        expected = -1 if (face.degree // 2) % 2 == 0 else 1
        assert product == expected


def test_single_face_torus_keeps_positive_signs() -> None:
    assert set(kasteleyn_signs(honeycomb(4, 5, 6)).values()) == {1}


@pytest.mark.parametrize("seed", range(50))
def test_determinant_matches_enumeration_on_random_grids(seed: int) -> None:
    graph = random_grid_map(seed)

    enumeration = enumerate_matchings(graph)

    assert partition_function(assign_signs(graph)) == enumeration.partition_function
    if len(enumeration):
        assert sum(m.probability for m in enumeration.matchings) == 1


def test_float_determinant_beyond_exact_limit() -> None:
    config = Config(kasteleyn=KasteleynConfig(exact_limit=1))

    value = determinant(assign_signs(grid(2, 4)), config)

    assert isinstance(value, complex)
    assert abs(abs(value) - 5) < 1e-9
    assert partition_function(assign_signs(grid(2, 4)), config) == Fraction(5)


def test_unbalanced_map_is_rejected() -> None:
    graph = from_embedding(
        {0: "b", 1: "w", 2: "b"},
        {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)},
        [(0, 1, 1), (1, 2, 1)],
    )

    with pytest.raises(Unbalanced, match="2 black and 1 white"):
        assign_signs(graph)
    assert len(enumerate_matchings(graph)) == 0


def test_enumeration_respects_its_limit() -> None:
    config = Config(kasteleyn=KasteleynConfig(enumeration_limit=4))

    with pytest.raises(TooLarge):
        enumerate_matchings(grid(2, 3), config)


def test_matrix_export_uses_rational_strings() -> None:
    exported = assign_signs(cycle(2)).to_json()

    assert exported["field"] == "rational"
    assert exported["blacks"] == [0, 2]
    assert exported["whites"] == [1, 3]
    entries = [value for row in exported["entries"] for value in row]
    assert set(entries) <= {"1", "-1"}
    assert entries.count("-1") % 2 == 1


def test_gauge_normalization_hits_the_white_covector() -> None:
    matrix = assign_signs(cycle(2))
    a_black = [1, 2]
    a_white = [1j, -1j]

    gauge = gauge_normalize(matrix, a_black, a_white)

    assert np.allclose(gauge.column_sums(), a_white)
    assert np.allclose(gauge.row_sums(), np.array(gauge.g) * np.array(a_black))
    assert all(value != 0 for value in gauge.f)


def test_random_generic_weights_are_seeded() -> None:
    graph = grid(2, 3)

    first = random_generic_weights(graph, seed=11)
    second = random_generic_weights(graph, seed=11)
    other = random_generic_weights(graph, seed=12)

    assert first.edges == second.edges
    assert first.edges != other.edges
    assert first.rotations == graph.rotations


def test_exact_adjugate_inverts_up_to_the_determinant() -> None:
    matrix = assign_signs(grid(3, 4, weights=list(range(1, 18))))
    n = matrix.n

    adj = adjugate(matrix)
    det = determinant(matrix)

    assert adj.dtype == object
    assert all(isinstance(value, Fraction) for value in adj.flat)
    for i in range(n):
        for j in range(n):
            total = sum(adj[i, k] * matrix.entries[k][j] for k in range(n))
            assert total == (det if i == j else 0)


def test_float_adjugate_beyond_exact_limit() -> None:
    config = Config(kasteleyn=KasteleynConfig(exact_limit=1))
    matrix = assign_signs(grid(2, 4, weights=[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]))
    array = matrix.as_array()

    adj = adjugate(matrix, config)

    assert adj.dtype == complex
    assert np.allclose(adj, np.linalg.det(array) * np.linalg.inv(array))


def test_float_adjugate_of_a_rank_deficient_matrix_spans_the_kernel() -> None:
    matrix = KasteleynMatrix(
        entries=((1, 2, 3), (2, 4, 6), (1, 0, 1)),
        blacks=(0, 2, 4),
        whites=(1, 3, 5),
        field="complex",
    )
    array = matrix.as_array()

    adj = adjugate(matrix, corank=1)

    assert np.max(np.abs(adj)) > 1e-6
    assert np.allclose(array @ adj, 0)
    assert np.allclose(adj @ array, 0)


def _rescaled(graph, vertex: int, factor: Fraction):
    return graph.with_weights({
        edge_id: edge.weight * factor
        for edge_id, edge in graph.edges.items()
        if vertex in (edge.u, edge.v)
    })


def _measure(graph) -> dict[tuple[int, ...], Fraction]:
    return {matching.edges: matching.probability for matching in enumerate_matchings(graph).matchings}


@pytest.mark.parametrize("seed", range(3))
def test_rescaling_a_row_or_column_keeps_the_measure(seed: int) -> None:
    graph = random_grid_map(seed)
    factor = Fraction(7, 3)

    for vertex in (graph.blacks[0], graph.whites[-1]):
        rescaled = _rescaled(graph, vertex, factor)

        assert determinant(assign_signs(rescaled)) == factor * determinant(assign_signs(graph))
        assert _measure(rescaled) == _measure(graph)


def test_sign_assignment_is_deterministic() -> None:
    first = assign_signs(grid(3, 4))
    second = assign_signs(grid(3, 4))

    assert first.entries == second.entries
    assert dict(first.signs) == dict(second.signs)
    assert kasteleyn_signs(grid_minus_corner()) == kasteleyn_signs(grid_minus_corner())


def test_normalized_rows_lie_on_distinct_lines_through_the_origin() -> None:
    matrix = assign_signs(random_generic_weights(grid_minus_corner(), seed=5))
    rng = np.random.default_rng(5)
    a_black = [Fraction(int(value), 7) for value in rng.integers(1, 50, matrix.n)]
    a_white = rng.normal(size=matrix.n) + 1j * rng.normal(size=matrix.n)

    tilde = gauge_normalize(matrix, a_black, a_white).matrix.as_array()

    directions = []
    for row in tilde:
        nonzero = row[row != 0]
        direction = nonzero[0] / abs(nonzero[0])
        assert np.allclose((nonzero / direction).imag, 0, atol=1e-9 * np.max(np.abs(nonzero)))
        directions.append(float(np.angle(direction)))
    gaps = [abs(math.remainder(a - b, math.pi)) for a, b in combinations(directions, 2)]
    assert min(gaps) > 1e-6


def test_gauge_normalization_rejects_a_singular_matrix() -> None:
    matrix = assign_signs(hall_violation_example())

    with pytest.raises(Singular):
        gauge_normalize(matrix, [1, 0, 0], [1j, 0, 0])


def test_gauge_normalization_rejects_a_vanishing_gauge_vector() -> None:
    matrix = assign_signs(cycle(3, weights=[1, 2, 3, 4, 5, 6]))
    target = [Fraction(1), Fraction(0), Fraction(1)]
    a_black = [sum(row[j] * target[j] for j in range(3)) for row in matrix.entries]

    with pytest.raises(ZeroComponent, match="white vertex 3"):
        gauge_normalize(matrix, a_black, [1j, 2j, 3j])
