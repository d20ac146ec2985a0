import math
from fractions import Fraction

import numpy as np
import pytest

from dimer_forge.config.schema import Config, SpectralConfig
from dimer_forge.dimers.lattices import honeycomb, square_octagon
from dimer_forge.errors import NonGenericWeights, TooLarge
from dimer_forge.periodic.patch import almost_periodic_patch, junction_drift
from dimer_forge.periodic.spectral import (
    SpectralPolynomial,
    characteristic_matrix,
    matching_class_check,
    nullvectors,
    root_count_trials,
    spectral_data,
    spectral_polynomial,
    unit_torus_roots,
)


def test_characteristic_matrix_of_the_honeycomb() -> None:
    alpha, beta = complex(0.6, 0.8), complex(0, 1)

    matrix = characteristic_matrix(honeycomb(4, 5, 6), alpha, beta)

    assert matrix.n == 1
    assert abs(matrix.entry(0, 1) - (4 + 5 * alpha + 6 * beta)) < 1e-12


def test_honeycomb_spectral_polynomial() -> None:
    poly = spectral_polynomial(honeycomb(4, 5, 6))

    assert poly.coefficients == {(0, 0): Fraction(4), (1, 0): Fraction(5), (0, 1): Fraction(6)}
    assert poly.to_json()[0] == {"alpha": 0, "beta": 0, "coefficient": "4"}


def test_honeycomb_roots_are_a_conjugate_pair() -> None:
    roots = unit_torus_roots(spectral_polynomial(honeycomb(4, 5, 6)))

    assert len(roots) == 2
    for root in roots:
        assert abs(root.alpha.real + 1 / 8) < 1e-9
        assert abs(abs(root.alpha) - 1) < 1e-9
        assert abs(abs(root.beta) - 1) < 1e-9
        assert root.residual < 1e-9
    assert roots[0].alpha.imag > 0
    assert abs(roots[0].alpha - roots[1].alpha.conjugate()) < 1e-9
    assert abs(roots[0].beta - roots[1].beta.conjugate()) < 1e-9


def test_frozen_honeycomb_has_no_roots() -> None:
    assert unit_torus_roots(spectral_polynomial(honeycomb(1, 1, 3))) == []


def test_zero_polynomial_is_not_generic() -> None:
    with pytest.raises(NonGenericWeights):
        unit_torus_roots(SpectralPolynomial({}))


def test_polynomial_size_limit() -> None:
    config = Config(spectral=SpectralConfig(polynomial_limit=2))

    with pytest.raises(TooLarge):
        spectral_polynomial(square_octagon(), config)


@pytest.mark.parametrize("graph", [honeycomb(4, 5, 6), square_octagon([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12])])
def test_polynomial_agrees_with_the_quotient(graph) -> None:
    poly = spectral_polynomial(graph)

    check = matching_class_check(graph, poly)

    assert check.consistent
    assert abs(check.value_at_one - check.determinant_at_one) < 1e-9


def test_honeycomb_coefficient_mass_equals_matching_mass() -> None:
    graph = honeycomb(4, 5, 6)

    check = matching_class_check(graph, spectral_polynomial(graph))

    assert check.abs_coefficient_sum == check.matching_weight_sum == 15


def test_nullvectors_at_a_honeycomb_root() -> None:
    graph = honeycomb(4, 5, 6)
    root = unit_torus_roots(spectral_polynomial(graph))[0]

    vectors = nullvectors(graph, root, seed=0)

    assert vectors.f == (1 + 0j,)
    assert abs(abs(vectors.g[0]) - 1) < 1e-12
    assert vectors.f_residual < 1e-9
    assert vectors.g_residual < 1e-9
    assert vectors.rank == 0
    assert vectors.f_zero == ()


def test_nullvector_phase_is_seeded() -> None:
    graph = honeycomb(4, 5, 6)
    root = unit_torus_roots(spectral_polynomial(graph))[0]

    assert nullvectors(graph, root, seed=1).g == nullvectors(graph, root, seed=1).g
    assert nullvectors(graph, root, seed=1).g != nullvectors(graph, root, seed=2).g


def test_spectral_data_bundles_every_root() -> None:
    data = spectral_data(honeycomb(4, 5, 6), seed=0)

    assert len(data.roots) == len(data.nullvectors) == 2
    assert len(data.to_json()["polynomial"]) == 3


@pytest.mark.parametrize(
    "graph", [honeycomb(), square_octagon()], ids=["honeycomb", "square-octagon"]
)
def test_random_weight_trials_give_zero_or_two_roots(graph) -> None:
    tally = root_count_trials(graph, 50, seed=0)

    assert sum(tally.values()) == 50
    assert set(tally) <= {"0", "2"}


def test_patch_on_a_honeycomb_window() -> None:
    graph = honeycomb(4, 5, 6)
    root = unit_torus_roots(spectral_polynomial(graph))[0]

    patch = almost_periodic_patch(graph, root, (10, 10), seed=0)

    assert len(patch.segments) == 100
    assert len(patch.white_polygons) == 81
    assert all(len(polygon) == 3 for polygon in patch.white_polygons.values())
    assert patch.martingale_residual < 1e-6
    assert patch.rotation_residual < 1e-6
    assert patch.closure_residual < 1e-6


def test_segment_directions_turn_by_the_root_argument() -> None:
    graph = honeycomb(4, 5, 6)
    root = unit_torus_roots(spectral_polynomial(graph))[0]
    patch = almost_periodic_patch(graph, root, (3, 3), seed=0)

    turn = patch.segment_direction(0, (1, 0)) - patch.segment_direction(0, (0, 0))

    assert abs(math.remainder(turn - math.atan2(root.alpha.imag, root.alpha.real), math.pi)) < 1e-6


def test_patch_diameter_grows_with_the_window() -> None:
    graph = honeycomb(4, 5, 6)
    root = unit_torus_roots(spectral_polynomial(graph))[0]

    small = almost_periodic_patch(graph, root, (10, 10), seed=0)
    large = almost_periodic_patch(graph, root, (20, 20), seed=0)

    assert large.diameter > small.diameter


def test_window_must_be_positive() -> None:
    graph = honeycomb(4, 5, 6)
    root = unit_torus_roots(spectral_polynomial(graph))[0]

    with pytest.raises(ValueError, match="window"):
        almost_periodic_patch(graph, root, (0, 3))


def test_junction_drift_vanishes_on_exact_tees() -> None:
    segments = [(0j, 4 + 0j), (1 + 0j, 1 + 2j), (3 + 0j, 3 - 1j)]

    assert junction_drift(segments, tolerance=1e-12, reach=1e-4) == 0


def test_junction_drift_measures_an_endpoint_off_its_host() -> None:
    segments = [(0j, 4 + 0j), (1 + 1e-6j, 1 + 2j), (3 + 0j, 3 - 1j)]

    drift = junction_drift(segments, tolerance=1e-12, reach=1e-4)

    assert abs(drift - 1e-6) < 1e-12
