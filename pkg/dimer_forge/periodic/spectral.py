"""Characteristic matrix, spectral polynomial and its zeros on the unit torus."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
import sympy

from dimer_forge.config.schema import Config
from dimer_forge.dimers.kasteleyn import (
    KasteleynMatrix,
    adjugate,
    enumerate_matchings,
    kasteleyn_signs,
    random_generic_weights,
)
from dimer_forge.dimers.planarmap import PlanarMap
from dimer_forge.errors import NonGenericWeights, RankDeficient, TooLarge, Unbalanced
from dimer_forge.utils.helpers import complex_to_json, format_fraction

logger = logging.getLogger(__name__)

Monomial = tuple[int, int]


def _black_crossing(graph: PlanarMap, edge_id: int) -> tuple[int, int, int]:
    """Return the black end, the white end and the crossing measured from black to white."""
    edge = graph.edges[edge_id]
    if graph.colors[edge.u] == "b":
        return edge.u, edge.v, edge.crossing
    return edge.v, edge.u, (-edge.crossing[0], -edge.crossing[1])


def characteristic_matrix(graph: PlanarMap, alpha: complex, beta: complex) -> KasteleynMatrix:
    """K(alpha, beta): entry (b, w) sums sign * weight * alpha^h * beta^v over edges b -> w."""
    blacks, whites = graph.blacks, graph.whites
    if len(blacks) != len(whites):
        raise Unbalanced(f"map has {len(blacks)} black and {len(whites)} white vertices")
    signs = kasteleyn_signs(graph)
    rows = {black: index for index, black in enumerate(blacks)}
    columns = {white: index for index, white in enumerate(whites)}
    entries = np.zeros((len(blacks), len(whites)), dtype=complex)
    for edge_id, edge in graph.edges.items():
        black, white, (h, v) = _black_crossing(graph, edge_id)
        entries[rows[black], columns[white]] += (
            signs[edge_id] * float(edge.weight) * alpha**h * beta**v
        )
    return KasteleynMatrix(
        entries=tuple(tuple(complex(value) for value in row) for row in entries),
        blacks=tuple(blacks),
        whites=tuple(whites),
        field="complex",
        signs=signs,
    )


@dataclass(frozen=True)
class SpectralPolynomial:
    """Laurent polynomial P(alpha, beta) = det K(alpha, beta) with exact coefficients."""

    coefficients: dict[Monomial, Fraction]

    @property
    def beta_range(self) -> tuple[int, int]:
        powers = [j for _, j in self.coefficients]
        return min(powers), max(powers)

    def evaluate(self, alpha: complex, beta: complex) -> complex:
        return sum(
            (float(c) * alpha**i * beta**j for (i, j), c in self.coefficients.items()), 0j
        )

    def partial_alpha(self, alpha: complex, beta: complex) -> complex:
        return sum(
            (float(c) * i * alpha ** (i - 1) * beta**j
             for (i, j), c in self.coefficients.items() if i),
            0j,
        )

    def partial_beta(self, alpha: complex, beta: complex) -> complex:
        return sum(
            (float(c) * j * alpha**i * beta ** (j - 1)
             for (i, j), c in self.coefficients.items() if j),
            0j,
        )

    def in_beta(self, alpha: complex) -> np.ndarray:
        """Coefficients of beta^(-jmin) P(alpha, beta), highest power first."""
        low, high = self.beta_range
        coefficients = np.zeros(high - low + 1, dtype=complex)
        for (i, j), c in self.coefficients.items():
            coefficients[high - j] += float(c) * alpha**i
        return coefficients

    def abs_coefficient_sum(self) -> Fraction:
        return sum((abs(c) for c in self.coefficients.values()), Fraction(0))

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {"alpha": i, "beta": j, "coefficient": format_fraction(c)}
            for (i, j), c in sorted(self.coefficients.items())
        ]


def spectral_polynomial(graph: PlanarMap, config: Config | None = None) -> SpectralPolynomial:
    """Expand det K(alpha, beta) symbolically after clearing negative powers."""
    config = config or Config()
    blacks, whites = graph.blacks, graph.whites
    if len(blacks) != len(whites):
        raise Unbalanced(f"map has {len(blacks)} black and {len(whites)} white vertices")
    limit = config.spectral.polynomial_limit
    if len(blacks) > limit:
        raise TooLarge(f"spectral polynomial is limited to {limit} blacks per fundamental domain")
    a, b = sympy.symbols("alpha beta")
    signs = kasteleyn_signs(graph)
    rows = {black: index for index, black in enumerate(blacks)}
    columns = {white: index for index, white in enumerate(whites)}
    n = len(blacks)
    matrix = sympy.zeros(n, n)
    shift_a = shift_b = 0
    for edge_id, edge in graph.edges.items():
        black, white, (h, v) = _black_crossing(graph, edge_id)
        weight = sympy.Rational(edge.weight.numerator, edge.weight.denominator)
        matrix[rows[black], columns[white]] += signs[edge_id] * weight * a**h * b**v
        shift_a = max(shift_a, abs(h))
        shift_b = max(shift_b, abs(v))
    shift_a *= n
    shift_b *= n
    expanded = sympy.expand(matrix.det(method="berkowitz") * a**shift_a * b**shift_b)
    coefficients: dict[Monomial, Fraction] = {}
    if expanded != 0:
        for (i, j), c in sympy.Poly(expanded, a, b).terms():
            value = Fraction(int(c.p), int(c.q))
            coefficients[(i - shift_a, j - shift_b)] = value
    logger.debug("spectral polynomial with %d monomials", len(coefficients))
    return SpectralPolynomial(coefficients)


@dataclass(frozen=True)
class SpectralRoot:
    alpha: complex
    beta: complex
    residual: float
    gradient: tuple[complex, complex]

    def to_json(self) -> dict[str, Any]:
        return {
            "alpha": complex_to_json(self.alpha),
            "beta": complex_to_json(self.beta),
            "residual": self.residual,
            "gradient": [complex_to_json(value) for value in self.gradient],
        }


def _inside_count(poly: SpectralPolynomial, alpha: complex, tolerance: float) -> tuple[int, np.ndarray]:
    coefficients = poly.in_beta(alpha)
    nonzero = np.flatnonzero(np.abs(coefficients) > 0)
    if len(nonzero) == 0:
        return 0, np.array([], dtype=complex)
    roots = np.roots(coefficients[nonzero[0]:])
    return int(np.sum(np.abs(roots) < 1 - tolerance)), roots


def _refine(poly: SpectralPolynomial, theta: float, beta: complex,
            config: Config) -> tuple[float, complex, float]:
    """Damped Newton on (Re P, Im P, |beta|^2 - 1) in the unknowns (theta, Re beta, Im beta)."""

    def residual(t: float, x: float, y: float) -> np.ndarray:
        value = poly.evaluate(cmath.exp(1j * t), complex(x, y))
        return np.array([value.real, value.imag, x * x + y * y - 1.0])

    state = np.array([theta, beta.real, beta.imag])
    current = residual(*state)
    for _ in range(config.spectral.newton_steps):
        norm = float(np.linalg.norm(current))
        if norm < config.spectral.residual_tolerance * 1e-4:
            break
        alpha = cmath.exp(1j * state[0])
        b = complex(state[1], state[2])
        d_theta = 1j * alpha * poly.partial_alpha(alpha, b)
        d_beta = poly.partial_beta(alpha, b)
        jacobian = np.array(
            [
                [d_theta.real, d_beta.real, (1j * d_beta).real],
                [d_theta.imag, d_beta.imag, (1j * d_beta).imag],
                [0.0, 2 * state[1], 2 * state[2]],
            ]
        )
        try:
            step = np.linalg.solve(jacobian, -current)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jacobian, -current, rcond=None)[0]
        damping = 1.0
        while damping > 1e-6:
            trial = state + damping * step
            trial_residual = residual(*trial)
            if np.linalg.norm(trial_residual) < norm:
                state, current = trial, trial_residual
                break
            damping /= 2
        else:
            break
    return float(state[0]), complex(state[1], state[2]), float(np.linalg.norm(current))


def unit_torus_roots(poly: SpectralPolynomial, config: Config | None = None) -> list[SpectralRoot]:
    """Zeros of P with |alpha| = |beta| = 1, found by a theta sweep and Newton refinement."""
    config = config or Config()
    if not poly.coefficients:
        raise NonGenericWeights("spectral polynomial vanishes identically")
    settings = config.spectral
    grid = np.linspace(0.0, 2 * math.pi, settings.grid_points, endpoint=False)
    counts = []
    roots_at = []
    for theta in grid:
        count, roots = _inside_count(poly, cmath.exp(1j * theta), 0.0)
        counts.append(count)
        roots_at.append(roots)

    found: list[tuple[float, complex]] = []
    for index, theta in enumerate(grid):
        following = (index + 1) % len(grid)
        if counts[index] == counts[following]:
            continue
        candidates = roots_at[index]
        beta = candidates[int(np.argmin(np.abs(np.abs(candidates) - 1.0)))]
        theta_root, beta_root, residual = _refine(poly, float(theta), complex(beta), config)
        if residual > settings.residual_tolerance * 100 or abs(abs(beta_root) - 1) > settings.unit_tolerance:
            logger.warning("root near theta=%.6f did not converge (residual %.3g)", theta, residual)
            continue
        found.append((theta_root % (2 * math.pi), beta_root))

    unique: list[tuple[complex, complex]] = []
    for theta, beta in found:
        alpha = cmath.exp(1j * theta)
        if all(abs(alpha - a) > settings.dedupe_tolerance or abs(beta - b) > settings.dedupe_tolerance
               for a, b in unique):
            unique.append((alpha, beta))
    for alpha, beta in list(unique):
        conjugate = (alpha.conjugate(), beta.conjugate())
        if all(abs(conjugate[0] - a) > 1e-6 or abs(conjugate[1] - b) > 1e-6 for a, b in unique):
            logger.warning("adding missing conjugate of root alpha=%s", alpha)
            unique.append(conjugate)
    if len(unique) % 2 == 1 or len(unique) > 2:
        raise NonGenericWeights(f"found {len(unique)} unit-torus roots; generic weights give 0 or 2")
    roots = [
        SpectralRoot(
            alpha=alpha,
            beta=beta,
            residual=abs(poly.evaluate(alpha, beta)),
            gradient=(poly.partial_alpha(alpha, beta), poly.partial_beta(alpha, beta)),
        )
        for alpha, beta in sorted(unique, key=lambda pair: pair[0].imag, reverse=True)
    ]
    logger.info("found %d unit-torus roots", len(roots))
    return roots


@dataclass(frozen=True)
class Nullvectors:
    """f on blacks with f^T K(conj alpha, conj beta) = 0; g on whites with K(alpha, beta) g = 0."""

    alpha: complex
    beta: complex
    blacks: tuple[int, ...]
    whites: tuple[int, ...]
    f: tuple[complex, ...]
    g: tuple[complex, ...]
    rank: int
    f_residual: float
    g_residual: float
    f_zero: tuple[int, ...] = field(default_factory=tuple)
    g_zero: tuple[int, ...] = field(default_factory=tuple)

    def f_of(self, black: int) -> complex:
        return self.f[self.blacks.index(black)]

    def g_of(self, white: int) -> complex:
        return self.g[self.whites.index(white)]

    def to_json(self) -> dict[str, Any]:
        return {
            "alpha": complex_to_json(self.alpha),
            "beta": complex_to_json(self.beta),
            "f": {str(b): complex_to_json(v) for b, v in zip(self.blacks, self.f)},
            "g": {str(w): complex_to_json(v) for w, v in zip(self.whites, self.g)},
            "rank": self.rank,
            "f_residual": self.f_residual,
            "g_residual": self.g_residual,
            "f_zero": list(self.f_zero),
            "g_zero": list(self.g_zero),
        }


def nullvectors(graph: PlanarMap, root: SpectralRoot | tuple[complex, complex],
                seed: int | None = None, config: Config | None = None) -> Nullvectors:
    """Nullvectors from the rank-one adjugate; g is turned by a seeded unimodular constant."""
    config = config or Config()
    alpha, beta = (root.alpha, root.beta) if isinstance(root, SpectralRoot) else root
    matrix = characteristic_matrix(graph, alpha, beta)
    array = matrix.as_array()
    adj = adjugate(matrix, config, corank=1)
    scale = float(np.max(np.abs(adj))) if adj.size else 0.0
    tolerance = config.spectral.nullvector_tolerance
    if scale <= tolerance:
        raise RankDeficient("adjugate vanishes; the root has corank above one")
    g = adj[:, int(np.argmax(np.linalg.norm(adj, axis=0)))]
    f = np.conj(adj[int(np.argmax(np.linalg.norm(adj, axis=1))), :])
    f = f / f[int(np.argmax(np.abs(f)))]
    g = g / np.max(np.abs(g))
    rng = np.random.default_rng(config.sampler.seed if seed is None else seed)
    g = g * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    f_residual = float(np.max(np.abs(f @ np.conj(array)))) if f.size else 0.0
    g_residual = float(np.max(np.abs(array @ g))) if g.size else 0.0
    rank = int(np.linalg.matrix_rank(array, tol=tolerance * max(1.0, float(np.max(np.abs(array))))))
    return Nullvectors(
        alpha=alpha,
        beta=beta,
        blacks=matrix.blacks,
        whites=matrix.whites,
        f=tuple(complex(value) for value in f),
        g=tuple(complex(value) for value in g),
        rank=rank,
        f_residual=f_residual,
        g_residual=g_residual,
        f_zero=tuple(b for b, v in zip(matrix.blacks, f) if abs(v) <= tolerance),
        g_zero=tuple(w for w, v in zip(matrix.whites, g) if abs(v.real) <= tolerance),
    )


@dataclass(frozen=True)
class SpectralData:
    polynomial: SpectralPolynomial
    roots: tuple[SpectralRoot, ...]
    nullvectors: tuple[Nullvectors, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "polynomial": self.polynomial.to_json(),
            "roots": [root.to_json() for root in self.roots],
            "nullvectors": [item.to_json() for item in self.nullvectors],
        }


def spectral_data(graph: PlanarMap, seed: int | None = None,
                  config: Config | None = None) -> SpectralData:
    poly = spectral_polynomial(graph, config)
    roots = unit_torus_roots(poly, config)
    return SpectralData(
        poly, tuple(roots), tuple(nullvectors(graph, root, seed, config) for root in roots)
    )


@dataclass(frozen=True)
class MatchingClassCheck:
    value_at_one: complex
    determinant_at_one: complex
    abs_coefficient_sum: Fraction
    matching_weight_sum: Fraction

    @property
    def consistent(self) -> bool:
        return bool(
            abs(self.value_at_one - self.determinant_at_one) < 1e-9
            and self.abs_coefficient_sum <= self.matching_weight_sum
        )


def matching_class_check(graph: PlanarMap, poly: SpectralPolynomial,
                         config: Config | None = None) -> MatchingClassCheck:
    """P(1,1) against det K(1,1), and the coefficient mass against the quotient's matchings."""
    enumeration = enumerate_matchings(graph, config)
    return MatchingClassCheck(
        value_at_one=poly.evaluate(1, 1),
        determinant_at_one=complex(np.linalg.det(characteristic_matrix(graph, 1, 1).as_array())),
        abs_coefficient_sum=poly.abs_coefficient_sum(),
        matching_weight_sum=enumeration.partition_function,
    )


def root_count_trials(graph: PlanarMap, trials: int, seed: int = 0,
                      config: Config | None = None) -> dict[str, int]:
    """Tally unit-torus root counts over seeded random rational weights."""
    config = config or Config()
    tally: dict[str, int] = {}
    for trial in range(trials):
        weighted = random_generic_weights(graph, seed + trial, config)
        try:
            count = str(len(unit_torus_roots(spectral_polynomial(weighted, config), config)))
        except NonGenericWeights:
            count = "nongeneric"
        tally[count] = tally.get(count, 0) + 1
    return tally
