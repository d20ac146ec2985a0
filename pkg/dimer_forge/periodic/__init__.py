"""Spectral data and almost periodic T-graphs of torus maps."""

from dimer_forge.periodic.patch import AlmostPeriodicPatch, almost_periodic_patch, junction_drift
from dimer_forge.periodic.spectral import (
    MatchingClassCheck,
    Nullvectors,
    SpectralData,
    SpectralPolynomial,
    SpectralRoot,
    characteristic_matrix,
    matching_class_check,
    nullvectors,
    root_count_trials,
    spectral_data,
    spectral_polynomial,
    unit_torus_roots,
)

__all__ = [
    "AlmostPeriodicPatch",
    "MatchingClassCheck",
    "Nullvectors",
    "SpectralData",
    "SpectralPolynomial",
    "SpectralRoot",
    "almost_periodic_patch",
    "junction_drift",
    "characteristic_matrix",
    "matching_class_check",
    "nullvectors",
    "root_count_trials",
    "spectral_data",
    "spectral_polynomial",
    "unit_torus_roots",
]
