"""Wilson sampling of T-graph forests and the dimer configurations they encode."""

from dimer_forge.sampler.report import (
    EmpiricalReport,
    empirical_report,
    exact_forest_law,
    exact_matching_law,
    sample_stream,
)
from dimer_forge.sampler.wilson import ForestSampler, RngConfig, sample_matching, wilson_sample_forest

__all__ = [
    "EmpiricalReport",
    "ForestSampler",
    "RngConfig",
    "empirical_report",
    "exact_forest_law",
    "exact_matching_law",
    "sample_matching",
    "sample_stream",
    "wilson_sample_forest",
]
