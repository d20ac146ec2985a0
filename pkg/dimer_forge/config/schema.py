"""Configuration schema for dimer-forge computations."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

SEED_ENV_VAR = "DIMER_FORGE_SEED"


@dataclass(frozen=True)
class KasteleynConfig:
    """Size limits and genericity settings for exact dimer computations."""

    exact_limit: int = 64
    enumeration_limit: int = 24
    cut_search_limit: int = 12
    weight_bound: int = 10**6
    condition_warning: float = 1e12


@dataclass(frozen=True)
class GeometryConfig:
    """Tolerances for segment arrangements."""

    relative_tolerance: float = 1e-9
    bijection_segment_limit: int = 10
    torus_segment_limit: int = 8


@dataclass(frozen=True)
class ConstructConfig:
    """Settings for building T-graphs from Kasteleyn matrices."""

    polygon_jitter: float = 1e-3
    closure_tolerance: float = 1e-9
    zero_tolerance: float = 1e-12
    area_tolerance: float = 1e-9
    max_principle_directions: int = 8


@dataclass(frozen=True)
class SamplerConfig:
    """Random number generation and diagnostics for forest sampling."""

    seed: int = 0
    algorithm: str = "PCG64"
    trap_ratio: float = 50.0


@dataclass(frozen=True)
class SpectralConfig:
    """Root finding and patch settings for periodic graphs."""

    polynomial_limit: int = 12
    grid_points: int = 4096
    unit_tolerance: float = 1e-6
    dedupe_tolerance: float = 1e-8
    residual_tolerance: float = 1e-10
    newton_steps: int = 60
    nullvector_tolerance: float = 1e-9


@dataclass(frozen=True)
class RenderConfig:
    """Default SVG canvas settings."""

    canvas_size: int = 800
    margin: int = 20
    stroke_width: float = 1.5


@dataclass(frozen=True)
class Config:
    """Root configuration for dimer-forge."""

    kasteleyn: KasteleynConfig = field(default_factory=KasteleynConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    construct: ConstructConfig = field(default_factory=ConstructConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    render: RenderConfig = field(default_factory=RenderConfig)

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> Config:
        """Return the default configuration with the seed taken from the environment."""
        env = os.environ if environ is None else environ
        raw = env.get(SEED_ENV_VAR, "").strip()
        if not raw:
            return cls()
        try:
            seed = int(raw)
        except ValueError as exc:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc
        return cls(sampler=replace(SamplerConfig(), seed=seed))
