"""Configuration models."""

from dimer_forge.config.schema import (
    SEED_ENV_VAR,
    Config,
    ConstructConfig,
    GeometryConfig,
    KasteleynConfig,
    RenderConfig,
    SamplerConfig,
    SpectralConfig,
)

__all__ = [
    "SEED_ENV_VAR",
    "Config",
    "ConstructConfig",
    "GeometryConfig",
    "KasteleynConfig",
    "RenderConfig",
    "SamplerConfig",
    "SpectralConfig",
]
