import pytest

from dimer_forge.config.schema import SEED_ENV_VAR, Config


def test_defaults() -> None:
    config = Config()

    assert config.sampler.seed == 0
    assert config.sampler.algorithm == "PCG64"
    assert config.kasteleyn.enumeration_limit == 24
    assert config.spectral.polynomial_limit == 12


def test_seed_from_environment() -> None:
    assert Config.from_env({SEED_ENV_VAR: " 42 "}).sampler.seed == 42
    assert Config.from_env({}).sampler.seed == 0
    assert Config.from_env({SEED_ENV_VAR: ""}).sampler.seed == 0


def test_bad_seed_is_rejected() -> None:
    with pytest.raises(ValueError, match=SEED_ENV_VAR):
        Config.from_env({SEED_ENV_VAR: "seven"})
