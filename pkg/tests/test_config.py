"""Tests for configuration."""

import pytest

from loewner.core.config import LoewnerConfig, SearchConfig, ToleranceConfig
from loewner.core.errors import ConfigurationError


def test_defaults():
    config = LoewnerConfig()
    assert config.tolerances.psd_rel == 1e-9
    assert config.tolerances.violation_floor == 1e-7
    assert config.search.workers == 1
    assert config.tolerances.eigensolver == "lapack"
    assert config.validate() is config


def test_from_env(monkeypatch):
    monkeypatch.setenv("LOEWNER_VIOLATION_FLOOR", "1e-6")
    monkeypatch.setenv("LOEWNER_WORKERS", "4")
    monkeypatch.setenv("LOEWNER_EIGENSOLVER", "Jacobi")
    monkeypatch.setenv("LOEWNER_MAX_DIM", "64")
    config = LoewnerConfig.default()
    assert config.tolerances.violation_floor == 1e-6
    assert config.search == SearchConfig(workers=4)
    assert config.tolerances.eigensolver == "jacobi"
    assert config.max_dim == 64


def test_overrides():
    config = LoewnerConfig().with_overrides(tol=1e-5, workers=2)
    assert config.tolerances.violation_floor == 1e-5
    assert config.search.workers == 2
    assert LoewnerConfig().with_overrides() == LoewnerConfig()


@pytest.mark.parametrize("tol", [1e2, 0.0, -1e-9])
def test_masking_tolerances_are_rejected(tol):
    with pytest.raises(ConfigurationError):
        LoewnerConfig().with_overrides(tol=tol).validate()


def test_invalid_search_settings():
    with pytest.raises(ConfigurationError):
        LoewnerConfig(search=SearchConfig(workers=0)).validate()
    with pytest.raises(ConfigurationError):
        LoewnerConfig(tolerances=ToleranceConfig(eigensolver="qr")).validate()


def test_violation_threshold():
    tolerances = ToleranceConfig()
    assert tolerances.violation_threshold(1.0) == 1e-7
    assert tolerances.violation_threshold(1e4) == pytest.approx(1e-5)


def test_dimension_guard():
    config = LoewnerConfig(max_dim=16)
    assert config.guard_dimension((2, 2, 4)) == 16
    with pytest.raises(ConfigurationError):
        config.guard_dimension((3, 3, 2))
