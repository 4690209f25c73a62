"""Configuration management for Loewner."""

from dataclasses import dataclass, field, replace
from typing import Optional
import os

from .constants import (
    BOUNDARY_NUDGE,
    CLUSTER_TOL_REL,
    COMMUTE_TOL_REL,
    DEFAULT_MAX_DIM,
    MAX_ACCEPTED_TOLERANCE,
    PD_FLOOR_REL,
    PSD_TOL_REL,
    VIOLATION_FLOOR,
    VIOLATION_REL,
)
from .errors import ConfigurationError

EIGENSOLVERS = ("lapack", "jacobi")


@dataclass(frozen=True)
class ToleranceConfig:
    """
    Numerical tolerances, relative to max(1, ||M||_F) unless named absolute,
    and the eigensolver that certifies margins against them.
    """
    psd_rel: float = PSD_TOL_REL
    pd_floor_rel: float = PD_FLOOR_REL
    cluster_rel: float = CLUSTER_TOL_REL
    commute_rel: float = COMMUTE_TOL_REL
    violation_floor: float = VIOLATION_FLOOR
    violation_rel: float = VIOLATION_REL
    boundary_nudge: float = BOUNDARY_NUDGE
    eigensolver: str = "lapack"

    @classmethod
    def from_env(cls) -> "ToleranceConfig":
        """Load configuration from environment variables."""
        return cls(
            psd_rel=float(os.getenv("LOEWNER_PSD_TOL", str(cls.psd_rel))),
            pd_floor_rel=float(os.getenv("LOEWNER_PD_FLOOR", str(cls.pd_floor_rel))),
            cluster_rel=float(os.getenv("LOEWNER_CLUSTER_TOL", str(cls.cluster_rel))),
            violation_floor=float(
                os.getenv("LOEWNER_VIOLATION_FLOOR", str(cls.violation_floor))
            ),
            eigensolver=os.getenv("LOEWNER_EIGENSOLVER", cls.eigensolver).lower(),
        )

    def violation_threshold(self, difference_norm: float) -> float:
        """Margins below minus this value are violations."""
        return max(self.violation_floor, self.violation_rel * difference_norm)


@dataclass(frozen=True)
class SearchConfig:
    """Configuration for randomized search drivers."""
    workers: int = 1

    @classmethod
    def from_env(cls) -> "SearchConfig":
        """Load configuration from environment variables."""
        return cls(
            workers=int(os.getenv("LOEWNER_WORKERS", str(cls.workers))),
        )


@dataclass(frozen=True)
class LoewnerConfig:
    """Main configuration for Loewner."""
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    max_dim: int = DEFAULT_MAX_DIM

    @classmethod
    def default(cls) -> "LoewnerConfig":
        """Create default configuration from the environment."""
        return cls(
            tolerances=ToleranceConfig.from_env(),
            search=SearchConfig.from_env(),
            max_dim=int(os.getenv("LOEWNER_MAX_DIM", str(DEFAULT_MAX_DIM))),
        )

    def with_overrides(self, tol: Optional[float] = None, workers: Optional[int] = None) -> "LoewnerConfig":
        """Apply command-line overrides on top of this configuration."""
        config = self
        if tol is not None:
            config = replace(config, tolerances=replace(config.tolerances, violation_floor=tol))
        if workers is not None:
            config = replace(config, search=replace(config.search, workers=workers))
        return config

    def validate(self) -> "LoewnerConfig":
        """Reject tolerances that would hide genuine violations."""
        for name, value in vars(self.tolerances).items():
            if name == "eigensolver":
                continue
            if not 0.0 < value <= MAX_ACCEPTED_TOLERANCE:
                raise ConfigurationError(
                    f"tolerance {name}={value!r} outside (0, {MAX_ACCEPTED_TOLERANCE}]"
                )
        if self.max_dim < 1:
            raise ConfigurationError(f"max_dim must be positive, got {self.max_dim}")
        if self.search.workers < 1:
            raise ConfigurationError(f"workers must be positive, got {self.search.workers}")
        if self.tolerances.eigensolver not in EIGENSOLVERS:
            raise ConfigurationError(
                f"unknown eigensolver '{self.tolerances.eigensolver}' (expected one of {EIGENSOLVERS})"
            )
        return self

    def guard_dimension(self, dims) -> int:
        """Return the tensor dimension of dims, rejecting products above max_dim."""
        total = 1
        for n in dims:
            total *= int(n)
        if total > self.max_dim:
            raise ConfigurationError(
                f"tensor dimension {total} exceeds the guard {self.max_dim} (set LOEWNER_MAX_DIM)"
            )
        return total
