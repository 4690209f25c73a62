"""Shared fixtures."""

import numpy as np
import pytest

from loewner.core.config import LoewnerConfig
from loewner.core.logger import Logger
from loewner.core.sampling import random_hermitian
from loewner.core.search import SearchRunner


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def logger():
    return Logger()


@pytest.fixture
def config():
    return LoewnerConfig()


@pytest.fixture
def runner(config, logger):
    return SearchRunner(config, logger)


def random_pd(n: int, rng: np.random.Generator) -> np.ndarray:
    """Positive definite matrix with spectrum in [1, n + 1]-ish."""
    h = random_hermitian(n, rng)
    return h @ h.conj().T + np.eye(n)


def scalar(value: float) -> np.ndarray:
    return np.array([[value]], dtype=complex)
