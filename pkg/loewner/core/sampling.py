"""Random operands: Haar unitaries, log-uniform spectra, positive definite weights."""

import math
from typing import Optional, Tuple

import numpy as np
from scipy.stats import unitary_group

from .constants import (
    SPECTRUM_EDGE_MARGIN,
    SPECTRUM_HIGH,
    SPECTRUM_LOW,
    WEIGHT_REGULARIZATION,
)
from .exprlang import Interval
from .linalg import eig_hermitian, symmetrize


def trial_rng(seed: Optional[int], trial: int) -> np.random.Generator:
    """Independent stream for one search trial, fixed by (seed, trial)."""
    return np.random.default_rng([seed or 0, trial])


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Standard complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    return symmetrize(crandn(rng, n, n))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary on C^n."""
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_pd_weight(
    n: int, rng: np.random.Generator, regularization: float = WEIGHT_REGULARIZATION
) -> np.ndarray:
    """G G* + regularization * I for a standard complex Gaussian G."""
    g = crandn(rng, n, n)
    return symmetrize(g @ g.conj().T) + regularization * np.eye(n)


def spectrum_range(interval: Interval) -> Tuple[float, float]:
    """
    Sampling window for eigenvalues inside interval.

    [1e-2, upper * (1 - 1e-2)], or [1e-2, 1e2] for an unbounded interval; a
    positive lower endpoint is pushed inward by the same relative margin.
    """
    low = SPECTRUM_LOW
    if interval.lower > 0.0:
        low = max(low, interval.lower * (1.0 + SPECTRUM_EDGE_MARGIN))
    high = SPECTRUM_HIGH
    if math.isfinite(interval.upper):
        if interval.upper > 0.0:
            high = interval.upper * (1.0 - SPECTRUM_EDGE_MARGIN)
        else:
            high = interval.upper - SPECTRUM_EDGE_MARGIN
    if not low < high:
        lower = interval.lower if math.isfinite(interval.lower) else high - 1.0
        width = high - lower
        low, high = lower + SPECTRUM_EDGE_MARGIN * width, high
    return low, high


def sample_spectrum(n: int, interval: Interval, rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues drawn log-uniformly from the sampling window of interval."""
    low, high = spectrum_range(interval)
    if low > 0.0:
        return np.exp(rng.uniform(np.log(low), np.log(high), size=n))
    return rng.uniform(low, high, size=n)


def sample_operand(n: int, interval: Interval, rng: np.random.Generator) -> np.ndarray:
    """Hermitian matrix with sampled spectrum, conjugated by a Haar unitary."""
    u = random_unitary(n, rng)
    return symmetrize((u * sample_spectrum(n, interval, rng)) @ u.conj().T)


def sample_dominating(x: np.ndarray, interval: Interval, rng: np.random.Generator) -> np.ndarray:
    """A matrix y >= x whose spectrum stays inside the sampling window of interval."""
    n = x.shape[0]
    _, high = spectrum_range(interval)
    w = random_pd_weight(n, rng)
    headroom = high - float(eig_hermitian(x).eigenvalues[-1])
    top = float(eig_hermitian(w).eigenvalues[-1])
    w = w * (rng.uniform(0.1, 0.9) * min(headroom, SPECTRUM_HIGH) / top)
    return symmetrize(x + w)
