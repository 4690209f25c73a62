"""Data models for Loewner."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .constants import WITNESS_ORDERING
from .errors import InvalidIndexError

MultiIndex = Tuple[int, ...]


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in ascending order and unitary eigenvectors as columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])


@dataclass(frozen=True)
class PsdVerdict:
    """Positive semidefiniteness verdict; is_psd iff margin >= -tolerance_used."""
    is_psd: bool
    margin: float
    tolerance_used: float


@dataclass(frozen=True)
class BlockMatrix:
    """Dense assembly of a square grid of equally sized blocks."""
    block_rows: int
    block_dim: int
    data: np.ndarray

    @property
    def dim(self) -> int:
        return self.block_rows * self.block_dim

    def block(self, row: int, col: int) -> np.ndarray:
        d = self.block_dim
        return self.data[row * d:(row + 1) * d, col * d:(col + 1) * d]


@dataclass(frozen=True)
class MonotonicityIndex:
    """The index (l, j) with l >= 2 and 0 <= j <= l - 1."""
    l: int
    j: int

    def __post_init__(self):
        if self.l < 2 or not 0 <= self.j <= self.l - 1:
            raise InvalidIndexError(f"invalid index (l={self.l}, j={self.j})")

    def __str__(self) -> str:
        return f"({self.l},{self.j})"


@dataclass(frozen=True)
class MultiIndexSet:
    """Multi-indices t in {1..l}^k with |t| = j (mod l), ascending lexicographic."""
    k: int
    l: int
    j: int
    indices: Tuple[MultiIndex, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


class Verdict(str, Enum):
    PASS = "pass"
    VIOLATION = "violation"


@dataclass(frozen=True)
class Witness:
    """A fully serializable instance of a checked inequality."""
    command: str
    function: str
    k: int
    domain: Tuple[str, ...]
    margin: float
    operands: Tuple[np.ndarray, ...]
    index: Optional[MonotonicityIndex] = None
    lam: Optional[float] = None
    orders: Tuple[int, ...] = ()
    seed: Optional[int] = None
    trial: Optional[int] = None
    second_operands: Tuple[np.ndarray, ...] = ()
    decompositions: Tuple[Tuple[np.ndarray, ...], ...] = ()
    partitions: Tuple[Tuple[np.ndarray, ...], ...] = ()
    rows: Tuple[Tuple[np.ndarray, ...], ...] = ()
    ordering: str = WITNESS_ORDERING
    version: str = ""


@dataclass(frozen=True)
class CheckReport:
    """Outcome of an instance check or of a randomized search."""
    kind: str
    verdict: Verdict
    margin: float
    tolerance_used: float
    instance: Optional[Witness] = None
    trials_run: int = 1
    seed: Optional[int] = None
    location: Optional[Tuple[float, ...]] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def in_dead_zone(self) -> bool:
        """Negative margin that is still within tolerance."""
        return self.passed and self.margin < 0.0


@dataclass(frozen=True)
class CompressionReport:
    """Deviation between the compressed tensor calculus and the commuting calculus."""
    max_deviation: float
    tolerance: float
    dimension: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance
