"""Functional calculus for functions of several Hermitian matrix variables."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .constants import (
    CLUSTER_TOL_REL,
    COMMUTE_TOL_REL,
    COMPRESSION_TOL_REL,
    SIMULTANEOUS_OFFDIAG_REL,
    SIMULTANEOUS_RETRY_CAP,
)
from .errors import CommutationError, DegenerateSpectrumError, DimensionMismatchError
from .exprlang import ScalarFunction
from .linalg import (
    commutator_norm,
    eig_hermitian,
    hermitian,
    kron_all,
    off_diagonal_norm,
    scale_of,
    symmetrize,
)
from .models import CompressionReport, EigenSystem


@dataclass(frozen=True)
class OperandTuple:
    """k Hermitian operands with their eigensystems computed at construction."""
    matrices: Tuple[np.ndarray, ...]
    systems: Tuple[EigenSystem, ...]

    @classmethod
    def of(cls, matrices: Sequence[np.ndarray], method: str = "lapack") -> "OperandTuple":
        if not matrices:
            raise DimensionMismatchError("operand tuple is empty")
        checked = tuple(hermitian(m) for m in matrices)
        return cls(matrices=checked, systems=tuple(eig_hermitian(m, method) for m in checked))

    @property
    def k(self) -> int:
        return len(self.matrices)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(m.shape[0] for m in self.matrices)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))


def cluster_spectrum(eigenvalues: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Group ascending eigenvalues whose consecutive gaps are within tol.

    Returns:
        (representatives, labels): cluster means and the cluster of each eigenvalue.
    """
    gaps = np.diff(eigenvalues) > tol
    labels = np.concatenate(([0], np.cumsum(gaps)))
    counts = np.bincount(labels)
    representatives = np.bincount(labels, weights=eigenvalues) / counts
    return representatives, labels


def apply_multivariate(
    f: ScalarFunction, x: OperandTuple, cluster_rel: float = CLUSTER_TOL_REL
) -> np.ndarray:
    """
    f(x1, ..., xk) on the tensor product space.

    Sums f(l1, ..., lk) E1 x ... x Ek over tuples of spectral projections; the
    factor order follows operand order, as in numpy.kron.

    Raises:
        SpectrumOutsideDomainError: an eigenvalue of x_i lies outside f's domain.
    """
    if f.arity != x.k:
        raise DimensionMismatchError(f"function of {f.arity} variables applied to {x.k} operands")

    representatives, labels = [], []
    for i, (matrix, system) in enumerate(zip(x.matrices, x.systems)):
        tol = cluster_rel * scale_of(matrix)
        reps, lab = cluster_spectrum(system.eigenvalues, tol)
        representatives.append(f.domain[i].admit(reps, i + 1, slack=tol))
        labels.append(lab)

    on_clusters = f.evaluate_grid(np.meshgrid(*representatives, indexing="ij"))
    values = on_clusters[np.ix_(*labels)].reshape(-1)
    v = kron_all([system.eigenvectors for system in x.systems])
    return symmetrize((v * values) @ v.conj().T)


@dataclass(frozen=True)
class CommonEigenbasis:
    """Unitary U with U* x_i U diagonal for every operand, and those diagonals."""
    unitary: np.ndarray
    eigenvalues: Tuple[np.ndarray, ...]
    residual: float


def _commuting_operands(matrices: Sequence[np.ndarray], commute_rel: float) -> Tuple[np.ndarray, ...]:
    if not matrices:
        raise DimensionMismatchError("no operands")
    checked = tuple(hermitian(m) for m in matrices)
    if len({m.shape for m in checked}) != 1:
        raise DimensionMismatchError("commuting operands must act on one space")
    scale = max(scale_of(m) for m in checked)
    for i in range(len(checked)):
        for j in range(i + 1, len(checked)):
            residual = commutator_norm(checked[i], checked[j])
            if residual > commute_rel * scale:
                raise CommutationError((i + 1, j + 1), residual)
    return checked


def simultaneous_diagonalize(
    matrices: Sequence[np.ndarray],
    rng: Optional[np.random.Generator] = None,
    commute_rel: float = COMMUTE_TOL_REL,
) -> CommonEigenbasis:
    """
    Common eigenbasis of commuting Hermitian matrices.

    Diagonalizes a random real combination of the operands and accepts the
    basis once every operand is diagonal in it to SIMULTANEOUS_OFFDIAG_REL.

    Raises:
        CommutationError: a pair does not commute.
        DegenerateSpectrumError: no combination resolved a common basis.
    """
    checked = _commuting_operands(matrices, commute_rel)
    scale = max(scale_of(m) for m in checked)
    rng = rng if rng is not None else np.random.default_rng(0)

    residual = np.inf
    for _ in range(SIMULTANEOUS_RETRY_CAP):
        coefficients = rng.standard_normal(len(checked))
        combination = sum(c * m for c, m in zip(coefficients, checked))
        u = eig_hermitian(combination).eigenvectors
        diagonals = [u.conj().T @ m @ u for m in checked]
        residual = max(off_diagonal_norm(d) for d in diagonals)
        if residual <= SIMULTANEOUS_OFFDIAG_REL * scale:
            return CommonEigenbasis(
                unitary=u,
                eigenvalues=tuple(np.real(np.diag(d)) for d in diagonals),
                residual=residual,
            )
    raise DegenerateSpectrumError(
        f"no common eigenbasis after {SIMULTANEOUS_RETRY_CAP} combinations "
        f"(off-diagonal residual {residual:.3e})"
    )


def _values_on_basis(f: ScalarFunction, basis: CommonEigenbasis, cluster_rel: float) -> np.ndarray:
    columns = []
    for i, eigenvalues in enumerate(basis.eigenvalues):
        slack = cluster_rel * max(1.0, float(np.linalg.norm(eigenvalues)))
        columns.append(f.domain[i].admit(eigenvalues, i + 1, slack=slack))
    return f.evaluate_grid(columns)


def apply_commuting(
    f: ScalarFunction,
    matrices: Sequence[np.ndarray],
    rng: Optional[np.random.Generator] = None,
    commute_rel: float = COMMUTE_TOL_REL,
    cluster_rel: float = CLUSTER_TOL_REL,
) -> np.ndarray:
    """f applied to commuting operands on their common space: sum_m f(l_m1..l_mk) u_m u_m*."""
    if f.arity != len(matrices):
        raise DimensionMismatchError(
            f"function of {f.arity} variables applied to {len(matrices)} operands"
        )
    basis = simultaneous_diagonalize(matrices, rng, commute_rel)
    u = basis.unitary
    return symmetrize((u * _values_on_basis(f, basis, cluster_rel)) @ u.conj().T)


def diagonal_embedding(unitary: np.ndarray, k: int) -> np.ndarray:
    """Columns u_m x ... x u_m (k factors) for each column u_m of unitary."""
    n = unitary.shape[1]
    return np.stack([kron_all([unitary[:, m]] * k) for m in range(n)], axis=1)


def compression_check(
    f: ScalarFunction,
    matrices: Sequence[np.ndarray],
    rng: Optional[np.random.Generator] = None,
    commute_rel: float = COMMUTE_TOL_REL,
    cluster_rel: float = CLUSTER_TOL_REL,
) -> CompressionReport:
    """
    Compare the tensor calculus, compressed to the diagonal vectors u_m^(x k),
    with the commuting calculus.

    Entry (m, n) of W* f(x) W must equal delta_mn f(l_m1, ..., l_mk).
    """
    basis = simultaneous_diagonalize(matrices, rng, commute_rel)
    tensor = apply_multivariate(f, OperandTuple.of(matrices), cluster_rel)
    w = diagonal_embedding(basis.unitary, len(matrices))
    compressed = w.conj().T @ tensor @ w
    expected = np.diag(_values_on_basis(f, basis, cluster_rel))
    deviation = float(np.max(np.abs(compressed - expected)))
    return CompressionReport(
        max_deviation=deviation,
        tolerance=COMPRESSION_TOL_REL * scale_of(tensor),
        dimension=tensor.shape[0],
    )
