"""Dense complex Hermitian linear algebra: spectra, Kronecker products, PSD certification, blocks."""

from functools import reduce
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import block_diag

from .constants import (
    HERMITIAN_TOL_REL,
    JACOBI_MAX_SWEEPS,
    JACOBI_THRESHOLD_REL,
    PD_FLOOR_REL,
    PSD_TOL_REL,
)
from .errors import (
    DimensionMismatchError,
    EigenSolverError,
    NotHermitianError,
    NotPositiveDefiniteError,
)
from .models import BlockMatrix, EigenSystem, MultiIndex, PsdVerdict


def frobenius(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix))


def scale_of(matrix: np.ndarray) -> float:
    """max(1, ||M||_F), the reference size for relative tolerances."""
    return max(1.0, frobenius(matrix))


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def as_square(matrix) -> np.ndarray:
    """Coerce to a non-empty square complex array."""
    array = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise DimensionMismatchError(f"expected a non-empty square matrix, got shape {array.shape}")
    return array


def hermitian(matrix, tol_rel: float = HERMITIAN_TOL_REL) -> np.ndarray:
    """Validate that matrix is Hermitian and return its exact symmetrization."""
    array = as_square(matrix)
    residual = frobenius(array - array.conj().T)
    tolerance = tol_rel * scale_of(array)
    if residual > tolerance:
        raise NotHermitianError(residual, tolerance)
    return symmetrize(array)


def off_diagonal_norm(matrix: np.ndarray) -> float:
    return frobenius(matrix - np.diag(np.diag(matrix)))


def jacobi_eigh(
    matrix: np.ndarray,
    threshold_rel: float = JACOBI_THRESHOLD_REL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> EigenSystem:
    """
    Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Each rotation annihilates a[p, q] with the unitary
    [[c, s*e^{i phi}], [-s*e^{-i phi}, c]] acting on columns p and q.

    Raises:
        EigenSolverError: off-diagonal mass still above threshold after max_sweeps.
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = threshold_rel * frobenius(a)

    for _ in range(max_sweeps):
        if off_diagonal_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                magnitude = abs(a[p, q])
                if magnitude <= np.finfo(float).tiny:
                    continue
                phase = a[p, q] / magnitude
                tau = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rotation = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                pair = [p, q]
                a[:, pair] = a[:, pair] @ rotation
                a[pair, :] = rotation.conj().T @ a[pair, :]
                v[:, pair] = v[:, pair] @ rotation
                a[p, q] = a[q, p] = 0.0
    else:
        residual = off_diagonal_norm(a)
        if residual > threshold:
            raise EigenSolverError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {residual:.3e})"
            )

    eigenvalues = a.diagonal().real
    order = np.argsort(eigenvalues, kind="stable")
    return EigenSystem(eigenvalues[order], v[:, order])


def eig_hermitian(matrix, method: str = "lapack") -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues."""
    array = as_square(matrix)
    if method == "jacobi":
        return jacobi_eigh(array)
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(array)
    except np.linalg.LinAlgError as e:
        raise EigenSolverError(f"LAPACK eigensolver failed: {e}") from e
    return EigenSystem(eigenvalues, eigenvectors)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; block (p, q) equals a[p, q] * b."""
    return np.kron(a, b)


def kron_all(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Left-to-right Kronecker product of a non-empty sequence."""
    if not matrices:
        raise DimensionMismatchError("Kronecker product of an empty sequence")
    return reduce(np.kron, matrices)


def is_psd(matrix, tol: Optional[float] = None, method: str = "lapack") -> PsdVerdict:
    """
    Certify M >= 0 in the Loewner order.

    The margin is the smallest eigenvalue; the default tolerance is
    PSD_TOL_REL * max(1, ||M||_F).
    """
    array = as_square(matrix)
    tolerance = PSD_TOL_REL * scale_of(array) if tol is None else float(tol)
    margin = float(eig_hermitian(array, method).eigenvalues[0])
    return PsdVerdict(is_psd=margin >= -tolerance, margin=margin, tolerance_used=tolerance)


def spectral_apply(system: EigenSystem, values: np.ndarray) -> np.ndarray:
    """V diag(values) V* for an eigensystem V."""
    v = system.eigenvectors
    return symmetrize((v * values) @ v.conj().T)


def matrix_function(matrix, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """One-variable spectral calculus fn(M) for Hermitian M."""
    system = eig_hermitian(hermitian(matrix))
    return spectral_apply(system, fn(system.eigenvalues))


def _positive_spectrum(matrix, pd_floor_rel: float) -> EigenSystem:
    array = as_square(matrix)
    system = eig_hermitian(array)
    floor = pd_floor_rel * scale_of(array)
    margin = float(system.eigenvalues[0])
    if margin <= floor:
        raise NotPositiveDefiniteError(margin, floor)
    return system


def sqrt_pd(matrix, pd_floor_rel: float = PD_FLOOR_REL) -> np.ndarray:
    """Positive square root of a positive definite matrix."""
    system = _positive_spectrum(matrix, pd_floor_rel)
    return spectral_apply(system, np.sqrt(system.eigenvalues))


def inv_sqrt_pd(matrix, pd_floor_rel: float = PD_FLOOR_REL) -> np.ndarray:
    """Inverse positive square root of a positive definite matrix."""
    system = _positive_spectrum(matrix, pd_floor_rel)
    return spectral_apply(system, 1.0 / np.sqrt(system.eigenvalues))


def smallest_singular_value(matrix: np.ndarray) -> float:
    return float(np.linalg.svd(matrix, compute_uv=False)[-1])


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return frobenius(a @ b - b @ a)


def assemble_block(grid: Sequence[Sequence[np.ndarray]], hermitian_difference: bool = False) -> BlockMatrix:
    """
    Assemble a square grid of equally sized square blocks.

    Args:
        grid: grid[r][c] is the block in block-row r and block-column c.
        hermitian_difference: symmetrize the assembly (for differences of Hermitian sides).
    """
    rows = len(grid)
    if rows == 0:
        raise DimensionMismatchError("empty block grid")
    shape = np.shape(grid[0][0])
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatchError(f"blocks must be square, got shape {shape}")
    for r, row in enumerate(grid):
        if len(row) != rows:
            raise DimensionMismatchError(f"block row {r} has {len(row)} blocks, expected {rows}")
        for c, block in enumerate(row):
            if np.shape(block) != shape:
                raise DimensionMismatchError(
                    f"block ({r},{c}) has shape {np.shape(block)}, expected {shape}"
                )
    data = np.block([[np.asarray(block, dtype=complex) for block in row] for row in grid])
    if hermitian_difference:
        data = symmetrize(data)
    return BlockMatrix(block_rows=rows, block_dim=shape[0], data=data)


def assemble_indexed(
    indices: Sequence[MultiIndex],
    block_fn: Callable[[MultiIndex, MultiIndex], np.ndarray],
    hermitian_difference: bool = False,
) -> BlockMatrix:
    """Assemble blocks block_fn(t, s) over ordered pairs of multi-indices."""
    grid = [[block_fn(t, s) for s in indices] for t in indices]
    return assemble_block(grid, hermitian_difference=hermitian_difference)


def block_diagonal(blocks: Sequence[np.ndarray]) -> BlockMatrix:
    """Block-diagonal assembly of equally sized square blocks."""
    if not blocks:
        raise DimensionMismatchError("no blocks to assemble")
    shape = np.shape(blocks[0])
    if any(np.shape(block) != shape for block in blocks):
        raise DimensionMismatchError("diagonal blocks differ in shape")
    return BlockMatrix(block_rows=len(blocks), block_dim=shape[0], data=block_diag(*blocks))


def all_ones_pattern(block_rows: int, block: np.ndarray) -> BlockMatrix:
    """The block_rows x block_rows block matrix with block in every entry."""
    data = np.kron(np.ones((block_rows, block_rows)), block)
    return BlockMatrix(block_rows=block_rows, block_dim=block.shape[0], data=data)
