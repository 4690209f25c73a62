"""Decompositions, unitary rows, partitions of unity and root-of-unity projections."""

from dataclasses import asdict, dataclass
from itertools import product
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    DECOMPOSITION_TOL_REL,
    PARTITION_TOL,
    PD_FLOOR_REL,
    ROW_RESAMPLE_CAP,
    UNITARY_ROW_TOL,
)
from .errors import DecompositionError, PartitionError, UnitaryRowError
from .linalg import (
    eig_hermitian,
    frobenius,
    hermitian,
    inv_sqrt_pd,
    scale_of,
    smallest_singular_value,
    sqrt_pd,
    symmetrize,
)
from .multiindex import enumerate_multi_indices, validate_multi_index
from .sampling import random_pd_weight, random_unitary


@dataclass(frozen=True)
class Decomposition:
    """Positive definite parts y_1, ..., y_l summing to x."""
    x: np.ndarray
    parts: Tuple[np.ndarray, ...]

    @property
    def l(self) -> int:
        return len(self.parts)

    def validate(self, pd_floor_rel: float = PD_FLOOR_REL) -> "Decomposition":
        residual = frobenius(sum(self.parts) - self.x)
        if residual > DECOMPOSITION_TOL_REL * scale_of(self.x):
            raise DecompositionError(f"parts do not sum to x (residual {residual:.3e})")
        for i, part in enumerate(self.parts, start=1):
            margin = float(eig_hermitian(part).eigenvalues[0])
            if margin <= pd_floor_rel * scale_of(part):
                raise DecompositionError(f"part y_{i} is not positive definite (margin {margin:.3e})")
        return self


@dataclass(frozen=True)
class UnitaryRow:
    """First block row (a_1, ..., a_l) of a unitary block matrix."""
    entries: Tuple[np.ndarray, ...]

    @property
    def l(self) -> int:
        return len(self.entries)

    def gram_residual(self) -> float:
        n = self.entries[0].shape[0]
        return frobenius(sum(a @ a.conj().T for a in self.entries) - np.eye(n))

    def validate(self, pd_floor_rel: float = PD_FLOOR_REL) -> "UnitaryRow":
        """
        Sum a_i a_i* = 1 together with invertible entries.

        Raises:
            UnitaryRowError: the identity fails or an entry is singular.
        """
        residual = self.gram_residual()
        if residual > UNITARY_ROW_TOL:
            raise UnitaryRowError(f"sum a_i a_i* differs from the identity by {residual:.3e}")
        for i, a in enumerate(self.entries, start=1):
            sigma = smallest_singular_value(a)
            if sigma <= pd_floor_rel:
                raise UnitaryRowError(f"entry a_{i} is singular (smallest singular value {sigma:.3e})")
        return self


@dataclass(frozen=True)
class PartitionOfUnity:
    """Orthogonal projections p_1, ..., p_l summing to the identity."""
    projections: Tuple[np.ndarray, ...]
    ranks: Tuple[int, ...]

    @property
    def l(self) -> int:
        return len(self.projections)

    def validate(self, tol: float = PARTITION_TOL) -> "PartitionOfUnity":
        n = self.projections[0].shape[0]
        residuals = {"sum": frobenius(sum(self.projections) - np.eye(n))}
        residuals["idempotence"] = max(frobenius(p @ p - p) for p in self.projections)
        residuals["orthogonality"] = max(
            (
                frobenius(p @ q)
                for i, p in enumerate(self.projections)
                for q in self.projections[i + 1:]
            ),
            default=0.0,
        )
        for name, residual in residuals.items():
            if residual > tol:
                raise PartitionError(f"partition of unity fails {name} (residual {residual:.3e})")
        return self


def sample_decomposition(
    x: np.ndarray,
    l: int,
    rng: np.random.Generator,
    weights: Optional[Sequence[np.ndarray]] = None,
    pd_floor_rel: float = PD_FLOOR_REL,
) -> Decomposition:
    """
    Random decomposition y_i = x^1/2 s^-1/2 w_i s^-1/2 x^1/2 with s = sum w_i.

    Args:
        weights: positive definite w_i; sampled as G G* + 0.05 I when omitted.

    Raises:
        NotPositiveDefiniteError: x is not positive definite.
    """
    if l < 2:
        raise DecompositionError(f"decomposition length must be at least 2, got {l}")
    x = hermitian(x)
    root = sqrt_pd(x, pd_floor_rel)
    n = x.shape[0]
    if weights is None:
        weights = [random_pd_weight(n, rng) for _ in range(l)]
    elif len(weights) != l:
        raise DecompositionError(f"expected {l} weights, got {len(weights)}")
    weights = [hermitian(w) for w in weights]
    s_inv_root = inv_sqrt_pd(sum(weights), pd_floor_rel)
    conjugator = root @ s_inv_root
    parts = tuple(symmetrize(conjugator @ w @ conjugator.conj().T) for w in weights)
    return Decomposition(x=x, parts=parts).validate(pd_floor_rel)


def unitary_row(x: np.ndarray, d: Decomposition, pd_floor_rel: float = PD_FLOOR_REL) -> UnitaryRow:
    """Associated row a_i = x^-1/2 y_i^1/2 of a decomposition; y_i = a_i* x a_i."""
    inv_root = inv_sqrt_pd(hermitian(x), pd_floor_rel)
    entries = tuple(inv_root @ sqrt_pd(y, pd_floor_rel) for y in d.parts)
    return UnitaryRow(entries).validate(pd_floor_rel)


def sample_unitary_row(
    n: int, l: int, rng: np.random.Generator, pd_floor_rel: float = PD_FLOOR_REL
) -> UnitaryRow:
    """First n x ln block row of a Haar unitary on C^(ln), split into l blocks."""
    for _ in range(ROW_RESAMPLE_CAP):
        u = random_unitary(l * n, rng)
        row = UnitaryRow(tuple(u[:n, i * n:(i + 1) * n] for i in range(l)))
        try:
            return row.validate(pd_floor_rel)
        except UnitaryRowError:
            continue
    raise UnitaryRowError(f"no invertible unitary row in {ROW_RESAMPLE_CAP} draws")


def partition_from_basis(unitary: np.ndarray, ranks: Sequence[int]) -> PartitionOfUnity:
    """p_i = projection onto the i-th consecutive block of columns of unitary."""
    n = unitary.shape[0]
    if sum(ranks) != n or any(r < 1 for r in ranks):
        raise PartitionError(f"ranks {tuple(ranks)} are not a composition of {n}")
    edges = np.concatenate(([0], np.cumsum(ranks)))
    projections = tuple(
        symmetrize(unitary[:, a:b] @ unitary[:, a:b].conj().T) for a, b in zip(edges, edges[1:])
    )
    return PartitionOfUnity(projections=projections, ranks=tuple(int(r) for r in ranks)).validate()


def sample_partition_of_unity(n: int, l: int, rng: np.random.Generator) -> PartitionOfUnity:
    """
    Random partition of unity on C^n into l projections of positive rank.

    Ranks are uniform over compositions of n into l positive parts.

    Raises:
        PartitionError: l > n.
    """
    if l < 1 or l > n:
        raise PartitionError(f"cannot split dimension {n} into {l} projections of positive rank")
    cuts = np.sort(rng.choice(np.arange(1, n), size=l - 1, replace=False)) if l > 1 else []
    ranks = np.diff(np.concatenate(([0], cuts, [n]))).astype(int)
    return partition_from_basis(random_unitary(n, rng), ranks)


# Root-of-unity projections

def roots_of_unity(l: int) -> np.ndarray:
    """beta^m for m = 0..l-1 with beta = exp(2 pi i / l)."""
    return np.exp(2j * np.pi * np.arange(l) / l)


def build_Pj(l: int, j: int) -> np.ndarray:
    """Rank-one projection with entries beta^((q-p) j) / l; j is taken modulo l."""
    roots = roots_of_unity(l)
    p, q = np.indices((l, l))
    return roots[((q - p) * j) % l] / l


def build_Q(s: int, xvals: Sequence[float]) -> np.ndarray:
    """Rank-one projection with entries sqrt(x_p x_q) beta^((q-p) s) / (x_1 + ... + x_l)."""
    xvals = np.asarray(xvals, dtype=float)
    if xvals.ndim != 1 or xvals.size == 0 or np.any(xvals <= 0.0):
        raise DecompositionError("xvals must be a non-empty vector of positive reals")
    l = xvals.size
    roots = roots_of_unity(l)
    p, q = np.indices((l, l))
    root = np.sqrt(xvals)
    return np.outer(root, root) * roots[((q - p) * s) % l] / xvals.sum()


def build_Pi_u(l: int, j: int, k: int, u: Sequence[int]) -> np.ndarray:
    """
    Projection on the index class |t| = j (mod l) with entries
    beta^(s.s - t.t + (t - s).u) / l^(k-1).
    """
    validate_multi_index(u, k, l)
    indices = np.array(enumerate_multi_indices(k, l, j).indices)
    u = np.asarray(u)
    # beta^(v_s) conj(beta^(v_t)) with v_s = s.s - s.u
    phase = (np.sum(indices * indices, axis=1) - indices @ u) % l
    exponents = (phase[None, :] - phase[:, None]) % l
    return roots_of_unity(l)[exponents] / len(indices)


def shift_multi_index(u: Sequence[int], i: int, l: int) -> Tuple[int, ...]:
    """u + (i, ..., i) with entries kept in 1..l."""
    return tuple((v - 1 + i) % l + 1 for v in u)


@dataclass(frozen=True)
class ProjectionResiduals:
    """Largest Frobenius residual of each projection identity."""
    pj_idempotent: float
    pj_orthogonal: float
    pj_sum: float
    q_idempotent: float
    q_trace: float
    q_scaling: float
    pi_hermitian: float
    pi_idempotent: float
    pi_sum: float
    pi_shift: float
    pi_classes: float

    @property
    def worst(self) -> float:
        return max(asdict(self).values())

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def projection_identities(
    l: int, k: int, xvals: Optional[Sequence[float]] = None, rng: Optional[np.random.Generator] = None
) -> ProjectionResiduals:
    """
    Evaluate every identity of the P_j, Q_s and Pi_u families for one (l, k).

    pi_classes is 1 when a pair of Pi_u is identical without being shift
    equivalent (or the reverse); otherwise the residual of the orthogonality
    or equality it satisfies.
    """
    if xvals is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        xvals = rng.uniform(0.1, 10.0, size=l)
    xvals = np.asarray(xvals, dtype=float)
    eye = np.eye(l)

    pj = [build_Pj(l, j) for j in range(1, l + 1)]
    pj_idempotent = max(frobenius(p @ p - p) for p in pj)
    pj_orthogonal = max(
        (frobenius(a @ b) for i, a in enumerate(pj) for b in pj[i + 1:]), default=0.0
    )
    pj_sum = frobenius(sum(pj) - eye)

    root = np.diag(np.sqrt(xvals))
    qs = [build_Q(s, xvals) for s in range(1, l + 1)]
    q_idempotent = max(frobenius(q @ q - q) for q in qs)
    q_trace = max(abs(np.trace(q) - 1.0) for q in qs)
    q_scaling = max(
        frobenius(root @ p @ root - (xvals.sum() / l) * q) for p, q in zip(pj, qs)
    )

    pi_hermitian = pi_idempotent = pi_sum = pi_shift = pi_classes = 0.0
    for j in range(l):
        us = list(product(range(1, l + 1), repeat=k))
        pis = {u: build_Pi_u(l, j, k, u) for u in us}
        size = next(iter(pis.values())).shape[0]
        for u, pi in pis.items():
            pi_hermitian = max(pi_hermitian, frobenius(pi - pi.conj().T))
            pi_idempotent = max(pi_idempotent, frobenius(pi @ pi - pi))
            for i in range(1, l):
                pi_shift = max(pi_shift, frobenius(pi - pis[shift_multi_index(u, i, l)]))
        pi_sum = max(pi_sum, frobenius(sum(pis.values()) - l * np.eye(size)))

        for a, u in enumerate(us):
            shifts = {shift_multi_index(u, i, l) for i in range(l)}
            for v in us[a + 1:]:
                distance = frobenius(pis[u] - pis[v])
                overlap = frobenius(pis[u] @ pis[v])
                if v in shifts:
                    pi_classes = max(pi_classes, distance)
                elif distance <= PARTITION_TOL:
                    pi_classes = 1.0
                else:
                    pi_classes = max(pi_classes, overlap)

    return ProjectionResiduals(
        pj_idempotent=pj_idempotent,
        pj_orthogonal=pj_orthogonal,
        pj_sum=pj_sum,
        q_idempotent=q_idempotent,
        q_trace=float(q_trace),
        q_scaling=q_scaling,
        pi_hermitian=pi_hermitian,
        pi_idempotent=pi_idempotent,
        pi_sum=pi_sum,
        pi_shift=pi_shift,
        pi_classes=pi_classes,
    )
