"""Instance checks of operator inequalities, each reduced to the PSD margin of a difference."""

from functools import reduce
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .config import ToleranceConfig
from .constants import GROWTH_GRID_FLOOR, GROWTH_GRID_POINTS, SPECTRUM_EDGE_MARGIN
from .decomp import Decomposition, PartitionOfUnity, UnitaryRow
from .errors import DecompositionError, DimensionMismatchError, PreconditionError
from .exprlang import Interval, ScalarFunction, parse
from .funcalc import OperandTuple, apply_multivariate
from .linalg import (
    all_ones_pattern,
    assemble_indexed,
    block_diagonal,
    eig_hermitian,
    frobenius,
    is_psd,
    kron_all,
    scale_of,
    spectral_apply,
    symmetrize,
)
from .models import CheckReport, MonotonicityIndex, Verdict, Witness
from .multiindex import enumerate_multi_indices
from .. import __version__

Operands = Union[OperandTuple, Sequence[np.ndarray]]


def _operands(x: Operands, tolerances: ToleranceConfig) -> OperandTuple:
    if isinstance(x, OperandTuple):
        return x
    return OperandTuple.of(list(x), tolerances.eigensolver)


def _tolerances(tolerances: Optional[ToleranceConfig]) -> ToleranceConfig:
    return tolerances if tolerances is not None else ToleranceConfig()


def _judge(
    kind: str,
    difference: np.ndarray,
    tolerances: ToleranceConfig,
    witness: Callable[[float], Witness],
) -> CheckReport:
    """Margin of a Hermitian difference RHS - LHS, with the witness that produced it."""
    difference = symmetrize(difference)
    threshold = tolerances.violation_threshold(frobenius(difference))
    margin = is_psd(difference, tol=threshold, method=tolerances.eigensolver).margin
    verdict = Verdict.VIOLATION if margin < -threshold else Verdict.PASS
    return CheckReport(
        kind=kind,
        verdict=verdict,
        margin=margin,
        tolerance_used=threshold,
        instance=witness(margin),
    )


def _require_arity(f: ScalarFunction, x: OperandTuple):
    if f.arity != x.k:
        raise DimensionMismatchError(f"function of {f.arity} variables applied to {x.k} operands")


def _require_matching(x: OperandTuple, y: OperandTuple):
    if x.dims != y.dims:
        raise DimensionMismatchError(f"operand dimensions {x.dims} and {y.dims} differ")


def check_monotone_instance(
    g: ScalarFunction,
    x: Operands,
    decompositions: Sequence[Decomposition],
    idx: MonotonicityIndex,
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """
    Inequality of index (l, j): the block diagonal of g(y_t1, ..., y_tk) over the
    class |t| = j (mod l) lies below the all-ones block pattern carrying g(x).
    """
    tolerances = _tolerances(tolerances)
    x = _operands(x, tolerances)
    _require_arity(g, x)
    if len(decompositions) != x.k:
        raise DimensionMismatchError(f"expected {x.k} decompositions, got {len(decompositions)}")
    for i, (matrix, d) in enumerate(zip(x.matrices, decompositions), start=1):
        if d.l != idx.l:
            raise DecompositionError(f"decomposition of x_{i} has length {d.l}, index needs {idx.l}")
        if frobenius(sum(d.parts) - matrix) > 1e-9 * scale_of(matrix):
            raise DecompositionError(f"parts do not sum to operand x_{i}")

    indices = enumerate_multi_indices(x.k, idx.l, idx.j)
    blocks = [
        apply_multivariate(
            g,
            OperandTuple.of(
                [d.parts[t_i - 1] for t_i, d in zip(t, decompositions)], tolerances.eigensolver
            ),
            tolerances.cluster_rel,
        )
        for t in indices
    ]
    lhs = block_diagonal(blocks).data
    rhs = all_ones_pattern(len(indices), apply_multivariate(g, x, tolerances.cluster_rel)).data

    def witness(margin: float) -> Witness:
        return Witness(
            command="monotone",
            function=g.source,
            k=x.k,
            domain=g.domain_text(),
            margin=margin,
            operands=x.matrices,
            index=idx,
            orders=x.dims,
            decompositions=tuple(d.parts for d in decompositions),
            version=__version__,
        )

    return _judge("monotone", rhs - lhs, tolerances, witness)


def nudge_boundary(matrix: np.ndarray, floor: float, method: str = "lapack") -> np.ndarray:
    """Raise eigenvalues below floor up to floor."""
    system = eig_hermitian(matrix, method)
    if system.eigenvalues[0] >= floor:
        return matrix
    return spectral_apply(system, np.maximum(system.eigenvalues, floor))


def _nudged(f: ScalarFunction, x: OperandTuple, tolerances: ToleranceConfig) -> OperandTuple:
    matrices = []
    for interval, matrix in zip(f.domain, x.matrices):
        if interval.lower_closed:
            floor = interval.lower + tolerances.boundary_nudge
            matrix = nudge_boundary(matrix, floor, tolerances.eigensolver)
        matrices.append(matrix)
    return OperandTuple.of(matrices, tolerances.eigensolver)


def check_convex_instance(
    f: ScalarFunction,
    x: Operands,
    y: Operands,
    lam: float,
    tolerances: Optional[ToleranceConfig] = None,
    nudge: bool = True,
) -> CheckReport:
    """
    Convexity: f(lam x + (1 - lam) y) <= lam f(x) + (1 - lam) f(y) on the tensor space.

    With nudge, eigenvalues within boundary_nudge of a closed lower endpoint
    are raised to that distance before f is applied.
    """
    tolerances = _tolerances(tolerances)
    x, y = _operands(x, tolerances), _operands(y, tolerances)
    _require_arity(f, x)
    _require_matching(x, y)
    if not 0.0 <= lam <= 1.0:
        raise PreconditionError(f"lambda must lie in [0, 1], got {lam}")

    xs, ys = x, y
    if nudge:
        xs = _nudged(f, x, tolerances)
        ys = _nudged(f, y, tolerances)
    z = OperandTuple.of(
        [lam * a + (1.0 - lam) * b for a, b in zip(xs.matrices, ys.matrices)],
        tolerances.eigensolver,
    )
    cluster = tolerances.cluster_rel
    mixture = lam * apply_multivariate(f, xs, cluster)
    mixture = mixture + (1.0 - lam) * apply_multivariate(f, ys, cluster)
    at_mixture = apply_multivariate(f, z, cluster)

    def witness(margin: float) -> Witness:
        return Witness(
            command="convex",
            function=f.source,
            k=x.k,
            domain=f.domain_text(),
            margin=margin,
            operands=x.matrices,
            second_operands=y.matrices,
            lam=float(lam),
            orders=x.dims,
            version=__version__,
        )

    return _judge("convex", mixture - at_mixture, tolerances, witness)


def _jensen(
    kind: str,
    f: ScalarFunction,
    x: OperandTuple,
    factors: Sequence[Sequence[np.ndarray]],
    idx: MonotonicityIndex,
    tolerances: ToleranceConfig,
    witness: Callable[[float], Witness],
) -> CheckReport:
    """
    Block diagonal of f(c_t1* x1 c_t1, ...) against the blocks C_t* f(x) C_s,
    where C_t = c_t1 x ... x c_tk.
    """
    _require_arity(f, x)
    if len(factors) != x.k:
        raise DimensionMismatchError(f"expected {x.k} rows, got {len(factors)}")
    for i, (row, n) in enumerate(zip(factors, x.dims), start=1):
        if len(row) != idx.l:
            raise DimensionMismatchError(f"row {i} has length {len(row)}, index needs {idx.l}")
        if any(c.shape != (n, n) for c in row):
            raise DimensionMismatchError(f"row {i} entries do not act on the space of x_{i}")

    indices = enumerate_multi_indices(x.k, idx.l, idx.j).indices
    cluster = tolerances.cluster_rel
    at_x = apply_multivariate(f, x, cluster)
    lifts = {t: kron_all([row[t_i - 1] for t_i, row in zip(t, factors)]) for t in indices}

    def compressed(t) -> np.ndarray:
        parts = [
            symmetrize(row[t_i - 1].conj().T @ m @ row[t_i - 1])
            for t_i, row, m in zip(t, factors, x.matrices)
        ]
        return apply_multivariate(f, OperandTuple.of(parts, tolerances.eigensolver), cluster)

    lhs = block_diagonal([compressed(t) for t in indices]).data
    rhs = assemble_indexed(
        indices, lambda t, s: lifts[t].conj().T @ at_x @ lifts[s], hermitian_difference=True
    ).data
    return _judge(kind, rhs - lhs, tolerances, witness)


def jensen_unitary_check(
    f: ScalarFunction,
    x: Operands,
    rows: Sequence[UnitaryRow],
    idx: MonotonicityIndex,
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """Jensen inequality over unitary rows a_si on each operand space."""
    tolerances = _tolerances(tolerances)
    x = _operands(x, tolerances)

    def witness(margin: float) -> Witness:
        return Witness(
            command="jensen-unitary",
            function=f.source,
            k=x.k,
            domain=f.domain_text(),
            margin=margin,
            operands=x.matrices,
            index=idx,
            orders=x.dims,
            rows=tuple(row.entries for row in rows),
            version=__version__,
        )

    factors = [row.entries for row in rows]
    return _jensen("jensen-unitary", f, x, factors, idx, tolerances, witness)


def jensen_projection_check(
    f: ScalarFunction,
    x: Operands,
    partitions: Sequence[PartitionOfUnity],
    idx: MonotonicityIndex,
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """Jensen inequality over partitions of unity p_si; needs f defined at 0."""
    tolerances = _tolerances(tolerances)
    x = _operands(x, tolerances)

    def witness(margin: float) -> Witness:
        return Witness(
            command="jensen-projection",
            function=f.source,
            k=x.k,
            domain=f.domain_text(),
            margin=margin,
            operands=x.matrices,
            index=idx,
            orders=x.dims,
            partitions=tuple(p.projections for p in partitions),
            version=__version__,
        )

    factors = [p.projections for p in partitions]
    return _jensen("jensen-projection", f, x, factors, idx, tolerances, witness)


def check_tensor_monotone(
    f: ScalarFunction,
    x: Operands,
    y: Operands,
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """
    Monotonicity in the tensor order: f(x) <= f(y) whenever 0 <= x_i <= y_i.

    Raises:
        PreconditionError: some x_i is not PSD or some y_i - x_i is not PSD.
    """
    tolerances = _tolerances(tolerances)
    x, y = _operands(x, tolerances), _operands(y, tolerances)
    _require_arity(f, x)
    _require_matching(x, y)
    for i, (a, b) in enumerate(zip(x.matrices, y.matrices), start=1):
        lower = is_psd(a, method=tolerances.eigensolver)
        if not lower.is_psd:
            raise PreconditionError(f"x_{i} is not positive semidefinite", lower.margin)
        gap = is_psd(b - a, method=tolerances.eigensolver)
        if not gap.is_psd:
            raise PreconditionError(f"x_{i} <= y_{i} fails", gap.margin)

    cluster = tolerances.cluster_rel
    difference = apply_multivariate(f, y, cluster) - apply_multivariate(f, x, cluster)

    def witness(margin: float) -> Witness:
        return Witness(
            command="tensor-monotone",
            function=f.source,
            k=x.k,
            domain=f.domain_text(),
            margin=margin,
            operands=x.matrices,
            second_operands=y.matrices,
            orders=x.dims,
            version=__version__,
        )

    return _judge("tensor-monotone", difference, tolerances, witness)


def growth_bound_check(
    g: ScalarFunction,
    box: Sequence[float],
    C: float,
    grid: int = GROWTH_GRID_POINTS,
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """
    Growth bound g(r) >= -C / (r1 ... rk) on a logarithmic grid approaching the axes.

    The grid on axis i runs from box_i * 1e-6 to box_i * (1 - 1e-2). Each slack
    g(r) + C / (r1 ... rk) is measured against the bound at the same point: the
    margin is the smallest slack / max(1, C / (r1 ... rk)), and the tolerance
    is max(violation_floor, violation_rel).
    """
    tolerances = _tolerances(tolerances)
    if C < 0.0:
        raise PreconditionError(f"C must be nonnegative, got {C}")
    if len(box) != g.arity:
        raise DimensionMismatchError(f"box has {len(box)} bounds for {g.arity} variables")
    if grid < 2:
        raise PreconditionError(f"grid needs at least 2 points per axis, got {grid}")

    axes = []
    for i, (beta, interval) in enumerate(zip(box, g.domain), start=1):
        if beta <= 0.0:
            raise PreconditionError(f"box bound {beta} for r{i} must be positive")
        axis = np.geomspace(beta * GROWTH_GRID_FLOOR, beta * (1.0 - SPECTRUM_EDGE_MARGIN), grid)
        axes.append(interval.admit(axis, i))
    points = np.meshgrid(*axes, indexing="ij")
    bound = C / reduce(np.multiply, points)
    relative = (g.evaluate_grid(points) + bound) / np.maximum(1.0, np.abs(bound))

    position = np.unravel_index(int(np.argmin(relative)), relative.shape)
    margin = float(relative[position])
    threshold = max(tolerances.violation_floor, tolerances.violation_rel)
    return CheckReport(
        kind="growth",
        verdict=Verdict.VIOLATION if margin < -threshold else Verdict.PASS,
        margin=margin,
        tolerance_used=threshold,
        location=tuple(float(axis[p]) for axis, p in zip(axes, position)),
        notes=(f"{grid} points per axis, C={C!r}",),
    )


def ordinary_convexity_check(
    f: ScalarFunction,
    points: Sequence[Sequence[float]],
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """f at the mean of scalar points is at most the mean of f over the points."""
    tolerances = _tolerances(tolerances)
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != f.arity:
        raise DimensionMismatchError(f"points must have shape (m, {f.arity})")
    values = f.evaluate_grid(list(points.T))
    center = points.mean(axis=0)
    margin = float(values.mean() - f.evaluate(tuple(center)))
    threshold = max(tolerances.violation_floor, tolerances.violation_rel * float(np.max(np.abs(values))))
    return CheckReport(
        kind="ordinary-convexity",
        verdict=Verdict.VIOLATION if margin < -threshold else Verdict.PASS,
        margin=margin,
        tolerance_used=threshold,
        location=tuple(float(c) for c in center),
    )


def axis_sign_check(
    f: ScalarFunction,
    points: Sequence[Sequence[float]],
    tolerances: Optional[ToleranceConfig] = None,
) -> CheckReport:
    """
    f <= 0 on the coordinate hyperplanes: each point is evaluated once per
    variable with that coordinate set to 0. The margin is -max f.
    """
    tolerances = _tolerances(tolerances)
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != f.arity:
        raise DimensionMismatchError(f"points must have shape (m, {f.arity})")
    on_axes = []
    for i in range(f.arity):
        coords = points.copy()
        coords[:, i] = 0.0
        on_axes.append(coords)
    coords = np.concatenate(on_axes)
    values = f.evaluate_grid(list(coords.T))
    worst = int(np.argmax(values))
    margin = -float(values[worst])
    threshold = max(tolerances.violation_floor, tolerances.violation_rel * float(np.max(np.abs(values))))
    return CheckReport(
        kind="axis-sign",
        verdict=Verdict.VIOLATION if margin < -threshold else Verdict.PASS,
        margin=margin,
        tolerance_used=threshold,
        location=tuple(float(c) for c in coords[worst]),
    )


def replay(witness: Witness, tolerances: Optional[ToleranceConfig] = None) -> CheckReport:
    """Re-run the instance check a witness records."""
    f = parse(witness.function, witness.k, tuple(Interval.parse(text) for text in witness.domain))
    command = witness.command
    if command == "monotone":
        decompositions = [
            Decomposition(x=m, parts=tuple(parts))
            for m, parts in zip(witness.operands, witness.decompositions)
        ]
        return check_monotone_instance(f, witness.operands, decompositions, witness.index, tolerances)
    if command == "convex":
        return check_convex_instance(f, witness.operands, witness.second_operands, witness.lam, tolerances)
    if command == "jensen-unitary":
        rows = [UnitaryRow(tuple(entries)) for entries in witness.rows]
        return jensen_unitary_check(f, witness.operands, rows, witness.index, tolerances)
    if command == "jensen-projection":
        partitions = [
            PartitionOfUnity(
                projections=tuple(ps),
                ranks=tuple(int(round(float(np.trace(p).real))) for p in ps),
            )
            for ps in witness.partitions
        ]
        return jensen_projection_check(f, witness.operands, partitions, witness.index, tolerances)
    if command == "tensor-monotone":
        return check_tensor_monotone(f, witness.operands, witness.second_operands, tolerances)
    raise PreconditionError(f"witness command '{command}' cannot be replayed")
