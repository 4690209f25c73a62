"""Tests for decompositions, unitary rows, partitions of unity and projections."""

import numpy as np
import pytest

from loewner.core.decomp import (
    Decomposition,
    UnitaryRow,
    build_Pi_u,
    build_Pj,
    build_Q,
    partition_from_basis,
    projection_identities,
    sample_decomposition,
    sample_partition_of_unity,
    sample_unitary_row,
    shift_multi_index,
    unitary_row,
)
from loewner.core.errors import (
    DecompositionError,
    InvalidIndexError,
    NotPositiveDefiniteError,
    PartitionError,
    UnitaryRowError,
)

from .conftest import random_pd, scalar


def test_scalar_decomposition_follows_weights():
    d = sample_decomposition(scalar(5.0), 2, None, weights=[scalar(0.2), scalar(0.8)])
    assert d.parts[0][0, 0].real == pytest.approx(1.0)
    assert d.parts[1][0, 0].real == pytest.approx(4.0)


def test_identity_with_equal_weights():
    d = sample_decomposition(np.eye(3), 3, None, weights=[np.eye(3)] * 3)
    for part in d.parts:
        np.testing.assert_allclose(part, np.eye(3) / 3, atol=1e-14)


def test_random_decomposition_sums_to_x():
    rng = np.random.default_rng(21)
    x = random_pd(4, rng)
    d = sample_decomposition(x, 3, rng)
    assert np.linalg.norm(sum(d.parts) - x) <= 1e-11
    assert all(np.linalg.eigvalsh(part)[0] > 0 for part in d.parts)


def test_decomposition_invariants_over_seeds():
    for seed in range(500):
        rng = np.random.default_rng(seed)
        n, l = int(rng.integers(1, 7)), int(rng.integers(2, 5))
        x = random_pd(n, rng)
        d = sample_decomposition(x, l, rng)
        assert d.l == l
        assert np.linalg.norm(sum(d.parts) - x) <= 1e-10 * max(1.0, np.linalg.norm(x))
        for part in d.parts:
            np.testing.assert_allclose(part, part.conj().T)
            assert np.linalg.eigvalsh(part)[0] > 0


def test_decomposition_rejects_bad_input():
    with pytest.raises(NotPositiveDefiniteError):
        sample_decomposition(np.diag([1.0, -1.0]), 2, np.random.default_rng(0))
    with pytest.raises(DecompositionError):
        sample_decomposition(np.eye(2), 1, np.random.default_rng(0))
    with pytest.raises(DecompositionError):
        Decomposition(x=np.eye(2), parts=(np.eye(2), np.eye(2))).validate()


def test_scalar_unitary_row():
    x = scalar(4.0)
    d = Decomposition(x=x, parts=(scalar(1.0), scalar(3.0)))
    row = unitary_row(x, d)
    assert row.entries[0][0, 0].real == pytest.approx(0.5)
    assert row.entries[1][0, 0].real == pytest.approx(np.sqrt(3.0) / 2)


def test_unitary_row_of_random_decomposition():
    rng = np.random.default_rng(2)
    x = random_pd(3, rng)
    d = sample_decomposition(x, 3, rng)
    row = unitary_row(x, d)
    assert row.gram_residual() <= 1e-10
    for a, y in zip(row.entries, d.parts):
        assert np.linalg.norm(a.conj().T @ x @ a - y) <= 1e-9 * max(1.0, np.linalg.norm(y))


def test_sampled_unitary_row():
    row = sample_unitary_row(3, 2, np.random.default_rng(17))
    assert row.l == 2
    assert row.gram_residual() <= 1e-10
    assert all(np.linalg.svd(a, compute_uv=False)[-1] > 0 for a in row.entries)


def test_unitary_row_validation():
    with pytest.raises(UnitaryRowError):
        UnitaryRow((scalar(1.0), scalar(1.0))).validate()
    with pytest.raises(UnitaryRowError):
        UnitaryRow((scalar(1.0), scalar(0.0))).validate()


def test_coordinate_partition():
    partition = partition_from_basis(np.eye(3), [1, 1, 1])
    for i, p in enumerate(partition.projections):
        expected = np.zeros((3, 3))
        expected[i, i] = 1.0
        np.testing.assert_allclose(p, expected)


def test_hadamard_partition():
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    partition = partition_from_basis(h, [1, 1])
    np.testing.assert_allclose(partition.projections[0], 0.5 * np.ones((2, 2)), atol=1e-15)
    np.testing.assert_allclose(
        partition.projections[1], 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]]), atol=1e-15
    )


def test_random_partition_of_unity():
    partition = sample_partition_of_unity(6, 3, np.random.default_rng(8))
    projections = partition.projections
    assert sum(partition.ranks) == 6
    assert min(partition.ranks) >= 1
    assert np.linalg.norm(sum(projections) - np.eye(6)) <= 1e-10
    for i, p in enumerate(projections):
        assert np.linalg.norm(p @ p - p) <= 1e-10
        assert np.trace(p).real == pytest.approx(partition.ranks[i])
        for q in projections[i + 1:]:
            assert np.linalg.norm(p @ q) <= 1e-10


def test_partition_needs_enough_dimensions():
    with pytest.raises(PartitionError):
        sample_partition_of_unity(2, 3, np.random.default_rng(0))


def test_pj_for_two():
    np.testing.assert_allclose(build_Pj(2, 1), 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)
    np.testing.assert_allclose(build_Pj(2, 2), 0.5 * np.ones((2, 2)), atol=1e-15)
    np.testing.assert_allclose(build_Pj(2, 0), build_Pj(2, 2), atol=1e-15)


@pytest.mark.parametrize("l", [2, 3, 4, 5])
def test_pj_family(l):
    family = [build_Pj(l, j) for j in range(1, l + 1)]
    np.testing.assert_allclose(sum(family), np.eye(l), atol=1e-12)
    for i, p in enumerate(family):
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, p.conj().T, atol=1e-12)
        for q in family[i + 1:]:
            np.testing.assert_allclose(p @ q, 0.0, atol=1e-12)


def test_q_with_equal_values_is_pj():
    np.testing.assert_allclose(build_Q(1, [2.0, 2.0, 2.0]), build_Pj(3, 1), atol=1e-14)


def test_q_identities():
    for s in (1, 2):
        q = build_Q(s, [1.0, 3.0])
        np.testing.assert_allclose(q @ q, q, atol=1e-14)
        assert np.trace(q).real == pytest.approx(1.0)
    root = np.diag(np.sqrt([1.0, 3.0]))
    np.testing.assert_allclose(root @ build_Pj(2, 1) @ root, 2.0 * build_Q(1, [1.0, 3.0]))


def test_q_rejects_nonpositive_values():
    with pytest.raises(DecompositionError):
        build_Q(1, [1.0, 0.0])


def test_pi_u_example():
    np.testing.assert_allclose(build_Pi_u(2, 0, 2, (1, 1)), 0.5 * np.ones((2, 2)), atol=1e-15)


@pytest.mark.parametrize("l, k", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_pi_u_sum_and_shift(l, k):
    for j in range(l):
        us = [(a, b) + (1,) * (k - 2) for a in range(1, l + 1) for b in range(1, l + 1)]
        pis = {u: build_Pi_u(l, j, k, u) for u in us}
        for u, pi in pis.items():
            np.testing.assert_allclose(pi @ pi, pi, atol=1e-12)
            shifted = build_Pi_u(l, j, k, shift_multi_index(u, 1, l))
            np.testing.assert_allclose(shifted, pi, atol=1e-12)


def test_shift_multi_index_wraps():
    assert shift_multi_index((1, 3), 1, 3) == (2, 1)
    assert shift_multi_index((2, 2), 2, 3) == (1, 1)


def test_pi_u_rejects_invalid_multi_index():
    with pytest.raises(InvalidIndexError):
        build_Pi_u(2, 0, 2, (1, 3))


@pytest.mark.parametrize("l", [2, 3])
@pytest.mark.parametrize("k", [2, 3])
def test_projection_identities(l, k):
    residuals = projection_identities(l, k, rng=np.random.default_rng(0))
    assert residuals.worst <= 1e-10, residuals.as_dict()


def test_projection_identities_single_variable():
    assert projection_identities(4, 1).worst <= 1e-10
