"""Tests for multi-index classes."""

from itertools import product

import pytest

from loewner.core.errors import InvalidIndexError
from loewner.core.multiindex import enumerate_multi_indices, validate_multi_index


@pytest.mark.parametrize(
    "k, l, j, expected",
    [
        (2, 2, 0, ((1, 1), (2, 2))),
        (2, 2, 1, ((1, 2), (2, 1))),
        (2, 3, 0, ((1, 2), (2, 1), (3, 3))),
        (3, 2, 0, ((1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 2, 2))),
    ],
)
def test_listed_classes(k, l, j, expected):
    assert enumerate_multi_indices(k, l, j).indices == expected


@pytest.mark.parametrize("l", range(2, 7))
@pytest.mark.parametrize("k", range(1, 5))
def test_classes_partition_the_cube(k, l):
    classes = [enumerate_multi_indices(k, l, j) for j in range(l)]
    for j, found in enumerate(classes):
        assert len(found) == l ** (k - 1)
        brute = [t for t in product(range(1, l + 1), repeat=k) if sum(t) % l == j]
        assert list(found) == brute
    assert sum(len(c) for c in classes) == l**k


def test_single_variable_class_is_one_element():
    assert enumerate_multi_indices(1, 3, 2).indices == ((2,),)
    assert enumerate_multi_indices(1, 3, 0).indices == ((3,),)


@pytest.mark.parametrize("k, l, j", [(2, 1, 0), (2, 2, 2), (2, 3, -1), (0, 2, 0)])
def test_invalid_index(k, l, j):
    with pytest.raises(InvalidIndexError):
        enumerate_multi_indices(k, l, j)


def test_validate_multi_index():
    validate_multi_index((1, 2), 2, 2)
    with pytest.raises(InvalidIndexError):
        validate_multi_index((1, 3), 2, 2)
    with pytest.raises(InvalidIndexError):
        validate_multi_index((1,), 2, 2)
