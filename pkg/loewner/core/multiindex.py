"""Multi-index classes |t| = j (mod l) over {1..l}^k."""

from functools import lru_cache
from itertools import product

from .errors import InvalidIndexError
from .models import MonotonicityIndex, MultiIndexSet


@lru_cache(maxsize=256)
def enumerate_multi_indices(k: int, l: int, j: int) -> MultiIndexSet:
    """
    All t in {1..l}^k with t1 + ... + tk = j (mod l), ascending lexicographic.

    The class has exactly l^(k-1) members.
    """
    if k < 1:
        raise InvalidIndexError(f"k must be positive, got {k}")
    MonotonicityIndex(l, j)
    indices = tuple(t for t in product(range(1, l + 1), repeat=k) if sum(t) % l == j)
    return MultiIndexSet(k=k, l=l, j=j, indices=indices)


def validate_multi_index(u, k: int, l: int):
    """Check u is a k-tuple with entries in 1..l."""
    if len(u) != k or any(not 1 <= int(v) <= l for v in u):
        raise InvalidIndexError(f"multi-index {tuple(u)} is not in {{1..{l}}}^{k}")
