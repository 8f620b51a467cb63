"""Ranking and unranking of k-subsets in lexicographic order.

Index-modulation schemes map index bits to activation sets through this
bijection: rank r in [0, C(n, k)) <-> sorted k-subset of {0..n-1}.  Ranks
are assigned in lexicographic order of the sorted subsets, so for n = 4,
k = 2 the ranks 0..5 correspond to {0,1}, {0,2}, {0,3}, {1,2}, {1,3}, {2,3}.
"""

from math import comb


def subset_rank(subset, n: int) -> int:
    """Lexicographic rank of a sorted k-subset of {0..n-1}."""
    k = len(subset)
    _check_subset(subset, n)
    rank = 0
    prev = -1
    for j, c in enumerate(subset):
        for skipped in range(prev + 1, c):
            rank += comb(n - 1 - skipped, k - 1 - j)
        prev = c
    return rank


def subset_unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    """Sorted k-subset of {0..n-1} with lexicographic rank `rank`."""
    total = comb(n, k)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} out of range [0, {total})")
    subset = []
    candidate = 0
    remaining = k
    while remaining > 0:
        block = comb(n - 1 - candidate, remaining - 1)
        if rank < block:
            subset.append(candidate)
            remaining -= 1
        else:
            rank -= block
        candidate += 1
    return tuple(subset)


def _check_subset(subset, n: int) -> None:
    if any(not 0 <= c < n for c in subset):
        raise ValueError(f"subset {subset} has elements outside [0, {n})")
    if any(a >= b for a, b in zip(subset, subset[1:])):
        raise ValueError(f"subset {subset} must be strictly increasing")
