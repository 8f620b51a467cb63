from math import comb

import pytest
from hypothesis import given, strategies as st

from risim.combinatorics import subset_rank, subset_unrank


def test_lexicographic_order_n4_k2():
    # rank order pinned by the GSM index codebook: {01, 02, 03, 12, 13, 23}
    expected = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert [subset_unrank(r, 4, 2) for r in range(6)] == expected


def test_bijectivity_exhaustive_up_to_n16():
    for n in range(1, 17):
        for k in range(1, n + 1):
            for rank in range(comb(n, k)):
                assert subset_rank(subset_unrank(rank, n, k), n) == rank


@given(st.integers(1, 16), st.data())
def test_rank_unrank_roundtrip(n, data):
    k = data.draw(st.integers(1, n))
    rank = data.draw(st.integers(0, comb(n, k) - 1))
    subset = subset_unrank(rank, n, k)
    assert len(subset) == k
    assert all(0 <= c < n for c in subset)
    assert list(subset) == sorted(subset)
    assert subset_rank(subset, n) == rank


def test_rank_rejects_bad_subsets():
    with pytest.raises(ValueError):
        subset_rank((2, 1), 4)
    with pytest.raises(ValueError):
        subset_rank((0, 4), 4)
    with pytest.raises(ValueError):
        subset_unrank(6, 4, 2)
