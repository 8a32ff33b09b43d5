import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greedylab.greedy import (
    all_greedy_sets,
    greedy_set,
    greedy_set_table,
    greedy_sum,
    is_greedy_set,
    mask_min_max,
    natural_greedy_ordering,
    truncate,
    truncate_array,
)
from greedylab.spaces import DimensionError, IndexSet, Vector

small_ints = st.lists(st.integers(-3, 3).map(float), min_size=1, max_size=7)


def test_ordering_examples():
    assert natural_greedy_ordering(Vector([3, -5, 3, 0])).support_prefix == (2, 1, 3)
    assert natural_greedy_ordering(Vector([1, 1])).support_prefix == (1, 2)
    assert natural_greedy_ordering(Vector([0, 0, 0])).support_prefix == ()
    # the full order still lists every index, zeros last by index
    assert natural_greedy_ordering(Vector([0, 2, 0])).order == (2, 1, 3)


def test_greedy_sum_examples():
    x = Vector([3, -5, 3])
    assert greedy_sum(x, 2) == Vector([3, -5, 0])
    assert greedy_sum(x, 0) == Vector.zeros(3)
    y = Vector([0, 4, -1])
    assert greedy_sum(y, 2) == y


def test_all_greedy_sets_examples():
    assert all_greedy_sets(Vector([1, 1]), 1) == [IndexSet((1,)), IndexSet((2,))]
    assert all_greedy_sets(Vector([3, -5, 1]), 1) == [IndexSet((2,))]
    assert all_greedy_sets(Vector([2, 2, 2]), 2) == [IndexSet(p) for p in [(1, 2), (1, 3), (2, 3)]]
    assert all_greedy_sets(Vector([2, 2, 2]), 0) == [IndexSet()]
    with pytest.raises(DimensionError):
        all_greedy_sets(Vector([1, 2]), 3)


@settings(max_examples=200, deadline=None)
@given(small_ints)
def test_greedy_sets_threshold_and_natural_membership(coeffs):
    x = Vector(coeffs)
    mags = np.abs(x.coeffs)
    order = natural_greedy_ordering(x).order
    for j in range(len(order) - 1):
        a, b = order[j], order[j + 1]
        assert mags[a - 1] > mags[b - 1] or (mags[a - 1] == mags[b - 1] and a < b)
    for m in range(x.dim + 1):
        found = all_greedy_sets(x, m)
        assert greedy_set(x, m) in found
        for L in found:
            inside = np.zeros(x.dim, bool)
            inside[np.asarray(L.indices, int) - 1] = True
            if 0 < m < x.dim:
                assert mags[inside].min() >= mags[~inside].max()


@settings(max_examples=100, deadline=None)
@given(small_ints)
def test_all_greedy_sets_brute_force(coeffs):
    # oracle: test every subset of size m against the threshold condition
    x = Vector(coeffs)
    for m in range(x.dim + 1):
        brute = [IndexSet(c) for c in itertools.combinations(range(1, x.dim + 1), m)
                 if is_greedy_set(x, IndexSet(c))]
        assert all_greedy_sets(x, m) == brute


def test_greedy_set_table_matches_enumeration():
    rng = np.random.default_rng(0)
    X = rng.integers(-2, 3, size=(50, 5)).astype(float)
    table, lo = greedy_set_table(X)
    for v, x in enumerate(X):
        for mask in range(32):
            assert table[v, mask] == is_greedy_set(Vector(x), IndexSet.from_mask(mask))
        assert lo[v, 0] == np.inf
        assert lo[v, 0b101] == min(abs(x[0]), abs(x[2]))


def test_mask_min_max():
    A = np.array([[3.0, -1.0, 2.0]])
    lo, hi = mask_min_max(A)
    assert lo[0, 0b111] == -1 and hi[0, 0b111] == 3
    assert lo[0, 0b100] == hi[0, 0b100] == 2
    assert hi[0, 0] == -np.inf


def test_truncate_examples():
    assert truncate(Vector([3, -5, 1]), 2) == Vector([2, -2, 1])
    assert truncate(Vector([3, -5, 1]), 5) == Vector([3, -5, 1])
    assert truncate(Vector([-4, 4]), 1) == Vector([-1, 1])
    with pytest.raises(ValueError):
        truncate(Vector([1.0]), 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=8), st.floats(1e-3, 60))
def test_truncate_magnitudes_and_signs(coeffs, alpha):
    x = Vector(coeffs)
    t = truncate(x, alpha).coeffs
    assert np.array_equal(np.abs(t), np.minimum(alpha, np.abs(x.coeffs)))
    assert np.array_equal(np.sign(t), np.sign(x.coeffs))
    assert np.array_equal(truncate_array(x.coeffs[None, :], alpha)[0], t)
