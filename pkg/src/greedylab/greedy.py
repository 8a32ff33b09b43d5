"""Thresholding greedy algorithm: orderings, greedy sets and truncation."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .spaces import DimensionError, IndexSet, Vector, project

__all__ = [
    "GreedyOrdering",
    "natural_greedy_ordering",
    "greedy_set",
    "greedy_sum",
    "all_greedy_sets",
    "is_greedy_set",
    "truncate",
    "truncate_array",
    "mask_min_max",
    "greedy_set_table",
]


@dataclass(frozen=True)
class GreedyOrdering:
    """The natural greedy ordering: decreasing |x_n|, ties by index.

    ``order`` lists every index 1..dim; the support comes first.
    """

    order: tuple[int, ...]
    support_size: int

    def greedy_set(self, m: int) -> IndexSet:
        """A_m(x) = {order[0], ..., order[m-1]}."""
        if not 0 <= m <= len(self.order):
            raise DimensionError(f"m={m} out of range 0..{len(self.order)}")
        return IndexSet(self.order[:m])

    @property
    def support_prefix(self) -> tuple[int, ...]:
        return self.order[: self.support_size]


def natural_greedy_ordering(x: Vector) -> GreedyOrdering:
    mags = np.abs(x.coeffs)
    # stable sort on -|x_n| keeps index order among ties
    order = np.argsort(-mags, kind="stable") + 1
    return GreedyOrdering(tuple(int(n) for n in order), int(np.count_nonzero(mags)))


def greedy_set(x: Vector, m: int) -> IndexSet:
    return natural_greedy_ordering(x).greedy_set(m)


def greedy_sum(x: Vector, m: int) -> Vector:
    """The m-th greedy sum: x projected onto A_m(x)."""
    return project(x, greedy_set(x, m))


def is_greedy_set(x: Vector, Lam: IndexSet) -> bool:
    if Lam.max_index() > x.dim:
        return False
    mags = np.abs(x.coeffs)
    inside = np.zeros(x.dim, dtype=bool)
    inside[np.asarray(Lam.indices, dtype=int) - 1] = True
    if inside.all() or not inside.any():
        return True
    return mags[inside].min() >= mags[~inside].max()


def all_greedy_sets(x: Vector, m: int) -> list[IndexSet]:
    """Every Lambda with |Lambda| = m and min_Lambda |x_n| >= max_outside |x_n|.

    Magnitudes are compared exactly.  Sets come out in lexicographic order.
    """
    if not 0 <= m <= x.dim:
        raise DimensionError(f"m={m} out of range 0..{x.dim}")
    if m == 0:
        return [IndexSet()]
    mags = np.abs(x.coeffs)
    threshold = np.sort(mags)[::-1][m - 1]
    forced = [int(i) + 1 for i in np.flatnonzero(mags > threshold)]
    tied = [int(i) + 1 for i in np.flatnonzero(mags == threshold)]
    out = [IndexSet(tuple(forced) + extra) for extra in combinations(tied, m - len(forced))]
    out.sort(key=lambda A: A.indices)
    return out


def truncate_array(X: np.ndarray, alpha) -> np.ndarray:
    """Coefficient-wise clip of magnitudes to ``alpha``, signs kept."""
    return np.sign(X) * np.minimum(np.abs(X), alpha)


def truncate(x: Vector, alpha: float) -> Vector:
    """T_alpha(x): coefficients above alpha in magnitude become alpha*sgn."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    out = x.coeffs.copy()
    big = np.abs(out) > alpha
    out[big] = alpha * np.sign(out[big])
    return Vector(out)


# ---------------------------------------------------------------------------
# batch helpers over all 2**N masks
# ---------------------------------------------------------------------------

def mask_min_max(A: np.ndarray):
    """For rows a of ``A`` (shape (V, N)) and every mask, min of a over the
    mask (+inf on the empty mask) and max of a over the mask (-inf on the
    empty mask).  Returns two arrays of shape (V, 2**N)."""
    V, N = A.shape
    lo = np.empty((V, 1 << N))
    hi = np.empty((V, 1 << N))
    lo[:, 0] = np.inf
    hi[:, 0] = -np.inf
    for mask in range(1, 1 << N):
        low = mask & -mask
        bit = low.bit_length() - 1
        rest = mask ^ low
        np.minimum(lo[:, rest], A[:, bit], out=lo[:, mask])
        np.maximum(hi[:, rest], A[:, bit], out=hi[:, mask])
    return lo, hi


def greedy_set_table(X: np.ndarray):
    """Boolean (V, 2**N) table: is the mask a greedy set of row v?

    Also returns min over the mask of |x_n| (used as the threshold level
    alpha by the Property (C) style quantities).
    """
    mags = np.abs(X)
    lo, hi = mask_min_max(mags)
    full = (1 << X.shape[1]) - 1
    # max over the complement is hi of the complementary mask
    out_max = hi[:, full ^ np.arange(full + 1)]
    table = lo >= out_max
    return table, lo
