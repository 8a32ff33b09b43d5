"""Best approximation on a fixed support (the Chebyshev greedy step).

Given x and a set A, minimize ||x - sum_{n in A} a_n e_n|| over real a.
Catalog norms have closed forms:

* lattice norms (lp, wl1, sup): a_n = x_n is optimal, the value is
  ||P_{A^c} x||;
* summing norm: the residual partial sums are S_k minus a constant that is
  free on each block [A_j, A_{j+1}) and zero before min A, so the optimum
  centres every block: value = max(max_{k < min A} |S_k|,
  max_j (max S - min S)/2 over block j).

Anything else goes through cyclic coordinate descent with a golden-section
line search, started from a = x_A.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .greedy import greedy_set, is_greedy_set
from .spaces import DimensionError, IndexSet, NormModel, Vector

__all__ = [
    "MAX_SUPPORT",
    "ChebyshevResult",
    "chebyshev_min",
    "chebyshev_oracle",
    "chebyshev_greedy_sum",
    "chebyshev_values",
    "chebyshev_table",
    "coordinate_descent",
]

MAX_SUPPORT = 12
ORACLE_MAX_SUPPORT = 3

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ChebyshevResult:
    coeffs: dict[int, float]
    value: float
    certified_gap: float
    method: str

    def approximant(self, dim: int) -> Vector:
        out = np.zeros(dim)
        for n, a in self.coeffs.items():
            out[n - 1] = a
        return Vector(out)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _summing_blocks(positions, N):
    """Half-open 0-based blocks [start, stop) cut at the given positions."""
    cuts = list(positions) + [N]
    return [(cuts[j], cuts[j + 1]) for j in range(len(positions))]


def _summing_closed_form(x: np.ndarray, positions: list[int]):
    S = np.cumsum(x)
    first = positions[0]
    value = float(np.abs(S[:first]).max()) if first > 0 else 0.0
    coeffs = []
    prev = 0.0
    for start, stop in _summing_blocks(positions, x.size):
        block = S[start:stop]
        hi, lo = float(block.max()), float(block.min())
        value = max(value, (hi - lo) / 2.0)
        centre = (hi + lo) / 2.0
        coeffs.append(centre - prev)
        prev = centre
    return coeffs, value


def _closed_form(model: NormModel, x: np.ndarray, positions: list[int]):
    if model.is_lattice:
        return [float(x[p]) for p in positions]
    if model.kind == "summing":
        return _summing_closed_form(x, positions)[0]
    return None


# ---------------------------------------------------------------------------
# coordinate descent
# ---------------------------------------------------------------------------

def _line_min(f, a, d, f0, scale):
    """Golden-section minimisation of t -> f(a + t d) for a convex slice."""
    step = scale
    # grow a bracket [lo, hi] around 0 until both ends are no better than f0
    lo, hi = -step, step
    for _ in range(60):
        if f(a + lo * d) >= f0 and f(a + hi * d) >= f0:
            break
        lo, hi = 2 * lo, 2 * hi
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(a + x1 * d), f(a + x2 * d)
    tol = 1e-13 * max(1.0, scale)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(a + x1 * d)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(a + x2 * d)
    t = x1 if f1 <= f2 else x2
    ft = min(f1, f2)
    return (t, ft) if ft < f0 else (0.0, f0)


def coordinate_descent(model: NormModel, x: np.ndarray, positions: list[int],
                       start=None, max_sweeps: int = 200, tol: float = 1e-9,
                       n_random: int = 24, seed: int = 0):
    """Minimise ||x - sum a_j e_{positions[j]}|| by cyclic line searches.

    Each sweep visits the coordinate directions in index order, then the
    pair directions e_i + e_j and e_i - e_j.  When a sweep stalls, a batch
    of seeded random directions is tried before stopping, which lets the
    iterate leave corners of polyhedral norms where every listed direction
    is stuck.  Returns (coefficients, value, improvement of the last sweep).
    """
    k = len(positions)
    E = np.zeros((k, x.size))
    E[np.arange(k), positions] = 1.0

    def f(a):
        return float(model.norms(x - a @ E))

    a = np.array(x[positions] if start is None else start, dtype=float)
    fa = f(a)
    dirs = [np.eye(k)[i] for i in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        for s in (1.0, -1.0):
            d = np.zeros(k)
            d[i], d[j] = 1.0, s
            dirs.append(d)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.abs(x).max()))
    last = math.inf

    def sweep(directions):
        nonlocal a, fa
        before = fa
        for d in directions:
            t, ft = _line_min(f, a, d, fa, scale)
            if t != 0.0:
                a = a + t * d
                fa = ft
        return before - fa

    for _ in range(max_sweeps):
        last = sweep(dirs)
        if last < tol and k > 1:
            last += sweep(rng.standard_normal((n_random, k)))
        if last < tol:
            break
    return a, f(a), max(last, 0.0)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def chebyshev_min(model: NormModel, x: Vector, A: IndexSet, method: str = "auto") -> ChebyshevResult:
    """min over a of ||x - sum_{n in A} a_n e_n||.

    ``method`` is ``auto`` (closed form when the model has one, descent
    otherwise) or ``descent``.  Closed forms report a certified gap of 0;
    descent reports the improvement of its final sweep, which is a
    convergence indicator rather than a certificate.
    """
    if x.dim != model.dim:
        raise DimensionError(f"dimension mismatch: {x.dim} != {model.dim}")
    if A.max_index() > x.dim:
        raise DimensionError(f"index {A.max_index()} out of range 1..{x.dim}")
    if len(A) > MAX_SUPPORT:
        raise DimensionError(f"|A|={len(A)} exceeds the cap of {MAX_SUPPORT}")
    if method not in ("auto", "descent"):
        raise ValueError(f"unknown method {method!r}")
    xs = x.coeffs
    positions = [n - 1 for n in A.indices]
    if not positions:
        return ChebyshevResult({}, model(xs), 0.0, "empty")
    coeffs = _closed_form(model, xs, positions) if method == "auto" else None
    if coeffs is not None:
        gap, used = 0.0, "closed-form"
    else:
        coeffs, _, gap = coordinate_descent(model, xs, positions)
        used = "descent"
    residual = xs.copy()
    residual[positions] -= np.asarray(coeffs)
    return ChebyshevResult(
        {n: float(a) for n, a in zip(A.indices, coeffs)}, model(residual), gap, used
    )


def chebyshev_oracle(model: NormModel, x: Vector, A: IndexSet,
                     span: float | None = None, steps: int = 41, refinements: int = 4) -> float:
    """Grid minimum of ||x - sum_{n in A} a_n e_n|| over a in [-span, span]^|A|.

    After the first pass the grid is shrunk tenfold around the best point,
    ``refinements`` times.  Independent of :func:`chebyshev_min`.
    """
    if len(A) > ORACLE_MAX_SUPPORT:
        raise DimensionError(f"the grid oracle handles |A| <= {ORACLE_MAX_SUPPORT}")
    if A.max_index() > x.dim:
        raise DimensionError(f"index {A.max_index()} out of range 1..{x.dim}")
    xs = x.coeffs
    if not len(A):
        return model(xs)
    if span is None:
        span = 2.0 * float(np.abs(xs).max())
    span = max(span, 1e-12)
    k = len(A)
    positions = np.asarray(A.indices) - 1
    axis = np.linspace(-1.0, 1.0, steps)
    unit = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    centre = np.zeros(k)
    half = span
    best = math.inf
    for _ in range(refinements + 1):
        pts = centre + half * unit
        X = np.broadcast_to(xs, (len(pts), xs.size)).copy()
        X[:, positions] -= pts
        vals = model.norms(X)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            centre = pts[i]
        half /= 10.0
    return best


def chebyshev_greedy_sum(model: NormModel, x: Vector, m: int,
                         Lambda: IndexSet | None = None) -> ChebyshevResult:
    """The m-th Chebyshev greedy approximation on a greedy set of x.

    ``Lambda`` defaults to the natural greedy set A_m(x).
    """
    if Lambda is None:
        Lambda = greedy_set(x, m)
    if len(Lambda) != m or not is_greedy_set(x, Lambda):
        raise ValueError(f"{Lambda!r} is not a greedy set of size {m}")
    return chebyshev_min(model, x, Lambda)


# ---------------------------------------------------------------------------
# batch evaluation for the estimators
# ---------------------------------------------------------------------------

def chebyshev_values(model: NormModel, X: np.ndarray, mask: int) -> np.ndarray:
    """Chebyshev values for every row of X on the set given by ``mask``."""
    return chebyshev_table(model, X, masks=[mask])[:, 0]


def chebyshev_table(model: NormModel, X: np.ndarray, masks=None) -> np.ndarray:
    """(V, len(masks)) table of Chebyshev values; all 2**N masks by default."""
    X = np.asarray(X, dtype=float)
    V, N = X.shape
    if masks is None:
        masks = range(1 << N)
    masks = list(masks)
    out = np.empty((V, len(masks)))
    if model.is_lattice:
        for j, mask in enumerate(masks):
            keep = np.array([not (mask >> i) & 1 for i in range(N)])
            out[:, j] = model.norms(X * keep)
        return out
    if model.kind == "summing":
        S = np.cumsum(X, axis=1)
        # prefix max of |S| and half ranges of S over every interval [i, j)
        head = np.zeros((V, N + 1))
        head[:, 1:] = np.maximum.accumulate(np.abs(S), axis=1)
        half = {}
        for i in range(N):
            hi = np.maximum.accumulate(S[:, i:], axis=1)
            lo = np.minimum.accumulate(S[:, i:], axis=1)
            for j in range(i + 1, N + 1):
                half[i, j] = (hi[:, j - i - 1] - lo[:, j - i - 1]) / 2.0
        for j, mask in enumerate(masks):
            pos = [i for i in range(N) if (mask >> i) & 1]
            if not pos:
                out[:, j] = head[:, N]
                continue
            val = head[:, pos[0]].copy()
            for start, stop in _summing_blocks(pos, N):
                np.maximum(val, half[start, stop], out=val)
            out[:, j] = val
        return out
    for v in range(V):
        x = Vector(X[v])
        for j, mask in enumerate(masks):
            out[v, j] = chebyshev_min(model, x, IndexSet.from_mask(mask)).value
    return out
