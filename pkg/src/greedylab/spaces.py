"""Coefficient vectors, the norm catalog and the elementary basis operators.

Indices exposed by this module are 1-based, as in e_1, e_2, ...; arrays
underneath are 0-based.  Internally, index sets are also handled as integer
bitmasks (bit ``n - 1`` set iff ``n`` belongs to the set).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np

__all__ = [
    "MAX_DIM",
    "DimensionError",
    "Vector",
    "IndexSet",
    "SignPattern",
    "NormModel",
    "norm",
    "coordinate",
    "project",
    "partial_sum",
    "sign_indicator",
    "basis_constants",
    "schauder_constant",
    "parse_space",
    "mask_to_indices",
    "indices_to_mask",
    "mask_array",
]

MAX_DIM = 16


class DimensionError(ValueError):
    """Raised on ambient-dimension mismatches or out-of-range indices."""


# ---------------------------------------------------------------------------
# index sets and signs
# ---------------------------------------------------------------------------

def indices_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for n in indices:
        mask |= 1 << (n - 1)
    return mask


def mask_to_indices(mask: int) -> tuple[int, ...]:
    out = []
    n = 1
    while mask:
        if mask & 1:
            out.append(n)
        mask >>= 1
        n += 1
    return tuple(out)


def mask_array(dim: int) -> np.ndarray:
    """Boolean membership table of shape ``(2**dim, dim)`` for every mask."""
    masks = np.arange(1 << dim)
    return ((masks[:, None] >> np.arange(dim)) & 1).astype(bool)


@dataclass(frozen=True)
class IndexSet:
    """A finite set of positive integers, kept sorted."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(sorted(set(int(n) for n in self.indices)))
        if idx and idx[0] < 1:
            raise DimensionError(f"indices must be positive, got {idx[0]}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_mask(cls, mask: int) -> "IndexSet":
        return cls(mask_to_indices(mask))

    @classmethod
    def full(cls, dim: int) -> "IndexSet":
        return cls(tuple(range(1, dim + 1)))

    @property
    def mask(self) -> int:
        return indices_to_mask(self.indices)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, n):
        return n in self.indices

    def __or__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(self.indices + other.indices)

    def __and__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(tuple(n for n in self.indices if n in other.indices))

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(tuple(n for n in self.indices if n not in other.indices))

    def precedes(self, other: "IndexSet") -> bool:
        """``A < B`` in the sense ``max A < min B`` (vacuous if either is empty)."""
        if not self.indices or not other.indices:
            return True
        return self.indices[-1] < other.indices[0]

    def max_index(self) -> int:
        return self.indices[-1] if self.indices else 0

    def __repr__(self):
        return "{" + ",".join(map(str, self.indices)) + "}"


@dataclass(frozen=True)
class SignPattern:
    """Signs in {+1, -1} attached to a finite index set."""

    entries: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        entries = {int(k): int(v) for k, v in dict(self.entries).items()}
        for k, v in entries.items():
            if v not in (1, -1):
                raise ValueError(f"sign at index {k} must be +1 or -1, got {v}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def constant(cls, A: IndexSet, sign: int = 1) -> "SignPattern":
        return cls({n: sign for n in A})

    @classmethod
    def from_sequence(cls, A: IndexSet, signs: Iterable[int]) -> "SignPattern":
        signs = list(signs)
        if len(signs) != len(A):
            raise ValueError("one sign per index is required")
        return cls(dict(zip(A.indices, signs)))

    def __getitem__(self, n: int) -> int:
        return self.entries[n]

    def __contains__(self, n):
        return n in self.entries

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

class Vector:
    """A real coefficient sequence of ambient dimension ``dim``.

    ``coeffs[n - 1]`` is the n-th coordinate e_n*(x).  The array is copied
    on construction and frozen.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=float).reshape(-1)
        if arr.size < 1:
            raise DimensionError("a vector needs dim >= 1")
        if arr.size > MAX_DIM:
            raise DimensionError(f"dim {arr.size} exceeds the cap of {MAX_DIM}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        self.coeffs = arr

    @classmethod
    def zeros(cls, dim: int) -> "Vector":
        return cls(np.zeros(dim))

    @classmethod
    def unit(cls, n: int, dim: int) -> "Vector":
        if not 1 <= n <= dim:
            raise DimensionError(f"index {n} out of range 1..{dim}")
        arr = np.zeros(dim)
        arr[n - 1] = 1.0
        return cls(arr)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def support(self) -> IndexSet:
        return IndexSet(tuple(int(i) + 1 for i in np.flatnonzero(self.coeffs)))

    def __add__(self, other: "Vector") -> "Vector":
        _same_dim(self.dim, other.dim)
        return Vector(self.coeffs + other.coeffs)

    def __sub__(self, other: "Vector") -> "Vector":
        _same_dim(self.dim, other.dim)
        return Vector(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "Vector":
        return Vector(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Vector(-self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Vector) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return "Vector(" + ", ".join(f"{c:g}" for c in self.coeffs) + ")"


def _same_dim(a: int, b: int):
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} != {b}")


# ---------------------------------------------------------------------------
# norm catalog
# ---------------------------------------------------------------------------

def _lp_norms(X: np.ndarray, p: float) -> np.ndarray:
    A = np.abs(X)
    if math.isinf(p):
        return A.max(axis=-1)
    if p == 1:
        return A.sum(axis=-1)
    if p == 2:
        return np.sqrt((A * A).sum(axis=-1))
    # scale by the max entry so large p does not overflow
    top = A.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return top[..., 0] * ((A / safe) ** p).sum(axis=-1) ** (1.0 / p)


def _summing_norms(X: np.ndarray) -> np.ndarray:
    return np.abs(np.cumsum(X, axis=-1)).max(axis=-1)


KINDS = ("lp", "wl1", "summing", "sup", "custom")


@dataclass(frozen=True, eq=False)
class NormModel:
    """A norm on R^dim together with its canonical basis (e_n).

    ``kind`` is one of ``lp`` (with ``p`` in [1, inf]), ``wl1`` (weighted
    l1 with positive ``v``), ``summing`` (max of absolute partial sums, the
    monotone but conditional summing basis) and ``sup``.  The ``custom``
    kind is the extension point: ``evaluator`` must map an array of shape
    ``(..., dim)`` to the norms of its rows and must be absolutely
    homogeneous, subadditive and finite on coordinates.  Custom models get
    no closed forms; every downstream quantity falls back to search.
    """

    kind: str
    dim: int
    p: float | None = None
    v: tuple[float, ...] | None = None
    evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if not 1 <= self.dim <= MAX_DIM:
            raise DimensionError(f"dim must lie in 1..{MAX_DIM}, got {self.dim}")
        if self.kind == "lp":
            if self.p is None or not (self.p >= 1):
                raise ValueError(f"lp needs p >= 1, got {self.p}")
        if self.kind == "wl1":
            if self.v is None or len(self.v) != self.dim:
                raise ValueError("wl1 needs one weight per coordinate")
            v = tuple(float(t) for t in self.v)
            if not all(math.isfinite(t) and t > 0 for t in v):
                raise ValueError("wl1 weights must be positive and finite")
            object.__setattr__(self, "v", v)
        if self.kind == "custom" and self.evaluator is None:
            raise ValueError("custom norms need an evaluator")

    # constructors -------------------------------------------------------
    @classmethod
    def lp(cls, p: float, dim: int) -> "NormModel":
        return cls("lp", dim, p=float(p))

    @classmethod
    def summing(cls, dim: int) -> "NormModel":
        return cls("summing", dim)

    @classmethod
    def sup(cls, dim: int) -> "NormModel":
        return cls("sup", dim)

    @classmethod
    def weighted_l1(cls, v: Iterable[float]) -> "NormModel":
        v = tuple(v)
        return cls("wl1", len(v), v=v)

    @classmethod
    def custom(cls, evaluator, dim: int, name: str = "custom") -> "NormModel":
        return cls("custom", dim, evaluator=evaluator, name=name)

    # identity -----------------------------------------------------------
    @property
    def id(self) -> str:
        """Config-string form; round-trips through :func:`parse_space`."""
        if self.kind == "lp":
            return "lp:inf" if math.isinf(self.p) else f"lp:{self.p:g}"
        if self.kind == "wl1":
            return "wl1:" + ",".join(f"{t:g}" for t in self.v)
        if self.kind == "custom":
            return f"custom:{self.name}"
        return self.kind

    def __eq__(self, other):
        return isinstance(other, NormModel) and (self.id, self.dim) == (other.id, other.dim)

    def __hash__(self):
        return hash((self.id, self.dim))

    def __repr__(self):
        return f"NormModel({self.id}, dim={self.dim})"

    @property
    def is_lattice(self) -> bool:
        """True when |x_n| <= |y_n| for all n implies ||x|| <= ||y||."""
        return self.kind in ("lp", "wl1", "sup")

    # evaluation ---------------------------------------------------------
    def norms(self, X) -> np.ndarray:
        """Norms of the rows of ``X`` (shape ``(..., dim)``)."""
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise DimensionError(f"dimension mismatch: {X.shape[-1]} != {self.dim}")
        if self.kind == "lp":
            return _lp_norms(X, self.p)
        if self.kind == "sup":
            return np.abs(X).max(axis=-1)
        if self.kind == "wl1":
            return (np.abs(X) * np.asarray(self.v)).sum(axis=-1)
        if self.kind == "summing":
            return _summing_norms(X)
        return np.asarray(self.evaluator(X), dtype=float)

    def __call__(self, x) -> float:
        if isinstance(x, Vector):
            x = x.coeffs
        return float(self.norms(np.asarray(x, dtype=float)))

    def unit_norms(self) -> np.ndarray:
        """||e_n|| for n = 1..dim."""
        return self.norms(np.eye(self.dim))

    def dual_unit_norms(self) -> np.ndarray | None:
        """Closed-form ||e_n*||, or None for custom models."""
        if self.kind in ("lp", "sup"):
            return np.ones(self.dim)
        if self.kind == "wl1":
            return 1.0 / np.asarray(self.v)
        if self.kind == "summing":
            out = np.full(self.dim, 2.0)
            out[0] = 1.0
            return out
        return None


def norm(model: NormModel, x: Vector) -> float:
    _same_dim(x.dim, model.dim)
    return model(x)


def coordinate(x: Vector, n: int) -> float:
    if not 1 <= n <= x.dim:
        raise DimensionError(f"index {n} out of range 1..{x.dim}")
    return float(x.coeffs[n - 1])


def _check_range(A: IndexSet, dim: int):
    if A.indices and A.indices[-1] > dim:
        raise DimensionError(f"index {A.indices[-1]} out of range 1..{dim}")


def project(x: Vector, A: IndexSet) -> Vector:
    _check_range(A, x.dim)
    out = np.zeros(x.dim)
    idx = np.asarray(A.indices, dtype=int) - 1
    out[idx] = x.coeffs[idx]
    return Vector(out)


def partial_sum(x: Vector, m: int) -> Vector:
    if not 0 <= m <= x.dim:
        raise DimensionError(f"m={m} out of range 0..{x.dim}")
    return project(x, IndexSet(tuple(range(1, m + 1))))


def sign_indicator(A: IndexSet, eps: SignPattern, dim: int) -> Vector:
    _check_range(A, dim)
    out = np.zeros(dim)
    for n in A:
        if n not in eps:
            raise KeyError(f"sign pattern is missing index {n}")
        out[n - 1] = eps[n]
    return Vector(out)


def basis_constants(model: NormModel, vectors: np.ndarray | None = None) -> tuple[float, float]:
    """(c1, c2): min and max over n of ||e_n|| and ||e_n*||.

    Custom models have no closed-form dual norms; for them ``vectors`` (a
    search grid) is required and ||e_n*|| is replaced by the grid maximum of
    |x_n| / ||x||, a lower bound.
    """
    primal = model.unit_norms()
    dual = model.dual_unit_norms()
    if dual is None:
        if vectors is None:
            raise ValueError("custom models need a search grid for dual norms")
        dual = coordinate_functional_norms(model, vectors)
    both = np.concatenate([primal, dual])
    return float(both.min()), float(both.max())


def coordinate_functional_norms(model: NormModel, vectors: np.ndarray) -> np.ndarray:
    """Grid estimate of ||e_n*|| = sup |x_n| / ||x|| (a lower bound)."""
    X = np.asarray(vectors, dtype=float)
    nx = model.norms(X)
    keep = nx > 0
    return (np.abs(X[keep]) / nx[keep, None]).max(axis=0)


class SchauderConstant(NamedTuple):
    value: float
    exact: bool
    grid_value: float | None


def schauder_constant(model: NormModel, vectors: np.ndarray | None = None) -> SchauderConstant:
    """sup_m ||P_m|| for the partial-sum projections.

    Every catalog norm has basis constant 1 (lattice norms are monotone
    under coordinate projections; for the summing norm the partial sums of
    P_m x are a prefix of those of x).  When ``vectors`` is given the grid
    maximum of ||P_m x|| / ||x|| is reported alongside; for custom models
    that grid value is the answer and it is only a lower bound.
    """
    grid = None
    if vectors is not None:
        X = np.asarray(vectors, dtype=float)
        nx = model.norms(X)
        X, nx = X[nx > 0], nx[nx > 0]
        grid = 1.0
        for m in range(1, model.dim):
            Pm = X.copy()
            Pm[:, m:] = 0.0
            if len(X):
                grid = max(grid, float((model.norms(Pm) / nx).max()))
    if model.kind != "custom":
        return SchauderConstant(1.0, True, grid)
    if grid is None:
        raise ValueError("custom models need a search grid for the basis constant")
    return SchauderConstant(grid, False, grid)


def parse_space(text: str, dim: int) -> NormModel:
    """Parse ``lp:2``, ``lp:inf``, ``sup``, ``summing`` or ``wl1:2,1,...``.

    A ``wl1`` weight list shorter than ``dim`` is repeated cyclically, so
    ``wl1:2,1`` means (2, 1, 2, 1, ...).
    """
    text = text.strip()
    head, _, arg = text.partition(":")
    head = head.strip().lower()
    if head == "sup" and not arg:
        return NormModel.sup(dim)
    if head == "summing" and not arg:
        return NormModel.summing(dim)
    if head == "lp":
        arg = arg.strip().lower()
        if arg in ("inf", "infinity"):
            return NormModel.lp(math.inf, dim)
        try:
            p = float(arg)
        except ValueError:
            raise ValueError(f"bad exponent in space {text!r}") from None
        if not p >= 1:
            raise ValueError(f"exponent must be >= 1 in space {text!r}")
        return NormModel.lp(p, dim)
    if head == "wl1":
        try:
            v = [float(t) for t in arg.split(",") if t.strip()]
        except ValueError:
            raise ValueError(f"bad weight list in space {text!r}") from None
        if not v:
            raise ValueError(f"empty weight list in space {text!r}")
        return NormModel.weighted_l1([v[i % len(v)] for i in range(dim)])
    raise ValueError(f"unknown space {text!r}")
