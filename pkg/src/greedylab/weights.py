"""Weight sequences, set measures and the regime classification."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spaces import MAX_DIM, DimensionError, IndexSet, mask_to_indices

__all__ = [
    "FLOAT_SLACK",
    "Weight",
    "WeightRegime",
    "measure",
    "classify_regime",
    "subsets_with_measure_at_most",
    "mask_measures",
    "parse_weight",
]

# a budget delta is usually itself some w(A); the slack keeps A feasible
FLOAT_SLACK = 1e-12

RULES = ("const", "pow", "geom", "explicit")


@dataclass(frozen=True)
class Weight:
    """A positive weight sequence given by a rule.

    const:  w_n = c
    pow:    w_n = n**a
    geom:   w_n = r**n
    explicit: w_n = prefix[n-1] for n <= len(prefix), then the constant c
    """

    rule: str
    c: float = 1.0
    a: float = 0.0
    r: float = 1.0
    prefix: tuple[float, ...] = ()

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown weight rule {self.rule!r}")
        if self.rule in ("const", "explicit") and not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"constant weight must be positive, got {self.c}")
        if self.rule == "geom" and not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"geometric ratio must be positive, got {self.r}")
        if self.rule == "pow" and not math.isfinite(self.a):
            raise ValueError("power exponent must be finite")
        if self.rule == "explicit":
            prefix = tuple(float(t) for t in self.prefix)
            if not all(t > 0 and math.isfinite(t) for t in prefix):
                raise ValueError("explicit weights must be positive")
            object.__setattr__(self, "prefix", prefix)

    @classmethod
    def constant(cls, c: float = 1.0) -> "Weight":
        return cls("const", c=float(c))

    @classmethod
    def power(cls, a: float) -> "Weight":
        return cls("pow", a=float(a))

    @classmethod
    def geometric(cls, r: float) -> "Weight":
        return cls("geom", r=float(r))

    @classmethod
    def explicit(cls, prefix, tail: float = 1.0) -> "Weight":
        return cls("explicit", c=float(tail), prefix=tuple(prefix))

    @property
    def id(self) -> str:
        if self.rule == "const":
            return f"const:{self.c:g}"
        if self.rule == "pow":
            return f"pow:{self.a:g}"
        if self.rule == "geom":
            return f"geom:{self.r:g}"
        return "explicit:" + ",".join(f"{t:g}" for t in self.prefix) + f"+const:{self.c:g}"

    def __str__(self):
        return self.id

    def value(self, n: int) -> float:
        if n < 1:
            raise DimensionError(f"weights are indexed from 1, got {n}")
        if self.rule == "const":
            return self.c
        if self.rule == "pow":
            return float(n) ** self.a
        if self.rule == "geom":
            return self.r ** n
        return self.prefix[n - 1] if n <= len(self.prefix) else self.c

    def values(self, N: int) -> np.ndarray:
        return np.array([self.value(n) for n in range(1, N + 1)])

    def limsup(self) -> float:
        """limsup_n w_n, decided from the rule."""
        if self.rule in ("const", "explicit"):
            return self.c
        if self.rule == "pow":
            return math.inf if self.a > 0 else (1.0 if self.a == 0 else 0.0)
        return math.inf if self.r > 1 else (1.0 if self.r == 1 else 0.0)


@dataclass(frozen=True)
class WeightRegime:
    """``tag`` is UnboundedSup, Summable or DivergentBounded (tested in
    that order); ``inf_zero`` records inf_n w_n = 0 independently."""

    tag: str
    inf_zero: bool = False

    @property
    def degenerate(self) -> bool:
        """Regimes in which the greedy-type properties force c0 behaviour."""
        return self.tag in ("UnboundedSup", "Summable")


def classify_regime(w: Weight) -> WeightRegime:
    if w.rule in ("const", "explicit"):
        return WeightRegime("DivergentBounded", False)
    if w.rule == "pow":
        if w.a > 0:
            return WeightRegime("UnboundedSup", False)
        if w.a < -1:
            return WeightRegime("Summable", True)
        return WeightRegime("DivergentBounded", w.a < 0)
    if w.r > 1:
        return WeightRegime("UnboundedSup", False)
    if w.r < 1:
        return WeightRegime("Summable", True)
    return WeightRegime("DivergentBounded", False)


def measure(w: Weight, A: IndexSet) -> float:
    """w(A), summed in increasing index order with exact rounding."""
    return math.fsum(w.value(n) for n in A.indices)


@lru_cache(maxsize=64)
def _mask_measures(w: Weight, N: int) -> np.ndarray:
    vals = w.values(N)
    out = np.empty(1 << N)
    for mask in range(1 << N):
        out[mask] = math.fsum(vals[n - 1] for n in mask_to_indices(mask))
    out.flags.writeable = False
    return out


def mask_measures(w: Weight, N: int) -> np.ndarray:
    """w(A) for every A in {1..N}, indexed by bitmask."""
    if not 0 <= N <= MAX_DIM:
        raise DimensionError(f"N={N} exceeds the enumeration cap of {MAX_DIM}")
    return _mask_measures(w, N)


def subsets_with_measure_at_most(w: Weight, delta: float, N: int) -> list[IndexSet]:
    """All A in {1..N} with w(A) <= delta (+ float slack), by size then lex order."""
    if N > MAX_DIM:
        raise DimensionError(f"N={N} exceeds the enumeration cap of {MAX_DIM}")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    meas = mask_measures(w, N)
    masks = np.flatnonzero(meas <= delta + FLOAT_SLACK)
    sets = [IndexSet(mask_to_indices(int(m))) for m in masks]
    sets.sort(key=lambda A: (len(A), A.indices))
    return sets


def parse_weight(text: str) -> Weight:
    """Parse ``const:1``, ``pow:-2``, ``geom:0.5`` or ``explicit:2,1,1+const:1``."""
    text = text.strip()
    head, _, arg = text.partition(":")
    head = head.strip().lower()
    try:
        if head == "const":
            return Weight.constant(float(arg))
        if head == "pow":
            return Weight.power(float(arg))
        if head == "geom":
            return Weight.geometric(float(arg))
        if head == "explicit":
            body, plus, tail = arg.partition("+")
            prefix = [float(t) for t in body.split(",") if t.strip()]
            c = 1.0
            if plus:
                th, _, tv = tail.partition(":")
                if th.strip().lower() != "const":
                    raise ValueError("explicit weights need a const tail")
                c = float(tv)
            return Weight.explicit(prefix, c)
    except ValueError as exc:
        raise ValueError(f"bad weight {text!r}: {exc}") from None
    raise ValueError(f"unknown weight {text!r}")
