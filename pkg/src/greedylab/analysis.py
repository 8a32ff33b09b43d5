"""Error functionals, test-vector families and the constant estimators.

Grid estimators scan a finite family of vectors against every subset of
{1..N}; all per-set quantities are tabulated by bitmask, one chunk of
vectors at a time.  The returned maxima are exact over the family, and
therefore lower bounds for the constants of the finite model.  The
democracy constants and Property-(C)-type set quantities are exhaustive
over sets and signs and need no grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .chebyshev import MAX_SUPPORT, chebyshev_table
from .greedy import mask_min_max
from .spaces import (
    MAX_DIM,
    DimensionError,
    IndexSet,
    NormModel,
    Vector,
    basis_constants,
    mask_array,
    mask_to_indices,
    schauder_constant,
)
from .weights import FLOAT_SLACK, Weight, mask_measures

__all__ = [
    "ZERO_TOL",
    "EXACT",
    "ON_GRID",
    "LOWER",
    "Estimate",
    "ConstantReport",
    "VectorFamily",
    "default_families",
    "extremal_vectors",
    "family_array",
    "sigma_tilde_w",
    "sigma_w",
    "sigma_m",
    "sigma_tilde_m",
    "sign_table",
    "estimate_Cq",
    "estimate_democracies",
    "estimate_Ca",
    "estimate_Csg",
    "estimate_Cu",
    "grid_scan",
    "compute_report",
    "admissibility_ratio",
    "check_rho_admissibility",
]

ZERO_TOL = 1e-12
PROOF_DELTA = 1e-6

EXACT = "exact"
ON_GRID = "exact-on-grid"
LOWER = "lower-bound"

MAX_DEMOCRACY_DIM = 10
MAX_SEMIGREEDY_DIM = 8
MAX_GRID_SIZE = 5 ** 8


# ---------------------------------------------------------------------------
# error functionals
# ---------------------------------------------------------------------------

def _feasible_masks(w: Weight, delta: float, N: int) -> np.ndarray:
    if N > MAX_DIM:
        raise DimensionError(f"N={N} exceeds the enumeration cap of {MAX_DIM}")
    return np.flatnonzero(mask_measures(w, N) <= delta + FLOAT_SLACK)


def _complement_norms(model: NormModel, x: np.ndarray, masks) -> np.ndarray:
    keep = ~mask_array(model.dim)[masks]
    return model.norms(x[None, :] * keep)


def sigma_tilde_w(model: NormModel, w: Weight, x: Vector, delta: float) -> float:
    """min ||x - P_A x|| over A in {1..N} with w(A) <= delta."""
    masks = _feasible_masks(w, delta, x.dim)
    return float(_complement_norms(model, x.coeffs, masks).min())


def sigma_w(model: NormModel, w: Weight, x: Vector, delta: float) -> float:
    """min over A with w(A) <= delta and over coefficients of ||x - sum a_n e_n||."""
    masks = _feasible_masks(w, delta, x.dim)
    if max(bin(int(m)).count("1") for m in masks) > MAX_SUPPORT:
        raise DimensionError(f"feasible sets exceed the Chebyshev cap of {MAX_SUPPORT}")
    return float(chebyshev_table(model, x.coeffs[None, :], masks=masks).min())


def sigma_m(model: NormModel, x: Vector, m: int) -> float:
    return sigma_w(model, Weight.constant(1.0), x, m)


def sigma_tilde_m(model: NormModel, x: Vector, m: int) -> float:
    return sigma_tilde_w(model, Weight.constant(1.0), x, m)


# ---------------------------------------------------------------------------
# vector families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VectorFamily:
    """``kind`` is ``level_grid`` (every coefficient from ``levels``),
    ``proof_extremal`` (all 1_{eps A} + (1+delta) 1_{eps' B}, A and B
    disjoint) or ``sign_indicators`` (all nonzero 1_{eps A})."""

    kind: str
    levels: tuple[float, ...] = ()
    delta: float = PROOF_DELTA

    @classmethod
    def level_grid(cls, levels) -> "VectorFamily":
        return cls("level_grid", levels=tuple(float(t) for t in levels))

    @classmethod
    def symmetric_grid(cls, magnitudes) -> "VectorFamily":
        levels = {0.0}
        for t in magnitudes:
            levels |= {abs(float(t)), -abs(float(t))}
        return cls.level_grid(sorted(levels, key=lambda t: (abs(t), t < 0)))

    @classmethod
    def proof_extremal(cls, delta: float = PROOF_DELTA) -> "VectorFamily":
        return cls("proof_extremal", delta=float(delta))

    @classmethod
    def sign_indicators(cls) -> "VectorFamily":
        return cls("sign_indicators")

    @property
    def id(self) -> str:
        if self.kind == "level_grid":
            return "levels:" + ",".join(f"{t:g}" for t in self.levels)
        if self.kind == "proof_extremal":
            return f"extremal:{self.delta:g}"
        return "signs"

    def size(self, N: int) -> int:
        if self.kind == "level_grid":
            return len(self.levels) ** N
        if self.kind == "proof_extremal":
            return 5 ** N
        return 3 ** N - 1


def default_families(N: int) -> tuple[VectorFamily, ...]:
    fams = []
    if N <= 6:
        fams.append(VectorFamily.symmetric_grid((1, 2, 3)))
    if N <= 8:
        fams.append(VectorFamily.proof_extremal())
    if N <= MAX_DEMOCRACY_DIM:
        fams.append(VectorFamily.sign_indicators())
    return tuple(fams)


def _family_rows(family: VectorFamily, N: int) -> np.ndarray:
    if family.kind == "level_grid":
        if not family.levels:
            raise ValueError("a level grid needs at least one level")
        if family.size(N) > MAX_GRID_SIZE:
            raise DimensionError(f"{family.id} at N={N} exceeds the grid cap of {MAX_GRID_SIZE}")
        levels = family.levels
    elif family.kind == "proof_extremal":
        if N > MAX_DEMOCRACY_DIM:
            raise DimensionError(f"proof-extremal vectors need N <= {MAX_DEMOCRACY_DIM}")
        d = 1.0 + family.delta
        levels = (0.0, 1.0, -1.0, d, -d)
    elif family.kind == "sign_indicators":
        if N > MAX_DEMOCRACY_DIM:
            raise DimensionError(f"sign indicators need N <= {MAX_DEMOCRACY_DIM}")
        levels = (0.0, 1.0, -1.0)
    else:
        raise ValueError(f"unknown family {family.kind!r}")
    lv = np.asarray(levels, dtype=float)
    idx = np.indices((len(lv),) * N).reshape(N, -1).T
    rows = lv[idx]
    if family.kind == "sign_indicators":
        rows = rows[np.any(rows != 0, axis=1)]
    return rows


def extremal_vectors(family: VectorFamily, N: int) -> list[Vector]:
    """Deterministically ordered vectors of the family in dimension N."""
    return [Vector(r) for r in _family_rows(family, N)]


def family_array(families, N: int, support_dim: int | None = None) -> np.ndarray:
    """Union of families as one array, one representative per +-x pair.

    Every ratio estimated here is invariant under x -> -x, so only rows whose
    first nonzero entry is positive are kept (plus the zero row).  Order is
    the order of first appearance.  ``support_dim`` restricts the support
    to {1..support_dim}.
    """
    if isinstance(families, VectorFamily):
        families = (families,)
    rows = np.concatenate([_family_rows(f, N) for f in families]) if families else np.zeros((0, N))
    rows = rows + 0.0  # drop negative zeros
    if support_dim is not None:
        rows = rows[np.all(rows[:, support_dim:] == 0, axis=1)]
    nz = rows != 0
    first = np.argmax(nz, axis=1)
    lead = rows[np.arange(len(rows)), first]
    rows = rows[(lead > 0) | ~nz.any(axis=1)]
    _, keep = np.unique(rows, axis=0, return_index=True)
    return rows[np.sort(keep)]


# ---------------------------------------------------------------------------
# estimates and reports
# ---------------------------------------------------------------------------

@dataclass
class Estimate:
    value: float
    exactness: str
    witness: dict | None = None
    unbounded: bool = False

    def to_dict(self):
        return asdict(self)


class _Best:
    """Running maximum with the first maximising witness."""

    def __init__(self):
        self.value = -math.inf
        self.witness = None
        self.unbounded = False

    def update(self, ratios: np.ndarray, X: np.ndarray, describe):
        if ratios.size == 0:
            return
        flat = int(np.argmax(ratios))
        v, j = np.unravel_index(flat, ratios.shape)
        val = float(ratios[v, j])
        if val > self.value:
            self.value = val
            self.witness = describe(X[v], int(j))
            if math.isinf(val):
                self.unbounded = True

    def estimate(self, exactness=ON_GRID) -> Estimate:
        value = self.value if self.value > -math.inf else 0.0
        return Estimate(value, LOWER if self.unbounded else exactness, self.witness, self.unbounded)


def _set_witness(x, mask, **extra):
    d = {"x": [float(t) for t in x], "m": bin(mask).count("1"), "Lambda": list(mask_to_indices(mask))}
    d.update(extra)
    return d


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num/den with 0/0 -> -inf (skipped) and positive/0 -> +inf (unbounded)."""
    out = np.full(num.shape, -math.inf)
    ok = den >= ZERO_TOL
    np.divide(num, den, out=out, where=ok)
    out[~ok & (num >= ZERO_TOL)] = math.inf
    return out


@dataclass
class SignTable:
    """Norms of sign indicators per support mask: max and min over signs,
    the all-plus value, and maximising / minimising sign vectors."""

    dim: int
    max_norm: np.ndarray
    min_norm: np.ndarray
    plus_norm: np.ndarray
    argmax: np.ndarray
    argmin: np.ndarray


def sign_table(model: NormModel) -> SignTable:
    N = model.dim
    if N > MAX_DEMOCRACY_DIM:
        raise DimensionError(f"sign enumeration needs N <= {MAX_DEMOCRACY_DIM}")
    S = _family_rows(VectorFamily.sign_indicators(), N)
    S = np.concatenate([np.zeros((1, N)), S])
    vals = model.norms(S)
    masks = ((S != 0) * (1 << np.arange(N))).sum(axis=1)
    size = 1 << N
    # order by (mask, norm) to pick the first extremal sign per mask
    order = np.lexsort((vals, masks))
    sm, sv = masks[order], vals[order]
    starts = np.searchsorted(sm, np.arange(size), side="left")
    stops = np.searchsorted(sm, np.arange(size), side="right")
    min_norm = sv[starts]
    argmin = S[order[starts]]
    max_norm = sv[stops - 1]
    # first sign vector (in generation order) that attains the max
    argmax = np.empty((size, N))
    for mask in range(size):
        cand = order[starts[mask]:stops[mask]]
        hit = cand[vals[cand] == max_norm[mask]]
        argmax[mask] = S[hit.min()]
    plus = model.norms(mask_array(N).astype(float))
    return SignTable(N, max_norm, min_norm, plus, argmax, argmin)


def _pair_max(num: np.ndarray, den: np.ndarray, allowed: np.ndarray):
    """max over allowed (A, B) of num[A]/den[B]; B = empty excluded."""
    with np.errstate(divide="ignore", invalid="ignore"):
        R = num[:, None] / den[None, :]
    R = np.where(allowed, R, -math.inf)
    R[:, 0] = -math.inf
    flat = int(np.argmax(R))
    A, B = np.unravel_index(flat, R.shape)
    return float(R[A, B]), int(A), int(B)


def estimate_democracies(model: NormModel, w: Weight, N: int | None = None,
                         within: int | None = None, signs: SignTable | None = None) -> dict:
    """Exhaustive Cd, Cs and Csd over all A, B in {1..N} with w(A) <= w(B).

    ``within`` restricts both sets to {1..within}.
    """
    N = model.dim if N is None else N
    if N != model.dim:
        raise DimensionError(f"dimension mismatch: {N} != {model.dim}")
    if N > MAX_DEMOCRACY_DIM:
        raise DimensionError(f"democracy enumeration needs N <= {MAX_DEMOCRACY_DIM}")
    st = sign_table(model) if signs is None else signs
    meas = mask_measures(w, N)
    allowed = meas[:, None] <= meas[None, :] + FLOAT_SLACK
    if within is not None:
        inside = np.arange(1 << N) < (1 << within)
        allowed &= inside[:, None] & inside[None, :]
    disjoint = (np.arange(1 << N)[:, None] & np.arange(1 << N)[None, :]) == 0

    def describe(A, B, eps_a, eps_b):
        return {
            "A": list(mask_to_indices(A)), "eps": [int(eps_a[n - 1]) for n in mask_to_indices(A)],
            "B": list(mask_to_indices(B)), "eps_prime": [int(eps_b[n - 1]) for n in mask_to_indices(B)],
        }

    out = {}
    val, A, B = _pair_max(st.plus_norm, st.plus_norm, allowed)
    out["Cd"] = Estimate(val, EXACT, describe(A, B, np.ones(N), np.ones(N)))
    val, A, B = _pair_max(st.max_norm, st.min_norm, allowed)
    out["Cs"] = Estimate(val, EXACT, describe(A, B, st.argmax[A], st.argmin[B]))
    val, A, B = _pair_max(st.max_norm, st.min_norm, allowed & disjoint)
    out["Csd"] = Estimate(val, EXACT, describe(A, B, st.argmax[A], st.argmin[B]))
    return out


def _complement_table(model: NormModel, X: np.ndarray, keep: np.ndarray, out_max: np.ndarray):
    """(V, 2**N) table of ||x - P_L x|| for every mask L.

    Lattice norms reduce to a matrix product against the complement
    indicators (``out_max`` already holds the sup over the complement).
    """
    A = np.abs(X)
    if model.kind == "sup" or (model.kind == "lp" and math.isinf(model.p)):
        return np.maximum(out_max, 0.0)
    if model.kind == "wl1":
        return (A * np.asarray(model.v)) @ keep.T
    if model.kind == "lp":
        if model.p == 1:
            return A @ keep.T
        if model.p == 2:
            return np.sqrt((A * A) @ keep.T)
        top = A.max(axis=1, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        return top * (((A / safe) ** model.p) @ keep.T) ** (1.0 / model.p)
    if model.kind == "summing":
        full = keep.shape[0] - 1
        return _summing_subset_norms(X)[:, full ^ np.arange(full + 1)]
    return model.norms(X[:, None, :] * keep[None, :, :])


def _summing_subset_norms(X: np.ndarray) -> np.ndarray:
    """Summing norm of P_K x for every mask K, by adding the top index last:
    the partial sums of P_K x are those of P_{K - h} x plus the total."""
    V, N = X.shape
    total = np.zeros((V, 1 << N))
    out = np.zeros((V, 1 << N))
    for mask in range(1, 1 << N):
        bit = mask.bit_length() - 1
        rest = mask ^ (1 << bit)
        np.add(total[:, rest], X[:, bit], out=total[:, mask])
        np.maximum(out[:, rest], np.abs(total[:, mask]), out=out[:, mask])
    return out


def _chunks(n: int, N: int):
    step = max(1, (1 << 16) >> N)
    for lo in range(0, n, step):
        yield slice(lo, min(n, lo + step))


def _update(bests, key, ratios, X):
    if key in bests:
        bests[key].update(ratios, X, _set_witness)


def grid_scan(model: NormModel, w: Weight, X: np.ndarray, want=("Cq", "Ca", "Csg", "Cu"),
              signs: SignTable | None = None) -> dict:
    """One pass over the vectors X computing the requested grid maxima.

    Quantities (each a max over rows x != 0, sizes m and greedy sets L of x):

    * Cq  : ||x - P_L x|| / ||x||
    * Ca  : ||x - P_L x|| / sigma~^w_{w(L)}(x)
    * Csg : cheb(x, L) / sigma^w_{w(L)}(x)
    * Cu  : min_L |x_j| * max_eps ||1_{eps L}|| / ||x||
    * lemma32 : min_L |x_j| * ||1_{sgn(x) L}|| / ||x||
    * lemma33 : min_L |x_j| * max{||1_{eta F}|| : F in the second half,
      w(F) <= w(L)} / ||x||, for x supported in the first half
    * Cq_half, Cu_half : Cq and Cu over x supported in the first half
    """
    N = model.dim
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != N:
        raise DimensionError(f"vectors must have shape (V, {N})")
    want = set(want)
    if "Csg" in want and N > MAX_SEMIGREEDY_DIM:
        raise DimensionError(f"semi-greedy estimation needs N <= {MAX_SEMIGREEDY_DIM}")
    size = 1 << N
    masks = np.arange(size)
    member = mask_array(N)
    keep = (~member).astype(float)
    meas = mask_measures(w, N)
    by_weight = np.argsort(meas, kind="stable")
    # number of sets A with w(A) <= w(L) (+ slack), for every L
    reach = np.searchsorted(meas[by_weight], meas + FLOAT_SLACK, side="right")
    full = size - 1
    half = N // 2
    half_rows = np.all(X[:, half:] == 0, axis=1)
    needs_signs = want & {"Cu", "Cu_half", "lemma33"}
    if needs_signs and signs is None:
        signs = sign_table(model)
    if "lemma33" in want:
        second = (masks & ((1 << half) - 1)) == 0
        fm = masks[second]
        fo = np.argsort(meas[fm], kind="stable")
        fmax = np.maximum.accumulate(signs.max_norm[fm][fo])
        freach = np.searchsorted(meas[fm][fo], meas + FLOAT_SLACK, side="right")
        far_max = fmax[freach - 1]
    if "lemma32" in want:
        pow3 = 3.0 ** np.arange(N)
        digits = np.indices((3,) * N).reshape(N, -1)[::-1].T - 1.0
        sign_norms = model.norms(digits)
    bests = {k: _Best() for k in want}

    for sl in _chunks(len(X), N):
        Xc = X[sl]
        nx = model.norms(Xc)
        live = nx >= ZERO_TOL
        Xc, nx = Xc[live], nx[live]
        if not len(Xc):
            continue
        lo, hi = mask_min_max(np.abs(Xc))
        out_max = hi[:, full ^ masks]
        G = lo >= out_max
        R = _complement_table(model, Xc, keep, out_max)
        if want & {"Cq", "Cq_half"}:
            r = np.where(G, R / nx[:, None], -math.inf)
            _update(bests, "Cq", r, Xc)
            _update(bests, "Cq_half", r[half_rows[sl][live]], Xc[half_rows[sl][live]])
        ratio_a = None
        if "Ca" in want or ("Csg" in want and model.is_lattice):
            tilde = np.minimum.accumulate(R[:, by_weight], axis=1)[:, reach - 1]
            ratio_a = np.where(G, _safe_ratio(R, tilde), -math.inf)
            _update(bests, "Ca", ratio_a, Xc)
        if "Csg" in want:
            if model.is_lattice:
                # the Chebyshev value on L is the projection norm for lattices
                r = ratio_a
            else:
                C = chebyshev_table(model, Xc)
                best = np.minimum.accumulate(C[:, by_weight], axis=1)[:, reach - 1]
                r = np.where(G, _safe_ratio(C, best), -math.inf)
            bests["Csg"].update(r, Xc, _set_witness)
        ok = G & (masks[None, :] > 0)
        # lo is +inf on the empty mask, which ``ok`` already excludes
        lo = np.where(ok, lo, 0.0)
        scaled = lo / nx[:, None]
        if want & {"Cu", "Cu_half"}:
            r = np.where(ok, scaled * signs.max_norm[None, :], -math.inf)
            _update(bests, "Cu", r, Xc)
            _update(bests, "Cu_half", r[half_rows[sl][live]], Xc[half_rows[sl][live]])
        if "lemma32" in want:
            # base-3 code of the sign pattern sgn(x) restricted to L
            code = (np.sign(Xc) * pow3) @ member.T.astype(float) + pow3.sum()
            eps_norms = sign_norms[code.astype(np.int64)]
            r = np.where(ok, scaled * eps_norms, -math.inf)
            bests["lemma32"].update(r, Xc, _set_witness)
        if "lemma33" in want:
            rows = half_rows[sl][live]
            r = np.where(ok[rows], scaled[rows] * far_max[None, :], -math.inf)
            bests["lemma33"].update(r, Xc[rows], _set_witness)
    return {k: b.estimate() for k, b in bests.items()}


def _family_X(model, family, N, within=None):
    N = model.dim if N is None else N
    if N != model.dim:
        raise DimensionError(f"dimension mismatch: {N} != {model.dim}")
    fams = default_families(N) if family is None else family
    return family_array(fams, N, support_dim=within)


def estimate_Cq(model: NormModel, family=None, N: int | None = None, within: int | None = None) -> Estimate:
    """Grid quasi-greedy constant over every size m and every greedy set."""
    X = _family_X(model, family, N, within)
    return grid_scan(model, Weight.constant(1.0), X, want=("Cq",))["Cq"]


def estimate_Ca(model: NormModel, w: Weight, family=None, N: int | None = None) -> Estimate:
    X = _family_X(model, family, N)
    return grid_scan(model, w, X, want=("Ca",))["Ca"]


def estimate_Csg(model: NormModel, w: Weight, family=None, N: int | None = None) -> Estimate:
    X = _family_X(model, family, N)
    return grid_scan(model, w, X, want=("Csg",))["Csg"]


def estimate_Cu(model: NormModel, family=None, N: int | None = None, within: int | None = None) -> Estimate:
    X = _family_X(model, family, N, within)
    return grid_scan(model, Weight.constant(1.0), X, want=("Cu",))["Cu"]


@dataclass
class ConstantReport:
    """All constants for one (space, weight, N) triple.

    The ``*_half`` entries restrict test vectors (or sets) to the first
    half {1..N//2} of the coordinates; they feed checks whose underlying
    arguments need free coordinates to the right of the support.
    """

    space: str
    weight: str
    dim: int
    families: list[str]
    constants: dict[str, Estimate]
    extras: dict[str, Estimate] = field(default_factory=dict)
    signs: SignTable | None = field(default=None, repr=False)

    def __getattr__(self, name):
        consts = self.__dict__.get("constants", {})
        if name in consts:
            return consts[name].value
        raise AttributeError(name)

    def exactness(self, name: str) -> str:
        est = self.constants.get(name) or self.extras.get(name)
        return est.exactness

    def value(self, name: str) -> float:
        est = self.constants.get(name) or self.extras.get(name)
        return est.value

    def rows(self):
        for name, est in itertools.chain(self.constants.items(), self.extras.items()):
            yield {
                "space": self.space, "weight": self.weight, "N": self.dim,
                "constant": name, "value": est.value, "exactness": est.exactness,
                "witness": est.witness,
            }

    def to_dict(self):
        return {
            "space": self.space, "weight": self.weight, "N": self.dim, "families": self.families,
            "constants": {k: v.to_dict() for k, v in self.constants.items()},
            "extras": {k: v.to_dict() for k, v in self.extras.items()},
        }


CONSTANT_NAMES = ("Cq", "Cd", "Cs", "Csd", "Ca", "Csg", "Cu", "Kb", "c1", "c2")


def compute_report(model: NormModel, w: Weight, families=None) -> ConstantReport:
    N = model.dim
    fams = default_families(N) if families is None else tuple(families)
    X = family_array(fams, N)
    st = sign_table(model)
    half = N // 2
    want = ["Cq", "Ca", "Cu", "lemma32"]
    if N <= MAX_SEMIGREEDY_DIM:
        want.append("Csg")
    if half >= 1:
        want += ["lemma33", "Cq_half", "Cu_half"]
    scan = grid_scan(model, w, X, want=want, signs=st)
    demo = estimate_democracies(model, w, signs=st)
    kb = schauder_constant(model, X)
    c1, c2 = basis_constants(model, X)
    closed = model.kind != "custom"
    consts = {
        "Cq": scan["Cq"], "Cd": demo["Cd"], "Cs": demo["Cs"], "Csd": demo["Csd"],
        "Ca": scan["Ca"],
        "Csg": scan.get("Csg", Estimate(math.nan, LOWER, {"skipped": f"N > {MAX_SEMIGREEDY_DIM}"})),
        "Cu": scan["Cu"],
        "Kb": Estimate(kb.value, EXACT if kb.exact else LOWER, {"grid_value": kb.grid_value}),
        "c1": Estimate(c1, EXACT if closed else LOWER),
        "c2": Estimate(c2, EXACT if closed else LOWER),
    }
    extras = {"lemma32": scan["lemma32"]}
    if half >= 1:
        for k in ("lemma33", "Cq_half", "Cu_half"):
            extras[k] = scan[k]
        extras["Cs_half"] = estimate_democracies(model, w, within=half, signs=st)["Cs"]
    return ConstantReport(model.id, w.id, N, [f.id for f in fams], consts, extras, st)


# ---------------------------------------------------------------------------
# rho-admissibility
# ---------------------------------------------------------------------------

def _admissibility_probes(k: int, n_random: int, seed: int) -> np.ndarray:
    grid = _family_rows(VectorFamily.level_grid((0.0, 1.0, -1.0, 2.0, -2.0)), k)
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_random, k))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.concatenate([grid[np.any(grid != 0, axis=1)], rand])


def admissibility_ratio(model: NormModel, A: IndexSet, B: IndexSet,
                        n_random: int = 500, seed: int = 0) -> float:
    """Estimated sup over coefficients of ||sum_A a e|| / ||sum_{A u B} a e||.

    For fixed coefficients on A the denominator is minimised exactly over
    the free coefficients on B \\ A (a Chebyshev problem); the sup over the
    coefficients on A is taken over a level grid plus random directions.
    """
    N = model.dim
    pos = np.asarray(A.indices) - 1
    probes = _admissibility_probes(len(A), n_random, seed)
    XA = np.zeros((len(probes), N))
    XA[:, pos] = probes
    num = model.norms(XA)
    free = (B - A).mask
    den = chebyshev_table(model, XA, masks=[free])[:, 0]
    return float(_safe_ratio(num, den).max())


@dataclass
class AdmissibilityRow:
    A: list[int]
    n0: int | None
    worst_ratio: float
    evidence: str


def check_rho_admissibility(model: NormModel, rho_adm: float, N: int | None = None,
                            horizon: int | None = None, max_size: int = 4,
                            n_random: int = 500, seed: int = 0) -> list[AdmissibilityRow]:
    """Search, for each A in {1..N//2} with |A| <= max_size, the least
    threshold n0 > max A such that every B in {n0..N} with |B| <= |A|
    keeps the ratio within rho_adm (+1e-6).  Unweighted only."""
    N = model.dim if N is None else N
    if N != model.dim:
        raise DimensionError(f"dimension mismatch: {N} != {model.dim}")
    if N > MAX_DEMOCRACY_DIM:
        raise DimensionError(f"admissibility search needs N <= {MAX_DEMOCRACY_DIM}")
    if rho_adm < 1:
        raise ValueError("rho must be >= 1")
    horizon = N if horizon is None else min(horizon, N)
    rows = []
    for k in range(1, min(max_size, N // 2) + 1):
        for A in itertools.combinations(range(1, N // 2 + 1), k):
            A = IndexSet(A)
            found, worst = None, math.nan
            for n0 in range(A.max_index() + 1, horizon + 1):
                worst = 1.0
                for size in range(1, k + 1):
                    for B in itertools.combinations(range(n0, N + 1), size):
                        worst = max(worst, admissibility_ratio(model, A, IndexSet(B), n_random, seed))
                if worst <= rho_adm + 1e-6:
                    found = n0
                    break
            evidence = "grid" if found is not None else "not found <= horizon (grid evidence)"
            rows.append(AdmissibilityRow(list(A.indices), found, worst, evidence))
    return rows
