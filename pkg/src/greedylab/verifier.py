"""Inequality checks over constant reports, suite configs and the ledger.

Every check compares a left-hand quantity against a right-hand bound built
from constants of the same finite model, with a one-sided tolerance.  A
check whose bound uses a constant flagged ``lower-bound`` is skipped: a
lower estimate on the right could make a true inequality look false.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (
    LOWER,
    MAX_DEMOCRACY_DIM,
    ConstantReport,
    VectorFamily,
    compute_report,
    default_families,
    family_array,
)
from .greedy import truncate_array
from .spaces import NormModel, mask_to_indices, parse_space
from .weights import FLOAT_SLACK, Weight, classify_regime, mask_measures, parse_weight

__all__ = [
    "TOL",
    "InequalityCheck",
    "SuiteEntry",
    "SuiteConfig",
    "ConfigError",
    "Ledger",
    "check_thm_1_3",
    "check_thm_1_9",
    "check_prop_2_2",
    "check_prop_2_3",
    "check_lemma_3_2",
    "check_lemma_3_3",
    "check_prop_3_4",
    "check_section_6",
    "check_cor_1_11",
    "entry_checks",
    "default_suite",
    "load_suite",
    "parse_suite",
    "run_suite",
]

TOL = 1e-6

CSV_COLUMNS = ("suite_id", "space", "weight", "N", "check_id", "lhs", "rhs", "margin", "verdict", "witness")
REPORT_COLUMNS = ("suite_id", "space", "weight", "N", "constant", "value", "exactness", "witness")

DEFAULT_SPACES = ("lp:1", "lp:2", "lp:inf", "sup", "summing", "wl1:2,1")
DEFAULT_WEIGHTS = ("const:1", "pow:-2", "pow:1", "explicit:2,1,1+const:1")
DEFAULT_DIMS = (4, 6)
COR_DIMS = (4, 6, 8)


@dataclass
class InequalityCheck:
    """One row of the ledger.  ``verdict`` is pass, fail or skipped; a
    skipped row carries its reason in ``reason``."""

    id: str
    lhs: float
    rhs: float
    verdict: str
    reason: str = ""
    witnesses: dict = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def verdict_text(self) -> str:
        return f"skipped({self.reason})" if self.verdict == "skipped" else self.verdict

    def to_dict(self) -> dict:
        return {
            "id": self.id, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
            "verdict": self.verdict_text, "witnesses": self.witnesses, "flags": list(self.flags),
        }


def _judge(check_id, lhs, rhs, tol=TOL, witnesses=None, flags=(), lower_rhs=False, lhs_missing=False):
    witnesses = witnesses or {}
    if lower_rhs:
        return InequalityCheck(check_id, lhs, rhs, "skipped", "lower-bound rhs", witnesses, tuple(flags))
    if lhs_missing or math.isnan(lhs) or math.isnan(rhs):
        return InequalityCheck(check_id, lhs, rhs, "skipped", "constant not estimated", witnesses, tuple(flags))
    verdict = "pass" if lhs <= rhs + tol else "fail"
    return InequalityCheck(check_id, lhs, rhs, verdict, "", witnesses, tuple(flags))


def _report_check(report: ConstantReport, check_id: str, lhs_names, rhs_names, lhs, rhs,
                  tol=TOL, flags=()) -> InequalityCheck:
    """Check with the pairing rule: every rhs constant must not be a lower bound."""
    lower = any(report.exactness(n) == LOWER for n in rhs_names)
    witnesses = {}
    for n in tuple(lhs_names) + tuple(rhs_names):
        est = report.constants.get(n) or report.extras.get(n)
        witnesses[n] = {"value": est.value, "exactness": est.exactness, "witness": est.witness}
    return _judge(check_id, lhs, rhs, tol, witnesses, flags, lower_rhs=lower)


# ---------------------------------------------------------------------------
# checks on one report
# ---------------------------------------------------------------------------

def check_thm_1_3(report: ConstantReport, tol: float = TOL) -> list[InequalityCheck]:
    r = report
    return [
        _report_check(r, "Thm1.3(i)", ("Cq", "Csd"), ("Ca",), max(r.Cq, r.Csd), r.Ca, tol),
        _report_check(r, "Thm1.3(ii)", ("Cs",), ("Ca",), r.Cs, 2 * r.Ca, tol, flags=("external-lemma",)),
        _report_check(r, "Thm1.3(iii)", ("Ca",), ("Cq", "Csd"), r.Ca, r.Cq + 2 * r.Cq * r.Csd, tol),
    ]


def check_thm_1_9(report: ConstantReport, tol: float = TOL) -> list[InequalityCheck]:
    """Part (a) uses first-half versions of Cq and Cs on the left, so that
    the extremal vectors keep free coordinates to the right of their support."""
    r = report
    Csg, Kb, c2 = r.Csg, r.Kb, r.c2
    a_rhs = ("Csg", "Kb", "c2")
    return [
        _report_check(r, "Thm1.9(a1)", ("Cq_half",), a_rhs, r.value("Cq_half"),
                      Csg * Kb * (1 + (1 + Kb) * Csg + c2 ** 2), tol),
        _report_check(r, "Thm1.9(a2)", ("Cs_half",), a_rhs, r.value("Cs_half"),
                      Kb * Csg * ((1 + Kb) * Csg + c2 ** 2), tol),
        _report_check(r, "Thm1.9(b)", ("Csg",), ("Cq", "Cs"), Csg, r.Cq + 4 * r.Cq * r.Cs, tol),
        _report_check(r, "Thm1.9(c)", ("Csg",), ("Cq", "Csd"), Csg, r.Cq + 4 * r.Cq ** 2 * r.Csd, tol),
    ]


def check_lemma_3_2(report: ConstantReport, tol: float = TOL) -> InequalityCheck:
    return _report_check(report, "Lemma3.2", ("lemma32",), ("Cq",), report.value("lemma32"), 2 * report.Cq, tol)


def check_lemma_3_3(report: ConstantReport, tol: float = TOL) -> InequalityCheck:
    r = report
    return _report_check(r, "Lemma3.3", ("lemma33",), ("Csg", "Kb"), r.value("lemma33"), r.Csg * (1 + r.Kb), tol)


def check_prop_3_4(report: ConstantReport, tol: float = TOL) -> InequalityCheck:
    r = report
    Csg, Kb = r.Csg, r.Kb
    return _report_check(r, "Prop3.4", ("Cu_half",), ("Csg", "Kb", "c2"), r.value("Cu_half"),
                         Kb * Csg * ((1 + Kb) * Csg + r.c2 ** 2), tol)


def check_section_6(report: ConstantReport, tol: float = TOL) -> list[InequalityCheck]:
    r = report
    return [
        _report_check(r, "Prop6.1", ("Cs",), ("Cq", "Cd"), r.Cs, 4 * r.Cq * r.Cd, tol),
        _report_check(r, "Prop6.2(a)", ("Csd",), ("Cs",), r.Csd, r.Cs, tol),
        _report_check(r, "Prop6.2(b)", ("Cs",), ("Csd", "c2"), r.Cs, r.Csd * (1 + r.c2 ** 2 * r.Csd), tol),
    ]


def _sample_rows(X: np.ndarray, samples: int, seed: int) -> np.ndarray:
    if len(X) <= samples:
        return X
    rng = np.random.default_rng(seed)
    return X[np.sort(rng.choice(len(X), size=samples, replace=False))]


def check_prop_2_2(model: NormModel, report: ConstantReport, samples: int = 2000, seed: int = 0,
                   families=None, tol: float = TOL) -> InequalityCheck:
    """max ||T_alpha x|| / ||x|| over sampled family vectors, with alpha at
    every distinct magnitude of x, the midpoints between them and above the
    top, against Cq.

    The samples come from the same family as Cq: T_alpha x is an average of
    x - P_L x over greedy sets L of x, so the bound is exact on the family.
    """
    N = model.dim
    fams = default_families(N) if families is None else families
    X = _sample_rows(family_array(fams, N), samples, seed)
    best, arg = -math.inf, None
    for x in X:
        nx = model(x)
        if nx < 1e-12:
            continue
        mags = np.unique(np.abs(x[x != 0]))
        alphas = np.concatenate([mags, (mags[1:] + mags[:-1]) / 2, [2 * mags[-1]]])
        vals = model.norms(truncate_array(x[None, :], alphas[:, None])) / nx
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, arg = float(vals[j]), {"x": [float(t) for t in x], "alpha": float(alphas[j])}
    if arg is None:
        best = 0.0
    chk = _report_check(report, "Prop2.2", (), ("Cq",), best, report.Cq, tol)
    chk.witnesses["T_alpha"] = arg
    return chk


def _has_room(vals: np.ndarray, mask: int, meas: float, after_max: bool) -> bool:
    """Is there n outside the set (n > max of the set if ``after_max``)
    with w_n >= w(A)?  The finite stand-in for the fresh index the
    arguments pick beyond A."""
    N = len(vals)
    start = mask.bit_length() if after_max else 0
    for n in range(start, N):
        if not (mask >> n) & 1 and vals[n] >= meas - FLOAT_SLACK:
            return True
    return False


def check_prop_2_3(model: NormModel, w: Weight, report: ConstantReport, tol: float = TOL) -> list[InequalityCheck]:
    """Sign-indicator norms over sets with w(A) <= limsup w_n, against the
    three bounds (disjoint democracy, semi-greedy, semi-greedy Schauder),
    plus advisory rows over all sets when the weight regime is degenerate.

    Sets are restricted to those with room: some n outside A, n <= N, with
    w_n >= w(A) (and n > max A for the Schauder bound).
    """
    N = model.dim
    if N > MAX_DEMOCRACY_DIM or report.signs is None:
        return [_judge("Prop2.3(i)", math.nan, math.nan, tol, lhs_missing=True)]
    vals = w.values(N)
    meas = mask_measures(w, N)
    limsup = w.limsup()
    max_norm = report.signs.max_norm

    def worst(cond, after_max):
        best, arg = 0.0, 0
        for mask in range(1, 1 << N):
            if cond(mask) and _has_room(vals, mask, meas[mask], after_max) and max_norm[mask] > best:
                best, arg = float(max_norm[mask]), mask
        return best, {"A": list(mask_to_indices(arg)), "eps": [int(t) for t in report.signs.argmax[arg] if t]}

    bounded = lambda m: meas[m] <= limsup + FLOAT_SLACK
    anyset = lambda m: True
    c2, Csd, Csg, Kb = report.c2, report.Csd, report.Csg, report.Kb
    out = []
    lhs, wit = worst(bounded, False)
    chk = _report_check(report, "Prop2.3(i)", (), ("c2", "Csd"), lhs, c2 * Csd, tol)
    chk.witnesses["set"] = wit
    out.append(chk)
    chk = _report_check(report, "Prop2.3(i)-sg", (), ("Csg", "c2"), lhs, Csg * c2 * (1 + c2 ** 2), tol)
    chk.witnesses["set"] = wit
    out.append(chk)
    lhs_s, wit_s = worst(bounded, True)
    chk = _report_check(report, "Prop2.3(i)-schauder", (), ("Csg", "Kb"), lhs_s, 2 * Csg * Kb, tol)
    chk.witnesses["set"] = wit_s
    out.append(chk)
    regime = classify_regime(w)
    tags = []
    if regime.degenerate:
        tags.append("Prop2.3(ii)")
    if regime.inf_zero:
        tags.append("Prop2.3(iii)")
    if tags:
        lhs_a, wit_a = worst(anyset, False)
        for tag in tags:
            chk = _report_check(report, tag, (), ("c2", "Csd"), lhs_a, c2 * Csd, tol,
                                flags=("advisory", f"regime={regime.tag}"))
            chk.witnesses["set"] = wit_a
            out.append(chk)
    return out


def entry_checks(model: NormModel, w: Weight, report: ConstantReport, samples: int = 2000,
                 seed: int = 0, families=None, tol: float = TOL) -> list[InequalityCheck]:
    """Every per-entry check, in ledger order."""
    out = []
    out += check_thm_1_3(report, tol)
    out += check_thm_1_9(report, tol)
    out.append(check_prop_2_2(model, report, samples, seed, families, tol))
    out += check_prop_2_3(model, w, report, tol)
    out.append(check_lemma_3_2(report, tol))
    out.append(check_lemma_3_3(report, tol))
    out.append(check_prop_3_4(report, tol))
    out += check_section_6(report, tol)
    return out


def check_cor_1_11(space: str, reports: dict[int, ConstantReport], tol: float = TOL) -> InequalityCheck:
    """Consistency of growth across dimensions: Csg grows from the smallest
    to the largest N exactly when {Cq, Cs} grows and when {Cq, Csd} grows.

    ``reports`` maps N to a constant-weight report of the same space.
    The row is advisory; lhs counts disagreeing groups, rhs is 0.
    """
    dims = sorted(reports)
    lo, hi = reports[dims[0]], reports[dims[-1]]

    def grows(*names):
        return any(hi.value(n) > lo.value(n) + tol for n in names)

    pattern = {"Csg": grows("Csg"), "Cq|Cs": grows("Cq", "Cs"), "Cq|Csd": grows("Cq", "Csd")}
    mismatches = len(set(pattern.values())) - 1
    series = {n: [reports[d].value(n) for d in dims] for n in ("Cq", "Cs", "Csd", "Csg")}
    lower = any(r.exactness("Csg") == LOWER for r in reports.values())
    return _judge("Cor1.11", float(mismatches), 0.0, tol,
                  {"space": space, "dims": dims, "grows": pattern, "values": series},
                  flags=("advisory",), lower_rhs=lower)


# ---------------------------------------------------------------------------
# suite configuration
# ---------------------------------------------------------------------------

class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteEntry:
    space: str
    weight: str
    N: int


@dataclass
class SuiteConfig:
    suite_id: str = "default"
    entries: list[SuiteEntry] = field(default_factory=list)
    families: tuple[VectorFamily, ...] | None = None
    tol: float = TOL
    samples: int = 2000
    seed: int = 0
    cor_1_11: bool = True
    csv_name: str = "ledger.csv"
    json_name: str = "ledger.json"


def default_suite() -> SuiteConfig:
    entries = [SuiteEntry(s, w, N) for N in DEFAULT_DIMS for s in DEFAULT_SPACES for w in DEFAULT_WEIGHTS]
    return SuiteConfig("default", entries)


def _parse_family(text: str) -> VectorFamily:
    head, _, arg = text.partition(":")
    if head == "levels":
        return VectorFamily.level_grid(float(t) for t in arg.split(","))
    if head == "extremal":
        return VectorFamily.proof_extremal(float(arg) if arg else 1e-6)
    if head == "signs":
        return VectorFamily.sign_indicators()
    raise ValueError(f"unknown family {text!r}")


def _line_of(text: str, needle) -> int | None:
    if not isinstance(needle, str):
        needle = json.dumps(needle)
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def parse_suite(text: str) -> SuiteConfig:
    """Build a SuiteConfig from JSON text.

    Accepted keys: suite_id, entries (list of {space, weight, N}), or the
    product form spaces/weights/dims, families, tol, samples, seed,
    cor_1_11, outputs {csv, json}.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None

    def fail(path, value, msg):
        line = _line_of(text, value)
        where = f"line {line}, " if line else ""
        raise ConfigError(f"{where}field {path}: {msg}")

    if not isinstance(raw, dict):
        raise ConfigError("line 1: the suite must be a JSON object")
    cfg = SuiteConfig(suite_id=str(raw.get("suite_id", "suite")))
    items = []
    if "entries" in raw:
        if not isinstance(raw["entries"], list):
            fail("entries", "entries", "must be a list")
        for i, e in enumerate(raw["entries"]):
            if not isinstance(e, dict):
                fail(f"entries[{i}]", e, "must be an object")
            for key in ("space", "weight", "N"):
                if key not in e:
                    fail(f"entries[{i}]", e.get("space", "entries"), f"missing {key!r}")
            items.append((f"entries[{i}]", e["space"], e["weight"], e["N"]))
    if any(k in raw for k in ("spaces", "weights", "dims")):
        for key in ("spaces", "weights", "dims"):
            if not isinstance(raw.get(key), list):
                fail(key, key, "spaces, weights and dims must all be lists")
        for N in raw["dims"]:
            for s in raw["spaces"]:
                for wt in raw["weights"]:
                    items.append(("spaces/weights/dims", s, wt, N))
    for path, s, wt, N in items:
        if not isinstance(N, int) or isinstance(N, bool) or not 1 <= N <= MAX_DEMOCRACY_DIM:
            fail(f"{path}.N", N, f"N must be an integer in 1..{MAX_DEMOCRACY_DIM}")
        try:
            parse_space(str(s), N)
        except ValueError as exc:
            fail(f"{path}.space", s, str(exc))
        try:
            parse_weight(str(wt))
        except ValueError as exc:
            fail(f"{path}.weight", wt, str(exc))
        cfg.entries.append(SuiteEntry(str(s), str(wt), N))
    if "families" in raw:
        fams = []
        for i, f in enumerate(raw["families"]):
            try:
                fams.append(_parse_family(str(f)))
            except ValueError as exc:
                fail(f"families[{i}]", f, str(exc))
        cfg.families = tuple(fams)
    for key, typ in (("tol", float), ("samples", int), ("seed", int)):
        if key in raw:
            try:
                setattr(cfg, key, typ(raw[key]))
            except (TypeError, ValueError):
                fail(key, key, f"expected {typ.__name__}")
    if not cfg.tol >= 0:
        fail("tol", "tol", "must be nonnegative")
    cfg.cor_1_11 = bool(raw.get("cor_1_11", True))
    outputs = raw.get("outputs", {})
    cfg.csv_name = str(outputs.get("csv", cfg.csv_name))
    cfg.json_name = str(outputs.get("json", cfg.json_name))
    return cfg


def load_suite(path) -> SuiteConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_suite(text)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

@dataclass
class LedgerRow:
    entry: SuiteEntry
    check: InequalityCheck


@dataclass
class Ledger:
    suite_id: str
    rows: list[LedgerRow] = field(default_factory=list)
    reports: list[ConstantReport] = field(default_factory=list)

    @property
    def failures(self) -> list[LedgerRow]:
        return [r for r in self.rows if r.check.verdict == "fail"]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def csv_text(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(CSV_COLUMNS)
        for row in self.rows:
            c, e = row.check, row.entry
            out.writerow([self.suite_id, e.space, e.weight, e.N, c.id, _fmt(c.lhs), _fmt(c.rhs),
                          _fmt(c.margin), c.verdict_text, _dump(c.witnesses)])
        return buf.getvalue()

    def reports_csv_text(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(REPORT_COLUMNS)
        for rep in self.reports:
            for r in rep.rows():
                out.writerow([self.suite_id, r["space"], r["weight"], r["N"], r["constant"],
                              _fmt(r["value"]), r["exactness"], _dump(r["witness"])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "suite_id": self.suite_id,
            "summary": {
                "checks": len(self.rows),
                "fail": len(self.failures),
                "skipped": sum(r.check.verdict == "skipped" for r in self.rows),
            },
            "checks": [{"space": r.entry.space, "weight": r.entry.weight, "N": r.entry.N, **r.check.to_dict()}
                       for r in self.rows],
            "reports": [rep.to_dict() for rep in self.reports],
        }

    def write(self, out_dir, csv_name="ledger.csv", json_name="ledger.json"):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / csv_name).write_text(self.csv_text())
        (out / "constants.csv").write_text(self.reports_csv_text())
        (out / json_name).write_text(json.dumps(_clean(self.to_dict()), indent=1, sort_keys=True) + "\n")


def _fmt(v) -> str:
    return "%.12g" % v


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dump(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"))


def run_suite(config: SuiteConfig, progress=None) -> Ledger:
    """Compute a report for every entry, run the checks, and append the
    Cor1.11 row after the constant-weight entries of each space.

    Entries run sequentially in config order.
    """
    ledger = Ledger(config.suite_id)
    cache: dict[tuple, ConstantReport] = {}

    def report_for(space, weight, N):
        key = (space, weight, N)
        if key not in cache:
            model, w = parse_space(space, N), parse_weight(weight)
            cache[key] = compute_report(model, w, config.families)
        return cache[key]

    cor_done = set()
    for entry in config.entries:
        if progress:
            progress(entry)
        model, w = parse_space(entry.space, entry.N), parse_weight(entry.weight)
        rep = report_for(entry.space, entry.weight, entry.N)
        ledger.reports.append(rep)
        for chk in entry_checks(model, w, rep, config.samples, config.seed, config.families, config.tol):
            ledger.rows.append(LedgerRow(entry, chk))
        if config.cor_1_11 and w.rule == "const" and entry.space not in cor_done:
            cor_done.add(entry.space)
            reports = {N: report_for(entry.space, w.id, N) for N in COR_DIMS}
            ledger.rows.append(LedgerRow(entry, check_cor_1_11(entry.space, reports, config.tol)))
    return ledger
