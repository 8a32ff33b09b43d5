import copy
import json
import math

import pytest

from greedylab.analysis import Estimate, compute_report
from greedylab.spaces import NormModel, parse_space
from greedylab.verifier import (
    TOL,
    ConfigError,
    InequalityCheck,
    SuiteConfig,
    SuiteEntry,
    check_cor_1_11,
    check_lemma_3_2,
    check_lemma_3_3,
    check_prop_2_2,
    check_prop_2_3,
    check_prop_3_4,
    check_section_6,
    check_thm_1_3,
    check_thm_1_9,
    default_suite,
    entry_checks,
    parse_suite,
    run_suite,
)
from greedylab.weights import Weight, parse_weight


@pytest.fixture(scope="module")
def lp2():
    return compute_report(NormModel.lp(2, 4), Weight.constant(1))


@pytest.fixture(scope="module")
def summing6():
    return compute_report(NormModel.summing(6), Weight.constant(1))


def by_id(checks):
    return {c.id: c for c in checks}


def test_inequality_check_margin_and_text():
    c = InequalityCheck("x", 1.0, 3.0, "pass")
    assert c.margin == 2.0 and c.verdict_text == "pass"
    s = InequalityCheck("x", 1.0, 3.0, "skipped", "lower-bound rhs")
    assert s.verdict_text == "skipped(lower-bound rhs)"


def test_check_thm_1_3_on_lp2(lp2):
    checks = by_id(check_thm_1_3(lp2))
    assert checks["Thm1.3(iii)"].rhs == 3 and checks["Thm1.3(iii)"].lhs == pytest.approx(1)
    assert checks["Thm1.3(i)"].verdict == "pass" and checks["Thm1.3(i)"].margin == pytest.approx(0, abs=1e-12)
    assert "external-lemma" in checks["Thm1.3(ii)"].flags
    assert all(c.verdict == "pass" for c in checks.values())


def test_check_thm_1_9_rhs_formulas(lp2):
    checks = by_id(check_thm_1_9(lp2))
    assert checks["Thm1.9(b)"].rhs == pytest.approx(5)
    assert checks["Thm1.9(c)"].rhs == pytest.approx(5)
    # Csg = Kb = c2 = 1: 1 * 1 * (1 + 2 * 1 + 1) = 4
    assert checks["Thm1.9(a1)"].rhs == pytest.approx(4)
    assert checks["Thm1.9(a2)"].rhs == pytest.approx(3)


def test_check_section_6_and_prop_3_4_formulas(lp2):
    s6 = by_id(check_section_6(lp2))
    assert s6["Prop6.1"].rhs == pytest.approx(4)
    assert s6["Prop6.2(b)"].rhs == pytest.approx(2)
    assert s6["Prop6.2(a)"].verdict == "pass"
    assert check_prop_3_4(lp2).rhs == pytest.approx(3)
    assert check_lemma_3_2(lp2).rhs == pytest.approx(2)
    assert check_lemma_3_3(lp2).rhs == pytest.approx(2)


def test_summing_checks_pass(summing6):
    model = NormModel.summing(6)
    checks = entry_checks(model, Weight.constant(1), summing6)
    assert checks and all(c.verdict == "pass" for c in checks), [c for c in checks if c.verdict != "pass"]


def test_prop_2_2_identity_alpha(lp2):
    chk = check_prop_2_2(NormModel.lp(2, 4), lp2)
    assert chk.lhs == pytest.approx(1.0) and chk.verdict == "pass"
    assert chk.witnesses["T_alpha"]["alpha"] > 0


def test_prop_2_3_regimes():
    model = NormModel.lp(2, 4)
    rep = compute_report(model, parse_weight("pow:-2"))
    ids = by_id(check_prop_2_3(model, parse_weight("pow:-2"), rep))
    assert "advisory" in ids["Prop2.3(ii)"].flags and "advisory" in ids["Prop2.3(iii)"].flags
    # limsup w_n = 0: no nonempty set qualifies for (i)
    assert ids["Prop2.3(i)"].lhs == 0
    rep1 = compute_report(model, Weight.constant(1))
    ids1 = by_id(check_prop_2_3(model, Weight.constant(1), rep1))
    assert ids1["Prop2.3(i)"].lhs == 1 and ids1["Prop2.3(i)"].verdict == "pass"
    assert "Prop2.3(ii)" not in ids1
    sup = NormModel.sup(4)
    repg = compute_report(sup, parse_weight("geom:0.5"))
    assert all(c.verdict == "pass" for c in check_prop_2_3(sup, parse_weight("geom:0.5"), repg))


def test_lower_bound_rhs_is_skipped():
    model = NormModel.custom(lambda X: abs(X).sum(axis=-1), 3, name="l1-copy")
    rep = compute_report(model, Weight.constant(1))
    checks = by_id(check_thm_1_9(rep))
    assert checks["Thm1.9(a1)"].verdict_text == "skipped(lower-bound rhs)"
    assert checks["Thm1.9(b)"].verdict == "pass"


def test_failure_carries_witnesses(lp2):
    broken = copy.deepcopy(lp2)
    broken.constants["Ca"] = Estimate(100.0, "exact-on-grid", {"x": [1.0], "m": 0, "Lambda": []})
    chk = by_id(check_thm_1_3(broken))["Thm1.3(iii)"]
    assert chk.verdict == "fail"
    assert set(chk.witnesses) == {"Ca", "Cq", "Csd"}
    assert chk.witnesses["Ca"]["witness"]["x"] == [1.0]


def test_tolerance_is_one_sided():
    from greedylab.verifier import _judge
    assert _judge("t", 1 + 0.5 * TOL, 1).verdict == "pass"
    assert _judge("t", 1 + 2 * TOL, 1).verdict == "fail"
    assert _judge("t", math.nan, 1).verdict == "skipped"


def test_cor_1_11_patterns():
    reps = {N: compute_report(parse_space("summing", N), Weight.constant(1)) for N in (4, 6)}
    chk = check_cor_1_11("summing", reps)
    assert chk.verdict == "pass" and chk.witnesses["grows"] == {"Csg": True, "Cq|Cs": True, "Cq|Csd": True}
    reps = {N: compute_report(parse_space("lp:2", N), Weight.constant(1)) for N in (4, 6)}
    chk = check_cor_1_11("lp:2", reps)
    assert chk.verdict == "pass" and not any(chk.witnesses["grows"].values())


# -- config ----------------------------------------------------------------------

def test_default_suite_shape():
    cfg = default_suite()
    assert len(cfg.entries) == 6 * 4 * 2
    assert {e.N for e in cfg.entries} == {4, 6}


def test_parse_suite_forms():
    cfg = parse_suite('{"suite_id": "s", "spaces": ["lp:2", "sup"], "weights": ["const:1"], "dims": [3]}')
    assert [e.space for e in cfg.entries] == ["lp:2", "sup"]
    cfg = parse_suite(json.dumps({"entries": [{"space": "summing", "weight": "pow:-2", "N": 4}],
                                  "families": ["levels:0,1,-1", "signs"], "tol": 1e-7}))
    assert cfg.entries == [SuiteEntry("summing", "pow:-2", 4)] and cfg.tol == 1e-7
    assert len(cfg.families) == 2


def test_parse_suite_diagnostics():
    with pytest.raises(ConfigError, match="line 3"):
        parse_suite('{\n "entries": [\n  {"space": "lp:2",, }\n ]\n}')
    text = '{\n "entries": [\n  {"space": "lp:zero", "weight": "const:1", "N": 4}\n ]\n}'
    with pytest.raises(ConfigError, match=r"line 3, field entries\[0\]\.space"):
        parse_suite(text)
    with pytest.raises(ConfigError, match="weight"):
        parse_suite('{"entries": [{"space": "lp:2", "weight": "lin:1", "N": 4}]}')
    with pytest.raises(ConfigError, match="N must be"):
        parse_suite('{"entries": [{"space": "lp:2", "weight": "const:1", "N": 40}]}')
    with pytest.raises(ConfigError, match="missing"):
        parse_suite('{"entries": [{"space": "lp:2", "N": 4}]}')
    with pytest.raises(ConfigError, match="families"):
        parse_suite('{"entries": [], "families": ["blob"]}')


def test_empty_suite():
    ledger = run_suite(SuiteConfig("empty"))
    assert ledger.rows == [] and ledger.exit_code == 0
    assert ledger.csv_text().strip() == "suite_id,space,weight,N,check_id,lhs,rhs,margin,verdict,witness"


def test_run_suite_deterministic(tmp_path):
    cfg = parse_suite(json.dumps({"suite_id": "mini", "spaces": ["summing", "wl1:2,1"],
                                  "weights": ["const:1", "pow:1"], "dims": [3], "cor_1_11": False}))
    a, b = run_suite(cfg), run_suite(cfg)
    assert a.csv_text() == b.csv_text()
    a.write(tmp_path / "a")
    b.write(tmp_path / "b")
    for name in ("ledger.csv", "ledger.json", "constants.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert a.exit_code == 0
    data = json.loads((tmp_path / "a" / "ledger.json").read_text())
    assert data["summary"]["fail"] == 0 and data["summary"]["checks"] == len(a.rows)
