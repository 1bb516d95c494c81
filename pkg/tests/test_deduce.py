import itertools
import json
from fractions import Fraction

import pytest
import sympy as sp

from chernlab import deduce
from chernlab.catalog import build_builtin
from chernlab.deduce import (DecompositionShape, DeductionTrace, Step, bb_decompositions, cubic_partner_solve,
                             cy_hk_distinction, divisor_c3_compare, divisor_c3_data, cubic_partner_chi, fano_index_match,
                             general_type_index, hk_elimination, hk_partner_pipeline, nef_hypotheses_check,
                             replay, ricci_flat_exclusion, run_pipeline)
from chernlab.exact import ChernlabError
from chernlab.report import PINNED_VERDICTS, _run_pinned


# --- Beauville-Bogomolov shapes ------------------------------------------

def brute_force_shapes(dim, chi):
    """Multisets of factor dimensions, each factor tried as every admissible kind."""
    kinds = []
    for d in range(2, dim + 1):
        if d % 2 and d >= 3:
            kinds.append(("CY", d, 0))
        if d % 2 == 0 and d >= 4:
            kinds.append(("CY", d, 2))
        if d % 2 == 0:
            kinds.append(("HK", d, d // 2 + 1))
    found = set()
    for size in range(1, dim // 2 + 1):
        for combo in itertools.combinations_with_replacement(kinds, size):
            if sum(c[1] for c in combo) != dim:
                continue
            prod = 1
            for c in combo:
                prod *= c[2]
            if prod == chi:
                found.add(" x ".join(f"{k}{d}" for k, d, _ in sorted(combo, key=lambda c: (-c[1], c[0]))))
    return found


@pytest.mark.parametrize("dim", range(2, 11))
def test_bb_matches_brute_force(dim):
    for chi in range(0, 13):
        assert {str(s) for s in bb_decompositions(dim, chi)} == brute_force_shapes(dim, chi)


def test_bb_examples():
    assert bb_decompositions(4, 0) == []
    assert [str(s) for s in bb_decompositions(4, 3)] == ["HK4"]
    assert [str(s) for s in bb_decompositions(6, 0)] == ["CY3 x CY3"]
    assert "CY4" in {str(s) for s in bb_decompositions(4, 2)}
    assert "CY6" in {str(s) for s in bb_decompositions(6, 2)}
    assert [str(s) for s in bb_decompositions(4, 4)] == ["HK2 x HK2"]


def test_bb_rejects_small_dim():
    with pytest.raises(ChernlabError):
        bb_decompositions(1, 0)


@pytest.mark.parametrize("factors", [(("CY_odd", 4),), (("CY_even", 2),), (("HK", 3),), (("torus", 2),)])
def test_shape_validation(factors):
    with pytest.raises(ValueError):
        DecompositionShape(factors)


def test_shape_sorting_and_chi():
    s = DecompositionShape((("HK", 2), ("CY_odd", 3), ("HK", 4)))
    assert str(s) == "HK4 x CY3 x HK2"
    assert s.dim == 9 and s.chi == 0


# --- Fano pipelines -------------------------------------------------------

def test_ricci_flat(builtins):
    assert ricci_flat_exclusion(builtins("cubic4")).summary == "no K-trivial partner: w2 obstruction"
    assert ricci_flat_exclusion(builtins("quadric4")).summary == "excluded: no K-trivial partner"
    assert ricci_flat_exclusion(builtins("quadric(6)")).summary == "excluded: no K-trivial partner"
    with pytest.raises(ChernlabError):
        ricci_flat_exclusion(builtins("k3"))


@pytest.mark.parametrize("name,r,top", [("cubic4", 3, 243), ("dp5", 3, 405), ("pn(4)", 5, 625),
                                        ("quadric4", 4, 512)])
def test_index_match(name, r, top, builtins):
    tr = fano_index_match(builtins(name))
    assert tr.summary == f"any Fano partner has r_Y = r_X = {r} and c1^4 = {top}"


@pytest.mark.parametrize("name,k", [("cubic4", 3), ("dp5", 3), ("quadric4", 4)])
def test_general_type_index(name, k, builtins):
    assert general_type_index(builtins(name)).verdict["K_multiple"] == k


def test_general_type_hypothesis_violation(builtins, monkeypatch):
    # chi(t h) - 1 with a root at t = 2
    monkeypatch.setattr(deduce, "hilbert_polynomial", lambda x: [Fraction(-1), Fraction(1)])
    with pytest.raises(ChernlabError, match=r"hypothesis violated: h\^0\(X, 2h\) = 1"):
        general_type_index(builtins("quadric4"))


def test_fano_pipelines_need_fano(builtins):
    for f in (fano_index_match, general_type_index):
        with pytest.raises(ChernlabError):
            f(builtins("hilb2_k3"))


# --- cubic fourfold -------------------------------------------------------

def cubic_oracle():
    """Independent sympy search: c1 = -rL, p1 and p2 and c4 fixed, chi(O) = a + 1 from Todd."""
    r = sp.Symbol("r")
    L4 = 3
    c2 = (r ** 2 + 3) / 2
    c1_4 = r ** 4 * L4
    c1_2c2 = r ** 2 * c2 * L4
    c2_2 = c2 ** 2 * L4
    c4 = 27
    c1c3 = sp.expand((c2_2 + 2 * c4 - 126) / 2)
    todd = (-c1_4 + 4 * c1_2c2 + 3 * c2_2 + c1c3 - c4) / 720
    out = []
    for rv in range(1, 20):
        a = sp.Rational(todd.subs(r, rv)) - 1
        if a.q != 1 or not 0 <= a <= 10:
            continue
        if sp.Rational(c1c3.subs(r, rv)) % rv:
            continue
        out.append((rv, int(a)))
    return out


def test_cubic_partner_matches_oracle(builtins):
    tr = cubic_partner_solve(builtins("cubic4"))
    assert cubic_oracle() == [(3, 0)]
    assert tr.verdict["solutions"] == ((3, 0),)
    assert tr.verdict["unique"] is True
    assert dict(tr.verdict["chern_numbers"]) == {"c1^4": 243, "c1^2c2": 162, "c2^2": 108, "c4": 27,
                                                 "c1c3": 18}


def test_cubic_partner_rejects_r5(builtins):
    tr = cubic_partner_solve(builtins("cubic4"))
    rejected = [s for s in tr.steps if s.tag == "divisibility" and s.value("r") == 5]
    assert len(rejected) == 1
    assert rejected[0].value("r_times_Lc3") == -258
    assert rejected[0].value("divisible") is False


def test_cubic_partner_evaluator_invariance(builtins):
    x = builtins("cubic4")
    canon = cubic_partner_solve(x, "canonical").verdict
    legacy = cubic_partner_solve(x, "legacy").verdict
    assert canon == legacy


def test_cubic_partner_needs_cubic(builtins):
    with pytest.raises(ChernlabError, match="invariant signature mismatch"):
        cubic_partner_solve(builtins("quadric4"))


def test_closed_form_a_plus_one():
    assert cubic_partner_chi(3) == 1
    assert cubic_partner_chi(5) == 6
    assert cubic_partner_chi(1) == 0


@pytest.mark.parametrize("d", range(1, 51))
def test_cubic_divisor_closed_forms(d):
    data = divisor_c3_data("cubic", d)
    assert data["c3V"] == 3 * d * (2 - 6 * d + 3 * d * d - d ** 3)
    assert data["c3W"] == 3 * d * (-2 - 6 * d - 3 * d * d - d ** 3)


def test_divisor_compare_verdicts():
    tr = divisor_c3_compare("cubic", 1)
    assert tr.verdict["c3V"] == -6 and tr.verdict["c3W"] == -36
    assert tr.verdict["impossible"] is True
    dp = divisor_c3_compare("dp5", 2)
    assert dp.summary == "(d-3)d^2 = -4 != (d+3)d^2 = 20"
    for d in range(1, 8):
        v = divisor_c3_compare("dp5", d).verdict
        assert (v["termV"], v["termW"]) == ((d - 3) * d * d, (d + 3) * d * d)
    with pytest.raises(ChernlabError):
        divisor_c3_data("cubic", 0)
    with pytest.raises(ChernlabError):
        divisor_c3_data("quintic", 1)


# --- Hilbert square ------------------------------------------------------

def test_hk_pipeline(builtins):
    tr = hk_partner_pipeline(builtins("hilb2_k3"))
    v = tr.verdict
    assert v["a"] == 1
    assert v["relation"] == "c1^4 - 4c1^2c2 = 0"
    assert v["general_type"] is False
    assert v["nu"] == (0, 2)
    roots = next(s for s in tr.steps if "roots" in dict(s.values))
    assert roots.value("roots") == (1, Fraction(19, 2))
    k = next(s for s in tr.steps if "k" in dict(s.values))
    assert k.value("k") == Fraction(-1, 384)


def test_hk_relation_oracle(builtins):
    c14, c12c2, c22, c1c3, c4 = sp.symbols("c14 c12c2 c22 c1c3 c4")
    sol = sp.solve([c4 - 324, c14 - 4 * c12c2 + 4 * c22 - 3312, c22 - 2 * c1c3 + 2 * c4 - 1476],
                   [c22, c1c3, c4], dict=True)[0]
    todd = (-c14 + 4 * c12c2 + 3 * c22 + c1c3 - c4) / 720
    residual = sp.expand(todd.subs(sol) - 3)
    assert residual == sp.expand(-(c14 - 4 * c12c2) / 384)


@pytest.mark.parametrize("order", list(itertools.permutations(deduce.HK_EQUATION_ORDER)))
def test_hk_elimination_order_independent(order, builtins):
    assert hk_elimination(builtins("hilb2_k3"), order) == hk_elimination(builtins("hilb2_k3"))


def test_hk_pipeline_rejects_cubic(builtins):
    with pytest.raises(ChernlabError):
        hk_partner_pipeline(builtins("cubic4"))


def test_nef_hypotheses(builtins):
    assert nef_hypotheses_check(builtins("hilb2_k3")) is True
    good = {"kappa_nonnegative": True, "k_two_divisible": True, "fourth_powers_nonnegative": True, "b3": 0}
    assert nef_hypotheses_check(good)
    assert not nef_hypotheses_check({**good, "b3": 2})
    assert not nef_hypotheses_check({**good, "k_two_divisible": False})
    with pytest.raises(ChernlabError, match="b3"):
        nef_hypotheses_check({k: v for k, v in good.items() if k != "b3"})


@pytest.mark.parametrize("n", range(2, 7))
def test_cy_hk(n):
    v = cy_hk_distinction(n).verdict
    assert (v["chi_cy"], v["chi_hk"]) == (2, n + 1)


@pytest.mark.parametrize("n", [0, 1])
def test_cy_hk_small_n(n):
    with pytest.raises(ChernlabError):
        cy_hk_distinction(n)


# --- traces --------------------------------------------------------------

@pytest.mark.parametrize("key", list(PINNED_VERDICTS))
def test_pinned_traces_replay(key):
    tr = _run_pinned(key)
    assert tr.summary == PINNED_VERDICTS[key]
    assert replay(tr) == []
    again = DeductionTrace.from_dict(json.loads(json.dumps(tr.to_dict())))
    assert replay(again) == []


def test_tampered_trace_detected():
    data = run_pipeline("cubic-partner", "cubic4").to_dict()
    data["verdict"]["summary"] = "(r,a)=(5,5)"
    data["steps"][1]["values"]["b4"] = "24"
    problems = replay(DeductionTrace.from_dict(data))
    assert "verdict differs" in problems
    assert any(p.startswith("step 1") for p in problems)


def test_step_tag_validation():
    with pytest.raises(ChernlabError, match="intuition"):
        Step("claim", "intuition", ())


def test_run_pipeline_errors():
    with pytest.raises(ChernlabError, match="unknown pipeline"):
        run_pipeline("nosuch", "cubic4")
    with pytest.raises(ChernlabError, match="needs a target"):
        run_pipeline("index-match")
    with pytest.raises(ChernlabError, match="does not take"):
        run_pipeline("index-match", "cubic4", d=3)
    with pytest.raises(ChernlabError, match="--chi"):
        run_pipeline("bb", dim=4)


def test_custom_resolver():
    seen = []

    def resolve(name):
        seen.append(name)
        return build_builtin("cubic4")

    run_pipeline("index-match", "my-cubic", resolve)
    assert seen == ["my-cubic"]
