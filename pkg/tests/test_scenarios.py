from fractions import Fraction

import pytest

from apportion_audit.audit import Outcome
from apportion_audit.core import InvalidInputError
from apportion_audit.scenarios import (get_scenario, list_scenarios, match_scenarios,
                                       run_scenario)

F = Fraction

EXPECTED_IDS = {"apportia", "pipage-fixed", "pipage-random", "cp-huge", "pairwise-pipage",
                "pairwise-systematic", "pairwise-cp", "fdco-family", "vdc", "gpp-house",
                "strengthened-impossible"}

# scenarios whose every check holds; the other two are covered below and in
# the acceptance suite
CLEAN = sorted(EXPECTED_IDS - {"pairwise-pipage", "fdco-family"})


def test_registry_contents():
    assert {sc.id for sc in list_scenarios()} == EXPECTED_IDS
    for sc in list_scenarios():
        assert sc.expected in (Outcome.VIOLATED, Outcome.SATISFIED)


def test_lookup_by_alias_and_pattern():
    assert get_scenario("cp-pairwise").id == "pairwise-cp"
    assert {sc.id for sc in match_scenarios("cp-*")} == {"cp-huge", "pairwise-cp"}
    assert match_scenarios("no-such-*") == []
    with pytest.raises(InvalidInputError):
        get_scenario("no-such")


@pytest.mark.parametrize("name", CLEAN)
def test_scenario_passes(name):
    res = run_scenario(name)
    assert res.passed, [(c.name, c.detail) for c in res.failures]
    assert all(v.outcome == res.scenario.expected for v in res.verdicts
               if v.outcome != Outcome.SATISFIED or res.scenario.expected == Outcome.SATISFIED)


def test_apportia_witness():
    res = run_scenario("apportia")
    (v,) = res.verdicts
    assert v.witness["theta"] == 6
    assert (v.witness["old"], v.witness["new"]) == (F(1, 10), 0)


def test_cp_huge_is_pure_rational():
    res = run_scenario("cp-huge")
    for v in res.verdicts:
        for value in v.witness.values():
            if isinstance(value, (int, F)):
                continue
            if isinstance(value, (tuple, list)):
                assert all(isinstance(x, (int, F)) for x in value)


def test_pairwise_pipage_violation_and_bounds():
    res = run_scenario("pairwise-pipage")
    (v,) = res.verdicts
    assert v.violated
    assert v.witness["T1_old"] >= F(11, 1000)
    assert v.witness["T2_old"] <= F(12, 100)
    assert v.witness["T2_new"] >= F(1204, 10000)
    # exact value sits above the 0.01 bound; the acceptance suite keeps the bound
    assert F(10, 1000) < v.witness["T1_new"] < F(11, 1000)


def test_fdco_small_sweep_finds_nothing():
    res = run_scenario("fdco-family", m_values=[2, 16, 64])
    assert all(v.inconclusive for v in res.verdicts)
    for v in res.verdicts:
        assert 0 < float(v.witness["epsilon"]) < 1e-6


def test_fdco_extended_sweep_finds_violation():
    res = run_scenario("fdco-family", m_values=[2 ** i for i in range(1, 21)])
    assert res.passed
    ms = {v.instance["rule"]: v.witness["m"] for v in res.verdicts}
    assert ms == {"sampford": 32768, "cp": 16384}
    for v in res.verdicts:
        assert v.witness["T1_violations"] == [3] and v.witness["T2_violations"] == [2]


def test_vdc_reports_each_rule():
    res = run_scenario("vdc")
    assert {v.instance["rule"] for v in res.verdicts} == {"grimmett", "pipage", "cp", "sampford"}
    assert all(v.violated for v in res.verdicts)


def test_unknown_scenario():
    with pytest.raises(InvalidInputError):
        run_scenario("nope")
