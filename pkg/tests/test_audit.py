from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apportion_audit.audit import (AXIOMS, Outcome, check_full_support, check_lipschitz,
                                   check_pairwise_selection, check_pairwise_threshold,
                                   check_selection_monotonicity, check_strengthened_selection,
                                   check_threshold_monotonicity, check_two_coordinate_lipschitz,
                                   check_vote_count_variants)
from apportion_audit.core import VoteProfile, validate_residues
from apportion_audit.rules import ALL_RULES, Rule

from conftest import TABLE1_NEW, TABLE1_PREV, TABLE1_RESIDUES, residue_profiles

F = Fraction


def prof(*values):
    return validate_residues([str(v) if isinstance(v, float) else v for v in values])


PIPAGE_OLD = prof(F(1, 3), F(1, 2), F(1, 3), F(2, 3), F(2, 3), F(1, 2))
PIPAGE_NEW = prof(F(1, 3), F(1, 3), F(1, 3), F(2, 3), F(2, 3), F(2, 3))
SYS_OLD = prof(0.1, 0.1, 0.2, 0.2, 0.5, 0.9)
SYS_NEW = prof(0.1, 0.1, 0.2, 0.2, 0.6, 0.8)


# --- selection family --------------------------------------------------------


def test_pipage_fixed_order_violates_selection():
    v = check_selection_monotonicity("pipage", PIPAGE_OLD, PIPAGE_NEW, (1, 3, 6))
    assert v.violated
    assert v.witness["old"] > 0 and v.witness["new"] == 0


@pytest.mark.parametrize("rule", ALL_RULES)
def test_selection_identity_is_satisfied(rule):
    p = prof(*TABLE1_RESIDUES)
    v = check_selection_monotonicity(rule, p, p, (2, 4, 6))
    assert v.satisfied


def test_selection_precondition_failure_is_inconclusive():
    v = check_selection_monotonicity("sampford", PIPAGE_NEW, PIPAGE_OLD, (1, 3, 6))
    assert v.inconclusive and v.reason
    v = check_selection_monotonicity("sampford", PIPAGE_OLD, PIPAGE_NEW, (1, 3))
    assert v.inconclusive


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_sampford_selection_on_generated_instances(data):
    from apportion_audit.scenarios.search import SearchConfig, generate_instance
    cfg = SearchConfig(axiom="selection", n=6, trial_count=1)
    t = data.draw(st.integers(0, 10**6))
    p, p2, T = generate_instance(cfg, t)
    assert check_selection_monotonicity("sampford", p, p2, T).satisfied


def test_pairwise_systematic_random_order_violates():
    rule = Rule("grimmett", order="random")
    v = check_pairwise_selection(rule, SYS_OLD, SYS_NEW, (1, 2), (3, 4))
    assert v.violated
    assert (v.witness["T1_old"], v.witness["T1_new"]) == (F(1, 100), 0)
    assert (v.witness["T2_old"], v.witness["T2_new"]) == (F(1, 100), F(1, 30))


def test_pairwise_systematic_no_fixed_order_violates():
    import itertools
    for order in itertools.permutations(range(1, 7)):
        v = check_pairwise_selection(Rule("grimmett", order=order), SYS_OLD, SYS_NEW,
                                     (1, 2), (3, 4))
        assert not v.violated, order


def test_pairwise_identity_satisfied():
    assert check_pairwise_selection("sampford", SYS_OLD, SYS_OLD, (1, 2), (3, 4)).satisfied


def test_strengthened_selection_ignores_outside_targets():
    p = prof(0.5, 0.5, 0.5, 0.5)
    p2 = prof(0.5, 0.5, 0.99, 0.01)
    v = check_strengthened_selection("sampford", p, p2, (1, 2))
    assert v.violated
    assert v.witness["old"] == F(1, 6)
    # the ordinary axiom does not apply, since party 3 grows
    assert check_selection_monotonicity("sampford", p, p2, (1, 2)).inconclusive


# --- Lipschitz ----------------------------------------------------------------


def test_lipschitz_identity():
    p = prof(*TABLE1_RESIDUES)
    v = check_lipschitz("sampford", p, p, (1, 2, 3))
    assert v.satisfied


@settings(max_examples=30, deadline=None)
@given(residue_profiles(n_max=6), st.data())
def test_sampford_lipschitz_random_pairs(p, data):
    q = data.draw(residue_profiles(n_min=p.n, n_max=p.n).filter(lambda q: q.k == p.k))
    assert check_lipschitz("sampford", p, q).satisfied


def test_two_coordinate_bound():
    p = prof(*TABLE1_RESIDUES)
    v = check_two_coordinate_lipschitz("sampford", p, 1, 6, F(1, 20))
    assert v.satisfied
    # moving 0.85 out of party 6 (residue 0.8) leaves the domain
    bad = check_two_coordinate_lipschitz("sampford", p, 1, 6, F(17, 20))
    assert bad.inconclusive


# --- threshold family ----------------------------------------------------------


def test_apportia_threshold_violation():
    v = check_threshold_monotonicity("grimmett", VoteProfile.of(TABLE1_NEW, 11),
                                     VoteProfile.of(TABLE1_PREV, 11), (1, 3, 5))
    assert v.violated
    assert v.witness["theta"] == 6
    assert (v.witness["old"], v.witness["new"]) == (F(1, 10), 0)


def test_threshold_identity_and_precondition():
    v = VoteProfile.of(TABLE1_PREV, 11)
    assert check_threshold_monotonicity("sampford", v, v, (1, 3, 5)).satisfied
    v2 = VoteProfile.of(TABLE1_NEW, 11)
    assert check_threshold_monotonicity("sampford", v, v2, (1, 3, 5)).inconclusive
    other_house = VoteProfile.of(TABLE1_PREV, 12)
    assert check_threshold_monotonicity("sampford", v, other_house, (1,)).inconclusive


def test_pairwise_threshold_identity():
    v = VoteProfile.of(TABLE1_PREV, 11)
    assert check_pairwise_threshold("sampford", v, v, (1, 3), (2, 4)).satisfied


def test_grimmett_singletons_pairwise_threshold():
    v = VoteProfile.of(TABLE1_PREV, 11)
    v2 = VoteProfile.of((110, 270, 210, 160, 40, 310), 11)
    res = check_pairwise_threshold("grimmett", v, v2, (6,), (5,))
    assert res.satisfied


VDC_OLD = VoteProfile.of((380, 140, 140, 140), 8)
VDC_NEW = VoteProfile.of((376, 142, 142, 100), 8)


@pytest.mark.parametrize("rule", ALL_RULES)
def test_vote_count_violation_exists(rule):
    found = []
    for T1 in ((2, 3), (2, 4), (3, 4)):
        # relabel v' so the two growing parties are T1
        others = [i for i in (2, 3, 4) if i not in T1]
        new = [376, 0, 0, 0]
        for i in T1:
            new[i - 1] = 142
        new[others[0] - 1] = 100
        res = check_vote_count_variants(rule, VDC_OLD, VoteProfile.of(new, 8), T1, (1,))
        found.append(res.violated)
    assert any(found)


def test_vote_count_identity():
    assert check_vote_count_variants("sampford", VDC_OLD, VDC_OLD, (2, 3), (1,)).satisfied


def test_three_party_vote_count_grid():
    # with n = 3 there is one proportional rule, so every valid pair is satisfied
    for a in range(1, 6):
        for b in range(1, 6):
            v = VoteProfile.of((a, b, 3), 2)
            v2 = VoteProfile.of((a + 1, b, 3), 2)
            for rule in ("sampford", "grimmett"):
                assert not check_vote_count_variants(rule, v, v2, (1,)).violated
                assert not check_vote_count_variants(rule, v, v2, (1,), (2,)).violated


# --- full support ------------------------------------------------------------------


def test_full_support_examples():
    v = VoteProfile.of(TABLE1_PREV, 11)
    assert check_full_support("sampford", v).satisfied
    assert check_full_support("cp", v).satisfied
    res = check_full_support("grimmett", v)
    assert res.violated
    assert (1, 3, 5) in [tuple(s) for s in res.witness["missing"]]


def test_axiom_table():
    assert set(AXIOMS) >= {"selection", "pairwise-selection", "threshold",
                           "pairwise-threshold", "vote-count", "lipschitz", "full-support"}


def test_verdict_outcomes_are_strings():
    assert Outcome.VIOLATED.value == "VIOLATED"
