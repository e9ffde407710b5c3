from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apportion_audit.audit import (check_house_monotonicity_witness, check_sampford_derivative,
                                   construct_shift, sampford_directional_derivative,
                                   verify_denominator_identity, verify_derivative_formula,
                                   verify_expectation_bound, verify_probability_bound,
                                   verify_telescoping_step)
from apportion_audit.audit.lemmas import canonical_order
from apportion_audit.core import (Arithmetic, InvalidInputError, ResidueProfile, poisson_binomial,
                                  validate_residues)
from apportion_audit.rules import ALL_RULES, Rule

from conftest import TABLE1_RESIDUES, profiles, residue_profiles

F = Fraction
HALF = ResidueProfile((F(1, 2), F(1, 2)), 1)
TABLE1 = ResidueProfile(TABLE1_RESIDUES, 3)


def test_denominator_identity_half():
    v = verify_denominator_identity(HALF)
    assert v.satisfied
    assert v.witness["subset_sum"] == v.witness["truncated_deficit"] == F(1, 4)


def test_denominator_identity_zero_profile():
    v = verify_denominator_identity(ResidueProfile((F(0),) * 3, 0))
    assert v.satisfied and v.witness["half_abs_dev"] == 0


@settings(max_examples=50)
@given(residue_profiles(n_max=8))
def test_denominator_identity_property(p):
    assert verify_denominator_identity(p).satisfied


def test_denominator_identity_float_mode():
    p = validate_residues(["0.1", "0.7", "0.1", "0.6", "0.7", "0.8"], Arithmetic.floating(128))
    assert verify_denominator_identity(p).satisfied


def test_telescoping_l0():
    v = verify_telescoping_step(TABLE1, 0)
    prod = F(1)
    for x in TABLE1_RESIDUES:
        prod *= 1 - x
    assert v.witness["rhs"] == 3 * prod
    assert v.satisfied


@pytest.mark.parametrize("ell", range(6))
def test_telescoping_table1(ell):
    assert verify_telescoping_step(TABLE1, ell).satisfied


@settings(max_examples=30)
@given(residue_profiles(n_max=6), st.data())
def test_telescoping_random(p, data):
    ell = data.draw(st.integers(0, p.n - 1))
    assert verify_telescoping_step(p, ell).satisfied


def test_telescoping_out_of_range():
    assert verify_telescoping_step(TABLE1, 6).inconclusive


def test_expectation_bound_half():
    v = verify_expectation_bound(HALF)
    assert v.witness["expectation"] == F(1, 2)
    assert v.witness["bound"] == 1
    assert v.satisfied


def test_expectation_bound_near_integral():
    eps = F(1, 10**6)
    p = ResidueProfile((1 - eps, 1 - eps, eps, eps), 2)
    v = verify_expectation_bound(p)
    assert v.satisfied and v.witness["bound"] < F(1, 10**5)


@settings(max_examples=50)
@given(residue_profiles(n_max=8))
def test_expectation_bound_property(p):
    assert verify_expectation_bound(p).satisfied


def test_derivative_formula_symmetric_ends():
    p = ResidueProfile((F(1, 4), F(1, 2), F(1, 2), F(3, 4), F(1, 4)), 2)
    v = verify_derivative_formula(p)
    assert v.witness["formula"] == 0
    assert v.satisfied


def test_derivative_formula_table1():
    v = verify_derivative_formula(TABLE1)
    assert v.satisfied
    assert v.witness["gap"] == 0


@settings(max_examples=40)
@given(residue_profiles(n_max=8, denom=60))
def test_derivative_formula_property(p):
    v = verify_derivative_formula(p)
    assert v.satisfied or v.inconclusive


def test_probability_bound_trivial_when_s_large():
    v = verify_probability_bound(ResidueProfile((F(1, 2),) * 4, 2))
    assert v.witness["bound"] <= 0 and v.satisfied


def test_probability_bound_active_case():
    eps = F(1, 100)
    p = ResidueProfile((1 - eps, 1 - eps, 1 - eps, eps, eps, eps), 3)
    v = verify_probability_bound(p)
    assert v.witness["bound"] > 0
    assert v.satisfied


@settings(max_examples=50)
@given(residue_profiles(n_max=8, positive=True))
def test_probability_bound_property(p):
    assert verify_probability_bound(p).satisfied


def test_probability_bound_uses_b_hat():
    q = TABLE1.permuted(canonical_order(TABLE1))
    v = verify_probability_bound(TABLE1)
    assert v.witness["probability"] == poisson_binomial(q, exclude=(1, 6)).prob(2)


# --- derivative of P[S = [k]] ----------------------------------------------------


def test_sampford_derivative_symmetric_profile():
    p = ResidueProfile((F(1, 2),) * 4, 2)
    assert sampford_directional_derivative(p, 1, 4) >= 0
    assert check_sampford_derivative(p).satisfied


def test_sampford_derivative_random_profiles():
    rng = np.random.default_rng(5)
    for p in profiles(31, 60, n_max=8):
        q = p.permuted(canonical_order(p))
        if not q[0] > 0:
            continue
        grow = int(rng.integers(1, q.k + 1))
        shrink = int(rng.integers(q.k + 1, q.n + 1))
        if not q[grow - 1] > 0:
            continue
        v = check_sampford_derivative(q, grow, shrink)
        assert not v.violated, v


def test_sampford_derivative_hard_case():
    # residues in [k] close to 1, so s < p_1
    p = ResidueProfile((F(97, 100), F(96, 100), F(95, 100), F(5, 100), F(4, 100), F(3, 100)), 3)
    assert p.deficit() < p[0]
    for grow in (1, 2, 3):
        for shrink in (4, 5, 6):
            assert check_sampford_derivative(p, grow, shrink).satisfied


def test_sampford_derivative_step_out_of_domain():
    p = ResidueProfile((F(1, 2), F(1, 2), F(1, 2), F(1, 10**6), 1 - F(1, 10**6)), 2)
    with pytest.raises(InvalidInputError):
        sampford_directional_derivative(p, 1, 4)
    assert check_sampford_derivative(p, 1, 4).inconclusive


# --- shift lemma and house monotonicity ----------------------------------------------


def test_shift_all_zero():
    w = construct_shift(0, 0, 0, 0, 0)
    assert w.u0 == 0 and w.valid


def test_shift_first_case():
    w = construct_shift(-1, 1, -2, 3, -1)
    assert w.u0 == 1 and w.valid


def test_shift_second_case():
    w = construct_shift(-1, 3, -1, 1, -2)
    assert w.u0 == -1 and w.valid


def test_shift_rejects_bad_signs():
    with pytest.raises(InvalidInputError):
        construct_shift(1, 0, 0, 0, -1)
    with pytest.raises(InvalidInputError):
        construct_shift(-1, 2, 0, 0, 0)


@st.composite
def shift_inputs(draw):
    nonpos = st.fractions(max_value=0, min_value=-5, max_denominator=50)
    nonneg = st.fractions(min_value=0, max_value=5, max_denominator=50)
    a, c = draw(nonpos), draw(nonpos)
    b, d = draw(nonneg), draw(nonneg)
    e = -(a + b + c + d)
    if e > 0:
        # the negative parts outweigh the positive ones; let b absorb the gap
        b, e = b + e, F(0)
    return a, b, c, d, e


@given(shift_inputs())
def test_shift_property(args):
    assert construct_shift(*args).valid


@pytest.mark.parametrize("rule", ["sampford", "cp", "grimmett"])
def test_house_witness_positive(rule):
    assert check_house_monotonicity_witness(rule).violated


def test_house_witness_pipage_some_order():
    import itertools
    orders = itertools.permutations(range(1, 5))
    assert any(check_house_monotonicity_witness(Rule("pipage", order=o)).violated for o in orders)


def test_house_witness_all_rules_numeric():
    for name in ALL_RULES:
        v = check_house_monotonicity_witness(name)
        assert v.violated or v.inconclusive
