import itertools
from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apportion_audit.core import (EXACT, Arithmetic, InvalidInputError, ResidueProfile,
                                  VoteProfile, compute_quotas, enumerate_k_subsets,
                                  half_absolute_deviation, parse_mode, parse_subset,
                                  poisson_binomial, to_fraction, truncated_deficit,
                                  validate_residues)
from apportion_audit.rules import sampford_denominator

from conftest import TABLE1_PREV, TABLE1_RESIDUES, residue_profiles

F = Fraction


# --- quotas -----------------------------------------------------------------


def test_table1_previous_quotas():
    bd = compute_quotas(VoteProfile.of(TABLE1_PREV, 11))
    assert bd.quotas == tuple(F(x, 10) for x in (11, 27, 21, 16, 7, 28))
    assert bd.lower_quotas == (1, 2, 2, 1, 0, 2)
    assert bd.residues.residues == TABLE1_RESIDUES
    assert bd.k == 3


def test_integer_quotas_have_no_residue():
    bd = compute_quotas(VoteProfile.of((1, 1), 2))
    assert bd.quotas == (1, 1)
    assert bd.residues.residues == (0, 0)
    assert bd.k == 0


def test_vote_count_instance_residues():
    bd = compute_quotas(VoteProfile.of((380, 140, 140, 140), 8))
    assert bd.residues.residues == (F(4, 5), F(2, 5), F(2, 5), F(2, 5))
    assert bd.k == 2


def test_all_zero_votes_rejected():
    with pytest.raises(InvalidInputError):
        VoteProfile.of((0, 0, 0), 3)


def test_negative_votes_and_bad_house_rejected():
    with pytest.raises(InvalidInputError):
        VoteProfile.of((1, -1), 3)
    with pytest.raises(InvalidInputError):
        VoteProfile.of((1, 1), 0)


@given(st.lists(st.integers(0, 500), min_size=1, max_size=8).filter(any),
       st.integers(1, 30), st.fractions(min_value=F(1, 7), max_value=9))
def test_quotas_are_scale_invariant(votes, h, scale):
    a = compute_quotas(VoteProfile.of(votes, h))
    b = compute_quotas(VoteProfile.of([v * scale for v in votes], h))
    assert a == b


@given(st.lists(st.integers(0, 500), min_size=1, max_size=8).filter(any), st.integers(1, 30))
def test_lower_quotas_plus_k_is_house_size(votes, h):
    bd = compute_quotas(VoteProfile.of(votes, h))
    assert sum(bd.lower_quotas) + bd.k == h
    assert sum(bd.quotas) == h


def test_float_mode_quotas_close_to_exact():
    mode = Arithmetic.floating(128)
    bd = compute_quotas(VoteProfile.of(TABLE1_PREV, 11, mode))
    assert bd.lower_quotas == (1, 2, 2, 1, 0, 2)
    for got, want in zip(bd.quotas, (1.1, 2.7, 2.1, 1.6, 0.7, 2.8)):
        assert abs(got - mpmath.mpf(want)) < 1e-15


# --- residues ---------------------------------------------------------------


def test_validate_residues_examples():
    assert validate_residues(["0.5", "0.5"]).k == 1
    with pytest.raises(InvalidInputError):
        validate_residues(["0.3", "0.3"])
    p = validate_residues([F(1, 3), F(1, 2), F(1, 3), F(2, 3), F(2, 3), F(1, 2)])
    assert p.k == 3


def test_validate_residues_rejects_out_of_range():
    with pytest.raises(InvalidInputError):
        validate_residues([1, 0])
    with pytest.raises(InvalidInputError):
        validate_residues(["-0.1", "0.1"])


def test_float_residue_repair_within_tolerance():
    mode = parse_mode("float:128")
    p = validate_residues([0.5 + 1e-11, 0.5], mode)
    assert p.k == 1
    assert abs(sum(p.residues) - 1) < 1e-30
    with pytest.raises(InvalidInputError):
        validate_residues([0.5 + 1e-6, 0.5], mode)


def test_deficit_accessor():
    p = ResidueProfile(TABLE1_RESIDUES, 3)
    assert p.deficit() == F(9 + 3 + 9, 10)
    assert p.deficit((2, 5, 6)) == F(3 + 3 + 2, 10)


def test_parse_mode_and_to_fraction():
    assert parse_mode("exact") is EXACT
    assert parse_mode("float:256").bits == 256
    with pytest.raises(InvalidInputError):
        parse_mode("double")
    assert to_fraction("0.1") == F(1, 10)
    assert to_fraction(0.1) == F(1, 10)
    with pytest.raises(InvalidInputError):
        to_fraction("abc")


def test_parse_subset():
    assert parse_subset("5,1,3") == (1, 3, 5)
    with pytest.raises(InvalidInputError):
        parse_subset("1,1")
    with pytest.raises(InvalidInputError):
        parse_subset("1,7", n=6)


# --- subsets ----------------------------------------------------------------


@pytest.mark.parametrize("n,k,count", [(3, 3, 1), (4, 2, 6), (12, 3, 220), (5, 0, 1)])
def test_enumerate_k_subsets_counts(n, k, count):
    subsets = list(enumerate_k_subsets(n, k))
    assert len(subsets) == count == len(set(subsets))


def test_enumerate_is_colex():
    subsets = list(enumerate_k_subsets(5, 3))
    assert subsets == sorted(subsets, key=lambda s: tuple(reversed(s)))
    assert subsets[:4] == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]


@given(st.integers(0, 9), st.integers(0, 9))
def test_enumerate_matches_combinations(n, k):
    if k > n:
        with pytest.raises(InvalidInputError):
            list(enumerate_k_subsets(n, k))
        return
    got = list(enumerate_k_subsets(n, k))
    assert len(got) == comb(n, k)
    assert set(got) == set(itertools.combinations(range(1, n + 1), k))


# --- Poisson trials ---------------------------------------------------------


def _brute_pmf(values):
    n = len(values)
    pmf = [F(0)] * (n + 1)
    for bits in itertools.product((0, 1), repeat=n):
        w = F(1)
        for b, q in zip(bits, values):
            w *= q if b else 1 - q
        pmf[sum(bits)] += w
    return pmf


def test_poisson_binomial_examples():
    assert poisson_binomial([F(0)] * 3).prob(0) == 1
    assert poisson_binomial([F(1, 2), F(1, 2)]).pmf == (F(1, 4), F(1, 2), F(1, 4))


def test_poisson_binomial_table1_matches_enumeration():
    assert list(poisson_binomial(ResidueProfile(TABLE1_RESIDUES, 3)).pmf) == \
        _brute_pmf(TABLE1_RESIDUES)


def test_poisson_binomial_exclusion():
    stats = poisson_binomial(ResidueProfile(TABLE1_RESIDUES, 3), exclude=(1, 6))
    assert list(stats.pmf) == _brute_pmf(TABLE1_RESIDUES[1:5])
    assert stats.excluded == (1, 6)
    with pytest.raises(InvalidInputError):
        poisson_binomial(TABLE1_RESIDUES, exclude=(2, 2))


@given(residue_profiles(n_max=7))
def test_poisson_binomial_sums_to_one(p):
    assert sum(poisson_binomial(p).pmf) == 1


def test_poisson_binomial_float_sum():
    mode = Arithmetic.floating(128)
    p = validate_residues([0.1, 0.7, 0.1, 0.6, 0.7, 0.8], mode)
    assert abs(sum(poisson_binomial(p).pmf) - 1) <= 1e-12


def test_truncated_deficit_examples():
    assert truncated_deficit(ResidueProfile((F(1, 2), F(1, 2)), 1)) == F(1, 4)
    assert truncated_deficit(ResidueProfile((F(0),) * 3, 0)) == 0
    p = ResidueProfile(TABLE1_RESIDUES, 3)
    assert truncated_deficit(p) == sampford_denominator(p)


@settings(max_examples=60)
@given(residue_profiles(n_max=7))
def test_truncated_deficit_is_half_absolute_deviation(p):
    assert truncated_deficit(p) == half_absolute_deviation(p)
