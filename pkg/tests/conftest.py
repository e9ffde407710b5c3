"""Shared generators for random rational instances."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from apportion_audit.core import ResidueProfile
from apportion_audit.scenarios.search import _bounded_split

TABLE1_PREV = (110, 270, 210, 160, 70, 280)
TABLE1_NEW = (110, 290, 210, 190, 10, 290)
TABLE1_RESIDUES = tuple(Fraction(x, 10) for x in (1, 7, 1, 6, 7, 8))


def random_profile(rng, n_min=2, n_max=8, denom=60, k=None) -> ResidueProfile:
    """Random rational residues a_i/d in [0, 1) summing to an integer k in 1..n-1."""
    n = int(rng.integers(n_min, n_max + 1))
    d = max(denom, n)
    k = int(rng.integers(1, n)) if k is None else k
    values = _bounded_split(rng, k * d, [d - 1] * n)
    return ResidueProfile(tuple(Fraction(a, d) for a in values), k)


def profiles(seed, count, **kw):
    for t in range(count):
        yield random_profile(np.random.default_rng([seed, t]), **kw)


@st.composite
def residue_profiles(draw, n_min=2, n_max=6, denom=24, positive=False):
    """Hypothesis strategy for exact residue profiles with 1 <= k <= n - 1."""
    n = draw(st.integers(n_min, n_max))
    k = draw(st.integers(1, n - 1))
    lo, hi = (1 if positive else 0), denom - 1
    need = k * denom
    values = []
    for slot in range(n):
        rest = n - slot - 1
        a = draw(st.integers(max(lo, need - rest * hi), min(hi, need - rest * lo)))
        values.append(a)
        need -= a
    return ResidueProfile(tuple(Fraction(a, denom) for a in values), k)


@pytest.fixture
def table1():
    return ResidueProfile(TABLE1_RESIDUES, 3)
