"""Acceptance gate: one PASS/FAIL line per criterion, printed even under capture.

Tolerances, trial counts and time budgets are pinned constants below.  A
criterion that does not hold fails its test; nothing here is relaxed to make
it pass.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from apportion_audit.apportion import CoalitionQuery, coalition_threshold_prob, induce_apportionment
from apportion_audit.audit import (construct_shift, verify_denominator_identity,
                                   verify_derivative_formula)
from apportion_audit.core import ResidueProfile, VoteProfile
from apportion_audit.rules import ALL_RULES, Rule
from apportion_audit.rules.sampford import (sampford_distribution, sampford_sample,
                                            sampford_sample_many)
from apportion_audit.rules.systematic import systematic_distribution, systematic_sample_many
from apportion_audit.scenarios import SearchConfig, run_scenario, search_counterexamples
from apportion_audit.scenarios.search import _bounded_split

from conftest import TABLE1_NEW, TABLE1_PREV, profiles

F = Fraction

APPORTIA_BUDGET_S = 1.0
PROPORTIONALITY_PROFILES = 1000
PROPORTIONALITY_BUDGET_S = 300.0
CP_RESIDUAL = 1e-12
SELECTION_TRIALS = 10_000
SELECTION_BUDGET_S = 600.0
DENOMINATOR_PROFILES = 1000
DERIVATIVE_PROFILES = 100
DERIVATIVE_STEP = 1e-5
DERIVATIVE_TOL = 1e-8
LIPSCHITZ_PAIRS = 10_000
COUNTEREXAMPLE_BUDGET_S = 1800.0
GRIMMETT_TRIALS = 10_000
SHIFT_TUPLES = 10_000
CONJECTURE_TRIALS = 100_000
CHI_DRAWS = 100_000
CHI_PROFILES = 20
CHI_ALPHA = 0.001
MAX_N = 8


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line straight to the terminal, then assert."""
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


def _search(**kw):
    res = search_counterexamples(SearchConfig(**kw))
    detail = f"{res.trials} trials, {res.inconclusive} inconclusive, {res.seconds:.1f}s"
    if res.found:
        detail += f", witness at trial {res.trial_index}: {res.witness.witness}"
    return res, detail


def test_01_apportia(verdict):
    start = time.perf_counter()
    q = CoalitionQuery((1, 3, 5), 6)
    old = coalition_threshold_prob(induce_apportionment("grimmett", VoteProfile.of(TABLE1_PREV, 11)), q)
    new = coalition_threshold_prob(induce_apportionment("grimmett", VoteProfile.of(TABLE1_NEW, 11)), q)
    elapsed = time.perf_counter() - start
    ok = (isinstance(new, F) and old == 0 and new == F(1, 10)
          and elapsed < APPORTIA_BUDGET_S)
    verdict(1, ok, f"P previous={old}, new={new}, {elapsed:.3f}s")


def test_02_proportionality(verdict):
    start = time.perf_counter()
    bad, worst_cp = [], 0.0
    for name in ALL_RULES:
        rule = Rule(name)
        for p in profiles(2, PROPORTIONALITY_PROFILES, n_max=MAX_N):
            marg = rule.distribution(p).marginals()
            if name == "cp":
                err = max(abs(float(m) - float(x)) for m, x in zip(marg, p.residues))
                worst_cp = max(worst_cp, err)
                if err > CP_RESIDUAL:
                    bad.append((name, p.residues))
            elif list(marg) != list(p.residues):
                bad.append((name, p.residues))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < PROPORTIONALITY_BUDGET_S
    verdict(2, ok, f"{len(bad)} mismatches over {len(ALL_RULES)}x{PROPORTIONALITY_PROFILES} "
                   f"profiles, worst cp error {worst_cp:.2e}, {elapsed:.1f}s")


def test_03_sampford_selection(verdict):
    res, detail = _search(axiom="selection", n=MAX_N, trial_count=SELECTION_TRIALS, rng_seed=3)
    verdict(3, not res.found and res.seconds < SELECTION_BUDGET_S, detail)


def test_04_sampford_pairwise_selection(verdict):
    res, detail = _search(axiom="pairwise-selection", n=MAX_N, trial_count=SELECTION_TRIALS,
                          rng_seed=4)
    verdict(4, not res.found, detail)


def test_05_denominator_identity(verdict):
    failures = [p.residues for p in profiles(5, DENOMINATOR_PROFILES, n_max=10)
                if not verify_denominator_identity(p).satisfied]
    verdict(5, not failures, f"{len(failures)} failures on {DENOMINATOR_PROFILES} profiles, n<=10")


def _interior_profile(rng, n_max=MAX_N, d=60):
    # residues in [1/d, 1 - 1/d], so the finite-difference step stays inside [0, 1]
    n = int(rng.integers(3, n_max + 1))
    k = int(rng.integers(1, n))
    values = [a + 1 for a in _bounded_split(rng, k * d - n, [d - 2] * n)]
    return ResidueProfile(tuple(F(a, d) for a in values), k)


def test_06_derivative_formula(verdict):
    worst, failures = 0.0, 0
    for t in range(DERIVATIVE_PROFILES):
        p = _interior_profile(np.random.default_rng([6, t]))
        v = verify_derivative_formula(p, step=DERIVATIVE_STEP, tol=DERIVATIVE_TOL)
        worst = max(worst, float(v.witness.get("gap", 0)))
        failures += not v.satisfied
    verdict(6, failures == 0,
            f"{failures} failures on {DERIVATIVE_PROFILES} profiles, worst gap {worst:.2e}")


def test_07_lipschitz(verdict):
    res1, d1 = _search(axiom="lipschitz", n=MAX_N, trial_count=LIPSCHITZ_PAIRS, rng_seed=7)
    res2, d2 = _search(axiom="lipschitz-2delta", n=MAX_N, trial_count=LIPSCHITZ_PAIRS, rng_seed=7)
    verdict(7, not (res1.found or res2.found), f"L1 bound: {d1}; 2-delta bound: {d2}")


def test_08_selection_counterexamples(verdict):
    names = ["pipage-fixed", "pipage-random", "cp-huge", "pairwise-pipage",
             "pairwise-systematic", "pairwise-cp"]
    start = time.perf_counter()
    failed = []
    for name in names:
        res = run_scenario(name)
        failed += [f"{name}:{c.name} ({c.detail})" for c in res.failures]
    elapsed = time.perf_counter() - start
    ok = not failed and elapsed < COUNTEREXAMPLE_BUDGET_S
    verdict(8, ok, f"{len(names)} scenarios, {elapsed:.1f}s"
                   + (f", failed checks: {'; '.join(failed)}" if failed else ""))


def test_09_grimmett_small_coalitions(verdict):
    res, detail = _search(rule="grimmett", axiom="threshold", n=MAX_N, coalition_size=(1, 2),
                          trial_count=GRIMMETT_TRIALS, rng_seed=9)
    rng = np.random.default_rng(9)
    invalid = 0
    for _ in range(SHIFT_TUPLES):
        a, c = (-F(int(x), 50) for x in rng.integers(0, 251, size=2))
        b, d = (F(int(x), 50) for x in rng.integers(0, 251, size=2))
        e = -(a + b + c + d)
        if e > 0:
            b, e = b + e, F(0)
        invalid += not construct_shift(a, b, c, d, e).valid
    verdict(9, not res.found and invalid == 0,
            f"threshold search: {detail}; construct_shift invalid on {invalid}/{SHIFT_TUPLES}")


def test_10_impossibility(verdict):
    vdc = run_scenario("vdc")
    fdco = run_scenario("fdco-family")
    outcomes = {v.instance["rule"]: v.outcome.value for v in fdco.verdicts}
    ok = vdc.passed and fdco.passed
    verdict(10, ok, f"vdc {'passes' if vdc.passed else 'fails'} for all four rules; "
                    f"fdco-family m<=64: {outcomes}")


def test_11_conjecture_harness(verdict):
    res, detail = _search(axiom="threshold", n=MAX_N, trial_count=CONJECTURE_TRIALS, rng_seed=11)
    verdict(11, not res.found, detail)


def _chi_square(dist, hits):
    index = {s: i for i, s in enumerate(dist.support())}
    counts = np.zeros(len(index) + 1)
    for row in hits:
        key = tuple(int(i) + 1 for i in np.flatnonzero(row))
        counts[index.get(key, len(index))] += 1
    if counts[-1]:
        return 0.0
    expected = np.array([float(dist.prob(s)) for s in index]) * len(hits)
    return chisquare(counts[:-1], expected * counts[:-1].sum() / expected.sum()).pvalue


def test_12_sampler_fidelity(verdict):
    low = []
    worst = 1.0
    for t, p in enumerate(profiles(12, CHI_PROFILES, n_min=3, n_max=6)):
        for name, dist, hits in (
                ("sampford", sampford_distribution(p), sampford_sample_many(p, CHI_DRAWS, [12, t])),
                ("systematic", systematic_distribution(p),
                 systematic_sample_many(p, CHI_DRAWS, [12, t]))):
            pv = _chi_square(dist, hits)
            worst = min(worst, pv)
            if pv < CHI_ALPHA:
                low.append((name, t, pv))
    # the scalar rejective sampler on one profile at the full draw count
    p = next(profiles(12, 1, n_min=6, n_max=6))
    rng = np.random.default_rng(120)
    rows = np.zeros((CHI_DRAWS, p.n), dtype=bool)
    for r in range(CHI_DRAWS):
        rows[r, [i - 1 for i in sampford_sample(p, rng)]] = True
    scalar_pv = _chi_square(sampford_distribution(p), rows)
    ok = not low and scalar_pv >= CHI_ALPHA
    verdict(12, ok, f"{2 * CHI_PROFILES} batch tests, smallest p-value {worst:.4f}; "
                    f"scalar sampler p-value {scalar_pv:.4f}"
                    + (f"; below alpha: {low}" if low else ""))
