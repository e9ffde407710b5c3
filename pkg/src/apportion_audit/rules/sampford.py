"""Sampford rounding: exact probability mass and the rejective sampler."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core import InvalidInputError, ResidueProfile, Scalar, Subset, enumerate_k_subsets
from .distribution import KSubsetDistribution

DEFAULT_MAX_RESTARTS = 10**6


class RestartLimitError(RuntimeError):
    """The rejective sampler exceeded its restart budget."""


def sampford_f(subset: Iterable[int], p: Sequence[Scalar]) -> Scalar:
    """f(A) = sum_{i in A}(1 - p_i) * prod_{j in A} p_j * prod_{j not in A}(1 - p_j)."""
    values = list(p)
    members = set(subset)
    slack = sum((1 - values[i - 1] for i in members), values[0] * 0)
    prod = values[0] * 0 + 1
    for j, x in enumerate(values, start=1):
        prod = prod * (x if j in members else 1 - x)
    return slack * prod


def sampford_odds_weight(subset: Iterable[int], p: Sequence[Scalar]) -> Scalar:
    """Unnormalized odds-form mass: sum_{i in A} p_i prod_{j in A, j != i} p_j/(1 - p_j)."""
    values = list(p)
    members = sorted(set(subset))
    total = values[0] * 0
    for i in members:
        term = values[i - 1]
        for j in members:
            if j != i:
                term = term * values[j - 1] / (1 - values[j - 1])
        total = total + term
    return total


def _integer_weights(p: ResidueProfile, k: Optional[int] = None) -> Tuple[List[Tuple[Subset, int]], int, int]:
    """f(A) scaled by D^(n+1) for the common denominator D, as exact integers.

    Returns the weighted subsets of size ``k`` (default p.k), their sum, and
    the scale D^(n+1).
    """
    fr = [Fraction(x) for x in p.residues]
    d = 1
    for x in fr:
        d = d * x.denominator // math.gcd(d, x.denominator)
    a = [x.numerator * (d // x.denominator) for x in fr]
    comp = [d - x for x in a]
    n = p.n
    k = p.k if k is None else k
    out = []
    total = 0
    for subset in enumerate_k_subsets(n, k):
        members = set(subset)
        prod = 1
        slack = 0
        for j in range(1, n + 1):
            if j in members:
                prod *= a[j - 1]
                slack += comp[j - 1]
            else:
                prod *= comp[j - 1]
            if prod == 0:
                break
        w = slack * prod
        out.append((subset, w))
        total += w
    return out, total, d ** (n + 1)


def sampford_weights(p: ResidueProfile):
    """(subset, f(A)) for every k-subset, plus their sum; exact when p is rational."""
    if p.exact:
        items, total, _ = _integer_weights(p)
        return items, total
    items = [(s, sampford_f(s, p.residues)) for s in enumerate_k_subsets(p.n, p.k)]
    return items, sum((w for _, w in items), p[0] * 0)


def sampford_denominator(p: ResidueProfile, size: Optional[int] = None) -> Scalar:
    """Sum of f(A) over all subsets A of the given size (default k)."""
    size = p.k if size is None else size
    if p.exact:
        _, total, scale = _integer_weights(p, size)
        return Fraction(total, scale)
    return sum((sampford_f(s, p.residues) for s in enumerate_k_subsets(p.n, size)), p[0] * 0)


def sampford_distribution(p: ResidueProfile) -> KSubsetDistribution:
    """mass(A) = f(A) / sum over all k-sets A' of f(A')."""
    _check_k(p)
    if p.k == 0:
        return KSubsetDistribution(p.n, 0, {(): p[0] * 0 + 1})
    items, total = sampford_weights(p)
    if p.exact:
        return KSubsetDistribution(p.n, p.k, {s: Fraction(w, total) for s, w in items})
    return KSubsetDistribution(p.n, p.k, {s: w / total for s, w in items})


def sampford_distribution_odds(p: ResidueProfile) -> KSubsetDistribution:
    """The same distribution computed from the odds p/(1 - p) form."""
    _check_k(p)
    items = [(s, sampford_odds_weight(s, p.residues)) for s in enumerate_k_subsets(p.n, p.k)]
    total = sum((w for _, w in items), p[0] * 0)
    return KSubsetDistribution(p.n, p.k, {s: w / total for s, w in items})


def sampford_set_probability(p: ResidueProfile, subset: Iterable[int]) -> Scalar:
    subset = tuple(sorted(subset))
    if len(subset) != p.k:
        return p[0] * 0
    return sampford_distribution(p).prob(subset)


def _check_k(p: ResidueProfile):
    if p.k >= p.n and p.n > 0:
        raise InvalidInputError("k = n is impossible for residues below 1")


def _draw_weights(p: ResidueProfile):
    values = np.array([float(x) for x in p.residues])
    first = values / values.sum()
    odds = np.where(values > 0, values / (1 - values), 0.0)
    return first, odds / odds.sum()


def sampford_sample(p: ResidueProfile, rng=None,
                    max_restarts: int = DEFAULT_MAX_RESTARTS) -> Subset:
    """One draw of the rejective procedure.

    The first party is drawn proportionally to p_i, the remaining k - 1 with
    replacement proportionally to p_i / (1 - p_i); on any repeat, start over.
    ``rng`` is a seed or a numpy Generator.
    """
    _check_k(p)
    if p.k == 0:
        return ()
    rng = np.random.default_rng(rng)
    first, odds = _draw_weights(p)
    n, k = p.n, p.k
    for _ in range(max_restarts + 1):
        draw = [int(rng.choice(n, p=first))]
        draw.extend(int(x) for x in rng.choice(n, size=k - 1, p=odds))
        if len(set(draw)) == k:
            return tuple(sorted(i + 1 for i in draw))
    raise RestartLimitError(f"no distinct draw within {max_restarts} restarts")


def sampford_sample_many(p: ResidueProfile, size: int, rng=None,
                         max_restarts: int = DEFAULT_MAX_RESTARTS) -> np.ndarray:
    """``size`` independent rejective draws, vectorized; returns a (size, n) boolean matrix.

    Rejected rows are redrawn in batches.  As in :func:`sampford_sample`,
    ``max_restarts`` is a per-draw budget, so the batch gives up after
    ``max_restarts * size`` rejected attempts in total.
    """
    _check_k(p)
    rng = np.random.default_rng(rng)
    n, k = p.n, p.k
    out = np.zeros((size, n), dtype=bool)
    if k == 0 or size == 0:
        return out
    first, odds = _draw_weights(p)
    filled = 0
    rejected = 0
    batch = size
    while filled < size:
        draws = np.empty((batch, k), dtype=np.int64)
        draws[:, 0] = rng.choice(n, size=batch, p=first)
        if k > 1:
            draws[:, 1:] = rng.choice(n, size=(batch, k - 1), p=odds)
        srt = np.sort(draws, axis=1)
        ok = np.all(srt[:, 1:] != srt[:, :-1], axis=1) if k > 1 else np.ones(batch, bool)
        good = draws[ok][: size - filled]
        rows = np.arange(filled, filled + len(good))
        out[rows[:, None], good] = True
        filled += len(good)
        rejected += int((~ok).sum())
        if rejected > max_restarts * size and filled < size:
            raise RestartLimitError(f"more than {max_restarts} rejected attempts per draw")
        rate = max(ok.mean(), 1e-3)
        batch = int(min(max((size - filled) / rate * 1.1, 16), 10**6))
    return out
