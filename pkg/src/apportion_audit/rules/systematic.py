"""Systematic rounding (the rounding rule behind Grimmett's apportionment method).

Parties are laid out as consecutive intervals of length p_i starting at
``offset``; the whole layout is shifted by u ~ Uniform[0, 1) and a party is
selected when its half-open interval [u + c_{i-1}, u + c_i) contains an integer.
"""

from __future__ import annotations

import itertools
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..core import InvalidInputError, ResidueProfile, Subset, ceil_int, frac_part
from .distribution import KSubsetDistribution

MAX_EXACT_RANDOM_ORDER_N = 10


def _check_order(order: Optional[Sequence[int]], n: int) -> Tuple[int, ...]:
    if order is None:
        return tuple(range(1, n + 1))
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(1, n + 1)):
        raise InvalidInputError(f"order {order} is not a permutation of 1..{n}")
    return order


def _prefix_sums(p: ResidueProfile, order, offset):
    c = [p[0] * 0 + offset]
    for i in order:
        c.append(c[-1] + p[i - 1])
    return c


def systematic_selection(p: ResidueProfile, u, order: Optional[Sequence[int]] = None,
                         offset=0) -> Subset:
    """The set selected for one realization of the shift ``u``."""
    order = _check_order(order, p.n)
    c = _prefix_sums(p, order, offset)
    chosen = [party for pos, party in enumerate(order)
              if ceil_int(u + c[pos + 1]) - ceil_int(u + c[pos]) >= 1]
    return tuple(sorted(chosen))


def systematic_distribution(p: ResidueProfile, order: Optional[Sequence[int]] = None,
                            offset=0) -> KSubsetDistribution:
    """Exact distribution by sweeping the breakpoints of the shift u.

    The selected set only changes where u + c_i crosses an integer, i.e. at
    u = frac(-c_i); between consecutive breakpoints the set is constant and
    its probability is the gap length.
    """
    order = _check_order(order, p.n)
    if p.k == 0:
        return KSubsetDistribution(p.n, 0, {(): p[0] * 0 + 1})
    c = _prefix_sums(p, order, offset)
    zero = c[0] * 0
    points = sorted({frac_part(-x) for x in c} | {zero, zero + 1})
    items = []
    for lo, hi in zip(points, points[1:]):
        if hi > lo:
            items.append((systematic_selection(p, (lo + hi) / 2, order, offset), hi - lo))
    return KSubsetDistribution.from_items(p.n, p.k, items)


def systematic_random_order_distribution(p: ResidueProfile) -> KSubsetDistribution:
    """Average of the fixed-order distribution over all n! orders.

    Rotating the order cyclically only translates the shift u modulo 1, so it
    suffices to average over the (n-1)! orders that start with party 1.
    """
    n = p.n
    if n > MAX_EXACT_RANDOM_ORDER_N:
        raise InvalidInputError(
            f"exact random-order averaging is limited to n <= {MAX_EXACT_RANDOM_ORDER_N}; "
            "use systematic_random_order_estimate for larger profiles")
    if n == 1:
        return systematic_distribution(p)
    acc: Dict[Subset, object] = {}
    count = 0
    for rest in itertools.permutations(range(2, n + 1)):
        count += 1
        for subset, m in systematic_distribution(p, (1,) + rest):
            acc[subset] = acc[subset] + m if subset in acc else m
    return KSubsetDistribution.from_items(p.n, p.k, ((s, m / count) for s, m in acc.items()))


def _float_prefix(p: ResidueProfile, order) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum([float(p[i - 1]) for i in order])])


def systematic_sample(p: ResidueProfile, rng=None, order: Optional[Sequence[int]] = None) -> Subset:
    """One draw of systematic rounding; ``rng`` is a seed or numpy Generator."""
    rng = np.random.default_rng(rng)
    order = _check_order(order, p.n)
    u = rng.random()
    c = _float_prefix(p, order)
    counts = np.ceil(u + c[1:]) - np.ceil(u + c[:-1])
    return tuple(sorted(party for party, hit in zip(order, counts) if hit >= 1))


def systematic_sample_many(p: ResidueProfile, size: int, rng=None,
                           order: Optional[Sequence[int]] = None,
                           random_order: bool = False) -> np.ndarray:
    """``size`` independent draws as a boolean (size, n) inclusion matrix.

    With ``random_order`` a fresh uniformly random order is used for each draw.
    """
    rng = np.random.default_rng(rng)
    n = p.n
    values = np.array([float(x) for x in p.residues])
    u = rng.random(size)[:, None]
    if random_order:
        orders = np.argsort(rng.random((size, n)), axis=1)
    else:
        orders = np.broadcast_to(np.array(_check_order(order, n)) - 1, (size, n))
    lengths = values[orders]
    c = np.concatenate([np.zeros((size, 1)), np.cumsum(lengths, axis=1)], axis=1)
    hits = (np.ceil(u + c[:, 1:]) - np.ceil(u + c[:, :-1])) >= 1
    out = np.zeros((size, n), dtype=bool)
    np.put_along_axis(out, orders, hits, axis=1)
    return out


def systematic_random_order_estimate(p: ResidueProfile, draws: int = 100_000,
                                     rng=None) -> Dict[Subset, Tuple[float, float]]:
    """Monte Carlo estimate (mean, standard error) of the random-order distribution."""
    if draws < 1:
        raise InvalidInputError("draws must be positive")
    hits = systematic_sample_many(p, draws, rng, random_order=True)
    return _frequencies(hits, draws)


def _frequencies(hits: np.ndarray, draws: int) -> Dict[Subset, Tuple[float, float]]:
    counts: Dict[Subset, int] = {}
    for row in hits:
        key = tuple(int(i) + 1 for i in np.flatnonzero(row))
        counts[key] = counts.get(key, 0) + 1
    out = {}
    for key in sorted(counts, key=lambda s: tuple(reversed(s))):
        f = counts[key] / draws
        out[key] = (f, math.sqrt(f * (1 - f) / draws))
    return out
