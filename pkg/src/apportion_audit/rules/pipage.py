"""Pipage rounding (the pivotal method), exact distribution and sampler."""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core import InvalidInputError, ResidueProfile, Subset
from .distribution import KSubsetDistribution
from .systematic import _check_order

MAX_EXACT_RANDOM_ORDER_N = 8


def _snap(x, tol):
    if tol and abs(x) <= tol:
        return x * 0
    if tol and abs(1 - x) <= tol:
        return x * 0 + 1
    return x


def _pivot(pi, pj):
    """The two outcomes of one pipage step as (prob, new_pi, new_pj) pairs."""
    total = pi + pj
    if total <= 1:
        w = pi / total
        return ((w, total, total * 0), (1 - w, total * 0, total))
    w = (1 - pj) / (2 - total)
    return ((w, total * 0 + 1, total - 1), (1 - w, total - 1, total * 0 + 1))


def pipage_distribution(p: ResidueProfile, order: Optional[Sequence[int]] = None,
                        tol=0) -> KSubsetDistribution:
    """Exact distribution of pipage rounding with parties processed in ``order``.

    Each step takes the first two fractional values in ``order``; one of them
    becomes integral, so the process is a single carry that meets each later
    fractional party in turn.  Every branch of the carry is enumerated.
    ``tol`` snaps near-integral values in float mode.
    """
    order = _check_order(order, p.n)
    one = p[0] * 0 + 1
    if p.k == 0:
        return KSubsetDistribution(p.n, 0, {(): one})
    fractional = [i for i in order if 0 < p[i - 1] < 1]
    items = []

    def walk(idx: int, carrier: Optional[int], carry, chosen: List[int], prob):
        if prob == 0:
            return
        if idx == len(fractional):
            if carrier is not None and carry == 1:
                chosen = chosen + [carrier]
            items.append((tuple(chosen), prob))
            return
        nxt = fractional[idx]
        if carrier is None:
            walk(idx + 1, nxt, p[nxt - 1], chosen, prob)
            return
        for w, a, b in _pivot(carry, p[nxt - 1]):
            a, b = _snap(a, tol), _snap(b, tol)
            new_chosen = chosen + [i for i, v in ((carrier, a), (nxt, b)) if v == 1]
            live = [(i, v) for i, v in ((carrier, a), (nxt, b)) if 0 < v < 1]
            if live:
                walk(idx + 1, live[0][0], live[0][1], new_chosen, prob * w)
            else:
                walk(idx + 1, None, None, new_chosen, prob * w)

    walk(0, None, None, [], one)
    return KSubsetDistribution.from_items(p.n, p.k, items)


def pipage_random_order_distribution(p: ResidueProfile) -> KSubsetDistribution:
    """Uniform average of :func:`pipage_distribution` over all n! orders."""
    n = p.n
    if n > MAX_EXACT_RANDOM_ORDER_N:
        raise InvalidInputError(
            f"exact random-order pipage is limited to n <= {MAX_EXACT_RANDOM_ORDER_N}; "
            "use pipage_sample with random orders for larger profiles")
    acc: Dict[Subset, object] = {}
    count = 0
    for order in itertools.permutations(range(1, n + 1)):
        count += 1
        for subset, m in pipage_distribution(p, order):
            acc[subset] = acc[subset] + m if subset in acc else m
    return KSubsetDistribution.from_items(n, p.k, ((s, m / count) for s, m in acc.items()))


def pipage_sample(p: ResidueProfile, rng=None, order: Optional[Sequence[int]] = None) -> Subset:
    """One pipage draw in float arithmetic; ``order=None`` draws a random order."""
    rng = np.random.default_rng(rng)
    n = p.n
    if order is None:
        order = tuple(int(i) + 1 for i in rng.permutation(n))
    order = _check_order(order, n)
    values = {i: float(p[i - 1]) for i in order}
    eps = 1e-12
    chosen = [i for i in order if values[i] >= 1 - eps]
    carrier = None
    for i in order:
        if not eps < values[i] < 1 - eps:
            continue
        if carrier is None:
            carrier = i
            continue
        (w, a, b), (_, a2, b2) = _pivot(values[carrier], values[i])
        if rng.random() >= w:
            a, b = a2, b2
        values[carrier], values[i] = a, b
        for j in (carrier, i):
            if values[j] >= 1 - eps:
                chosen.append(j)
        live = [j for j in (carrier, i) if eps < values[j] < 1 - eps]
        carrier = live[0] if live else None
    return tuple(sorted(chosen))
