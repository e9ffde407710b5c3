"""Randomized search for counterexamples to the monotonicity axioms.

Trial ``t`` draws its instance from ``numpy.random.default_rng([seed, t])``,
so results depend only on the configuration, never on scheduling.  With
several workers the trial range is split into chunks and the witness with
the smallest trial index wins.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..audit import (AuditVerdict, check_lipschitz, check_pairwise_selection,
                     check_selection_monotonicity, check_threshold_monotonicity,
                     check_two_coordinate_lipschitz)
from ..core import (InvalidInputError, ResidueProfile, VoteProfile, compute_quotas)
from ..rules import Rule, as_rule
from ..rules.sampford import _integer_weights

SEARCH_AXIOMS = ("threshold", "selection", "pairwise-selection", "lipschitz", "lipschitz-2delta")
SCHEMES = ("crossing", "local")
THREADS_ENV = "APPORTION_AUDIT_THREADS"


@dataclass(frozen=True)
class SearchConfig:
    """What to search and how.

    ``n`` is the largest party count; each trial draws its size from
    ``min_n..n``.  ``scheme`` is "crossing" (vote transfers may move lower
    quotas) or "local" (lower quotas stay fixed).  ``seeds`` are explicit
    instances tried before the random ones; they count as trials.
    """

    rule: object = "sampford"
    axiom: str = "threshold"
    n: int = 6
    k: Optional[int] = None
    trial_count: int = 1000
    rng_seed: int = 0
    scheme: str = "crossing"
    min_n: int = 3
    coalition_size: Optional[object] = None
    house_size: Optional[int] = None
    denominator: int = 60
    max_votes: int = 1000
    seeds: Tuple = field(default=(), compare=False)
    workers: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "rule", as_rule(self.rule))
        if isinstance(self.trial_count, bool) or int(self.trial_count) != self.trial_count \
                or self.trial_count < 1:
            raise InvalidInputError("trial_count must be a positive integer")
        if self.axiom not in SEARCH_AXIOMS:
            raise InvalidInputError(f"axiom must be one of {SEARCH_AXIOMS}")
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"scheme must be one of {SCHEMES}")
        if self.n < 2 or not 2 <= self.min_n <= self.n:
            raise InvalidInputError("need 2 <= min_n <= n")
        if self.k is not None and not 1 <= self.k <= self.min_n - 1:
            raise InvalidInputError("k must lie in 1..min_n-1")
        if self.coalition_size is not None:
            sizes = self.coalition_size
            sizes = (sizes,) if isinstance(sizes, int) else tuple(sorted(set(sizes)))
            if not sizes or not all(1 <= c <= self.min_n - 1 for c in sizes):
                raise InvalidInputError("coalition sizes must lie in 1..min_n-1")
            object.__setattr__(self, "coalition_size", sizes)
        if self.denominator < 2 or self.max_votes < 1:
            raise InvalidInputError("denominator must be >= 2 and max_votes >= 1")


@dataclass
class SearchResult:
    config: SearchConfig
    trials: int
    witness: Optional[AuditVerdict]
    trial_index: Optional[int]
    inconclusive: int
    seconds: float = 0.0

    @property
    def found(self) -> bool:
        return self.witness is not None


# ---------------------------------------------------------------------------
# instance generation


def _bounded_split(rng, total: int, caps: Sequence[int]) -> List[int]:
    """Random nonnegative integers with out[i] <= caps[i] summing to ``total``."""
    if total > sum(caps) or total < 0:
        raise ValueError("infeasible split")
    out = [0] * len(caps)
    order = [int(i) for i in rng.permutation(len(caps))]
    remaining = total
    rest = sum(caps)
    for i in order:
        rest -= caps[i]
        lo, hi = max(0, remaining - rest), min(caps[i], remaining)
        x = int(rng.integers(lo, hi + 1))
        out[i] = x
        remaining -= x
    return out


def _skewed(rng, upper: int) -> int:
    """Integer in 0..upper, biased toward small moves."""
    return int(math.floor(rng.random() ** 3 * (upper + 1))) if upper > 0 else 0


def _subset(rng, n: int, size: int) -> Tuple[int, ...]:
    return tuple(sorted(int(i) + 1 for i in rng.choice(n, size=size, replace=False)))


def _some(rng, parties: Sequence[int]) -> List[int]:
    """A random nonempty sub-list; moves concentrated on few parties find more violations."""
    if not parties:
        return []
    size = int(rng.integers(1, len(parties) + 1))
    return sorted(int(x) for x in rng.choice(parties, size=size, replace=False))


def _size(cfg: SearchConfig, rng) -> int:
    return int(rng.integers(cfg.min_n, cfg.n + 1))


def _threshold_instance(cfg: SearchConfig, rng):
    n = _size(cfg, rng)
    h = cfg.house_size or int(rng.integers(2, 3 * n + 1))
    votes = [int(x) for x in rng.integers(1, cfg.max_votes + 1, size=n)]
    if cfg.coalition_size:
        size = int(cfg.coalition_size[int(rng.integers(len(cfg.coalition_size)))])
    else:
        size = int(rng.integers(1, n))
    T = _subset(rng, n, size)
    donors = _some(rng, [i for i in range(1, n + 1) if i not in T])
    takers = _some(rng, list(T))
    v = VoteProfile.of(votes, h)
    lower = compute_quotas(v).lower_quotas
    budget = _skewed(rng, sum(votes[i - 1] for i in donors))
    for _ in range(30):
        take = _bounded_split(rng, budget, [votes[i - 1] for i in donors])
        give = _bounded_split(rng, budget, [budget] * len(takers))
        new = list(votes)
        for i, x in zip(donors, take):
            new[i - 1] -= x
        for i, x in zip(takers, give):
            new[i - 1] += x
        v2 = VoteProfile.of(new, h)
        if cfg.scheme == "crossing" or compute_quotas(v2).lower_quotas == lower:
            return v, v2, T
        budget //= 2
    return v, v, T


def _residue_ints(cfg: SearchConfig, rng, n: int, k: int, d: int) -> List[int]:
    return _bounded_split(rng, k * d, [d - 1] * n)


def _residues(values: Sequence[int], d: int, k: int) -> ResidueProfile:
    return ResidueProfile(tuple(Fraction(a, d) for a in values), k)


def _k_for(cfg: SearchConfig, rng, n: int) -> int:
    return cfg.k if cfg.k is not None else int(rng.integers(1, n))


def _shift(rng, values: List[int], d: int, up: Sequence[int], down: Sequence[int],
           free: Sequence[int] = ()) -> List[int]:
    """Raise parties in ``up``, lower those in ``down``; ``free`` parties absorb the net.

    Without free parties the raise and the drop are equal so the total stays put.
    """
    cap_up = [d - 1 - values[i - 1] for i in up]
    cap_down = [values[i - 1] for i in down]
    room_up = sum(d - 1 - values[i - 1] for i in free)
    room_down = sum(values[i - 1] for i in free)
    rise = _skewed(rng, min(sum(cap_up), sum(cap_down)) if not free else sum(cap_up))
    while True:
        if not free:
            drop = rise
            break
        # free parties change by drop - rise, which must fit their room
        lo, hi = max(0, rise - room_down), min(sum(cap_down), rise + room_up)
        if lo <= hi:
            drop = lo + _skewed(rng, hi - lo)
            break
        rise //= 2
    out = list(values)
    for i, x in zip(up, _bounded_split(rng, rise, cap_up)):
        out[i - 1] += x
    for i, x in zip(down, _bounded_split(rng, drop, cap_down)):
        out[i - 1] -= x
    net = drop - rise
    if net > 0:
        for i, x in zip(free, _bounded_split(rng, net, [d - 1 - values[i - 1] for i in free])):
            out[i - 1] += x
    elif net < 0:
        for i, x in zip(free, _bounded_split(rng, -net, [values[i - 1] for i in free])):
            out[i - 1] -= x
    return out


def _selection_instance(cfg: SearchConfig, rng):
    n = _size(cfg, rng)
    k = _k_for(cfg, rng, n)
    d = max(cfg.denominator, n)
    a = _residue_ints(cfg, rng, n, k, d)
    T = _subset(rng, n, k)
    outside = [i for i in range(1, n + 1) if i not in T]
    b = _shift(rng, a, d, _some(rng, list(T)), _some(rng, outside))
    return _residues(a, d, k), _residues(b, d, k), T


def _pairwise_instance(cfg: SearchConfig, rng):
    n = _size(cfg, rng)
    k = _k_for(cfg, rng, n)
    d = max(cfg.denominator, n)
    a = _residue_ints(cfg, rng, n, k, d)
    T1, T2 = _subset(rng, n, k), _subset(rng, n, k)
    up = [i for i in T1 if i not in T2]
    down = [i for i in T2 if i not in T1]
    free = [i for i in range(1, n + 1) if i not in T1 and i not in T2]
    b = _shift(rng, a, d, up, down, free)
    return _residues(a, d, k), _residues(b, d, k), T1, T2


def _lipschitz_instance(cfg: SearchConfig, rng):
    n = _size(cfg, rng)
    k = _k_for(cfg, rng, n)
    d = max(cfg.denominator, n)
    a = _residue_ints(cfg, rng, n, k, d)
    b = _residue_ints(cfg, rng, n, k, d)
    return _residues(a, d, k), _residues(b, d, k), _subset(rng, n, k)


def _two_coordinate_instance(cfg: SearchConfig, rng):
    n = _size(cfg, rng)
    k = _k_for(cfg, rng, n)
    d = max(cfg.denominator, n)
    for _ in range(50):
        a = _residue_ints(cfg, rng, n, k, d)
        grow, shrink = (int(i) + 1 for i in rng.choice(n, size=2, replace=False))
        room = min(a[shrink - 1], d - 1 - a[grow - 1])
        if room > 0:
            delta = Fraction(int(rng.integers(1, 2 * room)), 2 * d)
            return _residues(a, d, k), grow, shrink, delta
    raise InvalidInputError("could not draw a two-coordinate instance")


GENERATORS = {
    "threshold": _threshold_instance,
    "selection": _selection_instance,
    "pairwise-selection": _pairwise_instance,
    "lipschitz": _lipschitz_instance,
    "lipschitz-2delta": _two_coordinate_instance,
}


def generate_instance(cfg: SearchConfig, trial: int):
    """The instance for trial ``trial``: explicit seeds first, then random draws."""
    if trial < len(cfg.seeds):
        return cfg.seeds[trial]
    rng = np.random.default_rng([cfg.rng_seed, trial])
    return GENERATORS[cfg.axiom](cfg, rng)


# ---------------------------------------------------------------------------
# evaluation


def _sampford_seat_counts(v: VoteProfile, T: Sequence[int]):
    """Integer weights of the coalition's extra seats: (lower total, weights by extras, sum)."""
    bd = compute_quotas(v)
    p = bd.residues
    base = sum(bd.lower_quotas[i - 1] for i in T)
    if p.k == 0:
        return base, [1], 1
    items, total, _ = _integer_weights(p)
    members = set(T)
    counts = [0] * (len(T) + 1)
    for subset, w in items:
        counts[sum(1 for i in subset if i in members)] += w
    return base, counts, total


def _sampford_threshold_screen(v: VoteProfile, v2: VoteProfile, T) -> bool:
    """True when the new tails dominate the old ones; exact integer arithmetic."""
    b1, c1, w1 = _sampford_seat_counts(v, T)
    b2, c2, w2 = _sampford_seat_counts(v2, T)

    def tail(base, counts, theta):
        return sum(c for j, c in enumerate(counts) if base + j >= theta)

    top = max(b1 + len(c1), b2 + len(c2))
    for theta in range(top + 1):
        if tail(b2, c2, theta) * w1 < tail(b1, c1, theta) * w2:
            return False
    return True


def evaluate(cfg: SearchConfig, instance) -> AuditVerdict:
    rule: Rule = cfg.rule
    if cfg.axiom == "threshold":
        return check_threshold_monotonicity(rule, *instance)
    if cfg.axiom == "selection":
        return check_selection_monotonicity(rule, *instance)
    if cfg.axiom == "pairwise-selection":
        return check_pairwise_selection(rule, *instance)
    if cfg.axiom == "lipschitz":
        return check_lipschitz(rule, *instance)
    p, grow, shrink, delta = instance
    return check_two_coordinate_lipschitz(rule, p, grow, shrink, delta)


def _fast_ok(cfg: SearchConfig, instance) -> bool:
    """Cheap exact pre-check; False means 'run the full checker'."""
    if cfg.axiom != "threshold" or cfg.rule.name != "sampford":
        return False
    v, v2, T = instance
    if not (all(isinstance(x, (int, Fraction)) for x in v.votes + v2.votes)):
        return False
    q, q2 = compute_quotas(v).quotas, compute_quotas(v2).quotas
    inside = set(T)
    if any((q2[i] < q[i]) if (i + 1) in inside else (q2[i] > q[i]) for i in range(v.n)):
        return False
    return _sampford_threshold_screen(v, v2, T)


def _scan(cfg: SearchConfig, start: int, stop: int):
    """First violating trial in [start, stop) plus the inconclusive trial indices."""
    inconclusive = []
    for t in range(start, stop):
        instance = generate_instance(cfg, t)
        if _fast_ok(cfg, instance):
            continue
        v = evaluate(cfg, instance)
        if v.violated:
            return t, inconclusive
        if v.inconclusive:
            inconclusive.append(t)
    return None, inconclusive


def worker_count(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def search_counterexamples(cfg: SearchConfig) -> SearchResult:
    """Run up to ``cfg.trial_count`` trials and return the first violation, if any."""
    start = time.perf_counter()
    workers = min(worker_count(cfg.workers), cfg.trial_count)
    if workers == 1:
        hit, inconclusive = _scan(cfg, 0, cfg.trial_count)
    else:
        bounds = np.linspace(0, cfg.trial_count, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan, [cfg] * workers, bounds[:-1].tolist(),
                                  bounds[1:].tolist()))
        hits = [h for h, _ in parts if h is not None]
        hit = min(hits) if hits else None
        inconclusive = [t for _, inc in parts for t in inc]
        if hit is not None:
            inconclusive = [t for t in inconclusive if t < hit]
    witness = None
    if hit is not None:
        witness = evaluate(cfg, generate_instance(cfg, hit))
        witness.witness["trial"] = hit
    trials = hit + 1 if hit is not None else cfg.trial_count
    return SearchResult(cfg, trials, witness, hit, len(inconclusive),
                        time.perf_counter() - start)


def apportia_seed() -> tuple:
    """The Apportia election pair as a threshold instance (new election first)."""
    prev = VoteProfile.of([110, 270, 210, 160, 70, 280], 11)
    new = VoteProfile.of([110, 290, 210, 190, 10, 290], 11)
    return (new, prev, (1, 3, 5))
