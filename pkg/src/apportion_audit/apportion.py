"""Lift rounding rules to apportionment methods and compare coalition seat counts.

A rule applied to the residues of a vote profile picks the parties that get
their upper quota; every other party keeps its lower quota.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .core import (FLOAT_TOLERANCE, InvalidInputError, QuotaBreakdown, Scalar, Subset,
                   VoteProfile, compute_quotas, is_exact, parse_subset)
from .rules import KSubsetDistribution, Rule, as_rule

SeatVector = Tuple[int, ...]


@dataclass(frozen=True)
class SeatDistribution:
    """Distribution over seat vectors; every support point respects quota."""

    n: int
    h: int
    mass: Dict[SeatVector, Scalar]
    quota_ref: QuotaBreakdown
    rounding: Optional[KSubsetDistribution] = None

    def __iter__(self) -> Iterator[Tuple[SeatVector, Scalar]]:
        return iter(self.mass.items())

    def _zero(self):
        for v in self.mass.values():
            return v * 0
        return 0

    @property
    def exact(self) -> bool:
        return all(is_exact(m) for m in self.mass.values())

    def prob(self, seats: Sequence[int]) -> Scalar:
        return self.mass.get(tuple(int(s) for s in seats), self._zero())

    def expected_seats(self) -> Tuple[Scalar, ...]:
        acc = [self._zero()] * self.n
        for seats, m in self.mass.items():
            for i, s in enumerate(seats):
                acc[i] = acc[i] + s * m
        return tuple(acc)

    def coalition_pmf(self, coalition: Iterable[int]) -> List[Scalar]:
        """P[sum of seats over the coalition = j] for j = 0..h."""
        members = [i - 1 for i in parse_subset(list(coalition), self.n)]
        pmf = [self._zero()] * (self.h + 1)
        for seats, m in self.mass.items():
            total = sum(seats[i] for i in members)
            pmf[total] = pmf[total] + m
        return pmf

    def tail(self, coalition: Iterable[int]) -> List[Scalar]:
        """P[coalition seats >= theta] for theta = 0..h+1."""
        pmf = self.coalition_pmf(coalition)
        out = [self._zero()] * (self.h + 2)
        running = self._zero()
        for theta in range(self.h, -1, -1):
            running = running + pmf[theta]
            out[theta] = running
        return out


@dataclass(frozen=True)
class CoalitionQuery:
    coalition: Subset
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "coalition", parse_subset(list(self.coalition)))
        if int(self.threshold) != self.threshold or self.threshold < 0:
            raise InvalidInputError("threshold must be a nonnegative integer")

    def validate(self, n: int, h: int):
        if any(not 1 <= i <= n for i in self.coalition):
            raise InvalidInputError(f"coalition {self.coalition} is not inside 1..{n}")
        if self.threshold > h + 1:
            raise InvalidInputError(f"threshold {self.threshold} exceeds house size {h}")


def seat_vector(breakdown: QuotaBreakdown, rounded: Subset) -> SeatVector:
    """Lower quotas plus one seat for every party in ``rounded``."""
    up = set(rounded)
    return tuple(lq + (1 if i in up else 0) for i, lq in enumerate(breakdown.lower_quotas, start=1))


def induce_apportionment(rule, votes: VoteProfile) -> SeatDistribution:
    """Seat distribution of the apportionment method induced by ``rule``."""
    rule = as_rule(rule)
    breakdown = compute_quotas(votes)
    dist = rule.distribution(breakdown.residues)
    mass = {seat_vector(breakdown, subset): m for subset, m in dist}
    return SeatDistribution(votes.n, votes.house_size, mass, breakdown, dist)


def coalition_threshold_prob(dist: SeatDistribution, query: CoalitionQuery) -> Scalar:
    """P[sum over T of seats >= theta]."""
    query.validate(dist.n, dist.h)
    return dist.tail(query.coalition)[query.threshold]


@dataclass(frozen=True)
class DominanceResult:
    """Outcome of comparing coalition tails; ``theta`` is the first violating threshold."""

    dominates: bool
    coalition: Subset
    tails_old: Tuple[Scalar, ...]
    tails_new: Tuple[Scalar, ...]
    theta: Optional[int] = None

    @property
    def old_prob(self):
        return None if self.theta is None else self.tails_old[self.theta]

    @property
    def new_prob(self):
        return None if self.theta is None else self.tails_new[self.theta]

    def violations(self, slack=0) -> List[int]:
        return [t for t, (a, b) in enumerate(zip(self.tails_old, self.tails_new)) if b < a - slack]


def comparison_slack(*values) -> Scalar:
    """Zero when every value is an exact rational, the float tolerance otherwise."""
    return 0 if all(is_exact(v) for v in values) else FLOAT_TOLERANCE


def dominance_compare(old: SeatDistribution, new: SeatDistribution, coalition: Iterable[int],
                      slack=None) -> DominanceResult:
    """Does the coalition's seat count under ``new`` first-order dominate ``old``?

    The first threshold where the new tail falls below the old one (beyond
    ``slack``) is reported; with the default slack, exact inputs compare with
    no tolerance at all.
    """
    if old.n != new.n or old.h != new.h:
        raise InvalidInputError("distributions must share party count and house size")
    coalition = parse_subset(list(coalition), old.n)
    t_old = tuple(old.tail(coalition)[: old.h + 1])
    t_new = tuple(new.tail(coalition)[: new.h + 1])
    if slack is None:
        slack = comparison_slack(*t_old, *t_new)
    for theta, (a, b) in enumerate(zip(t_old, t_new)):
        if b < a - slack:
            return DominanceResult(False, coalition, t_old, t_new, theta)
    return DominanceResult(True, coalition, t_old, t_new)


__all__ = [
    "CoalitionQuery", "DominanceResult", "SeatDistribution", "SeatVector", "Rule",
    "coalition_threshold_prob", "comparison_slack", "dominance_compare", "induce_apportionment",
    "seat_vector",
]
