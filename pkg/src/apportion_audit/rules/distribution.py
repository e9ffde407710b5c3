from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from ..core import Scalar, Subset, enumerate_k_subsets


def _colex_key(subset: Subset):
    return tuple(reversed(subset))


@dataclass(frozen=True)
class KSubsetDistribution:
    """Probability mass over size-k subsets of parties 1..n.

    Subsets absent from ``mass`` have probability zero.  Iteration follows
    colexicographic order so serialized output is deterministic.
    """

    n: int
    k: int
    mass: Mapping[Subset, Scalar]

    @classmethod
    def from_items(cls, n: int, k: int, items: Iterable[Tuple[Subset, Scalar]]) -> "KSubsetDistribution":
        acc: Dict[Subset, Scalar] = {}
        for subset, prob in items:
            subset = tuple(sorted(subset))
            if subset in acc:
                acc[subset] = acc[subset] + prob
            else:
                acc[subset] = prob
        ordered = {s: acc[s] for s in sorted(acc, key=_colex_key)}
        return cls(n, k, ordered)

    def prob(self, subset: Iterable[int]):
        key = tuple(sorted(subset))
        if key in self.mass:
            return self.mass[key]
        return self._zero()

    def _zero(self):
        for v in self.mass.values():
            return v * 0
        return 0

    def __iter__(self) -> Iterator[Tuple[Subset, Scalar]]:
        return iter(self.mass.items())

    def support(self) -> List[Subset]:
        return [s for s, m in self.mass.items() if m > 0]

    def total(self):
        return sum(self.mass.values(), self._zero())

    def marginals(self) -> Tuple[Scalar, ...]:
        zero = self._zero()
        acc = [zero] * self.n
        for subset, m in self.mass.items():
            for i in subset:
                acc[i - 1] = acc[i - 1] + m
        return tuple(acc)

    def containing(self, parties: Iterable[int]):
        """Probability that the drawn set contains every listed party."""
        need = set(parties)
        return sum((m for s, m in self.mass.items() if need.issubset(s)), self._zero())

    def dense(self) -> List[Tuple[Subset, Scalar]]:
        """Every k-subset in colex order with its (possibly zero) mass."""
        return [(s, self.prob(s)) for s in enumerate_k_subsets(self.n, self.k)]

    def relabeled(self, order) -> "KSubsetDistribution":
        """Map position i of ``order`` back to party ``order[i]``."""
        return KSubsetDistribution.from_items(
            self.n, self.k, ((tuple(order[i - 1] for i in s), m) for s, m in self.mass.items()))


def mixture(dists: List[KSubsetDistribution]) -> KSubsetDistribution:
    """Uniform average of distributions over the same (n, k)."""
    if not dists:
        raise ValueError("empty mixture")
    n, k = dists[0].n, dists[0].k
    summed = KSubsetDistribution.from_items(n, k, (item for d in dists for item in d))
    count = len(dists)
    return KSubsetDistribution(n, k, {s: m / count for s, m in summed.mass.items()})
