"""The four rounding rules and a small dispatch layer used by the apportionment,
audit and CLI layers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from ..core import DEFAULT_PRECISION_BITS, InvalidInputError, ResidueProfile, Subset
from .conditional_poisson import (DEFAULT_RESIDUAL, SolverError, WorkingProbabilities,
                                  conditional_poisson_distribution,
                                  conditional_poisson_marginals, conditional_poisson_rounding,
                                  conditional_poisson_solve, elementary_symmetric)
from .distribution import KSubsetDistribution, mixture
from .pipage import pipage_distribution, pipage_random_order_distribution, pipage_sample
from .poisson import poisson_sample, poisson_sample_sizes
from .sampford import (RestartLimitError, sampford_distribution, sampford_distribution_odds,
                       sampford_denominator, sampford_f, sampford_sample, sampford_sample_many,
                       sampford_set_probability)
from .systematic import (systematic_distribution, systematic_random_order_distribution,
                         systematic_random_order_estimate, systematic_sample,
                         systematic_sample_many, systematic_selection)

RULE_NAMES = {
    "grimmett": "systematic",
    "systematic": "systematic",
    "pipage": "pipage",
    "cp": "conditional_poisson",
    "conditional_poisson": "conditional_poisson",
    "conditional-poisson": "conditional_poisson",
    "sampford": "sampford",
}

SHORT_NAMES = {
    "systematic": "grimmett",
    "pipage": "pipage",
    "conditional_poisson": "cp",
    "sampford": "sampford",
}

Order = Union[str, Tuple[int, ...]]


@dataclass(frozen=True)
class Rule:
    """A rounding rule plus the options that pin down its distribution.

    ``order`` is ``"numeric"``, ``"random"`` (uniform over all orders) or an
    explicit permutation; it only matters for systematic and pipage rounding.
    """

    name: str
    order: Order = "numeric"
    precision_bits: int = DEFAULT_PRECISION_BITS
    residual_target: float = DEFAULT_RESIDUAL

    def __post_init__(self):
        canonical = RULE_NAMES.get(str(self.name).lower())
        if canonical is None:
            raise InvalidInputError(f"unknown rule {self.name!r}")
        object.__setattr__(self, "name", canonical)
        if isinstance(self.order, str):
            if self.order not in ("numeric", "random"):
                raise InvalidInputError(f"unknown order {self.order!r}")
        else:
            object.__setattr__(self, "order", tuple(int(i) for i in self.order))

    @property
    def label(self) -> str:
        base = SHORT_NAMES[self.name]
        if self.name in ("systematic", "pipage") and self.order != "numeric":
            suffix = "random" if self.order == "random" else "explicit:" + ",".join(map(str, self.order))
            return f"{base}[{suffix}]"
        return base

    @property
    def neutral(self) -> bool:
        return self.name in ("sampford", "conditional_poisson") or self.order == "random"

    def _fixed_order(self, n: int) -> Optional[Tuple[int, ...]]:
        if self.order == "numeric":
            return None
        if len(self.order) != n:
            raise InvalidInputError(f"order {self.order} does not match {n} parties")
        return self.order

    def distribution(self, p: ResidueProfile) -> KSubsetDistribution:
        if self.name == "systematic":
            if self.order == "random":
                return systematic_random_order_distribution(p)
            return systematic_distribution(p, self._fixed_order(p.n))
        if self.name == "pipage":
            if self.order == "random":
                return pipage_random_order_distribution(p)
            return pipage_distribution(p, self._fixed_order(p.n), tol=_snap_tolerance(p))
        if self.name == "conditional_poisson":
            return conditional_poisson_rounding(p, self.precision_bits, self.residual_target)
        return sampford_distribution(p)

    def sample(self, p: ResidueProfile, rng=None) -> Subset:
        """One draw; a random order is drawn once per call."""
        rng = np.random.default_rng(rng)
        if self.name == "systematic":
            order = self._fixed_order(p.n)
            if self.order == "random":
                order = tuple(int(i) + 1 for i in rng.permutation(p.n))
            return systematic_sample(p, rng, order)
        if self.name == "pipage":
            order = None if self.order == "random" else (self._fixed_order(p.n) or tuple(range(1, p.n + 1)))
            return pipage_sample(p, rng, order)
        if self.name == "conditional_poisson":
            dist = self.distribution(p)
            return _draw_from(dist, rng)
        return sampford_sample(p, rng)


def _draw_from(dist: KSubsetDistribution, rng) -> Subset:
    subsets = list(dist.mass)
    weights = np.array([float(m) for m in dist.mass.values()])
    idx = rng.choice(len(subsets), p=weights / weights.sum())
    return subsets[idx]


def _snap_tolerance(p: ResidueProfile):
    if p.exact:
        return 0
    prec = getattr(getattr(p[0], "context", None), "prec", 53)
    return p[0] * 0 + 2.0 ** -(prec * 3 // 4)


def as_rule(rule) -> Rule:
    return rule if isinstance(rule, Rule) else Rule(rule)


ALL_RULES = ("grimmett", "pipage", "cp", "sampford")

__all__ = [
    "ALL_RULES", "DEFAULT_RESIDUAL", "KSubsetDistribution", "RULE_NAMES", "RestartLimitError",
    "Rule", "SolverError", "WorkingProbabilities", "as_rule", "conditional_poisson_distribution",
    "conditional_poisson_marginals", "conditional_poisson_rounding", "conditional_poisson_solve",
    "elementary_symmetric", "mixture", "pipage_distribution", "pipage_random_order_distribution",
    "pipage_sample", "poisson_sample", "poisson_sample_sizes", "sampford_distribution",
    "sampford_denominator", "sampford_distribution_odds", "sampford_f", "sampford_sample", "sampford_sample_many",
    "sampford_set_probability", "systematic_distribution", "systematic_random_order_distribution",
    "systematic_random_order_estimate", "systematic_sample", "systematic_sample_many",
    "systematic_selection",
]
