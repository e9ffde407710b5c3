"""Numeric verification of the identities and bounds behind Sampford monotonicity.

Checks that depend on a labeling relabel the parties first so that the k
largest residues come first (party 1 the largest, party n the smallest).
Rational inputs with a rational step give exact finite differences; every
quantity involved is a low-degree polynomial along the perturbation
direction, so the central difference of the truncated deficit is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..apportion import induce_apportionment
from ..core import (FLOAT_TOLERANCE, InvalidInputError, ResidueProfile, Scalar, VoteProfile,
                    enumerate_k_subsets, half_absolute_deviation, poisson_binomial,
                    to_fraction, truncated_deficit)
from ..rules import as_rule, sampford_denominator, sampford_distribution
from .verdict import AuditVerdict, Outcome, inconclusive, verdict

DERIVATIVE_STEP = 1e-4
DERIVATIVE_TOLERANCE = 1e-6
FORMULA_STEP = 1e-5
FORMULA_TOLERANCE = 1e-8


def _agree(a, b, tol=FLOAT_TOLERANCE) -> bool:
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        return a == b
    return abs(a - b) <= tol


def _step_like(p: ResidueProfile, step):
    """Keep the step rational when the profile is."""
    if p.exact:
        return to_fraction(step)
    return p[0] * 0 + step


def canonical_order(p: ResidueProfile) -> tuple:
    """Parties sorted by residue, largest first; ties keep their index order."""
    return tuple(sorted(range(1, p.n + 1), key=lambda i: (-p[i - 1], i)))


def _shifted(values: Sequence, grow: int, shrink: int, t) -> list:
    out = list(values)
    out[grow - 1] = out[grow - 1] + t
    out[shrink - 1] = out[shrink - 1] - t
    return out


# ---------------------------------------------------------------------------
# Sampford derivative


def sampford_directional_derivative(p: ResidueProfile, grow: int, shrink: int,
                                    step=DERIVATIVE_STEP, coalition=None) -> Scalar:
    """Central difference of P[S = T] along +e_grow - e_shrink (T defaults to 1..k)."""
    n, k = p.n, p.k
    if not 1 <= k <= n - 1:
        raise InvalidInputError("need 1 <= k <= n - 1")
    if grow == shrink or not (1 <= grow <= n and 1 <= shrink <= n):
        raise InvalidInputError("grow and shrink must be two distinct parties")
    if not p[grow - 1] > 0:
        raise InvalidInputError(f"party {grow} needs a positive residue")
    h = _step_like(p, step)
    for i, sign in ((grow, 1), (shrink, -1)):
        for t in (h, -h):
            x = p[i - 1] + sign * t
            if not 0 <= x < 1:
                raise InvalidInputError(f"step {step} leaves [0, 1) at party {i}")
    T = tuple(range(1, k + 1)) if coalition is None else tuple(sorted(coalition))
    plus = ResidueProfile(tuple(_shifted(p.residues, grow, shrink, h)), k)
    minus = ResidueProfile(tuple(_shifted(p.residues, grow, shrink, -h)), k)
    return (sampford_distribution(plus).prob(T) - sampford_distribution(minus).prob(T)) / (2 * h)


def check_sampford_derivative(p: ResidueProfile, grow: int = 1, shrink: Optional[int] = None,
                              step=DERIVATIVE_STEP, tol=DERIVATIVE_TOLERANCE) -> AuditVerdict:
    """The derivative of P[S = 1..k] along +e_grow - e_shrink must be >= -tol.

    ``grow`` must lie in 1..k and ``shrink`` outside it (default: party n).
    """
    shrink = p.n if shrink is None else shrink
    instance = {"p": p.residues, "grow": grow, "shrink": shrink, "step": step}
    if not (1 <= grow <= p.k < shrink <= p.n):
        return inconclusive("sampford-derivative", instance,
                            "grow must be in 1..k and shrink in k+1..n")
    try:
        value = sampford_directional_derivative(p, grow, shrink, step)
    except InvalidInputError as exc:
        return inconclusive("sampford-derivative", instance, str(exc))
    return verdict("sampford-derivative", instance, value >= -tol,
                   {"derivative": value, "tolerance": tol})


# ---------------------------------------------------------------------------
# Denominator identities


def verify_denominator_identity(p: ResidueProfile) -> AuditVerdict:
    """sum over k-sets of f(A) = E[1{|B| < k}(k - |B|)] = E[||B| - k|] / 2.

    The left side comes from subset enumeration, the middle from the
    Poisson-binomial recurrence and the right from the full size distribution.
    """
    lhs = sampford_denominator(p)
    middle = truncated_deficit(p)
    rhs = half_absolute_deviation(p)
    ok = _agree(lhs, middle) and _agree(middle, rhs)
    return verdict("denominator-identity", {"p": p.residues},
                   ok, {"subset_sum": lhs, "truncated_deficit": middle, "half_abs_dev": rhs})


def verify_telescoping_step(p: ResidueProfile, ell: int) -> AuditVerdict:
    """sum_{|A|=l+1} f(A) - sum_{|A|=l} f(A) = (k - l) sum_{|A|=l} prod_A p prod_rest (1 - p)."""
    instance = {"p": p.residues, "ell": ell}
    if not 0 <= ell <= p.n - 1:
        return inconclusive("telescoping-step", instance, "need 0 <= l <= n - 1")
    lhs = sampford_denominator(p, ell + 1) - sampford_denominator(p, ell)
    zero = p[0] * 0
    weight = zero
    for subset in enumerate_k_subsets(p.n, ell):
        inside = set(subset)
        prod = zero + 1
        for j, x in enumerate(p.residues, start=1):
            prod = prod * (x if j in inside else 1 - x)
        weight = weight + prod
    rhs = (p.k - ell) * weight
    return verdict("telescoping-step", instance, _agree(lhs, rhs), {"lhs": lhs, "rhs": rhs})


def verify_expectation_bound(p: ResidueProfile) -> AuditVerdict:
    """E[||B| - k|] <= 2s where s is the deficit of the k largest residues."""
    order = canonical_order(p)
    q = p.permuted(order)
    s = q.deficit()
    expectation = 2 * half_absolute_deviation(q)
    slack = 0 if q.exact else FLOAT_TOLERANCE
    return verdict("expectation-bound", {"p": p.residues, "labeling": order},
                   expectation <= 2 * s + slack, {"expectation": expectation, "bound": 2 * s})


def _deficit_along(values: Sequence, k: int) -> Scalar:
    # polynomial evaluation: values may leave [0, 1) harmlessly here
    pmf = poisson_binomial(list(values)).pmf
    return sum(((k - size) * pmf[size] for size in range(min(k, len(pmf)))), pmf[0] * 0)


def verify_derivative_formula(p: ResidueProfile, step=FORMULA_STEP,
                              tol=FORMULA_TOLERANCE) -> AuditVerdict:
    """(d/dp_1 - d/dp_n) E[1{|B| < k}(k - |B|)] = (p_n - p_1) P[|B_hat| = k - 1].

    B_hat omits parties 1 and n.  The left side is a central difference.
    """
    instance = {"p": p.residues, "step": step}
    if p.n < 2:
        return inconclusive("derivative-formula", instance, "need at least two parties")
    h = _step_like(p, step)
    n, k = p.n, p.k
    up = _deficit_along(_shifted(p.residues, 1, n, h), k)
    down = _deficit_along(_shifted(p.residues, 1, n, -h), k)
    lhs = (up - down) / (2 * h)
    rhs = (p[n - 1] - p[0]) * poisson_binomial(p, exclude=(1, n)).prob(k - 1)
    gap = abs(lhs - rhs)
    return verdict("derivative-formula", instance, gap <= tol,
                   {"finite_difference": lhs, "formula": rhs, "gap": gap, "tolerance": tol})


def verify_probability_bound(p: ResidueProfile) -> AuditVerdict:
    """P[|B_hat| = k - 1] >= (1 - 2s) / (p_1 (1 - p_n)) after canonical relabeling."""
    order = canonical_order(p)
    q = p.permuted(order)
    instance = {"p": p.residues, "labeling": order}
    if q.n < 2 or q.k < 1 or not q[0] > 0:
        return inconclusive("probability-bound", instance, "needs k >= 1 and p_1 > 0")
    s = q.deficit()
    lhs = poisson_binomial(q, exclude=(1, q.n)).prob(q.k - 1)
    rhs = (1 - 2 * s) / (q[0] * (1 - q[q.n - 1]))
    slack = 0 if q.exact else FLOAT_TOLERANCE
    return verdict("probability-bound", instance, lhs >= rhs - slack,
                   {"probability": lhs, "bound": rhs, "s": s})


# ---------------------------------------------------------------------------
# Grimmett shift lemma


@dataclass(frozen=True)
class ShiftWitness:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    u0: Fraction

    def inequalities(self) -> tuple:
        u = self.u0
        return (u + self.a <= 0, u + self.a + self.b >= 0,
                u + self.a + self.b + self.c <= 0, u + self.a + self.b + self.c + self.d >= 0)

    @property
    def valid(self) -> bool:
        return all(self.inequalities())


def construct_shift(a, b, c, d, e) -> ShiftWitness:
    """Offset u0 making the partial sums alternate in sign.

    Requires a, c, e <= 0, b, d >= 0 and a + b + c + d + e = 0; inputs are
    converted to exact rationals.
    """
    a, b, c, d, e = (to_fraction(x) for x in (a, b, c, d, e))
    if a > 0 or c > 0 or e > 0 or b < 0 or d < 0:
        raise InvalidInputError("need a, c, e <= 0 and b, d >= 0")
    if a + b + c + d + e != 0:
        raise InvalidInputError("a + b + c + d + e must be 0")
    u0 = -a if b <= -c else -a - b - c
    witness = ShiftWitness(a, b, c, d, e, u0)
    if not witness.valid:
        raise AssertionError(f"shift construction failed for {witness}")
    return witness


# ---------------------------------------------------------------------------
# House monotonicity


HOUSE_VOTES = (1, 2, 1, 2)
HOUSE_SIZE = 2
HOUSE_WITNESS = (1, 0, 1, 0)


def check_house_monotonicity_witness(rule) -> AuditVerdict:
    """Positive probability on seats (1, 0, 1, 0) for votes (1, 2, 1, 2), h = 2.

    Any such rule fails house monotonicity; zero probability proves nothing
    either way, so that case is INCONCLUSIVE.
    """
    rule = as_rule(rule)
    votes = VoteProfile.of(HOUSE_VOTES, HOUSE_SIZE)
    dist = induce_apportionment(rule, votes)
    prob = dist.prob(HOUSE_WITNESS)
    instance = {"rule": rule.label, "votes": HOUSE_VOTES, "h": HOUSE_SIZE,
                "seats": HOUSE_WITNESS}
    if prob > 0:
        return AuditVerdict("house-monotonicity", instance, Outcome.VIOLATED,
                            {"probability": prob}, "witness seat vector has positive mass")
    return inconclusive("house-monotonicity", instance,
                        "witness seat vector has zero mass")
