"""Conditional Poisson (maximum-entropy) rounding.

The distribution picks a k-set T with probability proportional to the product
of working probabilities over T.  Working probabilities are fitted to the
target marginals by damped Newton iteration on log(pi); marginals inside the
loop come from elementary symmetric polynomials, not subset enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath

from ..core import (DEFAULT_PRECISION_BITS, Arithmetic, InvalidInputError,
                    ResidueProfile, Scalar, enumerate_k_subsets)
from .distribution import KSubsetDistribution

DEFAULT_RESIDUAL = 1e-12
MAX_ITERATIONS = 200
MAX_HALVINGS = 80


class SolverError(RuntimeError):
    """Newton iteration failed to reach the requested residual."""

    def __init__(self, message: str, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class WorkingProbabilities:
    pi: Tuple[Scalar, ...]
    residual: Scalar
    iterations: int = 0
    precision_bits: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.pi)


def elementary_symmetric(values: Sequence, k: int, zero, skip: Sequence[int] = ()) -> list:
    """e_0..e_k of ``values`` with the 0-indexed positions in ``skip`` left out."""
    e = [zero + 1] + [zero] * k
    for idx, x in enumerate(values):
        if idx in skip:
            continue
        for j in range(k, 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e


def conditional_poisson_marginals(pi: Sequence, k: int) -> list:
    """Inclusion probabilities of the product-form design on k-sets."""
    if k == 0:
        return [pi[0] * 0 for _ in pi]
    zero = pi[0] * 0
    ek = elementary_symmetric(pi, k, zero)[k]
    return [x * elementary_symmetric(pi, k - 1, zero, (i,))[k - 1] / ek
            for i, x in enumerate(pi)]


def _jacobian(pi, k, marg, ctx):
    """d marginal_i / d log(pi_j) = joint_ij - m_i m_j (off-diagonal), m_i(1 - m_i) on it."""
    m = len(pi)
    zero = ctx.mpf(0)
    ek = elementary_symmetric(pi, k, zero)[k]
    J = ctx.matrix(m, m)
    for i in range(m):
        J[i, i] = marg[i] * (1 - marg[i])
        for j in range(i + 1, m):
            if k >= 2:
                joint = pi[i] * pi[j] * elementary_symmetric(pi, k - 2, zero, (i, j))[k - 2] / ek
            else:
                joint = zero
            J[i, j] = J[j, i] = joint - marg[i] * marg[j]
    return J


def conditional_poisson_solve(p: ResidueProfile, precision_bits: int = DEFAULT_PRECISION_BITS,
                              residual_target=DEFAULT_RESIDUAL,
                              max_iterations: int = MAX_ITERATIONS) -> WorkingProbabilities:
    """Fit working probabilities whose product-form marginals match ``p``.

    Parties with zero target are dropped and get working probability 0.
    The last remaining party's log-weight is pinned (the design is invariant
    under a common rescaling), leaving a square nonsingular Newton system.
    """
    ctx = mpmath.MPContext()
    ctx.prec = precision_bits
    target_all = [_to_mpf(ctx, x) for x in p.residues]
    live = [i for i, x in enumerate(target_all) if x > 0]
    k = p.k
    out = [ctx.mpf(0)] * p.n
    if k == 0 or not live:
        return WorkingProbabilities(tuple(out), ctx.mpf(0), 0, precision_bits)
    if len(live) <= k:
        raise InvalidInputError("need more positive residues than k")
    target = [target_all[i] for i in live]
    m = len(target)
    theta = [ctx.log(t / (1 - t)) for t in target]
    tol = ctx.mpf(residual_target)

    def evaluate(th):
        pi = [ctx.exp(x) for x in th]
        marg = conditional_poisson_marginals(pi, k)
        return pi, marg, max(abs(a - b) for a, b in zip(marg, target))

    pi, marg, resid = evaluate(theta)
    iterations = 0
    while resid > tol:
        if iterations >= max_iterations:
            raise SolverError(f"no convergence after {max_iterations} iterations "
                              f"(residual {mpmath.nstr(resid, 5)})", resid)
        iterations += 1
        J = _jacobian(pi, k, marg, ctx)
        size = m - 1
        A = ctx.matrix(size, size)
        rhs = ctx.matrix(size, 1)
        for i in range(size):
            rhs[i] = target[i] - marg[i]
            for j in range(size):
                A[i, j] = J[i, j]
        step = ctx.lu_solve(A, rhs)
        scale = ctx.mpf(1)
        for _ in range(MAX_HALVINGS):
            trial = [theta[i] + scale * step[i] for i in range(size)] + [theta[-1]]
            t_pi, t_marg, t_resid = evaluate(trial)
            if t_resid < resid:
                theta, pi, marg, resid = trial, t_pi, t_marg, t_resid
                break
            scale /= 2
        else:
            raise SolverError("damped Newton step failed to reduce the residual "
                              f"(residual {mpmath.nstr(resid, 5)})", resid)
    for idx, x in zip(live, pi):
        out[idx] = x
    return WorkingProbabilities(tuple(out), resid, iterations, precision_bits)


def _to_mpf(ctx, x):
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


def conditional_poisson_distribution(pi, k: int, max_n: int = 20) -> KSubsetDistribution:
    """mass(T) = prod_{i in T} pi_i / sum over all k-sets of the same product.

    ``pi`` is a :class:`WorkingProbabilities` or a plain sequence; rational
    input (ints, Fractions) gives an exact rational distribution.
    """
    weights = list(pi.pi if isinstance(pi, WorkingProbabilities) else pi)
    n = len(weights)
    if n > max_n:
        raise InvalidInputError(f"subset enumeration limited to n <= {max_n}")
    if all(isinstance(w, (int, Fraction)) for w in weights):
        weights = [Fraction(w) for w in weights]
    positive = sum(1 for w in weights if w > 0)
    if k > positive:
        raise InvalidInputError("k exceeds the number of positive working probabilities")
    zero = weights[0] * 0
    items: List = []
    for subset in enumerate_k_subsets(n, k):
        prod = zero + 1
        for i in subset:
            prod = prod * weights[i - 1]
        if prod != 0:
            items.append((subset, prod))
    total = sum((w for _, w in items), zero)
    return KSubsetDistribution.from_items(n, k, ((s, w / total) for s, w in items))


def conditional_poisson_rounding(p: ResidueProfile, precision_bits: int = DEFAULT_PRECISION_BITS,
                                 residual_target=DEFAULT_RESIDUAL) -> KSubsetDistribution:
    """Solve for working probabilities, then build the product-form distribution."""
    if p.k == 0:
        one = Arithmetic.floating(precision_bits).one()
        return KSubsetDistribution(p.n, 0, {(): one})
    wp = conditional_poisson_solve(p, precision_bits, residual_target)
    return conditional_poisson_distribution(wp, p.k)
