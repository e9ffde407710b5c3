"""Numeric foundations shared by the rounding rules and the audits.

Two arithmetic modes are supported.  Exact mode works with
:class:`fractions.Fraction` throughout; float mode uses :mod:`mpmath` numbers
bound to a private context so that precision never leaks between callers.
Parties are 1-indexed everywhere in the public interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Optional, Sequence, Tuple, Union

import mpmath
from mpmath.ctx_mp_python import _mpf as MPF  # common base of mpf types from every context

DEFAULT_PRECISION_BITS = 128
FLOAT_TOLERANCE = 1e-12
RESIDUE_REPAIR_TOLERANCE = 1e-9

Scalar = Union[Fraction, "mpmath.mpf"]
Subset = Tuple[int, ...]


class InvalidInputError(ValueError):
    """Raised when votes, residues or options violate their contracts."""


@dataclass(frozen=True)
class Arithmetic:
    """Arithmetic mode: exact rationals, or mpmath floats at ``bits`` precision."""

    exact: bool = True
    bits: int = DEFAULT_PRECISION_BITS
    _ctx: Optional[mpmath.ctx_mp.MPContext] = field(
        default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.bits < 1:
            raise InvalidInputError("precision_bits must be positive")
        if not self.exact:
            ctx = mpmath.MPContext()
            ctx.prec = self.bits
            object.__setattr__(self, "_ctx", ctx)

    @classmethod
    def floating(cls, bits: int = DEFAULT_PRECISION_BITS) -> "Arithmetic":
        return cls(exact=False, bits=bits)

    @property
    def ctx(self) -> mpmath.ctx_mp.MPContext:
        if self._ctx is None:
            raise TypeError("exact arithmetic has no mpmath context")
        return self._ctx

    @property
    def tolerance(self):
        return 0 if self.exact else FLOAT_TOLERANCE

    @property
    def tag(self) -> str:
        return "exact" if self.exact else f"float:{self.bits}"

    def convert(self, x) -> Scalar:
        if self.exact:
            return to_fraction(x)
        if isinstance(x, str) or isinstance(x, Rational):
            x = to_fraction(x)
            return self.ctx.mpf(x.numerator) / x.denominator
        return self.ctx.mpf(x)

    def one(self) -> Scalar:
        return self.convert(1)

    def zero(self) -> Scalar:
        return self.convert(0)


EXACT = Arithmetic()


def parse_mode(text: str) -> Arithmetic:
    """Parse ``exact`` or ``float:<bits>`` (``float`` alone means 128 bits)."""
    text = text.strip().lower()
    if text == "exact":
        return EXACT
    if text == "float":
        return Arithmetic.floating()
    if text.startswith("float:"):
        try:
            bits = int(text.split(":", 1)[1])
        except ValueError:
            raise InvalidInputError(f"bad precision in mode {text!r}") from None
        return Arithmetic.floating(bits)
    raise InvalidInputError(f"unknown arithmetic mode {text!r}")


def to_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal/fraction string or float.

    Floats go through their shortest repr, so ``0.1`` becomes ``1/10`` rather
    than the nearest binary double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidInputError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InvalidInputError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidInputError(f"cannot parse {x!r} as an exact number") from None
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, MPF):
        if not mpmath.isfinite(x):
            raise InvalidInputError(f"non-finite value {x!r}")
        man, exp = x.man_exp
        return Fraction(man) * Fraction(2) ** exp
    raise InvalidInputError(f"unsupported numeric type {type(x).__name__}")


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


def floor_int(x) -> int:
    if isinstance(x, (Fraction, int)):
        return math.floor(x)
    return int(mpmath.floor(x))


def ceil_int(x) -> int:
    if isinstance(x, (Fraction, int)):
        return math.ceil(x)
    return int(mpmath.ceil(x))


def frac_part(x):
    return x - floor_int(x)


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class VoteProfile:
    votes: Tuple[Scalar, ...]
    house_size: int

    def __post_init__(self):
        if len(self.votes) < 1:
            raise InvalidInputError("need at least one party")
        if any(v < 0 for v in self.votes):
            raise InvalidInputError("votes must be nonnegative")
        if not any(v > 0 for v in self.votes):
            raise InvalidInputError("at least one party needs a positive vote count")
        if isinstance(self.house_size, bool) or int(self.house_size) != self.house_size \
                or self.house_size < 1:
            raise InvalidInputError("house size must be a positive integer")

    @classmethod
    def of(cls, votes: Sequence, house_size: int, mode: Arithmetic = EXACT) -> "VoteProfile":
        return cls(tuple(mode.convert(v) for v in votes), int(house_size))

    @property
    def n(self) -> int:
        return len(self.votes)


@dataclass(frozen=True)
class ResidueProfile:
    """Residues in [0, 1) summing to the integer ``k``."""

    residues: Tuple[Scalar, ...]
    k: int

    @property
    def n(self) -> int:
        return len(self.residues)

    def __len__(self):
        return len(self.residues)

    def __getitem__(self, i):
        return self.residues[i]

    def __iter__(self):
        return iter(self.residues)

    @property
    def exact(self) -> bool:
        return all(is_exact(p) for p in self.residues)

    def deficit(self, coalition: Optional[Sequence[int]] = None) -> Scalar:
        """Shortfall s = sum over the coalition of (1 - p_i); coalition defaults to 1..k."""
        if coalition is None:
            coalition = range(1, self.k + 1)
        return sum((1 - self.residues[i - 1] for i in coalition), self.residues[0] * 0)

    def permuted(self, order: Sequence[int]) -> "ResidueProfile":
        """Profile whose i-th entry is the residue of party ``order[i]``."""
        return ResidueProfile(tuple(self.residues[j - 1] for j in order), self.k)


@dataclass(frozen=True)
class QuotaBreakdown:
    quotas: Tuple[Scalar, ...]
    lower_quotas: Tuple[int, ...]
    residues: ResidueProfile
    house_size: int

    @property
    def k(self) -> int:
        return self.residues.k

    @property
    def n(self) -> int:
        return len(self.quotas)


@dataclass(frozen=True)
class PoissonTrialStats:
    pmf: Tuple[Scalar, ...]
    excluded: Optional[Tuple[int, int]] = None

    def prob(self, size: int) -> Scalar:
        if 0 <= size < len(self.pmf):
            return self.pmf[size]
        return self.pmf[0] * 0


# ---------------------------------------------------------------------------
# Operations


def compute_quotas(votes: VoteProfile) -> QuotaBreakdown:
    """Standard quotas, lower quotas and residues of a vote profile."""
    total = sum(votes.votes[1:], votes.votes[0])
    if total <= 0:
        raise InvalidInputError("all-zero vote vector")
    h = votes.house_size
    quotas = tuple(h * v / total for v in votes.votes)
    lower = tuple(floor_int(q) for q in quotas)
    k = h - sum(lower)
    raw = [q - f for q, f in zip(quotas, lower)]
    if all(is_exact(q) for q in quotas):
        residues = ResidueProfile(tuple(raw), k)
    else:
        residues = _repair(raw, k)
    return QuotaBreakdown(quotas, lower, residues, h)


def validate_residues(raw: Sequence, mode: Arithmetic = EXACT) -> ResidueProfile:
    """Check entries lie in [0, 1) and sum to an integer.

    In float mode a sum within 1e-9 of an integer is repaired by proportional
    renormalization; exact mode demands an exactly integral sum.
    """
    values = [mode.convert(x) for x in raw]
    if not values:
        raise InvalidInputError("empty residue vector")
    for i, p in enumerate(values, start=1):
        if p < 0 or p >= 1:
            raise InvalidInputError(f"residue of party {i} is {p}, outside [0, 1)")
    total = sum(values[1:], values[0])
    k = int(round(total)) if not mode.exact else None
    if mode.exact:
        if total.denominator != 1:
            raise InvalidInputError(f"residues sum to {total}, which is not an integer")
        return ResidueProfile(tuple(values), int(total))
    if abs(total - k) > RESIDUE_REPAIR_TOLERANCE:
        raise InvalidInputError(f"residues sum to {total}, not within 1e-9 of an integer")
    return _repair(values, k)


def _repair(values, k: int) -> ResidueProfile:
    total = sum(values[1:], values[0])
    if k == 0 or total == k:
        fixed = tuple(values)
    else:
        fixed = tuple(p * k / total for p in values)
    return ResidueProfile(fixed, k)


def enumerate_k_subsets(n: int, k: int) -> Iterator[Subset]:
    """All size-k subsets of 1..n in colexicographic order."""
    if not 0 <= k <= n:
        raise InvalidInputError(f"need 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        yield ()
        return
    # colex: subsets are ordered by their largest element, then recursively
    current = list(range(1, k + 1))
    while True:
        yield tuple(current)
        j = 0
        while j < k - 1 and current[j] + 1 == current[j + 1]:
            j += 1
        if j == k - 1 and current[j] == n:
            return
        current[j] += 1
        for i in range(j):
            current[i] = i + 1


def poisson_binomial(p: Union[ResidueProfile, Sequence[Scalar]],
                     exclude: Optional[Tuple[int, int]] = None) -> PoissonTrialStats:
    """Size distribution of a Poisson trial by the O(n^2) convolution recurrence.

    ``exclude`` names two distinct parties (1-indexed) dropped before the
    recurrence.
    """
    values = list(p.residues if isinstance(p, ResidueProfile) else p)
    n = len(values)
    if exclude is not None:
        i, j = exclude
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise InvalidInputError(f"bad exclusion pair {exclude}")
        values = [v for idx, v in enumerate(values, start=1) if idx not in (i, j)]
        exclude = (i, j)
    one = values[0] * 0 + 1 if values else Fraction(1)
    pmf = [one]
    for q in values:
        nxt = [one * 0] * (len(pmf) + 1)
        for size, mass in enumerate(pmf):
            nxt[size] += mass * (1 - q)
            nxt[size + 1] += mass * q
        pmf = nxt
    return PoissonTrialStats(tuple(pmf), exclude)


def truncated_deficit(p: ResidueProfile) -> Scalar:
    """E[1{|B| < k} (k - |B|)] for the Poisson trial B with success probabilities p."""
    pmf = poisson_binomial(p).pmf
    k = p.k
    return sum(((k - size) * pmf[size] for size in range(min(k, len(pmf)))), pmf[0] * 0)


def half_absolute_deviation(p: ResidueProfile) -> Scalar:
    """0.5 * E[| |B| - k |], the second form of the truncated deficit."""
    pmf = poisson_binomial(p).pmf
    return sum((abs(size - p.k) * mass for size, mass in enumerate(pmf)), pmf[0] * 0) / 2


def parse_subset(text: Union[str, Sequence[int]], n: Optional[int] = None) -> Subset:
    """Parse "1,3,5" (or a sequence) into a sorted 1-indexed tuple."""
    if isinstance(text, str):
        parts = [t for t in text.replace(" ", "").split(",") if t]
        try:
            items = [int(t) for t in parts]
        except ValueError:
            raise InvalidInputError(f"bad coalition {text!r}") from None
    else:
        items = [int(t) for t in text]
    if len(set(items)) != len(items):
        raise InvalidInputError(f"coalition {text!r} repeats a party")
    if n is not None and any(not 1 <= i <= n for i in items):
        raise InvalidInputError(f"coalition {text!r} names a party outside 1..{n}")
    return tuple(sorted(items))
