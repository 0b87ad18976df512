"""Exact multi-index combinatorics for the dimension-reduction step.

Two identities let the d-dimensional Leibniz convolution collapse onto the
one-dimensional split sum:

* the multinomial Vandermonde identity
      sum_{b <= a, |b| = l} (|b|!/b!) (|g|!/g!) = |a|!/a!     (g = a - b),
  verified in exact integers, and
* the reduction
      sum_{b+g=a} (a!/(b!g!)) C0^|b| C^|g| |g|! / ln^|g|(|g|+e)
        = sum_{l+j=|a|} |a|! C0^l C^j / (l! ln^j(j+e)),
  verified with exact rational coefficients against one shared table of
  high-precision ln(j+e) powers, so the check isolates the combinatorics
  rather than precision noise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, workprec

from .errors import DomainError, ResourceLimitError
from .numerics import _GUARD, _resolve_precision

ENUMERATION_CAP = 10 ** 7
REDUCTION_ORDER_CAP = 12


@dataclass(frozen=True)
class MultiIndex:
    """A d-tuple of nonnegative integers with factorial/order arithmetic."""

    components: tuple[int, ...]

    def __post_init__(self):
        if not self.components:
            raise DomainError("dimension must be >= 1")
        if any(c < 0 or not isinstance(c, int) for c in self.components):
            raise DomainError("components must be nonnegative integers")

    @classmethod
    def of(cls, *components: int) -> "MultiIndex":
        return cls(tuple(components))

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        """|a| = sum of components."""
        return sum(self.components)

    def factorial(self) -> int:
        """a! = product of component factorials, exact."""
        return math.prod(math.factorial(c) for c in self.components)

    def __le__(self, other: "MultiIndex") -> bool:
        if self.d != other.d:
            raise DomainError("dimension mismatch")
        return all(a <= b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        if self.d != other.d:
            raise DomainError("dimension mismatch")
        diff = tuple(a - b for a, b in zip(self.components, other.components))
        if any(c < 0 for c in diff):
            raise DomainError("subtraction would go negative")
        return MultiIndex(diff)

    def __iter__(self):
        return iter(self.components)


def enumerate_multiindices(d: int, total: int) -> list[MultiIndex]:
    """All multi-indices with |a| = total, ordered with the first component
    descending (lexicographic on tuples, largest first)."""
    if d < 1:
        raise DomainError("d must be >= 1")
    if total < 0:
        raise DomainError("total must be >= 0")
    count = math.comb(total + d - 1, d - 1)
    if count > ENUMERATION_CAP:
        raise ResourceLimitError(
            f"{count} multi-indices exceed the enumeration cap {ENUMERATION_CAP}"
        )

    def rec(dim: int, t: int):
        if dim == 1:
            yield (t,)
            return
        for first in range(t, -1, -1):
            for rest in rec(dim - 1, t - first):
                yield (first,) + rest

    out = [MultiIndex(c) for c in rec(d, total)]
    assert len(out) == count
    return out


def _sub_indices(alpha: MultiIndex):
    """All beta <= alpha (componentwise), as tuples."""
    return itertools.product(*(range(c + 1) for c in alpha.components))


@dataclass(frozen=True)
class VandermondeCheck:
    """Exact-integer evaluation of both sides of the split identity."""

    alpha: MultiIndex
    l: int
    lhs: int
    rhs: int

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


def vandermonde_check(alpha: MultiIndex, l: int) -> VandermondeCheck:
    """Compare sum_{b<=a, |b|=l} (l!/b!) ((|a|-l)!/(a-b)!) with |a|!/a!."""
    if not (0 <= l <= alpha.order):
        raise DomainError(f"l={l} outside 0..{alpha.order}")
    fact_l = math.factorial(l)
    fact_g = math.factorial(alpha.order - l)
    lhs = 0
    for beta in _sub_indices(alpha):
        if sum(beta) != l:
            continue
        gamma = tuple(a - b for a, b in zip(alpha.components, beta))
        bfact = math.prod(math.factorial(b) for b in beta)
        gfact = math.prod(math.factorial(g) for g in gamma)
        lhs += (fact_l // bfact) * (fact_g // gfact)
    rhs = math.factorial(alpha.order) // alpha.factorial()
    return VandermondeCheck(alpha=alpha, l=l, lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class ReductionCheck:
    """Numeric comparison of the d-dimensional and 1-d convolution sums."""

    alpha: MultiIndex
    lhs: mpf
    rhs: mpf
    rel_diff: mpf
    tolerance: mpf

    @property
    def ok(self) -> bool:
        return self.rel_diff <= self.tolerance


def highdim_reduction_check(alpha: MultiIndex, C0, C,
                            precision: int | None = None) -> ReductionCheck:
    """Verify the collapse of the d-dimensional sum onto the 1-d split sum.

    C0 and C are taken as exact rationals; the per-j rational coefficients
    of 1/ln^j(j+e) are accumulated exactly on both sides, and only the final
    combination with the shared transcendental table rounds.
    """
    if alpha.order > REDUCTION_ORDER_CAP:
        raise DomainError(f"|alpha| must be <= {REDUCTION_ORDER_CAP}")
    C0f, Cf = Fraction(C0), Fraction(C)
    if C0f <= 0 or Cf <= 0:
        raise DomainError("C0 and C must be positive rationals")
    p = _resolve_precision(precision)
    order = alpha.order
    afact = alpha.factorial()
    fact = [math.factorial(i) for i in range(order + 1)]

    lhs_coeff = [Fraction(0)] * (order + 1)
    for beta in _sub_indices(alpha):
        j = order - sum(beta)
        gamma = tuple(a - b for a, b in zip(alpha.components, beta))
        bfact = math.prod(math.factorial(b) for b in beta)
        gfact = math.prod(math.factorial(g) for g in gamma)
        # (a!/(b! g!)) * C0^|b| * C^|g| * |g|!
        lhs_coeff[j] += Fraction(afact, bfact * gfact) * C0f ** (order - j) \
            * Cf ** j * fact[j]

    rhs_coeff = [
        Fraction(fact[order], fact[order - j]) * C0f ** (order - j) * Cf ** j
        for j in range(order + 1)
    ]

    with workprec(p + _GUARD):
        lninv = [mp.log(j + mp.e) ** (-j) for j in range(order + 1)]

        def combine(coeffs):
            acc = mpf(0)
            for j, c in enumerate(coeffs):
                if c:
                    acc += mpf(c.numerator) / mpf(c.denominator) * lninv[j]
            return acc

        lhs = combine(lhs_coeff)
        rhs = combine(rhs_coeff)
        tol = mpf(2) ** (32 - p)
        rel = abs(lhs - rhs) / rhs
        return ReductionCheck(alpha=alpha, lhs=+lhs, rhs=+rhs,
                              rel_diff=+rel, tolerance=tol)


def binomial_completeness(alpha: MultiIndex) -> tuple[int, int]:
    """(sum over all b <= a of a!/(b!(a-b)!), 2^|a|) -- equal exactly."""
    afact = alpha.factorial()
    total = 0
    for beta in _sub_indices(alpha):
        gamma = tuple(a - b for a, b in zip(alpha.components, beta))
        bfact = math.prod(math.factorial(b) for b in beta)
        gfact = math.prod(math.factorial(g) for g in gamma)
        total += afact // (bfact * gfact)
    return total, 2 ** alpha.order
