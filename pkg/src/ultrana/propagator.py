"""Inductive propagation of derivative-norm bounds through Leibniz sums.

Given coefficient bounds sup|d^a W|, sup|d^a V| <= C0^|a| and a base case
(b0, b1, b2) obtained from interpolation, the second-order recurrence

    b_{n+1} = sum_{l+j=n}   (n!/(l!j!))     C0^l b_j
            + sum_{l+j=n-1} ((n-1)!/(l!j!)) C0^l b_j        (n >= 2)

propagates valid upper bounds for ||d^n u||_{L^p} of any normalized solution
of  u'' = W u' + V u.  The first-order variant (one Leibniz sum, b0 = 1)
serves  u' = W u  and, with p = 2, the half-Laplacian equation |D|u = W u.

The source analysis only proves such bounds exist; here the recurrence is
run forward as the algorithm, with the base values taken exactly as proved
(b2 = 2 + c_p^2, not smaller).  ``fit_K`` then inverts the closed envelope
C^n n!/log^n(n+e) to find the smallest constant K closing the induction at
a given kappa.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, workprec

from .errors import DomainError
from .numerics import LogMagnitude, _GUARD, _resolve_precision, _tables, round_to


@dataclass(frozen=True)
class CoefficientBounds:
    """Exponential-type hypothesis: sup|d^a W|, sup|d^a V| <= C0^|a|."""

    C0: mpf


@dataclass(frozen=True)
class BaseCase:
    """(b0, b1, b2) = (1, c_p sqrt(2+c_p^2), 2+c_p^2) from interpolation."""

    c_p: mpf
    b0: mpf
    b1: mpf
    b2: mpf


@dataclass(frozen=True)
class BoundSequence:
    """Propagated bounds b_0..b_N, immutable once built.

    Prefix-stable: recomputing with a larger N leaves earlier entries
    bit-identical.
    """

    equation_kind: str          # "second_order" | "first_order"
    C0: mpf
    base: BaseCase | None
    bounds: tuple[LogMagnitude, ...]
    precision: int

    def __len__(self) -> int:
        return len(self.bounds)


def base_case(c_p, precision: int | None = None) -> BaseCase:
    """Base bounds from the interpolation step; requires c_p >= 1.

    c_p = 2 is the stated constant for the sup-norm case.
    """
    p = _resolve_precision(precision)
    with workprec(p):
        cp = +mpf(c_p)
        if cp < 1:
            raise DomainError("c_p must be >= 1")
        b2 = 2 + cp * cp
        b1 = cp * mp.sqrt(b2)
        return BaseCase(c_p=cp, b0=mpf(1), b1=b1, b2=b2)


def _log_or_ninf(x: mpf) -> mpf:
    return mp.log(x) if x > 0 else mpf("-inf")


def _leibniz_log(n: int, lnC0: mpf, logb: list[mpf], lf) -> mpf:
    # log of sum_{l+j=n} (n!/(l!j!)) C0^l b_j; the l = 0 term carries no
    # C0 factor (avoids 0 * -inf when C0 = 0)
    terms = [lf[n] - lf[n - j] - lf[j] + logb[j]
             + ((n - j) * lnC0 if j < n else 0)
             for j in range(n + 1)]
    hi = max(terms)
    if hi == mpf("-inf"):
        return hi
    s = mpf(0)
    for t in terms:
        if t > mpf("-inf"):
            s += mp.exp(t - hi)
    return hi + mp.log(s)


def propagate_second_order(C0, base: BaseCase, N: int,
                           precision: int | None = None) -> BoundSequence:
    """Run the two-sum recurrence up to order N (N >= 3); b3 uses n = 2."""
    if N < 3:
        raise DomainError("N must be >= 3")
    p = _resolve_precision(precision)
    with workprec(p):
        C0v = +mpf(C0)
    if C0v < 0:
        raise DomainError("C0 must be >= 0")
    t = _tables(p, N + 1)
    with workprec(p + _GUARD):
        lnC0 = _log_or_ninf(C0v)
        lf = t.lnfact
        logb = [mpf(0), _log_or_ninf(base.b1), _log_or_ninf(base.b2)]
        for n in range(2, N):
            s1 = _leibniz_log(n, lnC0, logb, lf)
            s2 = _leibniz_log(n - 1, lnC0, logb, lf)
            hi = max(s1, s2)
            logb.append(hi + mp.log(mp.exp(s1 - hi) + mp.exp(s2 - hi)))
    bounds = tuple(LogMagnitude(1, round_to(lb, p)) for lb in logb)
    return BoundSequence(equation_kind="second_order", C0=C0v, base=base,
                         bounds=bounds, precision=p)


def propagate_first_order(C0, N: int, precision: int | None = None) -> BoundSequence:
    """Single-sum recurrence b_{n+1} = sum_{l+j=n} (n!/(l!j!)) C0^l b_j, b0 = 1."""
    if N < 1:
        raise DomainError("N must be >= 1")
    p = _resolve_precision(precision)
    with workprec(p):
        C0v = +mpf(C0)
    if C0v < 0:
        raise DomainError("C0 must be >= 0")
    t = _tables(p, N + 1)
    with workprec(p + _GUARD):
        lnC0 = _log_or_ninf(C0v)
        lf = t.lnfact
        logb = [mpf(0)]
        for n in range(0, N):
            logb.append(_leibniz_log(n, lnC0, logb, lf))
    bounds = tuple(LogMagnitude(1, round_to(lb, p)) for lb in logb)
    return BoundSequence(equation_kind="first_order", C0=C0v, base=None,
                         bounds=bounds, precision=p)


def implied_constants(bounds, precision: int | None = None) -> list[mpf]:
    """C_n = (b_n ln^n(n+e) / n!)^(1/n) for n = 1..N (index 0 of the result is C_1).

    ``bounds`` is a BoundSequence or a plain sequence of LogMagnitude with
    entry 0 corresponding to order 0.
    """
    seq = bounds.bounds if isinstance(bounds, BoundSequence) else tuple(bounds)
    p = _resolve_precision(
        precision if precision is not None
        else (bounds.precision if isinstance(bounds, BoundSequence) else None)
    )
    N = len(seq) - 1
    t = _tables(p, N)
    out = []
    with workprec(p + _GUARD):
        for n in range(1, N + 1):
            ln_cn = (seq[n].log_abs + n * t.lnln[n] - t.lnfact[n]) / n
            out.append(round_to(mp.exp(ln_cn), p))
    return out


def fit_K(seq, kappa, C0=None, precision: int | None = None) -> mpf:
    """Smallest K >= 0 with b_n <= (kappa C0 + K(1/ln kappa + 1))^n n!/ln^n(n+e)
    for all 1 <= n <= N.

    Exact per-n inversion: K = max_n [C_n - kappa C0]^+ / (1/ln kappa + 1),
    where C_n is the implied constant; ties at K = 0 resolve to 0.
    """
    p = _resolve_precision(
        precision if precision is not None
        else (seq.precision if isinstance(seq, BoundSequence) else None)
    )
    with workprec(p):
        kv = +mpf(kappa)
        if kv <= 1:
            raise DomainError("kappa must be > 1")
        if C0 is None:
            if not isinstance(seq, BoundSequence):
                raise DomainError("C0 is required when seq is a bare sequence")
            C0v = seq.C0
        else:
            C0v = +mpf(C0)
    cns = implied_constants(seq, precision=p)
    with workprec(p + _GUARD):
        excess = max(cn - kv * C0v for cn in cns)
        if excess <= 0:
            return mpf(0)
        K = excess / (1 / mp.log(kv) + 1)
    return round_to(K, p)


def envelope_prefactor(seq, kappa, C0, K, precision: int | None = None) -> mpf:
    """sup_n b_n / envelope_n for the envelope (kappa C0 + K(1/ln kappa+1))^n n!/ln^n.

    Exposes the multiplicative-prefactor form of the bound (as appears in
    the L^1 setting); purely diagnostic, no claim is made about it.
    """
    p = _resolve_precision(
        precision if precision is not None
        else (seq.precision if isinstance(seq, BoundSequence) else None)
    )
    bounds = seq.bounds if isinstance(seq, BoundSequence) else tuple(seq)
    N = len(bounds) - 1
    t = _tables(p, N)
    with workprec(p + _GUARD):
        kv, C0v, Kv = +mpf(kappa), +mpf(C0), +mpf(K)
        if kv <= 1:
            raise DomainError("kappa must be > 1")
        lnC = mp.log(kv * C0v + Kv * (1 / mp.log(kv) + 1))
        worst = mpf("-inf")
        for n in range(0, N + 1):
            ln_env = n * lnC + t.lnfact[n] - n * t.lnln[n]
            gap = bounds[n].log_abs - ln_env
            if gap > worst:
                worst = gap
        pref = mp.exp(worst)
    return round_to(pref, p)


def sequence_rows(seq: BoundSequence, kappa, K=None,
                  precision: int | None = None) -> list[tuple]:
    """CSV rows (n, log_b_n, implied_C_n, envelope_margin) for a sequence.

    envelope_margin is ln(envelope_n) - ln(b_n) with the envelope built from
    the given K (fitted on the fly when K is None); nonnegative margins mean
    the envelope dominates.
    """
    p = _resolve_precision(precision if precision is not None else seq.precision)
    with workprec(p):
        kv = +mpf(kappa)
        Kv = fit_K(seq, kv, precision=p) if K is None else +mpf(K)
    cns = implied_constants(seq, precision=p)
    t = _tables(p, len(seq))
    rows = []
    with workprec(p + _GUARD):
        lnC = mp.log(kv * seq.C0 + Kv * (1 / mp.log(kv) + 1))
        for n in range(1, len(seq)):
            ln_env = n * lnC + t.lnfact[n] - n * t.lnln[n]
            rows.append((n, seq.bounds[n].log_abs, cns[n - 1],
                         ln_env - seq.bounds[n].log_abs))
    return rows
