"""The split-weight sequence a_j = 1/(l! log^j(j+e)) and its lemmas.

This module certifies, numerically and at controlled precision, every
statement used to control the convolution sum

    sum_{l+j=n} C0^l C^j / (l! log^j(j+e))

which drives the inductive derivative-bound propagation: monotonicity of
a_j in the two stated ranges, the Gaussian and super-Gaussian upper bounds
near j = n - log n, the d_n < 6 bound, the log(n+10) shift bound, and the
bootstrap ratio R(n) whose supremum defines the measured constant K1.

Implicit constants in the source statements are unspecified; the checks
therefore report worst-case measured ratios and record empirical
thresholds instead of assuming any.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf, workprec

from .errors import DomainError, PrecisionError
from .numerics import (
    LogMagnitude,
    _GUARD,
    _resolve_precision,
    _tables,
    lnfact_f64,
    lnln_f64,
    round_to,
)
from .reports import LemmaCheckReport

# Skip the float64 prescreen below this many terms; above it, only terms
# within _select_margin() nats of the peak enter the high-precision sum.
_PRESELECT_MIN = 1024

_LN2 = math.log(2.0)


def _select_margin(precision: int, n: int) -> float:
    # Dropped tail <= (n+1) * exp(-margin) relative to the peak term,
    # kept below 2^-(precision+8) with room for float64 log noise.
    return (precision + 40) * _LN2 + math.log(n + 1) + 10.0


def geometric_grid(nmax: int, start: int = 2) -> list[int]:
    """The sweep grid {ceil(2^(k/2))} capped at nmax, nmax appended."""
    if nmax < start:
        raise DomainError(f"nmax must be >= {start}")
    out: list[int] = []
    k = 0
    while True:
        n = math.ceil(2 ** (k / 2))
        if n > nmax:
            break
        if n >= start and (not out or n != out[-1]):
            out.append(n)
        k += 1
    if not out or out[-1] != nmax:
        out.append(nmax)
    return out


# ---------------------------------------------------------------------------
# Split weights and the closed majorant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitWeight:
    """One weight a_j = 1/(l! * ln^j(j+e)) with j + l = n."""

    n: int
    j: int
    l: int
    value: LogMagnitude


def _log_aj(n: int, j: int, tables) -> mpf:
    # ln a_j = -ln((n-j)!) - j * ln(ln(j+e))
    return -tables.lnfact[n - j] - j * tables.lnln[j]


def split_weight(n: int, j: int, precision: int | None = None) -> SplitWeight:
    """The weight a_j for the split j + l = n."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if j < 0 or j > n:
        raise IndexError(f"j={j} outside 0..{n}")
    p = _resolve_precision(precision)
    t = _tables(p, n)
    with workprec(p + _GUARD):
        log_aj = _log_aj(n, j, t)
    return SplitWeight(n=n, j=j, l=n - j,
                       value=LogMagnitude(1, round_to(log_aj, p)))


def closed_majorant(n: int, C, precision: int | None = None) -> LogMagnitude:
    """C^n * n! / ln^n(n+e), the closed-form envelope at order n."""
    if n < 0:
        raise DomainError("n must be >= 0")
    p = _resolve_precision(precision)
    with workprec(p):
        Cv = +mpf(C)
    if Cv <= 0:
        raise DomainError("C must be > 0")
    t = _tables(p, n)
    with workprec(p + _GUARD):
        log_val = n * mp.log(Cv) + t.lnfact[n] - n * t.lnln[n]
    return LogMagnitude(1, round_to(log_val, p))


# ---------------------------------------------------------------------------
# Convolution sum and bootstrap ratio
# ---------------------------------------------------------------------------

def convolution_sum(n: int, C0, C, precision: int | None = None) -> LogMagnitude:
    """sum_{l+j=n} C0^l C^j / (l! ln^j(j+e)) in log space.

    All terms are positive; for large n a float64 prescreen drops terms
    more than _select_margin() nats below the peak, which perturbs the sum
    by less than one ulp at the working precision.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    p = _resolve_precision(precision)
    with workprec(p):
        C0v, Cv = +mpf(C0), +mpf(C)
    if C0v <= 0 or Cv <= 0:
        raise DomainError("C0 and C must be > 0")
    t = _tables(p, n)

    if n + 1 > _PRESELECT_MIN:
        lf = lnfact_f64(n)
        ll = lnln_f64(n)
        j = np.arange(n + 1, dtype=np.float64)
        logs = ((n - j) * float(mp.log(C0v)) + j * float(mp.log(Cv))
                - lf[::-1] - j * ll)
        keep = np.nonzero(logs >= logs.max() - _select_margin(p, n))[0]
        indices = [int(i) for i in keep]
    else:
        indices = list(range(n + 1))

    with workprec(p + _GUARD):
        lnC0, lnC = mp.log(C0v), mp.log(Cv)
        term_logs = [
            (n - jj) * lnC0 + jj * lnC - t.lnfact[n - jj] - jj * t.lnln[jj]
            for jj in indices
        ]
        hi = max(term_logs)
        s = mpf(0)
        for tl in term_logs:
            s += mp.exp(tl - hi)
        log_val = hi + mp.log(s)
    return LogMagnitude(1, round_to(log_val, p))


@dataclass(frozen=True)
class MajorantParams:
    """Bound parameters (C0, kappa, K) with C = kappa*C0 + K*(1/ln(kappa) + 1)."""

    C0: mpf
    kappa: mpf
    K: mpf
    C: mpf
    precision: int

    @classmethod
    def create(cls, C0, kappa, K=0, precision: int | None = None) -> "MajorantParams":
        p = _resolve_precision(precision)
        with workprec(p):
            C0v, kv, Kv = +mpf(C0), +mpf(kappa), +mpf(K)
            if C0v <= 0:
                raise DomainError("C0 must be > 0")
            if kv <= 1:
                raise DomainError("kappa must be > 1 strictly")
            if Kv < 0:
                raise DomainError("K must be >= 0")
            Cv = kv * C0v + Kv * (1 / mp.log(kv) + 1)
        return cls(C0=C0v, kappa=kv, K=Kv, C=Cv, precision=p)


def bootstrap_ratio(n: int, params: MajorantParams, C=None,
                    precision: int | None = None) -> mpf:
    """R(n): the convolution sum over its claimed envelope.

        R(n) = conv(n, C0, C) / [ (1/ln(kappa)+1) (n+1) C^n / ln^(n+1)(n+1+e) ]

    Requires C >= kappa*C0 (defaults to params.C, which satisfies it by
    construction).  sup_n R(n) over a sweep is the measured constant K1.
    """
    p = _resolve_precision(precision if precision is not None else params.precision)
    with workprec(p):
        Cv = params.C if C is None else +mpf(C)
        if Cv < params.kappa * params.C0:
            raise DomainError("need C >= kappa*C0")
    conv = convolution_sum(n, params.C0, Cv, precision=p)
    t = _tables(p, n + 1)
    with workprec(p + _GUARD):
        log_den = (mp.log(1 / mp.log(params.kappa) + 1) + mp.log(n + 1)
                   + n * mp.log(Cv) - (n + 1) * t.lnln[n + 1])
        ratio = mp.exp(conv.log_abs - log_den)
    return round_to(ratio, p)


def bootstrap_sweep(params: MajorantParams, nmax: int,
                    precision: int | None = None) -> tuple[list[tuple[int, mpf]], mpf]:
    """R(n) over the geometric grid up to nmax; returns (rows, K1 = max R)."""
    p = _resolve_precision(precision if precision is not None else params.precision)
    rows = [(n, bootstrap_ratio(n, params, precision=p))
            for n in geometric_grid(nmax)]
    k1 = max(r for _, r in rows)
    return rows, k1


# ---------------------------------------------------------------------------
# Monotonicity of a_j
# ---------------------------------------------------------------------------

def check_monotonicity(n: int, precision: int | None = None,
                       collect_rows: bool = False) -> LemmaCheckReport:
    """Verify a_j <= a_{j+1} for n/2 < j <= n - ln n - 2 and
    a_j >= a_{j+1} for n - ln n + 1 <= j <= n-1.

    Range endpoints are rounded conservatively (floor for upper endpoints,
    ceil for lower ones); j = n/2 itself is excluded from the increasing
    range.  Empty ranges pass vacuously.
    """
    if n < 3:
        raise DomainError("n must be >= 3")
    p = _resolve_precision(precision)
    t = _tables(p, n)
    violations: list[tuple] = []
    rows: list[tuple] = []
    worst = mpf("-inf")

    with workprec(p + _GUARD):
        ln_n = mp.log(n)
        inc_lo = n // 2 + 1
        inc_hi = int(mp.floor(n - ln_n - 2))
        dec_lo = int(mp.ceil(n - ln_n + 1))
        dec_hi = n - 1

        prev = _log_aj(n, inc_lo, t) if inc_lo <= inc_hi else None
        for j in range(inc_lo, inc_hi + 1):
            cur = _log_aj(n, j + 1, t)
            diff = prev - cur          # ln(a_j / a_{j+1}); want <= 0
            if diff > worst:
                worst = diff
            ok = diff <= 0
            if not ok:
                violations.append((n, j))
            if collect_rows:
                rows.append((n, j, mp.exp(diff), ok))
            prev = cur

        prev = _log_aj(n, dec_lo, t) if dec_lo <= dec_hi else None
        for j in range(dec_lo, dec_hi + 1):
            cur = _log_aj(n, j + 1, t)
            diff = cur - prev          # ln(a_{j+1} / a_j); want <= 0
            if diff > worst:
                worst = diff
            ok = diff <= 0
            if not ok:
                violations.append((n, j))
            if collect_rows:
                rows.append((n, j, mp.exp(diff), ok))
            prev = cur

        worst_ratio = round_to(mp.exp(worst), p) if worst > mpf("-inf") else mpf(0)

    return LemmaCheckReport(
        lemma_id="aj_monotonicity",
        n_grid=[n],
        worst_ratio=worst_ratio,
        violations=violations,
        precision=p,
        params={"inc_range": [inc_lo, inc_hi], "dec_range": [dec_lo, dec_hi]},
        rows=rows,
        notes="j = n/2 exactly is excluded from the increasing range",
    )


def monotonicity_threshold(start: int = 100, limit: int = 5000,
                           precision: int | None = None) -> int | None:
    """Smallest n >= start with zero monotonicity violations, scanning upward."""
    for n in range(max(start, 3), limit + 1):
        if not check_monotonicity(n, precision=precision).violations:
            return n
    return None


# ---------------------------------------------------------------------------
# a_j asymptotics near j = n - log n
# ---------------------------------------------------------------------------

def check_aj_gaussian(n: int, s: int, precision: int | None = None) -> mpf:
    """Ratio of a_j to n (ln n)^(-n-1/2) e^(-(3/2) s^2 / ln n), j = n - round(ln n) + s.

    The comparator should dominate a_j up to a bounded constant; the
    returned ratio is that constant's sample at (n, s).
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    p = _resolve_precision(precision)
    t = _tables(p, n)
    with workprec(p + _GUARD):
        ln_n = mp.log(n)
        if abs(s) > 2 * ln_n ** (mpf(2) / 3):
            raise DomainError("need |s| <= 2 (ln n)^(2/3)")
        j = n - int(mp.nint(ln_n)) + s
        if j < 0 or j > n:
            raise IndexError(f"j={j} outside 0..{n}")
        log_cmp = mp.log(n) - (n + mpf(1) / 2) * mp.log(ln_n) \
            - mpf(3) / 2 * s * s / ln_n
        ratio = mp.exp(_log_aj(n, j, t) - log_cmp)
    return round_to(ratio, p)


def check_aj_supergaussian(n: int, L, precision: int | None = None) -> mpf:
    """Ratio of a_j to n^(-L ln(L/e)) (ln n)^(-n-1/2), j = n - round(L ln n)."""
    if n < 2:
        raise DomainError("n must be >= 2")
    p = _resolve_precision(precision)
    with workprec(p):
        Lv = +mpf(L)
    if Lv <= 1:
        raise DomainError("need L > 1")
    t = _tables(p, n)
    with workprec(p + _GUARD):
        ln_n = mp.log(n)
        j = n - int(mp.nint(Lv * ln_n))
        if j < 0 or j > n:
            raise IndexError(f"j={j} outside 0..{n}")
        log_cmp = -Lv * mp.log(Lv / mp.e) * ln_n - (n + mpf(1) / 2) * mp.log(ln_n)
        ratio = mp.exp(_log_aj(n, j, t) - log_cmp)
    return round_to(ratio, p)


# ---------------------------------------------------------------------------
# d_n < 6 and the log(n+10) shift
# ---------------------------------------------------------------------------

def _dn_mpf(n: int, precision: int) -> mpf:
    with workprec(precision + _GUARD):
        e = mp.e
        num = mp.log(n + 1 + e)
        val = num / (n + 1) * mp.exp(n * (mp.log(num) - mp.log(mp.log(n + e))))
    return round_to(val, precision)


def check_dn(nmax: int, precision: int | None = None,
             spot_check_rel: float = 1e-9) -> LemmaCheckReport:
    """d_n = (ln(n+1+e)/(n+1)) (ln(n+1+e)/ln(n+e))^n for 2 <= n <= nmax; max < 6.

    The full range runs vectorized in float64 (the margin below 6 is many
    orders above float64 noise); the maximizer and a geometric subsample are
    recomputed in high precision and must agree to ``spot_check_rel``.
    """
    if nmax < 2:
        raise DomainError("nmax must be >= 2")
    p = _resolve_precision(precision)
    n = np.arange(2, nmax + 1, dtype=np.float64)
    lnn1 = np.log(n + 1 + math.e)
    dn = lnn1 / (n + 1) * np.exp(n * (np.log(lnn1) - np.log(np.log(n + math.e))))
    i_max = int(dn.argmax())
    n_max = int(n[i_max])

    worst = _dn_mpf(n_max, p)
    spots = {n_max} | set(geometric_grid(nmax))
    for m in sorted(spots):
        hp = _dn_mpf(m, p)
        f64 = float(dn[m - 2])
        if abs(f64 - float(hp)) > spot_check_rel * float(hp):
            raise PrecisionError(
                f"d_n float64/high-precision mismatch at n={m}: {f64} vs {hp}"
            )

    violations = [(int(m), None) for m in n[dn >= 6.0]]
    mask10 = n >= 10
    return LemmaCheckReport(
        lemma_id="dn_bound",
        n_grid=sorted(spots),
        worst_ratio=worst,
        violations=violations,
        precision=p,
        params={
            "argmax_n": n_max,
            "max_dn_f64": float(dn[i_max]),
            "max_dn_n_ge_10": float(dn[mask10].max()) if mask10.any() else None,
            "bound": 6,
        },
        notes="full range scanned in float64; maximizer and geometric "
              "subsample certified in high precision",
    )


def log_shift_ratio(n: int, precision: int | None = None) -> tuple[mpf, mpf]:
    """((ln(n+10)/ln n)^n, e^(10/ln n)) -- the quantity and its limit form."""
    if n < 2:
        raise DomainError("n must be >= 2")
    p = _resolve_precision(precision)
    with workprec(p + _GUARD):
        ln_n = mp.log(n)
        value = mp.exp(n * (mp.log(mp.log(n + 10)) - mp.log(ln_n)))
        limit_form = mp.exp(10 / ln_n)
    return round_to(value, p), round_to(limit_form, p)


def check_log_shift(nmax: int, precision: int | None = None,
                    spot_check_rel: float = 1e-9) -> mpf:
    """sup over 2 <= n <= nmax of (ln(n+10)/ln n)^n.

    Same float64 + high-precision-spot-check strategy as :func:`check_dn`.
    The supremum sits at small n (n = 9) and the sequence decreases toward 1
    like e^(10/ln n).
    """
    if nmax < 2:
        raise DomainError("nmax must be >= 2")
    p = _resolve_precision(precision)
    n = np.arange(2, nmax + 1, dtype=np.float64)
    ls = np.exp(n * (np.log(np.log(n + 10)) - np.log(np.log(n))))
    n_max = int(n[int(ls.argmax())])
    sup, _ = log_shift_ratio(n_max, p)
    for m in sorted({n_max} | set(geometric_grid(nmax))):
        hp, _ = log_shift_ratio(m, p)
        if abs(float(ls[m - 2]) - float(hp)) > spot_check_rel * float(hp):
            raise PrecisionError(f"log-shift float64 mismatch at n={m}")
    return sup
