"""The explicit solution u(x) = e^(-A) e^(A e^(i C0 x)),  A = 1/(1+C0^2).

With phi(x) = A e^(i C0 x), u solves u'' = W u' + V u for W = phi' and
V = phi''; the choice of A makes both coefficients entire of exponential
type C0 (||d^n W|| = A C0^(n+1) <= C0^n and ||d^n V|| = A C0^(n+2) <= C0^n),
and ||u||_inf = 1, attained at multiples of the period 2 pi / C0.

Writing w = i C0 x, u is exactly the exponential generating function of the
Touchard polynomials T_n(A), so

    u^(n)(0) = (i C0)^n T_n(A) = (i C0)^n sum_k S(n,k) A^k.

This closed form is implementer-derived and is gated behind the Faa di
Bruno recurrence oracle (``derivative_at_zero_recurrence``) in the test
suite before anything else relies on it.

The module computes exact derivatives, sup-norm brackets over one period,
the Cauchy-integral upper bound with r = C0^(-1) log(n / (A log n)), the
two falsification searches that would disprove any strengthened bound
(log exponent lambda > 1, or kappa < 1 in front of C0), and the growth of
|u(iy)| along the imaginary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from mpmath import mp, mpc, mpf, workprec

from .errors import DomainError
from .numerics import (
    STIRLING_CAP,
    LogMagnitude,
    _GUARD,
    _resolve_precision,
    _tables,
    lnfact_f64,
    lnln_f64,
    round_to,
    stirling2_row,
    touchard,
    touchard_log_sequence,
)

_I_POW = ((1, 0), (0, 1), (-1, 0), (0, -1))  # i^n for n mod 4

DEFAULT_GRID = 4096
GRID_CAP = 2 ** 17
BRACKET_WIDTH_TARGET = 1e-3
_SAFETY = 1.1  # inflation absorbing the grid error of the (n+1)-st derivative


@dataclass(frozen=True)
class SharpExample:
    """Parameters of the explicit solution for one value of C0."""

    C0: mpf
    A: mpf
    period: mpf
    precision: int

    @classmethod
    def create(cls, C0, precision: int | None = None) -> "SharpExample":
        p = _resolve_precision(precision)
        with workprec(p):
            C0v = +mpf(C0)
            if C0v <= 0:
                raise DomainError("C0 must be > 0")
            A = 1 / (1 + C0v * C0v)
            period = 2 * mp.pi / C0v
        return cls(C0=C0v, A=A, period=period, precision=p)


def coefficient_sup_norms(ex: SharpExample, n: int) -> tuple[mpf, mpf]:
    """(sup|d^n W|, sup|d^n V|) = (A C0^(n+1), A C0^(n+2)), exact."""
    with workprec(ex.precision):
        return ex.A * ex.C0 ** (n + 1), ex.A * ex.C0 ** (n + 2)


# ---------------------------------------------------------------------------
# Exact derivatives at x = 0
# ---------------------------------------------------------------------------

def _log_touchard(n: int, A, precision: int) -> mpf:
    method = "stirling" if n <= STIRLING_CAP else "dobinski"
    return touchard(n, A, precision=precision, method=method).log_abs


def derivative_at_zero(ex: SharpExample, n: int,
                       precision: int | None = None) -> mpc:
    """u^(n)(0) = (i C0)^n T_n(A) via the Stirling closed form."""
    if n < 0:
        raise DomainError("n must be >= 0")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    lt = _log_touchard(n, ex.A, p)
    with workprec(p):
        mag = mp.exp(lt + n * mp.log(ex.C0))
        re, im = _I_POW[n % 4]
        return mpc(mag * re, mag * im)


def derivatives_at_zero_recurrence(ex: SharpExample, n: int,
                                   precision: int | None = None) -> list[mpc]:
    """u^(m)(0) for m = 0..n by the derivative recurrence of u' = phi' u:

        u^(m+1)(0) = sum_k C(m, k) phi^(k+1)(0) u^(m-k)(0),
        phi^(k)(0) = A (i C0)^k.

    Independent of the Stirling closed form; this is the oracle that gates it.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    with workprec(p + _GUARD):
        iC0 = mpc(0, ex.C0)
        ipow = [mpc(1)]
        for _ in range(n):
            ipow.append(ipow[-1] * iC0)
        u = [mpc(1)]
        for m in range(n):
            acc = mpc(0)
            c = 1  # C(m, k), exact integer, updated in place
            for k in range(m + 1):
                acc += c * ex.A * ipow[k + 1] * u[m - k]
                c = c * (m - k) // (k + 1)
            u.append(acc)
        return u


def derivative_at_zero_recurrence(ex: SharpExample, n: int,
                                  precision: int | None = None) -> mpc:
    return derivatives_at_zero_recurrence(ex, n, precision)[n]


# ---------------------------------------------------------------------------
# Derivatives on a grid (dual-method, high precision)
# ---------------------------------------------------------------------------

def derivative_on_grid(ex: SharpExample, n: int, grid_size: int,
                       precision: int | None = None,
                       rel_tol: float = 1e-20) -> list[mpc]:
    """u^(n) on a uniform grid over one period, cross-checked two ways.

    Method 1 evaluates e^(-A) (i C0)^n e^(A e^(i th)) sum_k S(n,k) A^k e^(i k th);
    method 2 runs the Leibniz recurrence in x from u itself.  Disagreement
    beyond ``rel_tol`` (relative to the largest magnitude) raises
    PrecisionError -- the caller's cue to retry at doubled precision.
    """
    from .errors import PrecisionError

    if n < 0:
        raise DomainError("n must be >= 0")
    if grid_size < 16:
        raise DomainError("grid_size must be >= 16")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    row = stirling2_row(n)
    with workprec(p + _GUARD):
        A, C0 = ex.A, ex.C0
        iC0 = mpc(0, C0)
        z = [mp.expjpi(2 * mpf(g) / grid_size) for g in range(grid_size)]

        # method 1: closed form, Horner in z = e^(i theta)
        iC0_n = iC0 ** n
        Apow = [mpf(1)]
        for _ in range(n):
            Apow.append(Apow[-1] * A)
        closed = []
        for zz in z:
            acc = mpc(0)
            for k in range(n, 0, -1):
                acc = (acc + row[k] * Apow[k]) * zz
            acc = acc + row[0] * Apow[0]
            base = mp.exp(-A + A * zz)
            closed.append(iC0_n * base * acc)

        # method 2: Leibniz recurrence in x
        ipow = [mpc(1)]
        for _ in range(n):
            ipow.append(ipow[-1] * iC0)
        grids = [[mp.exp(-A + A * zz) for zz in z]]
        for m in range(n):
            nxt = []
            for g, zz in enumerate(z):
                acc = mpc(0)
                c = 1
                for k in range(m + 1):
                    acc += c * A * ipow[k + 1] * zz * grids[m - k][g]
                    c = c * (m - k) // (k + 1)
                nxt.append(acc)
            grids.append(nxt)
        leib = grids[n]

        scale = max(abs(v) for v in closed)
        if scale == 0:
            scale = mpf(1)
        worst = max(abs(a - b) for a, b in zip(closed, leib)) / scale
        if worst > mpf(rel_tol):
            raise PrecisionError(
                f"dual-method derivative grids disagree: rel {mp.nstr(worst, 8)} "
                f"> {rel_tol} (n={n}, grid={grid_size})"
            )
        return closed


def derivative_grid_agreement(ex: SharpExample, nmax: int, grid_size: int,
                              precision: int | None = None) -> mpf:
    """Worst relative deviation between the two grid evaluation methods over
    all orders m <= nmax, sharing one Leibniz recurrence pass."""
    if nmax < 0:
        raise DomainError("nmax must be >= 0")
    if grid_size < 16:
        raise DomainError("grid_size must be >= 16")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    with workprec(p + _GUARD):
        A, C0 = ex.A, ex.C0
        iC0 = mpc(0, C0)
        z = [mp.expjpi(2 * mpf(g) / grid_size) for g in range(grid_size)]
        base = [mp.exp(-A + A * zz) for zz in z]

        ipow = [mpc(1)]
        for _ in range(nmax):
            ipow.append(ipow[-1] * iC0)

        worst = mpf(0)
        prev_rows: list[list[mpc]] = [list(base)]
        srow = [1]
        Apow_all = [mpf(1)]
        for _ in range(nmax):
            Apow_all.append(Apow_all[-1] * A)
        iC0_m = mpc(1)
        for m in range(nmax + 1):
            if m > 0:
                nxt = []
                for g, zz in enumerate(z):
                    acc = mpc(0)
                    c = 1
                    for k in range(m):
                        acc += c * A * ipow[k + 1] * zz * prev_rows[m - 1 - k][g]
                        c = c * (m - 1 - k) // (k + 1)
                    nxt.append(acc)
                prev_rows.append(nxt)
                cur = [0] * (m + 1)
                for k in range(1, m):
                    cur[k] = k * srow[k] + srow[k - 1]
                cur[m] = 1
                srow = cur
                iC0_m = iC0_m * iC0
            # closed form at order m against the recurrence row
            scale = mpf(0)
            diff = mpf(0)
            for g, zz in enumerate(z):
                acc = mpc(0)
                for k in range(m, 0, -1):
                    acc = (acc + srow[k] * Apow_all[k]) * zz
                acc = acc + srow[0]
                closed = iC0_m * base[g] * acc
                scale = max(scale, abs(closed))
                diff = max(diff, abs(closed - prev_rows[m][g]))
            if scale > 0:
                worst = max(worst, diff / scale)
        return +worst


# ---------------------------------------------------------------------------
# Sup-norm brackets over one period
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupNormBracket:
    """Grid bracket of ||u^(n)||_inf: lower = grid max, upper adds the
    mean-value correction (h/2) * max|u^(n+1)| * 1.1."""

    n: int
    lower: LogMagnitude
    upper: LogMagnitude
    grid_size: int

    @property
    def rel_width(self) -> float:
        return float(mp.exp(self.upper.log_abs - self.lower.log_abs) - 1)


def _logS_f64(N: int) -> np.ndarray:
    """float64 table of ln S(n, k), with -inf where S vanishes."""
    LS = np.full((N + 1, N + 1), -np.inf)
    LS[0, 0] = 0.0
    for n in range(1, N + 1):
        LS[n, n] = 0.0
        if n >= 2:
            k = np.arange(1, n)
            LS[n, 1:n] = np.logaddexp(np.log(k) + LS[n - 1, 1:n],
                                      LS[n - 1, 0:n - 1])
        elif n == 1:
            LS[1, 1] = 0.0
    return LS


def _touchard_logs_hp(nmax: int, A, precision: int) -> list[mpf]:
    """ln T_n(A) for n = 0..nmax, exact Stirling rows streamed row by row."""
    if nmax > STIRLING_CAP:
        raise DomainError(f"nmax={nmax} beyond the exact Stirling cap")
    out = []
    with workprec(precision + _GUARD):
        Av = +mpf(A)
        Apow = [mpf(1)]
        for _ in range(nmax):
            Apow.append(Apow[-1] * Av)
        prev = [1]
        out.append(mpf(0))  # T_0 = 1
        for m in range(1, nmax + 1):
            cur = [0] * (m + 1)
            for k in range(1, m):
                cur[k] = k * prev[k] + prev[k - 1]
            cur[m] = 1
            acc = mpf(0)
            for k in range(1, m + 1):
                acc += cur[k] * Apow[k]
            out.append(mp.log(acc))
            prev = cur
    return out


def _grid_max_factors(A: float, rows_p: np.ndarray, ns: list[int],
                      grid_size: int) -> dict[int, float]:
    """max over the theta grid of e^(A(cos th - 1)) |sum_k p_k e^(i k th)|
    for each requested n; rows_p[n] is the probability vector p_k
    (Stirling-Touchard weights normalized to sum 1)."""
    K = rows_p.shape[1]
    th = 2 * np.pi * np.arange(grid_size) / grid_size
    env = np.exp(A * (np.cos(th) - 1.0))
    P = rows_p[ns].T.astype(np.complex128)  # K x len(ns)
    out: dict[int, float] = {}
    block = max(1, (1 << 22) // max(K, 1))
    best = np.full(len(ns), -np.inf)
    for lo in range(0, grid_size, block):
        hi = min(lo + block, grid_size)
        E = np.exp(1j * np.outer(th[lo:hi], np.arange(K)))
        Q = np.abs(E @ P) * env[lo:hi, None]
        best = np.maximum(best, Q.max(axis=0))
    for i, n in enumerate(ns):
        out[n] = float(best[i])
    return out


def sup_norm_brackets(ex: SharpExample, nmax: int,
                      grid_size: int | None = None,
                      precision: int | None = None) -> list[SupNormBracket]:
    """Brackets for n = 0..nmax in one batch.

    The astronomically large scale C0^n T_n(A) is carried in high precision;
    the bounded shape factor (a probability-weighted trigonometric sum of
    modulus <= 1) is evaluated on the grid in float64.  When ``grid_size``
    is None the grid is doubled per n until the bracket's relative width
    reaches the target or the grid cap.
    """
    if nmax < 0:
        raise DomainError("nmax must be >= 0")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    auto = grid_size is None
    G0 = DEFAULT_GRID if auto else int(grid_size)
    if G0 < 16:
        raise DomainError("grid_size must be >= 16")

    Af = float(ex.A)
    N1 = nmax + 1
    LS = _logS_f64(N1)
    k = np.arange(N1 + 1, dtype=np.float64)
    logw = LS + k[None, :] * math.log(Af)
    logT_f64 = np.zeros(N1 + 1)
    rows_p = np.zeros((N1 + 1, N1 + 1))
    for n in range(N1 + 1):
        r = logw[n, : n + 1]
        hi = r.max()
        w = np.exp(r - hi)
        s = w.sum()
        logT_f64[n] = hi + math.log(s)
        rows_p[n, : n + 1] = w / s

    logT_hp = _touchard_logs_hp(N1, ex.A, p)

    all_ns = list(range(N1 + 1))
    M = _grid_max_factors(Af, rows_p, all_ns, G0)
    levels = {n: G0 for n in all_ns}

    if auto:
        # width ~ (pi/(C0 G)) * 1.1 * C0 T_{n+1} M_{n+1} / (T_n M_n); jump
        # straight to the level that should meet the target, then verify.
        for n in range(nmax + 1):
            ratio = math.exp(logT_f64[n + 1] - logT_f64[n]) * M[n + 1] / max(M[n], 1e-300)
            width0 = (math.pi / G0) * _SAFETY * ratio
            if width0 > BRACKET_WIDTH_TARGET:
                G_req = G0 * 2 ** math.ceil(math.log2(width0 / BRACKET_WIDTH_TARGET))
                levels[n] = min(G_req, GRID_CAP)
        pending_levels = sorted({g for g in levels.values() if g != G0})
        for G in pending_levels:
            ns = sorted({m for n, g in levels.items() if g == G and n <= nmax
                         for m in (n, n + 1)})
            M_fine = _grid_max_factors(Af, rows_p, ns, G)
            M.update({m: M_fine[m] for m in ns})

    out = []
    with workprec(p + _GUARD):
        lnC0 = mp.log(ex.C0)
        ln_saf = mp.log(mpf(11) / 10)
        for n in range(nmax + 1):
            G = levels[n]
            h = ex.period / G
            lower_log = n * lnC0 + logT_hp[n] + mp.log(M[n])
            corr_log = (mp.log(h / 2) + ln_saf
                        + (n + 1) * lnC0 + logT_hp[n + 1] + mp.log(M[n + 1]))
            upper_log = lower_log + mp.log1p(mp.exp(corr_log - lower_log))
            out.append(SupNormBracket(
                n=n,
                lower=LogMagnitude(1, round_to(lower_log, p)),
                upper=LogMagnitude(1, round_to(upper_log, p)),
                grid_size=G,
            ))
    return out


def sup_norm_bracket(ex: SharpExample, n: int, grid_size: int | None = None,
                     precision: int | None = None) -> SupNormBracket:
    """Bracket of ||u^(n)||_inf; see :func:`sup_norm_brackets`."""
    return sup_norm_brackets(ex, n, grid_size=grid_size, precision=precision)[n]


# ---------------------------------------------------------------------------
# Cauchy-formula upper bound
# ---------------------------------------------------------------------------

def cauchy_default_radius(ex: SharpExample, n: int,
                          precision: int | None = None) -> mpf:
    """r = C0^(-1) log(n / (A log n)); requires n >= 3 so that r > 0."""
    if n < 3:
        raise DomainError("the default radius needs n >= 3")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    with workprec(p + _GUARD):
        r = mp.log(n / (ex.A * mp.log(n))) / ex.C0
        if r <= 0:
            raise DomainError("default Cauchy radius is not positive")
    return round_to(r, p)


def cauchy_bound(ex: SharpExample, n: int, r=None,
                 precision: int | None = None) -> LogMagnitude:
    """n! r^(-n) e^(-A) e^(A e^(C0 r)), a true upper bound of ||u^(n)||_inf.

    With the default radius the exponential factor collapses exactly to
    e^(n / log n).
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    if r is None:
        rv = cauchy_default_radius(ex, n, p)
    else:
        with workprec(p):
            rv = +mpf(r)
        if rv <= 0:
            raise DomainError("r must be > 0")
    t = _tables(p, n)
    with workprec(p + _GUARD):
        lb = t.lnfact[n] - n * mp.log(rv) - ex.A + ex.A * mp.exp(ex.C0 * rv)
    return LogMagnitude(1, round_to(lb, p))


def cauchy_bound_minimized(ex: SharpExample, n: int,
                           precision: int | None = None) -> tuple[mpf, LogMagnitude]:
    """(r*, bound at r*) minimizing the Cauchy bound over r by golden section.

    The log-bound ln n! - n ln r - A + A e^(C0 r) is strictly convex in r,
    so the search converges to the global minimum.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    p = _resolve_precision(precision if precision is not None else ex.precision)
    t = _tables(p, n)
    with workprec(p + _GUARD):
        A, C0 = ex.A, ex.C0

        def f(r):
            return t.lnfact[n] - n * mp.log(r) - A + A * mp.exp(C0 * r)

        def fprime_sign(r):
            return mp.sign(-n / r + A * C0 * mp.exp(C0 * r))

        lo = mp.log(max(n, 2) / A) / C0 / 16
        hi = mp.log(max(n, 2) / A) / C0 * 4
        while fprime_sign(lo) > 0:
            lo /= 4
        while fprime_sign(hi) < 0:
            hi *= 2

        invphi = (mp.sqrt(5) - 1) / 2
        a, b = lo, hi
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = f(c), f(d)
        while (b - a) > mpf("1e-30") * b:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = f(d)
        r_opt = (a + b) / 2
        bound_log = f(r_opt)
    return round_to(r_opt, p), LogMagnitude(1, round_to(bound_log, p))


# ---------------------------------------------------------------------------
# Falsification searches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FalsificationResult:
    """Outcome of a search for an order n violating a candidate bound."""

    target: str                     # "lambda_bound" | "kappa_bound"
    parameters: dict[str, Any] = field(compare=False, default_factory=dict)
    violating_n: int | None = None
    lhs_over_rhs_at_n: mpf | None = None
    nmax: int = 0
    notes: str = ""


def _falsify(ex: SharpExample, target: str, C_eff, lam, nmax: int,
             precision: int, parameters: dict[str, Any]) -> FalsificationResult:
    # |u^(n)(0)| = C0^n T_n(A) <= ||u^(n)||_inf, so any n with
    # C0^n T_n(A) > rhs(n) already falsifies the candidate bound.
    with workprec(precision):
        lnC0 = mp.log(ex.C0)
        lnCe = mp.log(+mpf(C_eff))
        lamv = +mpf(lam)

    lhs_f = np.arange(nmax + 1) * float(lnC0) + touchard_log_sequence(nmax, float(ex.A))
    n_arr = np.arange(nmax + 1, dtype=np.float64)
    rhs_f = (n_arr * float(lnCe) + lnfact_f64(nmax)
             - float(lamv) * n_arr * lnln_f64(nmax))
    diff = lhs_f - rhs_f
    margin = 1e-6 * (1.0 + np.abs(lhs_f) + np.abs(rhs_f))
    candidates = np.nonzero(diff > -margin)[0]

    t = _tables(precision, nmax)

    def hp_diff(m: int) -> mpf:
        lt = _log_touchard(m, ex.A, precision)
        with workprec(precision + _GUARD):
            lhs = m * lnC0 + lt
            rhs = m * lnCe + t.lnfact[m] - lamv * m * t.lnln[m]
            return lhs - rhs

    for m in candidates:
        m = int(m)
        if m == 0:
            continue  # both sides equal 1 at n = 0
        d = hp_diff(m)
        if d > 0:
            return FalsificationResult(
                target=target, parameters=parameters, violating_n=m,
                lhs_over_rhs_at_n=mp.exp(d), nmax=nmax,
                notes="confirmed in high precision at the crossing",
            )

    m_best = int(diff[1:].argmax()) + 1 if nmax >= 1 else 0
    best = mp.exp(hp_diff(m_best)) if m_best else mpf(1)
    return FalsificationResult(
        target=target, parameters=parameters, violating_n=None,
        lhs_over_rhs_at_n=best, nmax=nmax,
        notes=f"no violation up to nmax; largest ratio at n={m_best}",
    )


def falsify_lambda(ex: SharpExample, C, lam, nmax: int,
                   precision: int | None = None) -> FalsificationResult:
    """Smallest n <= nmax with C0^n T_n(A) > C^n n! / ln^(lambda n)(n+e).

    lambda > 1 is the sharpness regime; lambda = 1 is allowed so the same
    search doubles as a consistency check against a fitted envelope.
    """
    p = _resolve_precision(precision if precision is not None else ex.precision)
    with workprec(p):
        lamv, Cv = +mpf(lam), +mpf(C)
    if lamv < 1:
        raise DomainError("need lambda >= 1 (sharpness regime is lambda > 1)")
    if Cv <= 0:
        raise DomainError("C must be > 0")
    params = {"C0": ex.C0, "C": Cv, "lambda": lamv}
    return _falsify(ex, "lambda_bound", Cv, lamv, nmax, p, params)


def falsify_kappa(ex: SharpExample, kappa, C, nmax: int,
                  precision: int | None = None) -> FalsificationResult:
    """Smallest n <= nmax with C0^n T_n(A) > (kappa C0 + C)^n n!/ln^n(n+e)."""
    p = _resolve_precision(precision if precision is not None else ex.precision)
    with workprec(p):
        kv, Cv = +mpf(kappa), +mpf(C)
        if not (0 < kv < 1):
            raise DomainError("need 0 < kappa < 1")
        if Cv <= 0:
            raise DomainError("C must be > 0")
        C_eff = kv * ex.C0 + Cv
    params = {"C0": ex.C0, "kappa": kv, "C": Cv}
    return _falsify(ex, "kappa_bound", C_eff, 1, nmax, p, params)


# ---------------------------------------------------------------------------
# Imaginary-axis growth
# ---------------------------------------------------------------------------

def imaginary_axis_growth(ex: SharpExample, y,
                          precision: int | None = None) -> mpf:
    """|u(iy)| = e^(-A) e^(A e^(-C0 y)), exact; blows up doubly
    exponentially as y -> -inf."""
    p = _resolve_precision(precision if precision is not None else ex.precision)
    with workprec(p + _GUARD):
        yv = +mpf(y)
        val = mp.exp(-ex.A + ex.A * mp.exp(-ex.C0 * yv))
    return round_to(val, p)


def taylor_partial_sum(ex: SharpExample, z, N: int,
                       precision: int | None = None) -> mpc:
    """sum_{n<=N} u^(n)(0) z^n / n! -- oracle for |u(z)| at moderate |z|."""
    p = _resolve_precision(precision if precision is not None else ex.precision)
    derivs = derivatives_at_zero_recurrence(ex, N, precision=p)
    t = _tables(p, N)
    with workprec(p + _GUARD):
        zv = mpc(z)
        acc = mpc(0)
        zn = mpc(1)
        for n in range(N + 1):
            acc += derivs[n] * zn / mp.exp(t.lnfact[n])
            zn *= zv
        return acc
