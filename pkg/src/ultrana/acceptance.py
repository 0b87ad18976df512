"""The end-to-end acceptance suite.

Each criterion function returns a :class:`CriterionResult` with a boolean
verdict, its runtime, and the measured quantities (formatted for JSON).
The underlying statements are asymptotic inequalities with unspecified
constants, so acceptance is property-based: finiteness, stability, exact
combinatorial equality, and agreement between independent routes at pinned
tolerances.

Precision-doubling policy: the headline high-precision scalars that could
silently lose precision (the bootstrap constant K1, the propagator's fitted
K) are recomputed at 512 bits and must agree to 1e-20 relative.  Criteria
whose fast paths run in float64 carry their own high-precision spot checks
instead (see ``check_dn`` / ``check_log_shift`` and the falsification
crossing confirmation).
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np
from mpmath import mp, mpf, workprec

from . import holder as holder_mod
from . import kernels as kernel_mod
from . import majorant as maj
from . import multiindex as mi
from . import propagator as prop
from . import sharp_example as sharp
from .reports import fmt

GOLDEN_DIR = Path(__file__).parent / "golden"

_REL_1E20 = mpf("1e-20")


@dataclass
class CriterionResult:
    criterion: int
    name: str
    module: str
    passed: bool
    runtime_s: float
    details: dict[str, Any] = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.criterion:2d} [{self.module}] {self.name} ({self.runtime_s:.1f}s)"


def _rel_diff(a: mpf, b: mpf) -> mpf:
    with workprec(700):
        if b == 0:
            return abs(a)
        return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# 1. Bootstrap lemma certification
# ---------------------------------------------------------------------------

def criterion_1_bootstrap(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    kappas = [("1.05", "1.05"), ("2", "2"), ("e", mp.e), ("10", "10")]
    c0s = ["0.5", "1", "10"]
    nmax = 10 ** 5
    details: dict[str, Any] = {}
    ok = True
    k1_by_kappa: dict[str, list[mpf]] = {}

    for klabel, kval in kappas:
        for c0 in c0s:
            p1 = maj.MajorantParams.create(c0, kval, 0, precision=precision)
            rows, k1 = maj.bootstrap_sweep(p1, nmax, precision=precision)
            finite = all(mp.isfinite(r) and r > 0 for _, r in rows)
            tail_max = max(r for n, r in rows if n >= 10 ** 4)
            full_max = max(r for _, r in rows)
            p2 = maj.MajorantParams.create(c0, kval, 0, precision=2 * precision)
            _, k1_dbl = maj.bootstrap_sweep(p2, nmax, precision=2 * precision)
            dbl = _rel_diff(k1, k1_dbl)
            ok &= finite and (tail_max <= full_max) and (dbl <= _REL_1E20)
            k1_by_kappa.setdefault(klabel, []).append(k1)
            details[f"K1[kappa={klabel},C0={c0}]"] = fmt(k1)
            details[f"dbl_rel[kappa={klabel},C0={c0}]"] = fmt(dbl)

    # scale invariance: K1 must not depend on C0 when C = kappa*C0
    for klabel, vals in k1_by_kappa.items():
        spread = max(_rel_diff(v, vals[0]) for v in vals)
        details[f"scale_invariance[kappa={klabel}]"] = fmt(spread)
        ok &= spread <= _REL_1E20

    return CriterionResult(1, "bootstrap ratio finite, K1 reproducible at doubled precision",
                           "majorant", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 2. Monotonicity lemma
# ---------------------------------------------------------------------------

def criterion_2_monotonicity(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    ok = True
    details: dict[str, Any] = {}
    for n in (10 ** 3, 10 ** 4, 10 ** 5):
        rep = maj.check_monotonicity(n, precision=precision)
        details[f"violations[n={n}]"] = len(rep.violations)
        ok &= rep.passed
    thr = maj.monotonicity_threshold(start=100, limit=2000, precision=precision)
    details["empirical_threshold"] = thr
    ok &= thr is not None
    return CriterionResult(2, "a_j monotonicity: zero violations, threshold recorded",
                           "majorant", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 3. a_j asymptotics
# ---------------------------------------------------------------------------

def criterion_3_aj_asymptotics(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    grid = maj.geometric_grid(10 ** 5)
    gauss: list[mpf] = []
    supg: list[mpf] = []
    ok = True
    for n in grid:
        smax = int(math.log(n) ** (2 / 3))
        for s in sorted({0, smax, -smax}):
            try:
                r = maj.check_aj_gaussian(n, s, precision=precision)
            except IndexError:
                continue
            ok &= bool(mp.isfinite(r) and r > 0)
            gauss.append(r)
        try:
            r = maj.check_aj_supergaussian(n, 3, precision=precision)
        except IndexError:
            continue
        ok &= bool(mp.isfinite(r) and r > 0)
        supg.append(r)
    spread_g = max(gauss) / min(gauss)
    spread_s = max(supg) / min(supg)
    ok &= spread_g <= 1000 and spread_s <= 1000
    details = {
        "gaussian_ratio_spread": fmt(spread_g),
        "supergaussian_ratio_spread": fmt(spread_s),
        "gaussian_range": [fmt(min(gauss)), fmt(max(gauss))],
        "supergaussian_range": [fmt(min(supg)), fmt(max(supg))],
    }
    return CriterionResult(3, "a_j Gaussian / super-Gaussian ratios bounded (spread <= 1e3)",
                           "majorant", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 4. d_n < 6 and the log-shift bound
# ---------------------------------------------------------------------------

def criterion_4_dn_logshift(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    nmax = 10 ** 6
    rep = maj.check_dn(nmax, precision=precision)
    ok = rep.passed and rep.worst_ratio < 6

    sup = maj.check_log_shift(nmax, precision=precision)
    value_at_end, limit_form = maj.log_shift_ratio(nmax, precision=precision)
    # the quantity tends to 1 like e^(10/ln n); at n = 1e6 it must agree
    # with that limit form to 0.1% and sit strictly below earlier values
    agree = _rel_diff(value_at_end, limit_form)
    decreasing = True
    prev = None
    for n in [m for m in maj.geometric_grid(nmax) if m >= 16]:
        v, _ = maj.log_shift_ratio(n, precision=precision)
        if prev is not None and not (v < prev):
            decreasing = False
        prev = v
    ok &= bool(mp.isfinite(sup)) and agree <= mpf("1e-3") and decreasing \
        and value_at_end > 1

    details = {
        "max_dn": fmt(rep.worst_ratio),
        "argmax_n": rep.params["argmax_n"],
        "max_dn_n_ge_10": rep.params["max_dn_n_ge_10"],
        "log_shift_sup": fmt(sup),
        "log_shift_at_1e6": fmt(value_at_end),
        "limit_form_e^(10/ln n)_at_1e6": fmt(limit_form),
        "agreement_rel": fmt(agree),
        "decreasing_along_tail": decreasing,
    }
    return CriterionResult(4, "d_n < 6 on 2..1e6 exactly; log-shift sup finite, tends to 1",
                           "majorant", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 5. Sharp-example exactness
# ---------------------------------------------------------------------------

def criterion_5_sharp_exactness(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    ok = True
    details: dict[str, Any] = {}
    for c0 in ("1", "5"):
        ex = sharp.SharpExample.create(c0, precision=precision)
        recs = sharp.derivatives_at_zero_recurrence(ex, 60, precision=precision)
        worst = mpf(0)
        with workprec(precision + 16):
            for n in range(61):
                closed = sharp.derivative_at_zero(ex, n, precision=precision)
                rel = abs(closed - recs[n]) / abs(closed)
                worst = max(worst, rel)
        details[f"faa_di_bruno_worst_rel[C0={c0}]"] = fmt(worst)
        ok &= worst <= mpf("1e-30")

    ex1 = sharp.SharpExample.create(1, precision=precision)
    worst_grid = sharp.derivative_grid_agreement(ex1, 20, 1024, precision=precision)
    details["dual_method_worst_rel[n<=20,grid=1024]"] = fmt(worst_grid)
    ok &= worst_grid <= mpf("1e-20")
    return CriterionResult(5, "closed form vs recurrence 1e-30; dual-method grids 1e-20",
                           "sharp_example", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 6. Envelope bound on the example
# ---------------------------------------------------------------------------

def criterion_6_envelope(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    ok = True
    details: dict[str, Any] = {}
    for c0 in ("1", "5"):
        ex = sharp.SharpExample.create(c0, precision=precision)
        brs = sharp.sup_norm_brackets(ex, 200, grid_size=4096, precision=precision)
        uppers = [b.upper for b in brs]
        k200 = prop.fit_K(uppers, 2, C0=ex.C0, precision=precision)
        k100 = prop.fit_K(uppers[:101], 2, C0=ex.C0, precision=precision)
        if k200 == 0:
            change = mpf(0) if k100 == 0 else mpf("inf")
        else:
            change = _rel_diff(k100, k200)
        details[f"fitted_K[C0={c0}]"] = fmt(k200)
        details[f"K_change_100_to_200[C0={c0}]"] = fmt(change)
        ok &= bool(mp.isfinite(k200)) and change <= mpf("0.05")
    return CriterionResult(6, "fitted envelope K finite, stable <5% under nmax doubling",
                           "sharp_example", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 7. Sharpness falsifications
# ---------------------------------------------------------------------------

def criterion_7_falsifications(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    details: dict[str, Any] = {}

    ex1 = sharp.SharpExample.create(1, precision=precision)
    res_a = sharp.falsify_lambda(ex1, 5, 2, 2000, precision=precision)
    golden_path = GOLDEN_DIR / "falsify_lambda_c0_1_lambda_2_C_5.json"
    golden = json.loads(golden_path.read_text())
    ok_a = (res_a.violating_n is not None and res_a.violating_n <= 2000
            and res_a.violating_n == golden["violating_n"])
    details["lambda_violating_n"] = res_a.violating_n
    details["lambda_golden_n"] = golden["violating_n"]
    details["lambda_ratio_at_n"] = fmt(res_a.lhs_over_rhs_at_n)

    found_b = []
    for c0 in ("40", "80"):
        exb = sharp.SharpExample.create(c0, precision=precision)
        res_b = sharp.falsify_kappa(exb, "0.5", 1, 5000, precision=precision)
        details[f"kappa_violating_n[C0={c0}]"] = res_b.violating_n
        if res_b.violating_n is not None:
            found_b.append(res_b.violating_n)
    ok_b = len(found_b) >= 1

    brs = sharp.sup_norm_brackets(ex1, 200, grid_size=4096, precision=precision)
    k_fit = prop.fit_K([b.upper for b in brs], 2, C0=ex1.C0, precision=precision)
    with workprec(precision):
        c_env = 2 * ex1.C0 + k_fit * (1 / mp.log(2) + 1)
    res_c = sharp.falsify_lambda(ex1, c_env, 1, 2000, precision=precision)
    ok_c = res_c.violating_n is None
    details["consistency_C"] = fmt(c_env)
    details["consistency_violating_n"] = res_c.violating_n
    details["consistency_max_ratio"] = fmt(res_c.lhs_over_rhs_at_n)

    ok = ok_a and ok_b and ok_c
    return CriterionResult(7, "lambda>1 and kappa<1 falsified; Theorem-envelope consistent",
                           "sharp_example", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 8. Propagator dominance and closure
# ---------------------------------------------------------------------------

def criterion_8_propagator(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    base = prop.base_case(2, precision=precision)
    seq = prop.propagate_second_order(1, base, 500, precision=precision)

    ex = sharp.SharpExample.create(1, precision=precision)
    brs = sharp.sup_norm_brackets(ex, 200, grid_size=4096, precision=precision)
    dominated = all(seq.bounds[n].log_abs >= brs[n].lower.log_abs
                    for n in range(201))

    k_fit = prop.fit_K(seq, 2, precision=precision)
    cns = prop.implied_constants(seq, precision=precision)
    last = cns[-100:]
    with workprec(precision):
        tol = mpf(2) ** (40 - precision)
        nonincreasing = all(last[i + 1] <= last[i] * (1 + tol)
                            for i in range(len(last) - 1))

    seq_dbl = prop.propagate_second_order(1, prop.base_case(2, precision=2 * precision),
                                          500, precision=2 * precision)
    k_dbl = prop.fit_K(seq_dbl, 2, precision=2 * precision)
    dbl = _rel_diff(k_fit, k_dbl)

    ok = dominated and bool(mp.isfinite(k_fit)) and nonincreasing and dbl <= _REL_1E20
    details = {
        "dominates_example_n<=200": dominated,
        "fitted_K": fmt(k_fit),
        "implied_C_last100_nonincreasing": nonincreasing,
        "implied_C_at_500": fmt(cns[-1]),
        "K_doubled_precision_rel": fmt(dbl),
    }
    return CriterionResult(8, "propagated bounds dominate example; envelope closes, C_n decreasing",
                           "propagator", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 9. Combinatorics
# ---------------------------------------------------------------------------

def criterion_9_combinatorics(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    checked = 0
    failures = 0
    for d in range(1, 5):
        for total in range(0, 9):
            for alpha in mi.enumerate_multiindices(d, total):
                for l in range(total + 1):
                    if not mi.vandermonde_check(alpha, l).ok:
                        failures += 1
                    checked += 1

    rng = random.Random(20240901)
    reduction_ok = 0
    for _ in range(100):
        d = rng.randint(1, 3)
        order = rng.randint(0, 12)
        cuts = sorted(rng.randint(0, order) for _ in range(d - 1))
        comps = [b - a for a, b in zip([0] + cuts, cuts + [order])]
        alpha = mi.MultiIndex(tuple(comps))
        C0 = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        C = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        if mi.highdim_reduction_check(alpha, C0, C, precision=precision).ok:
            reduction_ok += 1

    ok = failures == 0 and reduction_ok == 100
    details = {
        "vandermonde_checked": checked,
        "vandermonde_failures": failures,
        "reduction_cases_passed": reduction_ok,
    }
    return CriterionResult(9, "Vandermonde identity exact (d<=4, |a|<=8); 100 reduction cases",
                           "multiindex", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 10. Kernels
# ---------------------------------------------------------------------------

def criterion_10_kernels(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    details: dict[str, Any] = {}
    ok = True

    kp1 = kernel_mod.KernelParams.create(2, 1)
    with workprec(kp1.quadrature.precision):
        worst = mpf(0)
        for x in ("0.1", "0.5", "1", "2", "5", "10"):
            xv = mpf(x)
            g = kernel_mod.bessel_kernel(kp1, xv)
            worst = max(worst, abs(g - mp.exp(-xv) / 2))
    details["G2_d1_vs_closed_form_abs"] = fmt(worst)
    ok &= worst <= mpf("1e-8")

    for d in (1, 2, 3):
        kp = kernel_mod.KernelParams.create(2, d)
        m = kernel_mod.kernel_mass(kp)
        details[f"mass[s=2,d={d}]"] = fmt(m)
        ok &= abs(m - 1) <= mpf("1e-6")

    for s, d in ((2, 1), (2, 2), (2, 3), (3, 1)):
        kp = kernel_mod.KernelParams.create(s, d)
        rep = kernel_mod.check_kernel_bounds(kp)
        details[f"bounds_worst[s={s},d={d}]"] = fmt(rep.worst_ratio)
        ok &= rep.passed
        repg = kernel_mod.check_grad_bound(kp)
        details[f"grad_worst[s={s},d={d}]"] = fmt(repg.worst_ratio)
        ok &= repg.passed

    for d in (1, 2, 3):
        v = kernel_mod.grad_kernel_l1(d)
        details[f"grad_l1[d={d}]"] = fmt(v)
        ok &= bool(mp.isfinite(v))
        if d == 1:
            ok &= abs(v - 1) <= mpf("1e-6")

    return CriterionResult(10, "kernel closed form, unit mass, decay/gradient ratios, grad L1",
                           "kernels", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# 11. Hölder
# ---------------------------------------------------------------------------

def criterion_11_holder(precision: int = 256) -> CriterionResult:
    t0 = time.perf_counter()
    rep = holder_mod.check_coeff_holder(1, 20, grid_size=1024)
    ok = rep.passed and rep.params["spread"] <= 1e-10

    c1 = holder_mod.check_mollifier_interpolation(1, 10, grid_size=1024)
    c2 = holder_mod.check_mollifier_interpolation(1, 10, grid_size=2048)
    stable = (math.isfinite(c1.worst_ratio) and math.isfinite(c2.worst_ratio)
              and abs(c2.worst_ratio / c1.worst_ratio - 1.0) <= 0.20)
    ok &= c1.passed and c2.passed and stable

    details = {
        "coeff_ratio_spread": rep.params["spread"],
        "coeff_ratio": fmt(rep.worst_ratio),
        "mollifier_c_1024": fmt(c1.worst_ratio),
        "mollifier_c_2048": fmt(c2.worst_ratio),
        "grid_doubling_change": abs(c2.worst_ratio / c1.worst_ratio - 1.0),
    }
    return CriterionResult(11, "coefficient Hölder ratio beta-independent; interpolation c stable",
                           "holder", bool(ok), time.perf_counter() - t0, details)


# ---------------------------------------------------------------------------
# Suite runner
# ---------------------------------------------------------------------------

CRITERIA: list[tuple[Callable[[int], CriterionResult], str]] = [
    (criterion_1_bootstrap, "majorant"),
    (criterion_2_monotonicity, "majorant"),
    (criterion_3_aj_asymptotics, "majorant"),
    (criterion_4_dn_logshift, "majorant"),
    (criterion_5_sharp_exactness, "sharp"),
    (criterion_6_envelope, "sharp"),
    (criterion_7_falsifications, "sharp"),
    (criterion_8_propagator, "propagate"),
    (criterion_9_combinatorics, "multiindex"),
    (criterion_10_kernels, "kernel"),
    (criterion_11_holder, "holder"),
]

_ONLY_ALIASES = {
    "majorant": {"majorant", "bootstrap-ratio"},
    "sharp": {"sharp", "sharp_example"},
    "propagate": {"propagate", "propagator", "fit-k"},
    "multiindex": {"multiindex"},
    "kernel": {"kernel", "kernels"},
    "holder": {"holder"},
}


def run_acceptance(only: list[str] | None = None, precision: int = 256,
                   emit=print) -> list[CriterionResult]:
    """Run the (filtered) suite, printing one pass/fail line per criterion."""
    wanted = None
    if only:
        wanted = set()
        for o in only:
            for mod, aliases in _ONLY_ALIASES.items():
                if o in aliases:
                    wanted.add(mod)
    results = []
    for fn, module in CRITERIA:
        if wanted is not None and module not in wanted:
            continue
        res = fn(precision)
        results.append(res)
        if emit:
            emit(res.line())
    return results
