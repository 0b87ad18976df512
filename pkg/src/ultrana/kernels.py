"""Bessel potential kernel G_s: subordination quadrature and bound checks.

G_s, the convolution kernel of (1-Laplacian)^(-s/2), has the radial
representation

    G_s(x) = (2 sqrt(pi))^(-d) / Gamma(s/2)
             * int_0^inf e^(-t) e^(-|x|^2/(4t)) t^((s-d)/2) dt/t.

After t = e^v the integrand decays doubly exponentially on both ends
(for r = |x| > 0), so a tanh-sinh rule on a truncated v-interval is both
fast and accurate.  The module evaluates G_s and its radial derivative,
verifies the local growth cases (r^(s-d) / log(2/r) / bounded), the
e^(-r/2) decay, the gradient domination |grad G_s| <= const * G_{s-1}(r/sqrt 2),
the unit mass, and the finiteness of the L^1 norm of grad G_2 -- the facts
the L^1 interpolation inequality rests on.  The unspecified absolute
constants are reported as worst-case measured ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import mp, mpf, workprec

from .errors import DomainError, SingularityError, ToleranceError
from .numerics import _resolve_precision
from .reports import LemmaCheckReport

_SURFACE = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}  # |S^(d-1)| for d <= 3


@dataclass(frozen=True)
class QuadratureSpec:
    """Working precision and truncation policy for the kernel integrals."""

    precision: int = 96       # bits used inside mp.quad
    tol: float = 1e-12        # acceptable relative error estimate
    tail_nats: float | None = None  # integrand truncation depth; default from precision
    maxdegree: int = 8        # tanh-sinh refinement depth

    def tail(self) -> float:
        if self.tail_nats is not None:
            return self.tail_nats
        return 0.75 * self.precision + 30.0


@dataclass(frozen=True)
class KernelParams:
    s: mpf
    d: int
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    @classmethod
    def create(cls, s, d: int, quadrature: QuadratureSpec | None = None) -> "KernelParams":
        spec = quadrature or QuadratureSpec()
        with workprec(spec.precision):
            sv = +mpf(s)
        if sv <= 0:
            raise DomainError("s must be > 0")
        if d < 1:
            raise DomainError("d must be >= 1")
        return cls(s=sv, d=int(d), quadrature=spec)


def _subordination(r: mpf, kappa: mpf, spec: QuadratureSpec,
                   maxdegree: int | None = None) -> mpf:
    """int_0^inf e^(-t) e^(-r^2/(4t)) t^kappa dt/t via t = e^v."""
    T = mpf(spec.tail())
    deg = spec.maxdegree if maxdegree is None else maxdegree
    with workprec(spec.precision):
        ak = abs(kappa)

        def g(v):
            ev = mp.exp(v)
            return mp.exp(-ev - r * r / (4 * ev) + kappa * v)

        # right truncation: e^v dominates kappa*v
        vhi = mp.log(T + 10)
        vhi = mp.log(T + ak * abs(vhi) + 10) + 1
        # left truncation
        if r > 0:
            q = r * r / 4
            vlo = mp.log(q) - mp.log(T + 10)
            vlo = mp.log(q) - mp.log(T + ak * abs(vlo) + 10) - 1
        else:
            if kappa <= 0:
                raise SingularityError(
                    "the kernel integral diverges at r = 0 for s <= d"
                )
            vlo = -(T + 10) / kappa - 1
        # split near the interior maximum of the exponent
        if r > 0:
            vmid = mp.log((mp.sqrt(kappa * kappa + r * r) + kappa) / 2 + mpf(1) / 100)
        else:
            vmid = mp.log(max(kappa, mpf(1) / 10))
        vmid = min(max(vmid, vlo + (vhi - vlo) / 100), vhi - (vhi - vlo) / 100)

        val, err = mp.quad(g, [vlo, vmid, vhi], maxdegree=deg, error=True)
        # the absolute floor covers tanh-sinh's error plateau at working
        # precision when the integral itself is astronomically small
        if not (err <= spec.tol * abs(val) + mpf(2) ** (16 - spec.precision)):
            raise ToleranceError(
                f"kernel quadrature error {mp.nstr(err, 5)} above tolerance "
                f"(r={mp.nstr(r, 8)}, kappa={mp.nstr(kappa, 8)})"
            )
        return val


def _prefactor(s: mpf, d: int, precision: int) -> mpf:
    with workprec(precision):
        return (2 * mp.sqrt(mp.pi)) ** (-d) / mp.gamma(s / 2)


def bessel_kernel(params: KernelParams, r, maxdegree: int | None = None) -> mpf:
    """G_s at radius r = |x| (radial by construction); positive."""
    spec = params.quadrature
    with workprec(spec.precision):
        rv = +mpf(r)
        if rv < 0:
            raise DomainError("r must be >= 0")
        kappa = (params.s - params.d) / 2
        val = _subordination(rv, kappa, spec, maxdegree=maxdegree)
        return _prefactor(params.s, params.d, spec.precision) * val


def grad_bessel_kernel(params: KernelParams, r,
                       maxdegree: int | None = None) -> mpf:
    """|d/dr G_s(r)|, from the differentiated integrand (exact, not a bound)."""
    spec = params.quadrature
    with workprec(spec.precision):
        rv = +mpf(r)
        if rv <= 0:
            raise DomainError("the radial derivative needs r > 0")
        kappa = (params.s - params.d) / 2 - 1
        val = _subordination(rv, kappa, spec, maxdegree=maxdegree)
        return _prefactor(params.s, params.d, spec.precision) * rv / 2 * val


def _radial_integral(point_value, d: int, outer_precision: int,
                     maxdegree: int, tol: float, r_end: float = 60.0) -> mpf:
    # The e^(-r/2) decay makes the tail beyond r_end = 60 smaller than 1e-13
    # in absolute terms, far below the outer tolerance.
    omega = _SURFACE[d]
    with workprec(outer_precision):

        def f(r):
            if r <= 0:
                return mpf(0)
            return omega * r ** (d - 1) * point_value(r)

        val, err = mp.quad(f, [0, 2, r_end], maxdegree=maxdegree, error=True)
        if not (err <= tol * abs(val)):
            raise ToleranceError(f"radial quadrature error {mp.nstr(err, 5)}")
        return val


def kernel_mass(params: KernelParams, outer_precision: int = 64) -> mpf:
    """int_{R^d} G_s dx as an honest radial quadrature; should equal 1 (d <= 3).

    The outer integral runs at reduced precision (its target is 1e-6-level
    agreement with 1); the pointwise kernel values keep the full inner spec.
    """
    if params.d not in _SURFACE:
        raise DomainError("kernel_mass supports d <= 3")
    return _radial_integral(lambda r: bessel_kernel(params, r), params.d,
                            outer_precision, params.quadrature.maxdegree,
                            max(params.quadrature.tol, 1e-9))


def grad_kernel_l1(d: int, quadrature: QuadratureSpec | None = None,
                   outer_precision: int = 64) -> mpf:
    """int_{R^d} |grad G_2| dx, finite for d <= 3 (equals 1 exactly in d = 1)."""
    if d not in _SURFACE:
        raise DomainError("grad_kernel_l1 supports d <= 3")
    params = KernelParams.create(2, d, quadrature)
    return _radial_integral(lambda r: grad_bessel_kernel(params, r), d,
                            outer_precision, params.quadrature.maxdegree,
                            max(params.quadrature.tol, 1e-9))


# ---------------------------------------------------------------------------
# Bound sweeps
# ---------------------------------------------------------------------------

def _near_grid(n_points: int) -> list[float]:
    return list(np.geomspace(1e-6, 2.0, n_points, endpoint=False))


def _far_grid(n_points: int) -> list[float]:
    return list(np.linspace(2.0, 40.0, n_points))


def local_majorant(params: KernelParams, r) -> mpf:
    """The case-appropriate local comparison function for r < 2."""
    with workprec(params.quadrature.precision):
        rv = +mpf(r)
        if params.s < params.d:
            return 1 + rv ** (params.s - params.d)
        if params.s == params.d:
            return 1 + mp.log(2 / rv)
        return mpf(1)


def check_kernel_bounds(params: KernelParams, near_points: int = 40,
                        far_points: int = 30) -> LemmaCheckReport:
    """Measure G_s against its local majorant (r < 2) and e^(-r/2) decay
    (2 <= r <= 40); reports the worst ratios, which should be finite and
    stable but carry no specified constant."""
    if params.d not in _SURFACE:
        raise DomainError("check_kernel_bounds supports d <= 3")
    rows = []
    violations = []
    worst = mpf(0)
    near_worst = mpf(0)
    far_worst = mpf(0)
    with workprec(params.quadrature.precision):
        for r in _near_grid(near_points):
            g = bessel_kernel(params, r)
            ratio = g / local_majorant(params, r)
            ok = bool(mp.isfinite(ratio)) and g > 0
            if not ok:
                violations.append((r, None))
            near_worst = max(near_worst, ratio)
            rows.append((0, r, ratio, ok))
        for r in _far_grid(far_points):
            g = bessel_kernel(params, r)
            ratio = g * mp.exp(mpf(r) / 2)
            ok = bool(mp.isfinite(ratio)) and g > 0
            if not ok:
                violations.append((r, None))
            far_worst = max(far_worst, ratio)
            rows.append((1, r, ratio, ok))
        worst = max(near_worst, far_worst)
    return LemmaCheckReport(
        lemma_id="kernel_local_and_decay",
        n_grid=[near_points, far_points],
        worst_ratio=worst,
        violations=violations,
        precision=params.quadrature.precision,
        params={"s": params.s, "d": params.d,
                "near_worst": near_worst, "far_worst": far_worst},
        rows=rows,
        notes="rows tagged 0: G_s / local majorant on r < 2; "
              "rows tagged 1: G_s * e^(r/2) on [2, 40]",
    )


def check_grad_bound(params: KernelParams, n_points: int = 40) -> LemmaCheckReport:
    """Ratio |d/dr G_s(r)| / G_{s-1}(r / sqrt 2) over a log-spaced sweep."""
    if params.s <= 1:
        raise DomainError("the gradient bound needs s > 1")
    shifted = KernelParams.create(params.s - 1, params.d, params.quadrature)
    rows = []
    violations = []
    worst = mpf(0)
    with workprec(params.quadrature.precision):
        grid = list(np.geomspace(1e-6, 20.0, n_points))
        for r in grid:
            num = grad_bessel_kernel(params, r)
            den = bessel_kernel(shifted, mpf(r) / mp.sqrt(2))
            ratio = num / den
            ok = bool(mp.isfinite(ratio))
            if not ok:
                violations.append((r, None))
            worst = max(worst, ratio)
            rows.append((0, r, ratio, ok))
    return LemmaCheckReport(
        lemma_id="kernel_grad_bound",
        n_grid=[n_points],
        worst_ratio=worst,
        violations=violations,
        precision=params.quadrature.precision,
        params={"s": params.s, "d": params.d},
        rows=rows,
    )
