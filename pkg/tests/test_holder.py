"""Tests for grid Hölder seminorm estimation."""

import math

import numpy as np
import pytest
from mpmath import mp, mpf, workprec

from ultrana.errors import DomainError
from ultrana.holder import (
    check_coeff_holder,
    check_mollifier_interpolation,
    holder_seminorm,
    solution_derivative_samples,
)


def uniform_samples(f, period: float, n: int):
    xs = period * np.arange(n) / n
    return [(float(x), f(x)) for x in xs]


def oscillation_seminorm_oracle(C0: float) -> float:
    """sup_h 2|sin(C0 h/2)| / sqrt(h) for f = e^(i C0 x), by golden section
    on the first arch (the global maximum lives there)."""
    lo, hi = 1e-9, 2 * math.pi / C0
    invphi = (math.sqrt(5) - 1) / 2

    def g(h):
        return 2 * abs(math.sin(C0 * h / 2)) / math.sqrt(h)

    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    while hi - lo > 1e-13:
        if g(c) > g(d):
            hi, d = d, c
            c = hi - invphi * (hi - lo)
        else:
            lo, c = c, d
            d = lo + invphi * (hi - lo)
    return g((lo + hi) / 2)


def test_constant_samples_zero():
    s = uniform_samples(lambda x: 3.0 + 0j, 1.0, 64)
    assert holder_seminorm(s).seminorm == 0.0


def test_needs_two_samples():
    with pytest.raises(DomainError):
        holder_seminorm([(0.0, 1.0)])


def test_oscillation_against_maximization_oracle():
    C0 = 1.0
    period = 2 * math.pi / C0
    oracle = oscillation_seminorm_oracle(C0)
    est = holder_seminorm(
        uniform_samples(lambda x: complex(math.cos(C0 * x), math.sin(C0 * x)),
                        period, 2048),
        period=period,
    )
    assert est.seminorm <= oracle * (1 + 1e-9)
    assert est.seminorm >= oracle * (1 - 1e-3)


def test_grid_doubling_never_decreases():
    C0 = 2.0
    period = 2 * math.pi / C0

    def f(x):
        return complex(math.cos(C0 * x), math.sin(C0 * x))

    prev = 0.0
    for n in (64, 128, 256, 512):
        est = holder_seminorm(uniform_samples(f, period, n), period=period)
        assert est.seminorm >= prev - 1e-15
        prev = est.seminorm


def test_short_range_cap_restricts_pairs():
    s = uniform_samples(lambda x: complex(x), 1.0, 32)   # f(x) = x
    full = holder_seminorm(s, delta=0.5)
    capped = holder_seminorm(s, delta=0.5, short_range_cap=0.1)
    # |x-y|^(1/2) ratios grow with separation for f(x) = x
    assert capped.seminorm <= full.seminorm


def test_refinement_correction_reported():
    s = uniform_samples(lambda x: complex(math.sin(x)), 2 * math.pi, 128)
    est = holder_seminorm(s, next_derivative_max=1.0)
    assert est.refinement_correction is not None
    h = 2 * math.pi / 128
    assert est.refinement_correction == pytest.approx(2 * h ** 0.5, rel=1e-9)


def test_solution_samples_match_direct_formula():
    # u'(x) = i C0 A e^(i C0 x) u(x); check the Fourier evaluation at k=1
    C0 = 1.0
    A = 0.5
    samples = solution_derivative_samples(C0, 1, 64)
    for x, v in samples[:8]:
        u = complex(np.exp(A * (np.cos(C0 * x) - 1)) * np.cos(A * np.sin(C0 * x)),
                    np.exp(A * (np.cos(C0 * x) - 1)) * np.sin(A * np.sin(C0 * x)))
        phi_prime = A * C0 * complex(-np.sin(C0 * x), np.cos(C0 * x))
        assert abs(v - phi_prime * u) < 1e-12


def test_coeff_holder_beta_independent():
    rep = check_coeff_holder(1, 20, grid_size=512)
    assert rep.passed
    assert rep.params["spread"] <= 1e-10


def test_coeff_holder_scales_with_C0():
    r1 = check_coeff_holder(1, 5, grid_size=512).worst_ratio
    r4 = check_coeff_holder(4, 5, grid_size=512).worst_ratio
    # ratio = A(C0) C0 * [e^(ix)]_{1/2}-type constant: bounded across C0
    assert 0 < r4 < 10 * r1


def test_coeff_holder_consistent_with_seminorm():
    C0 = 1.0
    period = 2 * math.pi
    rep = check_coeff_holder(C0, 3, grid_size=512)
    beta0 = [row for row in rep.rows if row[0] == 0][0]
    A = 0.5
    est = holder_seminorm(
        uniform_samples(lambda x: A * C0 * complex(-math.sin(C0 * x),
                                                   math.cos(C0 * x)),
                        period, 512),
        period=period,
    )
    assert beta0[1] == pytest.approx(est.seminorm, rel=1e-12)


def test_mollifier_interpolation_finite_and_stable():
    rep1 = check_mollifier_interpolation(1, 4, grid_size=512)
    rep2 = check_mollifier_interpolation(1, 4, grid_size=1024)
    assert rep1.passed and rep2.passed
    assert math.isfinite(rep1.worst_ratio)
    assert abs(rep2.worst_ratio / rep1.worst_ratio - 1) <= 0.20


def test_mollifier_requires_positive_kmax():
    with pytest.raises(DomainError):
        check_mollifier_interpolation(1, 0)
