"""Tests for the Bessel potential kernel quadrature and bound checks."""

import pytest
from mpmath import mp, mpf, workprec

from ultrana.errors import DomainError, SingularityError
from ultrana.kernels import (
    KernelParams,
    QuadratureSpec,
    bessel_kernel,
    check_grad_bound,
    check_kernel_bounds,
    grad_bessel_kernel,
    grad_kernel_l1,
    kernel_mass,
    local_majorant,
)


@pytest.fixture(scope="module")
def kp21():
    return KernelParams.create(2, 1)


def test_closed_form_d1(kp21):
    # G_2(x) = e^(-|x|)/2 in one dimension
    with workprec(kp21.quadrature.precision):
        for r in ("0.1", "0.5", "1", "2", "5", "10"):
            got = bessel_kernel(kp21, r)
            expect = mp.exp(-mpf(r)) / 2
            assert abs(got - expect) < mpf("1e-8")


def test_closed_form_d3():
    # G_2(x) = e^(-r)/(4 pi r) in three dimensions
    kp = KernelParams.create(2, 3)
    with workprec(kp.quadrature.precision):
        for r in ("0.5", "1", "3"):
            got = bessel_kernel(kp, r)
            expect = mp.exp(-mpf(r)) / (4 * mp.pi * mpf(r))
            assert abs(got - expect) / expect < mpf("1e-12")


def test_closed_form_d2_besselk():
    # G_2(x) = K_0(r)/(2 pi) in two dimensions
    kp = KernelParams.create(2, 2)
    with workprec(kp.quadrature.precision):
        got = bessel_kernel(kp, "0.7")
        expect = mp.besselk(0, mpf("0.7")) / (2 * mp.pi)
        assert abs(got - expect) / expect < mpf("1e-12")


def test_origin_singular_vs_finite():
    with pytest.raises(SingularityError):
        bessel_kernel(KernelParams.create(2, 2), 0)    # s = d
    with pytest.raises(SingularityError):
        bessel_kernel(KernelParams.create(1, 3), 0)    # s < d
    kp = KernelParams.create(3, 1)                     # s > d: finite at 0
    with workprec(kp.quadrature.precision):
        got = bessel_kernel(kp, 0)
        assert mp.isfinite(got) and got > 0
        # closed value 1/pi from Gamma((s-d)/2)/ (2 sqrt(pi) Gamma(s/2))
        assert abs(got - 1 / mp.pi) / (1 / mp.pi) < mpf("1e-12")


def test_kernel_positive_and_decreasing(kp21):
    vals = [bessel_kernel(kp21, r) for r in ("0.01", "0.1", "1", "5", "20")]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_node_doubling_self_consistency(kp21):
    a = bessel_kernel(kp21, "0.3", maxdegree=kp21.quadrature.maxdegree)
    b = bessel_kernel(kp21, "0.3", maxdegree=kp21.quadrature.maxdegree + 1)
    with workprec(kp21.quadrature.precision):
        assert abs(a - b) <= mpf(kp21.quadrature.tol) * abs(a)


def test_mass_d1(kp21):
    with workprec(64):
        assert abs(kernel_mass(kp21) - 1) < mpf("1e-8")


@pytest.mark.parametrize("d", [2, 3])
def test_mass_higher_d(d):
    kp = KernelParams.create(2, d)
    with workprec(64):
        assert abs(kernel_mass(kp) - 1) < mpf("1e-6")


def test_grad_closed_form_d1(kp21):
    # |G_2'(r)| = e^(-r)/2 in one dimension
    with workprec(kp21.quadrature.precision):
        for r in ("0.5", "2"):
            got = grad_bessel_kernel(kp21, r)
            expect = mp.exp(-mpf(r)) / 2
            assert abs(got - expect) / expect < mpf("1e-10")


def test_grad_l1_d1_equals_one():
    with workprec(64):
        assert abs(grad_kernel_l1(1) - 1) < mpf("1e-6")


@pytest.mark.parametrize("d", [2, 3])
def test_grad_l1_finite(d):
    v = grad_kernel_l1(d)
    assert mp.isfinite(v) and v > 0


def test_local_majorant_cases():
    with workprec(96):
        assert local_majorant(KernelParams.create(3, 1), "0.5") == 1
        m_eq = local_majorant(KernelParams.create(2, 2), "0.5")
        assert abs(m_eq - (1 + mp.log(4))) < mpf("1e-20")
        m_lt = local_majorant(KernelParams.create(1, 2), "0.25")
        assert abs(m_lt - 5) < mpf("1e-20")   # 1 + r^(-1)


def test_check_kernel_bounds_d1(kp21):
    rep = check_kernel_bounds(kp21)
    assert rep.passed
    # G_2 e^(r/2) = e^(-r/2)/2 on the far range: bounded by 1/2, decreasing
    assert rep.params["far_worst"] <= mpf("0.5")
    assert rep.params["far_worst"] > 0


def test_check_kernel_bounds_s_equals_d():
    rep = check_kernel_bounds(KernelParams.create(2, 2))
    assert rep.passed
    assert mp.isfinite(rep.worst_ratio)


def test_check_grad_bound_vanishing_at_origin_log_case():
    # s - 1 = d: the comparison kernel diverges logarithmically at 0 while
    # the radial derivative stays bounded, so the ratio decays toward 0
    # (slowly, like 1/log(1/r))
    rep = check_grad_bound(KernelParams.create(2, 1))
    assert rep.passed
    rows = rep.rows
    assert rows[0][2] < rep.worst_ratio / 5
    assert rows[0][2] < rows[5][2] < rows[10][2]   # increasing away from 0


def test_check_grad_bound_constant_at_origin_power_case():
    # s - 1 < d strictly: both sides scale like r^(s-1-d), so the ratio
    # tends to a positive constant (1/sqrt(2) for s = d = 2)
    rep = check_grad_bound(KernelParams.create(2, 2))
    assert rep.passed
    first = rep.rows[0]
    with workprec(96):
        assert abs(first[2] - 1 / mp.sqrt(2)) < mpf("1e-4")


def test_check_grad_bound_requires_s_above_one():
    with pytest.raises(DomainError):
        check_grad_bound(KernelParams.create(1, 1))


def test_params_validation():
    with pytest.raises(DomainError):
        KernelParams.create(0, 1)
    with pytest.raises(DomainError):
        KernelParams.create(2, 0)
    with pytest.raises(DomainError):
        kernel_mass(KernelParams.create(2, 4))
