"""Tests for the derivative-bound recurrence and envelope fitting."""

import pytest
from mpmath import mp, mpf, workprec

from ultrana.errors import DomainError
from ultrana.majorant import closed_majorant
from ultrana.propagator import (
    base_case,
    envelope_prefactor,
    fit_K,
    implied_constants,
    propagate_first_order,
    propagate_second_order,
    sequence_rows,
)


def test_base_case_landau_constant():
    bc = base_case(2)
    with workprec(256):
        assert bc.b0 == 1
        assert bc.b2 == 6
        assert abs(bc.b1 - 2 * mp.sqrt(6)) < mpf(2) ** -240


def test_base_case_cp_one():
    bc = base_case(1)
    with workprec(256):
        assert bc.b2 == 3
        assert abs(bc.b1 - mp.sqrt(3)) < mpf(2) ** -240


def test_base_case_algebraic_identity():
    for cp in ("1", "1.7", "2", "3.25"):
        bc = base_case(cp)
        with workprec(256):
            assert abs(bc.b1 ** 2 - bc.c_p ** 2 * bc.b2) < mpf(2) ** -230 * bc.b2


def test_base_case_rejects_small_cp():
    with pytest.raises(DomainError):
        base_case("0.5")


def test_second_order_fibonacci_type_at_zero_C0():
    seq = propagate_second_order(0, base_case(2), 12)
    with workprec(256):
        vals = [b.to_mpf() for b in seq.bounds]
        for n in range(2, 11):
            assert abs(vals[n + 1] - (vals[n] + vals[n - 1])) \
                < mpf(2) ** -230 * vals[n + 1]


def test_second_order_b3_expansion():
    # b3 = (b2 + 2 C0 b1 + C0^2 b0) + (b1 + C0 b0), the n = 2 instance
    with workprec(256):
        C0 = mpf("0.7")
        bc = base_case(2)
        seq = propagate_second_order(C0, bc, 4)
        expect = (bc.b2 + 2 * C0 * bc.b1 + C0 ** 2 * bc.b0) + (bc.b1 + C0 * bc.b0)
        got = seq.bounds[3].to_mpf()
        assert abs(got - expect) / expect < mpf(2) ** -230


def test_second_order_requires_N_at_least_three():
    with pytest.raises(DomainError):
        propagate_second_order(1, base_case(2), 2)


def test_first_order_constant_at_zero_C0():
    seq = propagate_first_order(0, 10)
    with workprec(256):
        for b in seq.bounds:
            assert b.log_abs == 0


def test_first_order_small_values():
    seq = propagate_first_order(1, 3)
    with workprec(256):
        assert seq.bounds[1].to_mpf() == 1          # single l = j = 0 term
        got = seq.bounds[2].to_mpf()
        assert abs(got - 2) < mpf(2) ** -240        # 1 + C0 with C0 = 1


def test_prefix_stability_exact():
    bc = base_case(2)
    long = propagate_second_order(1, bc, 60)
    short = propagate_second_order(1, bc, 25)
    for n in range(26):
        assert long.bounds[n].log_abs == short.bounds[n].log_abs
    f_long = propagate_first_order("2.5", 40)
    f_short = propagate_first_order("2.5", 18)
    for n in range(19):
        assert f_long.bounds[n].log_abs == f_short.bounds[n].log_abs


def test_monotonicity_in_C0():
    bc = base_case(2)
    lo = propagate_second_order("0.5", bc, 30)
    hi = propagate_second_order("1.5", bc, 30)
    for n in range(3, 31):
        assert hi.bounds[n].log_abs >= lo.bounds[n].log_abs


def test_fit_K_inverts_closed_majorant():
    # a sequence lying exactly on the envelope C*^n n!/ln^n(n+e) fits
    # K = max(0, C* - kappa C0) / (1/ln kappa + 1)
    with workprec(256):
        C_star, kappa, C0 = mpf(5), mpf(2), mpf(1)
        bounds = [closed_majorant(n, C_star) for n in range(51)]
        K = fit_K(bounds, kappa, C0=C0, precision=256)
        expect = (C_star - kappa * C0) / (1 / mp.log(kappa) + 1)
        assert abs(K - expect) / expect < mpf("1e-60")


def test_fit_K_zero_when_envelope_dominates():
    with workprec(256):
        bounds = [closed_majorant(n, "0.5") for n in range(31)]
        assert fit_K(bounds, 2, C0=1, precision=256) == 0


def test_fit_K_monotone_in_sequence():
    bc = base_case(2)
    seq = propagate_second_order(1, bc, 40)
    bigger = [b * type(b).from_value(2) for b in seq.bounds]
    with workprec(256):
        assert fit_K(bigger, 2, C0=1, precision=256) >= fit_K(seq, 2, precision=256)


def test_fit_K_rejects_bad_kappa():
    seq = propagate_first_order(1, 5)
    with pytest.raises(DomainError):
        fit_K(seq, 1)


def test_fit_K_finite_first_order():
    for c0 in ("1", "5"):
        seq = propagate_first_order(c0, 120)
        K = fit_K(seq, 2, precision=256)
        assert mp.isfinite(K) and K >= 0


def test_implied_constants_and_rows():
    bc = base_case(2)
    seq = propagate_second_order(1, bc, 30)
    cns = implied_constants(seq)
    assert len(cns) == 30
    with workprec(256):
        # C_1 = b_1 * ln(1+e)
        expect = bc.b1 * mp.log(1 + mp.e)
        assert abs(cns[0] - expect) / expect < mpf("1e-60")
    rows = sequence_rows(seq, 2)
    assert len(rows) == 30
    # fitted-K envelope dominates: margins nonnegative
    assert all(r[3] >= -mpf("1e-60") for r in rows)


def test_envelope_prefactor_at_least_one_for_tight_fit():
    seq = propagate_second_order(1, base_case(2), 40)
    K = fit_K(seq, 2)
    pref = envelope_prefactor(seq, 2, 1, K)
    with workprec(256):
        assert abs(pref - 1) < mpf("1e-50")   # the fit touches the envelope
