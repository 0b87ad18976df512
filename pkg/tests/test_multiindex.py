"""Tests for exact multi-index identities."""

import math
import random
from fractions import Fraction

import pytest
from mpmath import mpf

from ultrana.errors import DomainError, ResourceLimitError
from ultrana.multiindex import (
    MultiIndex,
    binomial_completeness,
    enumerate_multiindices,
    highdim_reduction_check,
    vandermonde_check,
)


def test_multiindex_basics():
    a = MultiIndex.of(2, 0, 3)
    assert a.order == 5
    assert a.factorial() == 2 * 6
    assert MultiIndex.of(1, 1) <= MultiIndex.of(2, 1)
    assert not (MultiIndex.of(3, 0) <= MultiIndex.of(2, 1))
    assert (MultiIndex.of(2, 1) - MultiIndex.of(1, 1)).components == (1, 0)


def test_multiindex_rejects_negative():
    with pytest.raises(DomainError):
        MultiIndex.of(1, -1)


def test_enumeration_order_and_counts():
    out = enumerate_multiindices(2, 2)
    assert [m.components for m in out] == [(2, 0), (1, 1), (0, 2)]
    assert len(enumerate_multiindices(1, 17)) == 1
    assert len(enumerate_multiindices(4, 8)) == math.comb(11, 3) == 165


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_multiindices(8, 30)


@pytest.mark.parametrize("alpha,l,expected", [
    ((1, 1), 1, 2),
    ((2, 1), 1, 3),
])
def test_vandermonde_hand_cases(alpha, l, expected):
    res = vandermonde_check(MultiIndex(alpha), l)
    assert res.ok
    assert res.lhs == res.rhs == expected


def test_vandermonde_exhaustive_small():
    for d in (1, 2, 3):
        for total in range(7):
            for alpha in enumerate_multiindices(d, total):
                for l in range(total + 1):
                    assert vandermonde_check(alpha, l).ok


def test_vandermonde_l_out_of_range():
    with pytest.raises(DomainError):
        vandermonde_check(MultiIndex.of(1, 1), 3)


def test_binomial_completeness_power_of_two():
    for comps in ((3,), (2, 2), (1, 2, 3), (2, 1, 1, 2)):
        a = MultiIndex(comps)
        total, expect = binomial_completeness(a)
        assert total == expect == 2 ** a.order


def test_reduction_zero_index():
    res = highdim_reduction_check(MultiIndex.of(0, 0), 1, 1)
    assert res.ok
    assert res.lhs == 1 and res.rhs == 1


def test_reduction_hand_case():
    res = highdim_reduction_check(MultiIndex.of(1, 1), 1, 2)
    assert res.ok
    assert res.rel_diff <= res.tolerance


def test_reduction_random_d3():
    rng = random.Random(7)
    for _ in range(10):
        comps = [rng.randint(0, 3) for _ in range(3)]
        alpha = MultiIndex(tuple(comps))
        res = highdim_reduction_check(
            alpha, Fraction(rng.randint(1, 5), rng.randint(1, 5)),
            Fraction(rng.randint(1, 5), rng.randint(1, 5)))
        assert res.ok


def test_reduction_permutation_invariance():
    base = (3, 1, 5)
    vals = []
    for perm in ((0, 1, 2), (2, 0, 1), (1, 2, 0)):
        alpha = MultiIndex(tuple(base[i] for i in perm))
        res = highdim_reduction_check(alpha, Fraction(1, 2), Fraction(3, 2))
        assert res.ok
        vals.append(res.lhs)
    assert all(v == vals[0] for v in vals)   # both sides depend only on |alpha|


def test_reduction_order_cap():
    with pytest.raises(DomainError):
        highdim_reduction_check(MultiIndex.of(13), 1, 1)


def test_reduction_rejects_nonpositive():
    with pytest.raises(DomainError):
        highdim_reduction_check(MultiIndex.of(2), 0, 1)
