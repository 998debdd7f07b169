from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aperiodic_lab.exact import (TAU, QNum, audited, display, int_array_check, parse_number, q_ceil, q_floor,
                                 sqrt_bounds, sqrt_exact, zsign)

mpmath.mp.dps = 80
ints = st.integers(-10**12, 10**12)
small = st.integers(-50, 50)
qnums = st.builds(QNum, small, small, st.integers(1, 30))
nonzero = qnums.filter(lambda q: q != 0)


def mp_value(q: QNum):
    return (mpmath.mpf(q.a) + mpmath.mpf(q.b) * (1 + mpmath.sqrt(5)) / 2) / q.den


@given(ints, ints)
def test_zsign_matches_high_precision(a, b):
    v = mpmath.mpf(a) + mpmath.mpf(b) * (1 + mpmath.sqrt(5)) / 2
    assert zsign(a, b) == (v > 0) - (v < 0)


@given(qnums, qnums, qnums)
def test_ring_laws(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0


@given(nonzero)
def test_inverse(x):
    assert x * x.inverse() == 1
    assert x / x == 1


@given(qnums, qnums)
def test_total_order_agrees_with_values(x, y):
    assert (x < y) == (mp_value(x) < mp_value(y))
    assert (x < y) + (x == y) + (x > y) == 1


@given(qnums)
def test_string_roundtrip_and_hash(x):
    assert QNum.parse(str(x)) == x
    assert hash(QNum.parse(str(x))) == hash(x)


@given(st.fractions(max_denominator=50))
def test_rational_hash_matches_fraction(f):
    assert hash(QNum.from_fraction(f)) == hash(f)
    assert QNum.from_fraction(f) == f


@given(qnums)
def test_floor_ceil(x):
    f = q_floor(x)
    assert QNum(f) <= x < QNum(f + 1)
    assert q_ceil(x) - 1 < mp_value(x) <= q_ceil(x)


@given(qnums.filter(lambda q: q >= 0))
def test_sqrt_bounds_bracket(x):
    lo, hi = sqrt_bounds(x)
    assert lo <= hi
    root = mpmath.sqrt(mp_value(x))
    assert mpmath.mpf(lo.numerator) / lo.denominator <= root <= mpmath.mpf(hi.numerator) / hi.denominator


def test_tau_identity():
    assert TAU * TAU == TAU + 1
    assert TAU.conj() == 1 - TAU
    assert TAU.norm() == -1


def test_parse_rejects_non_normalized():
    with pytest.raises(ValueError):
        QNum.parse("2 0 4")
    with pytest.raises(ValueError):
        QNum.parse("1 0 -3")


def test_parse_number_forms():
    assert parse_number("3/2") == Fraction(3, 2)
    assert parse_number("0.25") == Fraction(1, 4)
    assert parse_number("0 1 1") == TAU


def test_sqrt_exact():
    assert sqrt_exact(QNum(9, 0, 4)) == Fraction(3, 2)
    assert sqrt_exact(QNum(2)) is None


def test_display_rounds_half_even():
    assert display(QNum(1, 0, 8), sig=2) == "0.12"
    assert display(QNum(1, 0, 3)) == "0.333333333333"


def test_float_comparison_is_rejected_and_counted():
    with audited() as audit:
        with pytest.raises(TypeError):
            QNum(1) < 0.5
        assert audit.floating == 1
    with pytest.raises(TypeError):
        int_array_check(np.array([0.5]))


def test_audit_counts_exact_comparisons():
    with audited() as audit:
        assert QNum(1) < TAU
        assert audit.exact >= 1 and audit.floating == 0
