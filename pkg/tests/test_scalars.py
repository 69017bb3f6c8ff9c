from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkzbench.errors import FloatOverflow, NonPositiveTolerance, ZeroDenominator
from qkzbench.scalars import (
    EXACT,
    ComplexDomain,
    approx_eq,
    format_rational,
    normalize,
    parse_rational,
    to_float,
)


def test_normalize_reduces():
    assert normalize(2, 4) == Fraction(1, 2)


def test_normalize_sign():
    v = normalize(3, -6)
    assert v == Fraction(-1, 2)
    assert v.denominator == 2 and v.numerator == -1


def test_normalize_canonical_zero():
    v = normalize(0, 7)
    assert v == 0 and v.denominator == 1


def test_normalize_zero_denominator():
    with pytest.raises(ZeroDenominator):
        normalize(1, 0)


def test_approx_eq_examples():
    assert approx_eq(1.0, 1.0 + 1e-14, 1e-10)
    assert not approx_eq(1.0, 1.1, 1e-10)
    # absolute branch at small magnitude
    assert approx_eq(0.0, 5e-11, 1e-10)


def test_approx_eq_rejects_bad_tolerance():
    with pytest.raises(NonPositiveTolerance):
        approx_eq(1.0, 1.0, 0.0)
    with pytest.raises(NonPositiveTolerance):
        ComplexDomain(tol=-1e-3)


def test_to_float():
    assert to_float(Fraction(1, 2)) == 0.5 + 0j
    assert to_float(Fraction(-3)) == -3.0 + 0j
    assert to_float(Fraction(1, 3)) == complex(1.0 / 3.0)


def test_to_float_overflow():
    with pytest.raises(FloatOverflow):
        to_float(Fraction(10) ** 400)


def test_parse_and_format():
    assert parse_rational("2/4") == Fraction(1, 2)
    assert parse_rational("-7") == -7
    assert format_rational(Fraction(-1, 2)) == "-1/2"
    assert format_rational(Fraction(5)) == "5"


rationals = st.fractions(
    min_value=-100, max_value=100, max_denominator=50
)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6).filter(bool))
def test_normalize_idempotent(p, q):
    v = normalize(p, q)
    assert normalize(v.numerator, v.denominator) == v


@given(rationals, rationals)
def test_to_float_homomorphism(a, b):
    # error is relative to the operand scale: sums may cancel catastrophically
    scale = max(1.0, abs(float(a)), abs(float(b)))
    assert abs(to_float(a + b) - (to_float(a) + to_float(b))) <= 1e-15 * scale
    assert abs(to_float(a * b) - to_float(a) * to_float(b)) <= 1e-15 * scale * scale


def test_exact_domain_contract():
    assert EXACT.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert EXACT.inverse(Fraction(2, 3)) == Fraction(3, 2)
    assert EXACT.eq(Fraction(1, 2), Fraction(2, 4))
    with pytest.raises(ZeroDivisionError):
        EXACT.inverse(Fraction(0))
    with pytest.raises(ZeroDivisionError):
        EXACT.div(Fraction(1), Fraction(0))


def test_complex_domain_contract():
    dom = ComplexDomain(1e-10)
    assert dom.eq(1.0 + 0j, 1.0 + 1e-14j)
    assert not dom.eq(1.0, 1.1)
    assert dom.coerce(Fraction(1, 2)) == 0.5 + 0j
    with pytest.raises(ValueError):
        dom.coerce(float("nan"))
    with pytest.raises(ZeroDivisionError):
        dom.div(1.0 + 0j, 0j)
