from fractions import Fraction
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from disputesim.money import (
    SCALE,
    format_amount,
    format_exact,
    format_fraction,
    parse_amount,
    to_fraction,
)


def test_parse_amount_exact():
    assert parse_amount("1.5") == 1_500_000_000
    assert parse_amount("0.000000001") == 1
    assert parse_amount(3) == 3 * SCALE
    assert parse_amount(Decimal("2.25")) == 2_250_000_000


def test_parse_amount_rejects_sub_unit_precision():
    with pytest.raises(ValueError):
        parse_amount("0.0000000001")


def test_floats_refused():
    with pytest.raises(TypeError):
        to_fraction(0.1)


@given(st.integers(min_value=-10**18, max_value=10**18))
def test_amount_round_trip(units):
    assert parse_amount(format_amount(units).lstrip("-")) == abs(units)


def test_format_fraction_rounds_half_even():
    assert format_fraction(Fraction(1, 3)) == "0.333333333"
    assert format_fraction(Fraction(2, 3)) == "0.666666667"
    assert format_fraction(Fraction(-1, 10**12)) == "0.000000000"
    assert format_fraction(Fraction(-7, 4)) == "-1.750000000"


def test_format_exact():
    assert format_exact(Fraction(3, 7)) == "3/7"
    assert format_exact(Fraction(4, 2)) == "2"
