"""Exact fixed-point currency and rational helpers.

Currency amounts are plain ``int`` values in minor units, ``SCALE`` minor
units per currency unit (9 decimal places).  Fractions of a unit that do
not fit the grid are rejected on input; internal divisions floor and the
caller decides where the remainder goes.
"""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation, localcontext
from fractions import Fraction
from typing import Union

DECIMALS = 9
SCALE = 10**DECIMALS

Numberish = Union[int, str, Decimal, Fraction]


def to_fraction(value: Numberish) -> Fraction:
    """Parse ``value`` as an exact rational. Floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing binary float {value!r}; pass a decimal string")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a decimal number: {value!r}") from exc
    raise TypeError(f"unsupported numeric type {type(value).__name__}")


def parse_amount(value: Numberish) -> int:
    """Convert a currency amount to minor units, exactly.

    >>> parse_amount("1.5")
    1500000000
    """
    frac = to_fraction(value) * SCALE
    if frac.denominator != 1:
        raise ValueError(f"{value!r} has more than {DECIMALS} decimal places")
    return frac.numerator


def units_to_fraction(units: int) -> Fraction:
    return Fraction(units, SCALE)


def format_amount(units: int) -> str:
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), SCALE)
    return f"{sign}{whole}.{frac:0{DECIMALS}d}"


def format_fraction(value: Fraction | float, places: int = DECIMALS) -> str:
    """Render a rational (or float) in fixed-point notation, half-even rounded."""
    if isinstance(value, float):
        value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 60
        try:
            dec = Decimal(value.numerator) / Decimal(value.denominator)
        except InvalidOperation as exc:  # pragma: no cover - guarded by prec
            raise ValueError(str(value)) from exc
        quantum = Decimal(1).scaleb(-places)
        out = dec.quantize(quantum, rounding=ROUND_HALF_EVEN)
    text = format(out, "f")
    return "0." + "0" * places if text.startswith("-") and set(text) <= set("-0.") else text


def format_exact(value: Fraction) -> str:
    """``p/q`` form, or plain integer text when q == 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
