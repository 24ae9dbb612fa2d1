"""
Rationals
Exact rational parsing and printing shared by the models and operations.
"""

from fractions import Fraction
from typing import Any

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def to_rational(value: Any) -> Fraction:
    """
    Convert an int, Fraction or rational-string to an exact Fraction.

    Accepted strings are "p/q", integers and finite decimals ("0.25").
    Floats are rejected: their binary expansion is not the number the user typed.

    Raises:
        ValueError: If the value is a float, a bool, or not a parseable rational
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"Expected a rational, got bool {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(f"Floats are not accepted as rationals (got {value!r}); use a string like \"p/q\"")
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid rational '{value}': {e}") from e
    raise ValueError(f"Expected a rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Exact text form: "p/q", or "p" when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_rational(value: Fraction) -> str:
    """Exact form followed by a 6-decimal approximation, for humans."""
    return f"{format_rational(value)} ({float(value):.6f})"
