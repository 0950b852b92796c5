"""Canonical parsing and printing of exact rationals (``"p/q"`` strings)."""

from fractions import Fraction


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted on the exact path")
    return Fraction(x)


def fmt(x):
    """Print a rational as ``p/q`` (always with a denominator)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_short(x):
    """Print integers without denominator, other rationals as ``p/q``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
