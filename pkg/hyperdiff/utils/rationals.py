"""
Exact rational helpers shared by the expression and series layers
"""
from fractions import Fraction

from ..errors import DivisionByZero, IrrationalValue


def _integer_root(m, n):
    """Exact n-th root of a non-negative integer, or None."""
    lo, hi = 0, 1
    while hi ** n <= m:
        hi *= 2
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid ** n <= m:
            lo = mid
        else:
            hi = mid
    return lo if lo ** n == m else None


def exact_rational_power(c, r):
    """c ** r for rational c and r, or IrrationalValue."""
    c, r = Fraction(c), Fraction(r)
    if c == 0 and r < 0:
        raise DivisionByZero("zero to a negative power")
    if r.denominator == 1:
        return c ** int(r)
    n = r.denominator
    if c < 0 and n % 2 == 0:
        raise IrrationalValue(f"{c}^{r} is not real")
    sign = -1 if c < 0 else 1
    num = _integer_root(abs(c.numerator), n)
    den = _integer_root(c.denominator, n)
    if num is None or den is None:
        raise IrrationalValue(f"{c}^{r} is irrational")
    return (sign * Fraction(num, den)) ** r.numerator


def format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
