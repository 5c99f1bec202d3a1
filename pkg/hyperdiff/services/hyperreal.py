"""
Exact hyperreal arithmetic on truncated Levi-Civita series.

A value is a finite sum of c_k * eps^k (integer k, rational c_k) that is known
up to and including eps^trunc_order. Everything above the window is unknown
unless the value is flagged exact, in which case the tail is known to vanish.
omega is eps^-1.
"""
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Tuple, Union

from .. import config
from ..errors import DivisionByZero, IndeterminateOrder, IrrationalValue
from ..utils.rationals import exact_rational_power, format_rational

INFINITE_VALUATION = math.inf


class SignedInfinity(enum.Enum):
    PLUS = "+inf"
    MINUS = "-inf"

    def __str__(self):
        return self.value


PlusInfinity = SignedInfinity.PLUS
MinusInfinity = SignedInfinity.MINUS


@dataclass(frozen=True)
class PrincipalMonomial:
    coefficient: Fraction
    exponent: int

    @property
    def is_zero(self):
        return self.coefficient == 0

    def __str__(self):
        if self.is_zero:
            return "0"
        return _format_terms(((self.exponent, self.coefficient),))


@dataclass(frozen=True)
class LeviCivitaNumber:
    terms: Tuple[Tuple[int, Fraction], ...]
    trunc_order: int
    exact: bool = field(default=False, compare=False)

    # construction

    @classmethod
    def from_rational(cls, value, trunc_order=None):
        trunc = config.DEFAULT_TRUNC if trunc_order is None else trunc_order
        return _make({0: Fraction(value)}, trunc, exact=True)

    @classmethod
    def monomial(cls, coefficient, exponent, trunc_order=None):
        trunc = config.DEFAULT_TRUNC if trunc_order is None else trunc_order
        return _make({exponent: Fraction(coefficient)}, trunc, exact=True)

    @classmethod
    def epsilon(cls, trunc_order=None):
        return cls.monomial(1, 1, trunc_order)

    @classmethod
    def omega(cls, trunc_order=None):
        return cls.monomial(1, -1, trunc_order)

    @classmethod
    def zero(cls, trunc_order=None):
        return cls.from_rational(0, trunc_order)

    @classmethod
    def from_terms(cls, coefficients, trunc_order, exact=False):
        return _make({k: Fraction(c) for k, c in dict(coefficients).items()}, trunc_order, exact)

    # inspection

    @property
    def is_zero(self):
        return not self.terms

    @property
    def valuation(self):
        return valuation(self)

    def coefficient(self, exponent):
        for k, c in self.terms:
            if k == exponent:
                return c
        return Fraction(0)

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.terms)

    def with_trunc(self, trunc_order):
        """Narrow the window; widening is only meaningful for exact values."""
        if trunc_order > self.trunc_order and not self.exact:
            raise ValueError("cannot widen the window of a truncated value")
        return _make(self.as_dict(), trunc_order, self.exact)

    def __str__(self):
        return to_text(self)

    # operators

    def _coerce(self, other):
        if isinstance(other, LeviCivitaNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return LeviCivitaNumber.from_rational(other, self.trunc_order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else mul(self, invert(other))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else mul(other, invert(self))

    def __pow__(self, exponent):
        if isinstance(exponent, int):
            return pow_int(self, exponent)
        return rational_power(self, Fraction(exponent))

    def __le__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else leq(self, other)

    def __lt__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else lt(self, other)

    def __ge__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else leq(other, self)

    def __gt__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else lt(other, self)

    def __abs__(self):
        return abs_(self)


StandardPart = Union[Fraction, SignedInfinity]


def _make(coefficients, trunc_order, exact):
    kept = {}
    for k, c in coefficients.items():
        if c == 0:
            continue
        if k > trunc_order:
            # a known nonzero term fell out of the window
            exact = False
            continue
        kept[k] = c
    return LeviCivitaNumber(tuple(sorted(kept.items())), trunc_order, exact)


def _mul_dicts(a, b, limit):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            if k <= limit:
                out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c != 0}


def _effective_valuation(a):
    return a.terms[0][0] if a.terms else a.trunc_order + 1


def valuation(a):
    """Least exponent with a nonzero coefficient; INFINITE_VALUATION for zero."""
    return a.terms[0][0] if a.terms else INFINITE_VALUATION


def add(a, b):
    coefficients = a.as_dict()
    for k, c in b.terms:
        coefficients[k] = coefficients.get(k, 0) + c
    return _make(coefficients, min(a.trunc_order, b.trunc_order), a.exact and b.exact)


def neg(a):
    return LeviCivitaNumber(tuple((k, -c) for k, c in a.terms), a.trunc_order, a.exact)


def sub(a, b):
    return add(a, neg(b))


def scale(a, factor):
    factor = Fraction(factor)
    if factor == 0:
        return LeviCivitaNumber((), a.trunc_order, True)
    return LeviCivitaNumber(tuple((k, c * factor) for k, c in a.terms), a.trunc_order, a.exact)


def mul(a, b):
    trunc = min(a.trunc_order + _effective_valuation(b), b.trunc_order + _effective_valuation(a))
    if (a.is_zero and a.exact) or (b.is_zero and b.exact):
        return LeviCivitaNumber((), trunc, True)
    return _make(_mul_dicts(a.as_dict(), b.as_dict(), trunc), trunc, a.exact and b.exact)


def _split_leading(a):
    """a = c * eps^v * (1 + r) with v(r) >= 1; r is returned in relative exponents."""
    v, c = a.terms[0]
    rest = {k - v: coeff / c for k, coeff in a.terms[1:]}
    return v, c, rest


def _geometric(rest, limit):
    """1 / (1 + rest) up to relative exponent limit."""
    negated = {k: -c for k, c in rest.items()}
    result = {0: Fraction(1)}
    power = {0: Fraction(1)}
    for _ in range(max(limit, 0)):
        power = _mul_dicts(power, negated, limit)
        if not power:
            break
        for k, c in power.items():
            result[k] = result.get(k, 0) + c
    return result


def invert(a):
    if a.is_zero:
        raise DivisionByZero(f"cannot invert a value that is zero up to eps^{a.trunc_order}")
    v, c, rest = _split_leading(a)
    relative_window = a.trunc_order - v
    series = _geometric(rest, relative_window)
    shifted = {k - v: coeff / c for k, coeff in series.items()}
    return _make(shifted, a.trunc_order - 2 * v, exact=a.exact and not rest)


def pow_int(a, n):
    if n < 0:
        return invert(pow_int(a, -n))
    if n == 0:
        return LeviCivitaNumber.from_rational(1, a.trunc_order)
    result = None
    base = a
    while n:
        if n & 1:
            result = base if result is None else mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def leq(a, b):
    difference = sub(b, a)
    if difference.terms:
        return difference.terms[0][1] > 0
    if difference.exact:
        return True
    raise IndeterminateOrder(
        f"values agree up to eps^{difference.trunc_order}; the order is beyond the known window"
    )


def lt(a, b):
    difference = sub(b, a)
    if difference.terms:
        return difference.terms[0][1] > 0
    if difference.exact:
        return False
    raise IndeterminateOrder(
        f"values agree up to eps^{difference.trunc_order}; the order is beyond the known window"
    )


def abs_(a):
    zero = LeviCivitaNumber.zero(a.trunc_order)
    return a if leq(zero, a) else neg(a)


def standard_part(a) -> StandardPart:
    if a.terms and a.terms[0][0] < 0:
        return PlusInfinity if a.terms[0][1] > 0 else MinusInfinity
    if a.trunc_order < 0:
        raise IndeterminateOrder(f"the real part lies outside the window eps^{a.trunc_order}")
    return a.coefficient(0)


def principal_part(a):
    if not a.terms:
        return PrincipalMonomial(Fraction(0), 0)
    k, c = a.terms[0]
    return PrincipalMonomial(c, k)


def is_infinitesimal(a):
    return not a.terms or a.terms[0][0] >= 1


def is_infinite(a):
    return bool(a.terms) and a.terms[0][0] <= -1


# elementary functions (exact only where the result stays rational)

def _require_standard_part(a, expected, name):
    st = standard_part(a)
    if st != expected:
        raise IrrationalValue(f"{name} at {st} has no exact rational series")


def _taylor(a, coefficients, name):
    """Compose a power series sum_k coefficients(k) * a^k around a with st(a) = 0."""
    _require_standard_part(a, 0, name)
    if a.is_zero and a.exact:
        return _make({0: coefficients(0)}, a.trunc_order, exact=True)
    limit = a.trunc_order
    base = a.as_dict()
    result = {}
    power = {0: Fraction(1)}
    for k in range(limit + 1):
        if k:
            power = _mul_dicts(power, base, limit)
            if not power:
                break
        ck = coefficients(k)
        if ck:
            for e, c in power.items():
                result[e] = result.get(e, 0) + ck * c
    return _make(result, limit, exact=False)


def exp(a):
    return _taylor(a, lambda k: Fraction(1, math.factorial(k)), "exp")


def sin(a):
    return _taylor(
        a,
        lambda k: Fraction((-1) ** (k // 2), math.factorial(k)) if k % 2 else Fraction(0),
        "sin",
    )


def cos(a):
    return _taylor(
        a,
        lambda k: Fraction(0) if k % 2 else Fraction((-1) ** (k // 2), math.factorial(k)),
        "cos",
    )


def ln(a):
    _require_standard_part(a, 1, "ln")
    shifted = sub(a, LeviCivitaNumber.from_rational(1, a.trunc_order))
    return _taylor(shifted, lambda k: Fraction((-1) ** (k + 1), k) if k else Fraction(0), "ln")


def _binomial(r, k):
    out = Fraction(1)
    for i in range(k):
        out = out * (r - i) / (i + 1)
    return out


def rational_power(a, r):
    r = Fraction(r)
    if r.denominator == 1:
        return pow_int(a, int(r))
    if a.is_zero:
        if r > 0 and a.exact:
            return a
        raise DivisionByZero("cannot take a fractional power of zero")
    v, c, rest = _split_leading(a)
    shift = v * r
    if shift.denominator != 1:
        raise IrrationalValue(f"eps^{v} to the power {r} leaves the integer exponents")
    lead = exact_rational_power(c, r)
    relative_window = a.trunc_order - v
    series = {0: Fraction(1)}
    power = {0: Fraction(1)}
    for k in range(1, max(relative_window, 0) + 1):
        power = _mul_dicts(power, rest, relative_window)
        if not power:
            break
        coefficient = _binomial(r, k)
        for e, ce in power.items():
            series[e] = series.get(e, 0) + coefficient * ce
    shifted = {e + int(shift): lead * ce for e, ce in series.items()}
    return _make(shifted, int(shift) + relative_window, exact=a.exact and not rest)


# rendering


def _format_monomial(exponent, coefficient):
    if exponent == 0:
        return format_rational(coefficient)
    name = "eps" if exponent > 0 else "omega"
    power = abs(exponent)
    symbol = name if power == 1 else f"{name}^{power}"
    if coefficient == 1:
        return symbol
    if coefficient == -1:
        return f"-{symbol}"
    return f"{format_rational(coefficient)}*{symbol}"


def _format_terms(terms):
    parts = []
    for i, (k, c) in enumerate(terms):
        if i == 0:
            parts.append(_format_monomial(k, c))
        elif c < 0:
            parts.append(" - " + _format_monomial(k, -c))
        else:
            parts.append(" + " + _format_monomial(k, c))
    return "".join(parts)


def to_text(a):
    """Exponents ascending: '-2*omega^2 + omega - 5 + 3*eps'."""
    if not a.terms:
        return "0"
    return _format_terms(a.terms)


def format_standard_part(value):
    if isinstance(value, SignedInfinity):
        return str(value)
    return format_rational(value)
