"""
Text and LaTeX rendering of expressions and series
"""
from fractions import Fraction

from .expr import (
    Const,
    DerivAtom,
    DiffAtom,
    Func,
    PartialAtom,
    Var,
    as_expr,
    factors_of,
    normalize,
    sort_key,
    terms_of,
)
from .rationals import format_rational

ELEMENTARY_LATEX = {"sin": r"\sin", "cos": r"\cos", "exp": r"\exp", "ln": r"\ln"}


# ---------------------------------------------------------------------------
# text

def _text_exponent(exponent):
    if exponent.denominator == 1 and exponent > 0:
        return str(exponent.numerator)
    return f"({format_rational(exponent)})"


def _text_atom(e):
    if isinstance(e, Const):
        if e.value < 0 or e.value.denominator != 1:
            return f"({format_rational(e.value)})"
        return format_rational(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, DiffAtom):
        return f"d[{e.target.name}]" if e.order == 1 else f"d[{e.target.name},{e.order}]"
    if isinstance(e, PartialAtom):
        return "pd[" + ",".join([e.target.name] + [v.name for v in e.vary]) + "]"
    if isinstance(e, DerivAtom):
        head = f"D[{render_text(e.target)};{e.wrt.name}"
        return head + ("]" if e.order == 1 else f";{e.order}]")
    if isinstance(e, Func):
        return f"{e.name}(" + ", ".join(render_text(a) for a in e.args) + ")"
    return f"({render_text(e)})"


def _text_power(base, exponent):
    if exponent == 1:
        return _text_atom(base)
    return f"{_text_atom(base)}^{_text_exponent(exponent)}"


def _text_term(term):
    """(sign, body) of one normalized term; body carries no leading minus."""
    coefficient, powers = factors_of(term)
    sign = -1 if coefficient < 0 else 1
    coefficient = abs(coefficient)
    numerator = [_text_power(b, x) for b, x in powers if x > 0]
    denominator = [_text_power(b, -x) for b, x in powers if x < 0]
    if coefficient != 1 or not numerator:
        numerator.insert(0, format_rational(coefficient))
    body = "*".join(numerator)
    if len(denominator) == 1 and not denominator[0][0].isdigit():
        body += "/" + denominator[0]
    elif denominator:
        body += "/(" + "*".join(denominator) + ")"
    return sign, body


def render_text(e):
    """Canonical text form; parse_expr reads it back to the same tree."""
    terms = terms_of(normalize(as_expr(e)))
    if not terms:
        return "0"
    parts = []
    for i, term in enumerate(terms):
        sign, body = _text_term(term)
        if i == 0:
            parts.append(("-" if sign < 0 else "") + body)
        else:
            parts.append((" - " if sign < 0 else " + ") + body)
    return "".join(parts)


# ---------------------------------------------------------------------------
# latex

def _latex_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return sign + r"\frac{%d}{%d}" % (abs(value.numerator), value.denominator)


def _latex_differential(e):
    if e.order == 1:
        return r"\mathrm{d}" + e.target.name
    return r"\mathrm{d}^%s%s" % (_latex_exponent(Fraction(e.order)), e.target.name)


def _latex_atom(e):
    if isinstance(e, Const):
        return _latex_rational(e.value) if e.value >= 0 else f"({_latex_rational(e.value)})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, DiffAtom):
        return _latex_differential(e)
    if isinstance(e, PartialAtom):
        return r"\partial(" + ", ".join([e.target.name] + [v.name for v in e.vary]) + ")"
    if isinstance(e, DerivAtom):
        target = _latex_atom(e.target)
        return "D_{%s}^{%d}%s" % (e.wrt.name, e.order, target)
    if isinstance(e, Func):
        args = ", ".join(render_latex(a) for a in e.args)
        return ELEMENTARY_LATEX.get(e.name, e.name) + f"({args})"
    return f"\\left({render_latex(e)}\\right)"


def _latex_exponent(exponent):
    if exponent.denominator == 1 and 0 <= exponent < 10:
        return str(exponent.numerator)
    return "{%s}" % _latex_rational(exponent)


def _latex_power(base, exponent):
    if exponent == 1:
        return _latex_atom(base)
    text = _latex_atom(base)
    if isinstance(base, DiffAtom) and base.order > 1:
        text = f"({text})"
    return "%s^%s" % (text, _latex_exponent(exponent))


def _split_ratio(powers):
    """Numerator differentials over a single dx power, split per differential.

    Returns the list of fractions, or None when the term does not have that shape.
    """
    denominators = [(b, x) for b, x in powers if x < 0]
    if len(denominators) != 1 or not isinstance(denominators[0][0], DiffAtom):
        return None
    dx, power = denominators[0]
    if dx.order != 1:
        return None
    differentials = sorted(
        ((b, x) for b, x in powers if x > 0 and isinstance(b, (DiffAtom, PartialAtom))),
        key=lambda item: (_order(item[0]), sort_key(item[0])),
    )
    total = sum(_order(b) * x for b, x in differentials)
    if not differentials or total != -power:
        return None
    fractions = []
    for b, x in differentials:
        below = _latex_power(dx, Fraction(_order(b) * x))
        fractions.append(r"\frac{%s}{%s}" % (_latex_power(b, x), below))
    return fractions


def _order(atom):
    return atom.order if isinstance(atom, DiffAtom) else 1


def _latex_term(term):
    coefficient, powers = factors_of(term)
    sign = -1 if coefficient < 0 else 1
    coefficient = abs(coefficient)
    plain = [_latex_power(b, x) for b, x in powers
             if x > 0 and not isinstance(b, (DiffAtom, PartialAtom))]
    ratio = _split_ratio(powers)
    if ratio is not None:
        body = "".join(plain + ratio)
    else:
        numerator = [_latex_power(b, x) for b, x in powers if x > 0]
        denominator = [_latex_power(b, -x) for b, x in powers if x < 0]
        body = " ".join(numerator) if numerator else ""
        if denominator:
            body = r"\frac{%s}{%s}" % (body or "1", " ".join(denominator))
    if not body:
        body = _latex_rational(coefficient)
    elif coefficient != 1:
        body = _latex_rational(coefficient) + " " + body
    return sign, body


def _display_key(term):
    """Order terms the way derivative expansions are usually written."""
    _, powers = factors_of(term)
    below = sum(-x for b, x in powers if x < 0 and isinstance(b, DiffAtom))
    orders = [_order(b) for b, x in powers if x > 0 and isinstance(b, (DiffAtom, PartialAtom))]
    return (below, -max(orders, default=0))


def render_latex(e):
    terms = sorted(terms_of(normalize(as_expr(e))), key=_display_key)
    if not terms:
        return "0"
    parts = []
    for i, term in enumerate(terms):
        sign, body = _latex_term(term)
        if i == 0:
            parts.append(("-" if sign < 0 else "") + body)
        else:
            parts.append((" - " if sign < 0 else " + ") + body)
    return "".join(parts)


# ---------------------------------------------------------------------------
# series

def render_series_latex(value):
    """LaTeX for a LeviCivitaNumber, exponents ascending."""
    if not value.terms:
        return "0"
    parts = []
    for i, (k, c) in enumerate(value.terms):
        magnitude = abs(c)
        if k == 0:
            body = _latex_rational(magnitude)
        else:
            symbol = r"\epsilon" if k > 0 else r"\omega"
            if abs(k) != 1:
                symbol += "^{%d}" % abs(k)
            body = symbol if magnitude == 1 else _latex_rational(magnitude) + symbol
        if i == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)
