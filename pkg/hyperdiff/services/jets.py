"""
Jet assignments: every variable is pinned to a polynomial in the hidden
parameter q, sampled at q0 with steps of eps.

Root variables carry their q-polynomial directly; derived variables carry a
definition in terms of the variables they depend on, and opaque functions a
body in their declared arguments. Random assignments come from a seeded numpy
generator; the analytic oracle runs through sympy.
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Optional, Tuple

import numpy as np
import sympy as sp

from .. import config
from ..errors import EvaluationError, UnboundFunction, UnboundVariable
from ..utils.expr import (
    Add,
    Const,
    DerivAtom,
    DiffAtom,
    Func,
    Mul,
    PartialAtom,
    Pow,
    Var,
    free_vars,
    normalize,
)
from ..utils.rationals import format_rational
from ..utils.render import render_text

logger = logging.getLogger(__name__)

DEFAULT_BASE = "q"


@dataclass(frozen=True)
class JetAssignment:
    polys: Mapping[str, Tuple[Fraction, ...]] = field(default_factory=dict)
    q0: Fraction = Fraction(0)
    trunc: int = config.DEFAULT_TRUNC
    definitions: Mapping[str, object] = field(default_factory=dict)
    bodies: Mapping[str, object] = field(default_factory=dict)
    base: str = DEFAULT_BASE

    def __post_init__(self):
        object.__setattr__(self, "q0", Fraction(self.q0))
        object.__setattr__(
            self, "polys", {v: tuple(Fraction(c) for c in cs) for v, cs in dict(self.polys).items()}
        )
        if self.trunc < config.MIN_TRUNC:
            raise EvaluationError(f"truncation order {self.trunc} is below {config.MIN_TRUNC}")

    def with_trunc(self, trunc):
        return replace(self, trunc=trunc)

    def binds(self, name):
        return name == self.base or name in self.polys or name in self.definitions

    def describe(self):
        """One-line summary such as 'x = q^2 + 1; y = x^3; q0 = 1'."""
        parts = [f"{v} = {format_poly(cs, self.base)}" for v, cs in sorted(self.polys.items())]
        parts += [f"{v} = {render_text(e)}" for v, e in sorted(self.definitions.items())]
        parts += [
            f"{name}(...) = {render_text(e)}" for name, e in sorted(self.bodies.items())
        ]
        parts.append(f"q0 = {format_rational(self.q0)}")
        return "; ".join(parts)


def format_poly(coefficients, symbol=DEFAULT_BASE):
    terms = []
    for k in range(len(coefficients) - 1, -1, -1):
        c = Fraction(coefficients[k])
        if c == 0:
            continue
        power = "" if k == 0 else symbol if k == 1 else f"{symbol}^{k}"
        if not power:
            body = format_rational(abs(c))
        elif abs(c) == 1:
            body = power
        else:
            body = f"{format_rational(abs(c))}*{power}"
        if not terms:
            terms.append(("-" if c < 0 else "") + body)
        else:
            terms.append((" - " if c < 0 else " + ") + body)
    return "".join(terms) or "0"


# ---------------------------------------------------------------------------
# sympy bridge (analytic oracle)

_SYMPY_FUNCTIONS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "ln": sp.log}


def _sympy_rational(value):
    value = Fraction(value)
    return sp.Rational(value.numerator, value.denominator)


def to_sympy(e, symbols, bodies=None):
    """Grade-0 expression as a sympy expression; `symbols` maps names to sympy objects."""
    bodies = bodies or {}
    if isinstance(e, Const):
        return _sympy_rational(e.value)
    if isinstance(e, Var):
        if e.name not in symbols:
            raise UnboundVariable(f"variable {e.name} has no value in the assignment")
        return symbols[e.name]
    if isinstance(e, Add):
        return sp.Add(*(to_sympy(t, symbols, bodies) for t in e.terms))
    if isinstance(e, Mul):
        return sp.Mul(*(to_sympy(f, symbols, bodies) for f in e.factors))
    if isinstance(e, Pow):
        return sp.Pow(to_sympy(e.base, symbols, bodies), _sympy_rational(e.exponent))
    if isinstance(e, Func):
        args = [to_sympy(a, symbols, bodies) for a in e.args]
        if e.name in _SYMPY_FUNCTIONS:
            return _SYMPY_FUNCTIONS[e.name](*args)
        if e.name in bodies:
            params, body = bodies[e.name]
            return to_sympy(body, dict(zip(params, args)), bodies)
        raise UnboundFunction(f"function {e.name} has no body in the assignment")
    if isinstance(e, (DiffAtom, PartialAtom, DerivAtom)):
        raise EvaluationError("the analytic oracle only handles expressions without differentials")
    raise TypeError(f"not an expression: {e!r}")


def to_fraction(value):
    if not isinstance(value, sp.Rational):
        raise EvaluationError(f"analytic value {value} is not rational")
    return Fraction(int(value.p), int(value.q))


def q_expression(name, assignment, decls=None):
    """sympy expression in q for a variable, composing definitions down to the roots."""
    q = sp.Symbol(assignment.base)
    bodies = _sympy_bodies(assignment, decls)
    cache = {}

    def resolve(v):
        if v in cache:
            return cache[v]
        if v == assignment.base:
            value = q
        elif v in assignment.polys:
            value = sum(
                (_sympy_rational(c) * q ** k for k, c in enumerate(assignment.polys[v])),
                sp.Integer(0),
            )
        elif v in assignment.definitions:
            definition = assignment.definitions[v]
            symbols = {u: resolve(u) for u in free_vars(definition)}
            value = to_sympy(definition, symbols, bodies)
        elif v in bodies:
            params, _ = bodies[v]
            value = to_sympy(Func(v, tuple(Var(p) for p in params)), {p: resolve(p) for p in params}, bodies)
        else:
            raise UnboundVariable(f"variable {v} has no polynomial or definition")
        cache[v] = sp.expand(value)
        return cache[v]

    return resolve(name)


def _sympy_bodies(assignment, decls):
    bodies = {}
    for name, body in assignment.bodies.items():
        if decls is None or not decls.has_function(name):
            raise UnboundFunction(f"function {name} has a body but no declared arguments")
        bodies[name] = (decls.arguments(name), body)
    return bodies


def analytic_derivative(y, x, n, assignment, decls=None):
    """n-th derivative of y with respect to x at q0, by sympy differentiation in q."""
    q = sp.Symbol(assignment.base)
    y_q = q_expression(y, assignment, decls)
    x_q = q_expression(x, assignment, decls)
    dx = sp.diff(x_q, q)
    current = y_q
    for _ in range(n):
        current = sp.diff(current, q) / dx
    return to_fraction(sp.simplify(current.subs(q, _sympy_rational(assignment.q0))))


def poly_derivative_at(coefficients, n, point):
    """n-th derivative of the polynomial sum c_k q^k at a point, via sympy.Poly."""
    q = sp.Symbol(DEFAULT_BASE)
    poly = sp.Poly([_sympy_rational(c) for c in reversed(coefficients)] or [0], q)
    return to_fraction(poly.diff((q, n)).eval(_sympy_rational(point)))


def compose(outer, inner):
    """Coefficients of outer(inner(q)), both ascending."""
    q = sp.Symbol(DEFAULT_BASE)
    a = sp.Poly([_sympy_rational(c) for c in reversed(outer)] or [0], q)
    b = sp.Poly([_sympy_rational(c) for c in reversed(inner)] or [0], q)
    composed = a.compose(b).all_coeffs()
    return tuple(to_fraction(c) for c in reversed(composed))


def reparameterize(assignment, poly, q0=None):
    """Compose every root polynomial with `poly`; pass q0 to move the sample point.

    With poly(q0') = q0 the assignment describes the same point along a
    different parameterization.
    """
    polys = {v: compose(cs, poly) for v, cs in assignment.polys.items()}
    return replace(assignment, polys=polys, q0=assignment.q0 if q0 is None else Fraction(q0))


def local_reparameterization(q0, slope, curvature=0):
    """q0 + slope*(q - q0) + curvature*(q - q0)^2, a reparameterization fixing q0."""
    q0, slope, curvature = Fraction(q0), Fraction(slope), Fraction(curvature)
    return (q0 - slope * q0 + curvature * q0 * q0, slope - 2 * curvature * q0, curvature)


# ---------------------------------------------------------------------------
# random assignments

@dataclass
class JetSampler:
    """Seeded source of random polynomial jets for a set of declarations."""
    seed: int = config.DEFAULT_SEED
    max_degree: int = config.JET_MAX_DEGREE
    coeff_range: int = config.JET_COEFF_RANGE
    trunc: int = config.DEFAULT_TRUNC
    rng: Optional[np.random.Generator] = None

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng(self.seed)

    def rational(self):
        numerator = int(self.rng.integers(-self.coeff_range, self.coeff_range + 1))
        denominator = int(self.rng.integers(1, 3))
        return Fraction(numerator, denominator)

    def nonzero_rational(self):
        value = Fraction(0)
        while value == 0:
            value = self.rational()
        return value

    def polynomial(self, min_degree=1):
        degree = int(self.rng.integers(min_degree, self.max_degree + 1))
        coefficients = [self.rational() for _ in range(degree)]
        coefficients.append(self.nonzero_rational())
        return tuple(coefficients)

    def _polynomial_in(self, names):
        """Random polynomial expression in the given variables, never constant."""
        terms = []
        for name in names:
            coefficients = self.polynomial()
            terms += [Mul((Const(c), Pow(Var(name), k))) for k, c in enumerate(coefficients) if c]
        if len(names) > 1:
            terms.append(Mul((Const(self.nonzero_rational()),) + tuple(Var(n) for n in names)))
        return Add(tuple(terms))

    def assignment(self, decls, q0=None):
        base = decls.base or DEFAULT_BASE
        polys, definitions, bodies = {}, {}, {}
        for v in decls.dependency_order():
            if v == base:
                continue
            deps = sorted(decls.dependencies(v) - {base})
            if deps:
                definitions[v] = normalize(self._polynomial_in(deps))
            else:
                polys[v] = self.polynomial()
        for name in sorted(decls.functions):
            bodies[name] = normalize(self._polynomial_in(decls.arguments(name)))
        if q0 is None:
            q0 = Fraction(int(self.rng.integers(-self.coeff_range, self.coeff_range + 1)))
        logger.debug("sampled jet with %d roots and %d definitions", len(polys), len(definitions))
        return JetAssignment(polys, q0, self.trunc, definitions, bodies, base)
