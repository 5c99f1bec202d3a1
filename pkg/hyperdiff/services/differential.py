"""
The differential operator d, the partial differential operator pd(f, S) and
principal-part reduction.

d acts as a graded derivation: d(u*v) = u*dv + v*du with the du*dv cross term
left out, d(d^n x) = d^(n+1) x. The cross term is exactly what
`principal_reduce` would discard from a literal forward difference.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, singledispatchmethod
from typing import Mapping, Optional

from .. import config
from ..errors import OrderGuardExceeded, UnsupportedDifferential, VaryVarNotArgument
from ..utils.expr import (
    MIXED,
    ZERO,
    Add,
    Const,
    DerivAtom,
    DiffAtom,
    Func,
    Mul,
    PartialAtom,
    Pow,
    Var,
    as_expr,
    free_vars,
    grade,
    normalize,
    rewrite,
    substitute,
    terms_of,
    walk,
)

logger = logging.getLogger(__name__)

PLACEHOLDER = "_u"


@dataclass(frozen=True)
class ElementaryFunction:
    """A unary function known to d; `derivative` is written in PLACEHOLDER."""
    name: str
    derivative: object
    arity: int = 1

    def derivative_at(self, argument):
        return substitute(self.derivative, {PLACEHOLDER: argument})


def _u():
    return Var(PLACEHOLDER)


def default_elementary():
    return {
        "sin": ElementaryFunction("sin", Func("cos", (_u(),))),
        "cos": ElementaryFunction("cos", -Func("sin", (_u(),))),
        "exp": ElementaryFunction("exp", Func("exp", (_u(),))),
        "ln": ElementaryFunction("ln", Pow(_u(), Fraction(-1))),
    }


@dataclass(frozen=True)
class DiffConfig:
    elementary: Mapping[str, ElementaryFunction] = field(default_factory=default_elementary)
    max_order: int = config.MAX_DIFFERENTIAL_ORDER
    max_derivative_order: int = config.MAX_DERIVATIVE_ORDER

    def is_elementary(self, name):
        return name in self.elementary


@lru_cache(maxsize=1)
def default_config():
    return DiffConfig()


def _is_opaque(e, cfg):
    return isinstance(e, Func) and not cfg.is_elementary(e.name)


class _Derivation:
    """d restricted to the variables in `vary` (every variable when None)."""

    def __init__(self, cfg, vary=None):
        self.cfg = cfg
        self.vary = vary

    def moves(self, name):
        return self.vary is None or name in self.vary

    @singledispatchmethod
    def apply(self, e):
        raise TypeError(f"not an expression: {e!r}")

    @apply.register
    def _(self, e: Const):
        return ZERO

    @apply.register
    def _(self, e: Var):
        return DiffAtom(e, 1) if self.moves(e.name) else ZERO

    @apply.register
    def _(self, e: DiffAtom):
        if not self.moves(e.target.name):
            return ZERO
        if e.order + 1 > self.cfg.max_order:
            raise OrderGuardExceeded(
                f"d^{e.order + 1} {e.target.name} exceeds the order guard {self.cfg.max_order}"
            )
        return DiffAtom(e.target, e.order + 1)

    @apply.register
    def _(self, e: Add):
        return Add(tuple(self.apply(t) for t in e.terms))

    @apply.register
    def _(self, e: Mul):
        factors = e.factors
        return Add(tuple(
            Mul(factors[:i] + (self.apply(f),) + factors[i + 1:])
            for i, f in enumerate(factors)
        ))

    @apply.register
    def _(self, e: Pow):
        return Mul((Const(e.exponent), Pow(e.base, e.exponent - 1), self.apply(e.base)))

    @apply.register
    def _(self, e: Func):
        if self.cfg.is_elementary(e.name):
            entry = self.cfg.elementary[e.name]
            (argument,) = e.args
            return Mul((entry.derivative_at(argument), self.apply(argument)))
        return self._opaque(e)

    @apply.register
    def _(self, e: PartialAtom):
        raise UnsupportedDifferential(
            "d of a partial differential is not defined; second-order partials are not supported"
        )

    @apply.register
    def _(self, e: DerivAtom):
        raise UnsupportedDifferential("expand D[...] before taking its differential")

    def _opaque(self, e):
        if not all(isinstance(a, Var) for a in e.args) or len(set(e.args)) != len(e.args):
            raise UnsupportedDifferential(
                f"{e.name} is opaque and must be applied to distinct variables to be differentiated"
            )
        moving = tuple(a for a in e.args if self.moves(a.name))
        if not moving:
            return ZERO
        if len(moving) == len(e.args):
            return Add(tuple(PartialAtom(e, (a,)) for a in e.args))
        return PartialAtom(e, moving)


def _check_order(n, cfg):
    if n < 1:
        raise ValueError(f"differential order must be at least 1, got {n}")
    if n > cfg.max_order:
        raise OrderGuardExceeded(f"order {n} exceeds the order guard {cfg.max_order}")


def differential(e, decls=None, cfg: Optional[DiffConfig] = None):
    cfg = cfg or default_config()
    e = normalize(resolve_function(e, decls))
    result = normalize(_Derivation(cfg).apply(e))
    logger.debug("d(%s) computed, %d terms", type(e).__name__, len(terms_of(result)))
    return result


def nth_differential(e, n, decls=None, cfg: Optional[DiffConfig] = None):
    cfg = cfg or default_config()
    _check_order(n, cfg)
    result = normalize(resolve_function(e, decls))
    for _ in range(n):
        result = differential(result, decls, cfg)
    return result


def principal_reduce(e):
    """Keep only the terms of least differential grade."""
    terms = terms_of(normalize(as_expr(e)))
    grades = [grade(t) for t in terms]
    numeric = [g for g in grades if g is not MIXED]
    if not numeric:
        return normalize(Add(terms))
    lowest = min(numeric)
    return normalize(Add(tuple(t for t, g in zip(terms, grades) if g is MIXED or g == lowest)))


# ---------------------------------------------------------------------------
# partial differentials

def _as_vars(vary):
    out = []
    for v in vary:
        v = as_expr(v)
        if not isinstance(v, Var):
            raise TypeError(f"partial differentials vary variables, got {v!r}")
        out.append(v)
    if not out:
        raise ValueError("a partial differential needs at least one varying variable")
    if len(set(out)) != len(out):
        raise ValueError("duplicate variable in a partial differential")
    return tuple(out)


def _is_polynomial(e):
    for node in walk(e):
        if isinstance(node, (Func, DiffAtom, PartialAtom, DerivAtom)):
            return False
        if isinstance(node, Pow) and (node.exponent.denominator != 1 or node.exponent < 0):
            return False
    return True


def resolve_function(f, decls):
    if isinstance(f, str):
        f = Var(f)
    if isinstance(f, Var) and decls is not None and decls.has_function(f.name):
        return decls.function_application(f.name)
    return as_expr(f)


def _arguments(f, cfg):
    names = set(free_vars(f))
    for node in walk(f):
        if _is_opaque(node, cfg):
            names.update(a.name for a in node.args if isinstance(a, Var))
    return names


def partial_differential(f, vary, decls=None, cfg: Optional[DiffConfig] = None):
    """Change of f when only the variables in `vary` move, at grade 1.

    An opaque function stays symbolic; a polynomial is shifted literally,
    f(x + dx, y) - f(x, y), and reduced to its principal part.
    """
    cfg = cfg or default_config()
    f = resolve_function(f, decls)
    vary = _as_vars(vary)
    if _is_opaque(f, cfg):
        for v in vary:
            if v not in f.args:
                raise VaryVarNotArgument("", 0, f"an argument of {f.name}", v.name)
        if set(vary) == set(f.args):
            return normalize(Add(tuple(PartialAtom(f, (a,)) for a in f.args)))
        return PartialAtom(f, vary)

    f = normalize(f)
    arguments = _arguments(f, cfg)
    for v in vary:
        if v.name not in arguments:
            raise VaryVarNotArgument("", 0, "a variable of the expression", v.name)
    if _is_polynomial(f):
        shifted = substitute(f, {v.name: v + DiffAtom(v, 1) for v in vary})
        result = principal_reduce(shifted - f)
        logger.debug("partial differential by literal shift over %s", [v.name for v in vary])
        return result
    return normalize(_Derivation(cfg, frozenset(v.name for v in vary)).apply(f))


def total_differential(f, decls=None, cfg: Optional[DiffConfig] = None):
    """Sum of the partial differentials over each argument."""
    cfg = cfg or default_config()
    f = resolve_function(f, decls)
    if _is_opaque(f, cfg):
        arguments = [a.name for a in f.args]
    else:
        f = normalize(f)
        arguments = sorted(_arguments(f, cfg))
    if not arguments:
        return ZERO
    return normalize(Add(tuple(partial_differential(f, (v,), decls, cfg) for v in arguments)))


# ---------------------------------------------------------------------------
# old notation

def old_notation(e, cfg: Optional[DiffConfig] = None):
    """Read every partial differential of f as the plain differential df.

    Opaque applications f(x, y) become the variable f, so pd[f,x] and pd[f,y]
    both turn into d[f]. This is the ambiguous notation that lets
    df/dt = pf/pt + pf/pt collapse to 1 = 2.
    """
    cfg = cfg or default_config()

    def read(node):
        if isinstance(node, PartialAtom):
            return DiffAtom(Var(node.target.name), 1)
        if _is_opaque(node, cfg):
            return Var(node.name)
        return None

    return normalize(rewrite(as_expr(e), read))


def differential_order(e) -> int:
    """Highest differential order held by any atom of e (0 when none)."""
    orders = [n.order for n in walk(as_expr(e)) if isinstance(n, DiffAtom)]
    orders += [1 for n in walk(as_expr(e)) if isinstance(n, PartialAtom)]
    return max(orders, default=0)

