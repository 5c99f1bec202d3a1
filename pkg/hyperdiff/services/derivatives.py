"""
Arbogast derivatives D_x^n y expanded into ratios of differentials, and the
identities built from them.

    D_x^1 y = dy / dx
    D_x^n y = d(D_x^(n-1) y) / dx
"""
import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from ..errors import ExprError, OrderGuardExceeded
from ..utils.expr import (
    MIXED,
    ZERO,
    Add,
    DependencyDecls,
    DerivAtom,
    DiffAtom,
    Func,
    Mul,
    PartialAtom,
    Pow,
    Var,
    as_expr,
    factors_of,
    grade,
    normalize,
    rewrite,
    terms_of,
    walk,
)
from .differential import (
    DiffConfig,
    default_config,
    differential,
    old_notation,
    partial_differential,
    resolve_function,
)
from .jets import JetAssignment

logger = logging.getLogger(__name__)

COLLAPSE_MAX_ORDER = 3


def _wrt(x):
    x = as_expr(x)
    if not isinstance(x, Var):
        raise TypeError(f"derivatives are taken with respect to a variable, got {x!r}")
    return x


def expand_derivative(y, x, n=1, decls=None, cfg: Optional[DiffConfig] = None):
    cfg = cfg or default_config()
    if n < 1:
        raise ValueError(f"derivative order must be at least 1, got {n}")
    if n > cfg.max_derivative_order:
        raise OrderGuardExceeded(
            f"derivative order {n} exceeds the order guard {cfg.max_derivative_order}"
        )
    x = _wrt(x)
    per_dx = Pow(DiffAtom(x, 1), Fraction(-1))
    current = expand_derivatives(resolve_function(y, decls), decls, cfg)
    for level in range(1, n + 1):
        current = normalize(Mul((differential(current, decls, cfg), per_dx)))
        logger.debug("D_%s^%d expanded to %d terms", x.name, level, len(terms_of(current)))
    return current


def expand_derivatives(e, decls=None, cfg: Optional[DiffConfig] = None):
    """Replace every DerivAtom in e by its expansion, innermost first."""

    def expand(node):
        if isinstance(node, DerivAtom):
            return expand_derivative(node.target, node.wrt, node.order, decls, cfg)
        return None

    return normalize(rewrite(as_expr(e), expand))


def _denominator_wrts(e):
    names = []
    for term in terms_of(e):
        _, powers = factors_of(term)
        for base, exponent in powers:
            if exponent < 0 and isinstance(base, DiffAtom) and base.order == 1:
                if base.target not in names:
                    names.append(base.target)
    return names


def _collapse_targets(e, wrt):
    targets = []
    for node in walk(e):
        if isinstance(node, DiffAtom) and node.target != wrt:
            candidate = node.target
        elif isinstance(node, PartialAtom):
            candidate = node.target
        else:
            continue
        if candidate not in targets:
            targets.append(candidate)
    return targets


def collapse_derivative(e, wrt=None, decls=None, cfg: Optional[DiffConfig] = None):
    """Recognize c * (expanded D_x^n y) for n <= 3 and return c * D[y;x;n].

    Only whole-expression matches are recognized; anything else comes back
    unchanged.
    """
    e = normalize(as_expr(e))
    if e == ZERO:
        return e
    wrts = [_wrt(wrt)] if wrt is not None else _denominator_wrts(e)
    leading, _ = factors_of(terms_of(e)[0])
    for x in wrts:
        for y in _collapse_targets(e, x):
            for n in range(1, COLLAPSE_MAX_ORDER + 1):
                form = expand_derivative(y, x, n, decls, cfg)
                if form == ZERO or len(terms_of(form)) != len(terms_of(e)):
                    continue
                ratio = leading / factors_of(terms_of(form)[0])[0]
                if normalize(Mul((as_expr(ratio), form))) == e:
                    return normalize(Mul((as_expr(ratio), DerivAtom(y, x, n))))
    return e


# ---------------------------------------------------------------------------
# identities

class CheckMode(str, enum.Enum):
    EXACT = "exact"
    LEADING = "leading"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ReferenceInstance:
    """A concrete jet with the standard parts both sides should take there."""
    assignment: JetAssignment
    description: str = ""
    expected_lhs: Optional[Fraction] = None
    expected_rhs: Optional[Fraction] = None


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: object
    rhs: object
    decls: DependencyDecls = field(default_factory=DependencyDecls)
    mode: CheckMode = CheckMode.EXACT
    expect_pass: bool = True
    description: str = ""
    instance: Optional[ReferenceInstance] = None

    def __post_init__(self):
        object.__setattr__(self, "lhs", normalize(self.lhs))
        object.__setattr__(self, "rhs", normalize(self.rhs))
        left, right = grade(self.lhs), grade(self.rhs)
        if left is MIXED or right is MIXED or left != right:
            raise ExprError(f"identity {self.name}: sides have grades {left} and {right}")

    @property
    def grade(self):
        return grade(self.lhs)

    def denominator_variables(self) -> Tuple[str, ...]:
        """Variables whose differential appears in a denominator on either side."""
        names = []
        for side in (self.lhs, self.rhs):
            for term in terms_of(side):
                _, powers = factors_of(term)
                for base, exponent in powers:
                    if exponent < 0 and isinstance(base, DiffAtom) and base.target.name not in names:
                        names.append(base.target.name)
        return tuple(names)


def inverse_first(y, x, decls=None, cfg=None, name="inverse1"):
    """dx/dy = 1 / (dy/dx)."""
    lhs = expand_derivative(x, y, 1, decls, cfg)
    rhs = Pow(expand_derivative(y, x, 1, decls, cfg), Fraction(-1))
    return Identity(name, lhs, rhs, decls or DependencyDecls(),
                    description="first derivative of the inverse function")


def inverse_second(y, x, decls=None, cfg=None, name="inverse2"):
    """-D_x^2 y * (1 / D_x^1 y)^3 = D_y^2 x."""
    second = expand_derivative(y, x, 2, decls, cfg)
    first = expand_derivative(y, x, 1, decls, cfg)
    lhs = Mul((as_expr(-1), second, Pow(first, Fraction(-3))))
    rhs = expand_derivative(x, y, 2, decls, cfg)
    return Identity(name, lhs, rhs, decls or DependencyDecls(),
                    description="second derivative of the inverse function")


def chain_second(y, x, t, decls=None, cfg=None, name="chain2"):
    """(D_x^2 y)(D_t^1 x)^2 + (D_x^1 y)(D_t^2 x) = D_t^2 y."""
    lhs = Add((
        Mul((expand_derivative(y, x, 2, decls, cfg), Pow(expand_derivative(x, t, 1, decls, cfg), 2))),
        Mul((expand_derivative(y, x, 1, decls, cfg), expand_derivative(x, t, 2, decls, cfg))),
    ))
    rhs = expand_derivative(y, t, 2, decls, cfg)
    return Identity(name, lhs, rhs, decls or DependencyDecls(),
                    description="chain rule for the second derivative")


def naive_chain_second(y, x, t, decls=None, cfg=None, name="naive_chain2_counterexample"):
    """(D_x^2 y)(D_t^1 x)^2 = D_t^2 y, which drops the D_x^1 y * D_t^2 x term."""
    lhs = Mul((expand_derivative(y, x, 2, decls, cfg), Pow(expand_derivative(x, t, 1, decls, cfg), 2)))
    rhs = expand_derivative(y, t, 2, decls, cfg)
    return Identity(name, lhs, rhs, decls or DependencyDecls(), expect_pass=False,
                    description="second derivative chained as if d^2y/dx^2 were a ratio")


def _function_and_variables(f, variables, decls):
    f = resolve_function(f, decls)
    if variables is None:
        if not isinstance(f, Func):
            raise TypeError("pass the variables explicitly for a concrete expression")
        variables = f.args
    return f, tuple(_wrt(v) for v in variables)


def _chain_terms(f, variables, t, decls, cfg):
    t = _wrt(t)
    terms = []
    for v in variables:
        # multiply pd(f, v)/dt by dv/dv
        ratio = Mul((partial_differential(f, (v,), decls, cfg), Pow(DiffAtom(v, 1), Fraction(-1))))
        terms.append(Mul((ratio, expand_derivative(v, t, 1, decls, cfg))))
    return Add(tuple(terms))


def chain_multivariate(f, variables=None, t="t", decls=None, cfg=None, name="chain_multi"):
    """sum over v of pd(f, v)/dv * dv/dt = D_t^1 f."""
    f, variables = _function_and_variables(f, variables, decls)
    lhs = _chain_terms(f, variables, t, decls, cfg)
    rhs = expand_derivative(f, t, 1, decls, cfg)
    return Identity(name, lhs, rhs, decls or DependencyDecls(), mode=CheckMode.LEADING,
                    description="multivariate chain rule with partial differentials")


def contradiction_one_equals_two(f, variables=None, t="t", decls=None, cfg=None,
                                 name="contradiction_1eq2"):
    """The multivariate chain rule read in the old notation.

    With every pd(f, v) read as df, df/dt = pf/pt + pf/pt; dividing through
    by df/dt gives 1 = 2.
    """
    f, variables = _function_and_variables(f, variables, decls)
    if not isinstance(f, Func):
        raise TypeError("the old notation is about an abstract function f")
    t = _wrt(t)
    chain = old_notation(_chain_terms(f, variables, t, decls, cfg), cfg)
    total = Mul((DiffAtom(Var(f.name), 1), Pow(DiffAtom(t, 1), Fraction(-1))))
    lhs = Mul((total, Pow(total, Fraction(-1))))
    rhs = Mul((chain, Pow(total, Fraction(-1))))
    return Identity(name, lhs, rhs, decls or DependencyDecls(), expect_pass=False,
                    description="old partial-derivative notation equating df/dt with pf/pt")


def second_derivative_of_self(x, decls=None, cfg=None, name="dxdx_zero"):
    """D_x^2 x = 0."""
    lhs = expand_derivative(x, x, 2, decls, cfg)
    return Identity(name, lhs, ZERO, decls or DependencyDecls(),
                    description="second derivative of a variable with respect to itself")
