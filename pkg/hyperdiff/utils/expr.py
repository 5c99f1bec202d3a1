"""
Immutable expression trees with first-class differentials.

Besides the usual constants, variables, sums, products, rational powers and
function applications, a tree may hold

    DiffAtom(x, n)        d^n x
    PartialAtom(f, S)     the change of f when only the variables in S move
    DerivAtom(y, x, n)    D_x^n y, kept unexpanded

`normalize` brings a tree to its canonical form: sums and products flattened,
fully expanded into monomials over atoms, constants merged, factors and terms
sorted by `sort_key`.
"""
import enum
import graphlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import singledispatch
from typing import FrozenSet, Mapping, Optional, Tuple

from ..errors import (
    CyclicDependency,
    DivisionByZero,
    ExprError,
    IrrationalValue,
    NonIntegerGrade,
    VaryVarNotArgument,
)
from .rationals import exact_rational_power


class Expr:
    """Operators build raw trees; call `normalize` for the canonical form."""

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, -as_expr(other)))

    def __rsub__(self, other):
        return Add((as_expr(other), -self))

    def __neg__(self):
        return Mul((Const(-1), self))

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __truediv__(self, other):
        return Mul((self, Pow(as_expr(other), Fraction(-1))))

    def __rtruediv__(self, other):
        return Mul((as_expr(other), Pow(self, Fraction(-1))))

    def __pow__(self, exponent):
        return Pow(self, Fraction(exponent))


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    terms: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Mul(Expr):
    factors: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", Fraction(self.exponent))


@dataclass(frozen=True)
class Func(Expr):
    name: str
    args: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class DiffAtom(Expr):
    target: Var
    order: int = 1

    def __post_init__(self):
        if not isinstance(self.target, Var):
            raise TypeError("differential atoms only hold variables; expand d(expr) first")
        if self.order < 1:
            raise ValueError(f"differential order must be positive, got {self.order}")


@dataclass(frozen=True)
class PartialAtom(Expr):
    target: Func
    vary: Tuple[Var, ...]

    def __post_init__(self):
        vary = tuple(self.vary)
        object.__setattr__(self, "vary", vary)
        if not vary:
            raise ValueError("a partial differential needs at least one varying variable")
        if len(set(vary)) != len(vary):
            raise ValueError("duplicate variable in a partial differential")
        for v in vary:
            if v not in self.target.args:
                raise VaryVarNotArgument(
                    v.name, 0, f"an argument of {self.target.name}", v.name
                )


@dataclass(frozen=True)
class DerivAtom(Expr):
    target: Expr
    wrt: Var
    order: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"derivative order must be positive, got {self.order}")


ZERO = Const(0)
ONE = Const(1)

ATOMS = (Var, Func, DiffAtom, PartialAtom, DerivAtom)


def as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return Var(value)
    return Const(Fraction(value))


def d(target, order=1):
    """d^order of a variable, given as a Var or its name."""
    return DiffAtom(as_expr(target), order)


# ---------------------------------------------------------------------------
# ordering

def sort_key(e):
    if isinstance(e, Const):
        return (0, e.value)
    if isinstance(e, Var):
        return (1, e.name)
    if isinstance(e, Func):
        return (2, e.name, tuple(sort_key(a) for a in e.args))
    if isinstance(e, DerivAtom):
        return (3, sort_key(e.target), e.wrt.name, e.order)
    if isinstance(e, DiffAtom):
        return (4, e.target.name, e.order)
    if isinstance(e, PartialAtom):
        return (5, sort_key(e.target), tuple(v.name for v in e.vary))
    if isinstance(e, Pow):
        return (6, sort_key(e.base), e.exponent)
    if isinstance(e, Mul):
        return (7, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Add):
        return (8, tuple(sort_key(t) for t in e.terms))
    raise TypeError(f"not an expression: {e!r}")


def _term_key(monomial):
    # constant term last, higher powers of the same base first
    if not monomial:
        return (1,)
    return (0, tuple((sort_key(base), -exponent) for base, exponent in monomial))


# ---------------------------------------------------------------------------
# polynomial view: {monomial: coefficient}, monomial = ((base, exponent), ...)

def _monomial(powers):
    coefficient = Fraction(1)
    kept = {}
    for base, exponent in powers.items():
        if exponent == 0:
            continue
        if isinstance(base, Const) and exponent.denominator == 1:
            coefficient *= base.value ** int(exponent)
            continue
        kept[base] = exponent
    return coefficient, tuple(sorted(kept.items(), key=lambda item: sort_key(item[0])))


def _poly_add(p, q):
    out = dict(p)
    for m, c in q.items():
        total = out.get(m, 0) + c
        if total:
            out[m] = total
        else:
            out.pop(m, None)
    return out


def _poly_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            powers = dict(m1)
            for base, exponent in m2:
                powers[base] = powers.get(base, 0) + exponent
            coefficient, m = _monomial(powers)
            total = out.get(m, 0) + c1 * c2 * coefficient
            if total:
                out[m] = total
            else:
                out.pop(m, None)
    return out


def _poly_pow(p, n):
    result = {(): Fraction(1)}
    for _ in range(n):
        result = _poly_mul(result, p)
    return result


def _monomial_power(monomial, coefficient, r):
    try:
        lead = exact_rational_power(coefficient, r)
        powers = {}
    except IrrationalValue:
        lead = Fraction(1)
        powers = {Const(coefficient): r}
    for base, exponent in monomial:
        powers[base] = powers.get(base, 0) + exponent * r
    extra, m = _monomial(powers)
    return {m: lead * extra}


@singledispatch
def _to_poly(e):
    raise TypeError(f"not an expression: {e!r}")


@_to_poly.register
def _(e: Const):
    return {(): e.value} if e.value else {}


@_to_poly.register(Var)
@_to_poly.register(DiffAtom)
def _(e):
    return {((e, Fraction(1)),): Fraction(1)}


@_to_poly.register
def _(e: Func):
    atom = Func(e.name, tuple(normalize(a) for a in e.args))
    return {((atom, Fraction(1)),): Fraction(1)}


@_to_poly.register
def _(e: PartialAtom):
    atom = PartialAtom(Func(e.target.name, tuple(normalize(a) for a in e.target.args)), e.vary)
    return {((atom, Fraction(1)),): Fraction(1)}


@_to_poly.register
def _(e: DerivAtom):
    atom = DerivAtom(normalize(e.target), e.wrt, e.order)
    return {((atom, Fraction(1)),): Fraction(1)}


@_to_poly.register
def _(e: Add):
    out = {}
    for t in e.terms:
        out = _poly_add(out, _to_poly(t))
    return out


@_to_poly.register
def _(e: Mul):
    out = {(): Fraction(1)}
    for f in e.factors:
        out = _poly_mul(out, _to_poly(f))
        if not out:
            break
    return out


@_to_poly.register
def _(e: Pow):
    r = e.exponent
    if r == 0:
        return {(): Fraction(1)}
    base = _to_poly(e.base)
    if not base:
        if r < 0:
            raise DivisionByZero("zero raised to a negative power")
        return {}
    if len(base) == 1:
        (monomial, coefficient), = base.items()
        return _monomial_power(monomial, coefficient, r)
    if r.denominator == 1 and r > 0:
        return _poly_pow(base, int(r))
    # a sum under a negative or fractional power stays a base; pull out the
    # leading coefficient so equal sums up to scaling share one base
    leading = min(base, key=_term_key)
    content = base[leading]
    try:
        factor = exact_rational_power(content, r)
        base = {m: c / content for m, c in base.items()}
    except IrrationalValue:
        factor = Fraction(1)
    return {((_from_poly(base), r),): factor}


def _term_from_monomial(monomial, coefficient):
    factors = [base if exponent == 1 else Pow(base, exponent) for base, exponent in monomial]
    if not factors:
        return Const(coefficient)
    if coefficient == 1:
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))
    return Mul((Const(coefficient),) + tuple(factors))


def _from_poly(poly):
    terms = [_term_from_monomial(m, poly[m]) for m in sorted(poly, key=_term_key)]
    if not terms:
        return ZERO
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def normalize(e):
    """Canonical form; idempotent, preserves value."""
    poly = _to_poly(as_expr(e))
    for monomial in poly:
        total = Fraction(0)
        for base, exponent in monomial:
            g = grade(base)
            if g is MIXED:
                continue
            total += g * exponent
        if total.denominator != 1:
            raise NonIntegerGrade(
                f"monomial of differential grade {total} is not of integer order"
            )
    return _from_poly(poly)


def terms_of(e):
    """Terms of a normalized expression (empty for zero)."""
    if isinstance(e, Add):
        return e.terms
    if e == ZERO:
        return ()
    return (e,)


def factors_of(term):
    """(coefficient, [(base, exponent), ...]) of a normalized term."""
    items = term.factors if isinstance(term, Mul) else (term,)
    coefficient = Fraction(1)
    powers = []
    for f in items:
        if isinstance(f, Const):
            coefficient *= f.value
        elif isinstance(f, Pow):
            powers.append((f.base, f.exponent))
        else:
            powers.append((f, Fraction(1)))
    return coefficient, powers


def is_zero(e):
    return normalize(e) == ZERO


# ---------------------------------------------------------------------------
# grading

class MixedGrade(enum.Enum):
    MIXED = "mixed"

    def __str__(self):
        return self.value


MIXED = MixedGrade.MIXED


@singledispatch
def grade(e):
    raise TypeError(f"not an expression: {e!r}")


@grade.register(Const)
@grade.register(Var)
@grade.register(DerivAtom)
def _(e):
    return 0


@grade.register
def _(e: DiffAtom):
    return e.order


@grade.register
def _(e: PartialAtom):
    return 1


@grade.register
def _(e: Func):
    return 0 if all(grade(a) == 0 for a in e.args) else MIXED


@grade.register
def _(e: Mul):
    total = 0
    for f in e.factors:
        g = grade(f)
        if g is MIXED:
            return MIXED
        total += g
    return total


@grade.register
def _(e: Pow):
    g = grade(e.base)
    if g is MIXED:
        return MIXED
    value = g * e.exponent
    if Fraction(value).denominator != 1:
        raise NonIntegerGrade(f"grade {g} raised to {e.exponent} is fractional")
    return int(value)


@grade.register
def _(e: Add):
    grades = {grade(t) for t in e.terms}
    if len(grades) == 1:
        return grades.pop()
    return MIXED


# ---------------------------------------------------------------------------
# substitution and free variables

def _renamed(v, bindings):
    target = bindings.get(v.name)
    return target if isinstance(target, Var) else None


@singledispatch
def _substitute(e, bindings):
    raise TypeError(f"not an expression: {e!r}")


@_substitute.register
def _(e: Const, bindings):
    return e


@_substitute.register
def _(e: Var, bindings):
    return bindings.get(e.name, e)


@_substitute.register
def _(e: DiffAtom, bindings):
    # only renamings reach inside d^n x; expanding d of a compound binding is
    # the differential engine's job
    renamed = _renamed(e.target, bindings)
    return DiffAtom(renamed, e.order) if renamed is not None else e


@_substitute.register
def _(e: PartialAtom, bindings):
    renames = {a.name: _renamed(a, bindings) for a in e.target.args if a.name in bindings}
    if any(r is None for r in renames.values()):
        return e
    rename = lambda v: renames.get(v.name) or v
    target = Func(e.target.name, tuple(rename(a) for a in e.target.args))
    return PartialAtom(target, tuple(rename(v) for v in e.vary))


@_substitute.register
def _(e: DerivAtom, bindings):
    wrt = _renamed(e.wrt, bindings) or e.wrt
    return DerivAtom(_substitute(e.target, bindings), wrt, e.order)


@_substitute.register
def _(e: Func, bindings):
    return Func(e.name, tuple(_substitute(a, bindings) for a in e.args))


@_substitute.register
def _(e: Add, bindings):
    return Add(tuple(_substitute(t, bindings) for t in e.terms))


@_substitute.register
def _(e: Mul, bindings):
    return Mul(tuple(_substitute(f, bindings) for f in e.factors))


@_substitute.register
def _(e: Pow, bindings):
    return Pow(_substitute(e.base, bindings), e.exponent)


def substitute(e, bindings):
    """Replace variables by expressions; keys are Vars or names."""
    named = {(k.name if isinstance(k, Var) else k): as_expr(v) for k, v in dict(bindings).items()}
    if not named:
        return normalize(e)
    return normalize(_substitute(e, named))


@singledispatch
def free_vars(e):
    raise TypeError(f"not an expression: {e!r}")


@free_vars.register
def _(e: Const):
    return frozenset()


@free_vars.register
def _(e: Var):
    return frozenset((e.name,))


@free_vars.register
def _(e: DiffAtom):
    return frozenset((e.target.name,))


@free_vars.register
def _(e: PartialAtom):
    return free_vars(e.target)


@free_vars.register
def _(e: DerivAtom):
    return free_vars(e.target) | {e.wrt.name}


@free_vars.register
def _(e: Func):
    return frozenset().union(*(free_vars(a) for a in e.args))


@free_vars.register
def _(e: Add):
    return frozenset().union(*(free_vars(t) for t in e.terms))


@free_vars.register
def _(e: Mul):
    return frozenset().union(*(free_vars(f) for f in e.factors))


@free_vars.register
def _(e: Pow):
    return free_vars(e.base)


def walk(e):
    """Pre-order traversal of every node."""
    yield e
    if isinstance(e, Add):
        children = e.terms
    elif isinstance(e, Mul):
        children = e.factors
    elif isinstance(e, Pow):
        children = (e.base,)
    elif isinstance(e, Func):
        children = e.args
    elif isinstance(e, PartialAtom):
        children = (e.target,)
    elif isinstance(e, DerivAtom):
        children = (e.target,)
    else:
        children = ()
    for child in children:
        yield from walk(child)


def rewrite(e, fn):
    """Top-down rewrite: fn returns a replacement or None to descend.

    Differential and partial atoms are leaves; a DerivAtom's target is visited.
    """
    replaced = fn(e)
    if replaced is not None:
        return replaced
    if isinstance(e, Add):
        return Add(tuple(rewrite(t, fn) for t in e.terms))
    if isinstance(e, Mul):
        return Mul(tuple(rewrite(f, fn) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(rewrite(e.base, fn), e.exponent)
    if isinstance(e, Func):
        return Func(e.name, tuple(rewrite(a, fn) for a in e.args))
    if isinstance(e, DerivAtom):
        return DerivAtom(rewrite(e.target, fn), e.wrt, e.order)
    return e


# ---------------------------------------------------------------------------
# dependency declarations

@dataclass(frozen=True)
class DependencyDecls:
    """Which variables depend on which, and the argument lists of functions.

    `base` names the ultimate parameter; it never appears in user expressions.
    """
    base: Optional[str] = None
    variables: Tuple[str, ...] = ()
    depends: Mapping[str, FrozenSet[str]] = field(default_factory=dict)
    functions: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    def validate(self):
        try:
            tuple(graphlib.TopologicalSorter(self.depends).static_order())
        except graphlib.CycleError as e:
            cycle = " -> ".join(e.args[1])
            raise CyclicDependency("", 0, "an acyclic dependency graph", cycle) from None
        if self.base is not None:
            for v in self.all_variables():
                if v != self.base and not self.depends_on(v, self.base):
                    raise ExprError(f"variable {v} does not depend on base {self.base}")
        return self

    def all_variables(self):
        names = set(self.variables)
        for v, deps in self.depends.items():
            names.add(v)
            names.update(deps)
        for args in self.functions.values():
            names.update(args)
        if self.base is not None:
            names.add(self.base)
        return names

    def dependencies(self, v):
        return frozenset(self.depends.get(v, ()))

    def depends_on(self, v, w):
        seen = set()
        stack = list(self.dependencies(v))
        while stack:
            u = stack.pop()
            if u == w:
                return True
            if u not in seen:
                seen.add(u)
                stack.extend(self.dependencies(u))
        return False

    def dependency_order(self):
        """Every variable after the variables it depends on."""
        graph = {v: set(self.dependencies(v)) for v in sorted(self.all_variables())}
        return tuple(graphlib.TopologicalSorter(graph).static_order())

    def roots(self):
        """Variables that only depend on the base (or on nothing)."""
        return tuple(
            v for v in self.dependency_order()
            if v != self.base and not (self.dependencies(v) - {self.base})
        )

    def has_function(self, name):
        return name in self.functions

    def arguments(self, name):
        return tuple(self.functions[name])

    def function_application(self, name):
        return Func(name, tuple(Var(a) for a in self.arguments(name)))
