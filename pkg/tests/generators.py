"""
Seeded random inputs shared by the property tests
"""
from fractions import Fraction

import numpy as np

from hyperdiff.services.hyperreal import LeviCivitaNumber
from hyperdiff.services.jets import JetAssignment
from hyperdiff.utils.expr import Add, Const, DiffAtom, Mul, Pow, Var

SEED = 1729
CASES = range(200)
VARIABLES = ("t", "x", "y")


def rng_for(case, salt=0):
    return np.random.default_rng([SEED, salt, case])


def random_rational(rng, span=4, nonzero=False):
    while True:
        value = Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4)))
        if value or not nonzero:
            return value


def random_series(rng, low=-2, high=4, trunc=8, exact=False):
    """A nonzero Levi-Civita number with one to three terms between eps^low and eps^high."""
    count = int(rng.integers(1, 4))
    exponents = rng.choice(np.arange(low, high + 1), size=count, replace=False)
    coefficients = {int(k): random_rational(rng, nonzero=True) for k in exponents}
    return LeviCivitaNumber.from_terms(coefficients, trunc, exact)


def finite_series(rng, trunc=8, exact=False):
    return random_series(rng, low=0, high=4, trunc=trunc, exact=exact)


def _atom(rng, differentials, names=VARIABLES):
    name = names[int(rng.integers(len(names)))]
    if differentials and rng.random() < 0.5:
        return DiffAtom(Var(name), int(rng.integers(1, 3)))
    return Var(name)


def random_monomial(rng, differentials=True, negative=False, names=VARIABLES):
    factors = [Const(random_rational(rng, nonzero=True))]
    for _ in range(int(rng.integers(0, 3))):
        exponent = int(rng.integers(1, 3))
        if negative and rng.random() < 0.25:
            exponent = -exponent
        atom = _atom(rng, differentials, names)
        factors.append(atom if exponent == 1 else Pow(atom, exponent))
    return Mul(tuple(factors))


def random_sum(rng, differentials=True, negative=False, names=VARIABLES):
    return Add(tuple(
        random_monomial(rng, differentials, negative, names) for _ in range(int(rng.integers(1, 4)))
    ))


def random_expr(rng, differentials=True, negative=False, names=VARIABLES):
    """A raw, unnormalized tree: a sum, or a product of two sums."""
    if rng.random() < 0.3:
        return Mul((random_sum(rng, differentials, negative, names), random_sum(rng, differentials, negative, names)))
    return random_sum(rng, differentials, negative, names)


def homogeneous(rng, grade):
    """A sum of monomials that all carry the given differential grade."""
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        factors = [Const(random_rational(rng, nonzero=True))]
        factors += [_atom(rng, False) for _ in range(int(rng.integers(0, 3)))]
        remaining = grade
        while remaining:
            order = int(rng.integers(1, min(remaining, 2) + 1))
            factors.append(DiffAtom(Var(VARIABLES[int(rng.integers(len(VARIABLES)))]), order))
            remaining -= order
        terms.append(Mul(tuple(factors)))
    return Add(tuple(terms))


def random_poly(rng, min_degree=1, max_degree=5):
    degree = int(rng.integers(min_degree, max_degree + 1))
    coefficients = [random_rational(rng) for _ in range(degree)]
    coefficients.append(random_rational(rng, nonzero=True))
    return tuple(coefficients)


def random_assignment(rng, names=VARIABLES, **fields):
    """Random q-polynomials for the names, sampled at a small integer q0."""
    polys = {name: random_poly(rng, 1, 3) for name in names}
    return JetAssignment(polys, Fraction(int(rng.integers(-2, 3))), **fields)


def agree(a, b):
    """Two series carry the same coefficients over their common window."""
    window = min(a.trunc_order, b.trunc_order)
    exponents = {k for k, _ in a.terms + b.terms if k <= window}
    return all(a.coefficient(k) == b.coefficient(k) for k in exponents)
