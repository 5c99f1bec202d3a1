from fractions import Fraction

import pytest

from hyperdiff.errors import EvaluationError
from hyperdiff.services.jets import (
    JetAssignment,
    JetSampler,
    analytic_derivative,
    compose,
    format_poly,
    local_reparameterization,
    poly_derivative_at,
    reparameterize,
)
from hyperdiff.utils.expr import Add, Const, Mul, Pow, Var, normalize
from hyperdiff.utils.parser import parse_decls, parse_jets
from tests.generators import random_poly, random_rational, rng_for

CHAIN_JETS = "poly t 0 1\ndefine x t^2\ndefine y x^3\nat 1\n"


def poly_in(name, coefficients):
    return normalize(Add(tuple(Mul((Const(c), Pow(Var(name), k))) for k, c in enumerate(coefficients))))


class TestAssignments:
    def test_format_poly(self):
        assert format_poly((0, 0, 1)) == "q^2"
        assert format_poly((1, -2, 3)) == "3*q^2 - 2*q + 1"
        assert format_poly((0, -1)) == "-q"
        assert format_poly(()) == "0"

    def test_describe(self):
        assert JetAssignment({"x": (0, 0, 1)}, 1).describe() == "x = q^2; q0 = 1"

    def test_truncation_floor(self):
        with pytest.raises(EvaluationError):
            JetAssignment({"x": (0, 1)}, 0, trunc=2)

    def test_with_trunc(self):
        assert JetAssignment({"x": (0, 1)}).with_trunc(12).trunc == 12


class TestPolynomials:
    def test_derivative_at_a_point(self):
        assert poly_derivative_at((0, 0, 0, 1), 2, 2) == 12
        assert poly_derivative_at((5,), 1, 3) == 0

    def test_compose(self):
        assert compose((0, 0, 1), (1, 1)) == (1, 2, 1)

    def test_local_reparameterization_fixes_the_point(self):
        poly = local_reparameterization(1, 2)
        assert poly == (-1, 2, 0)
        assert sum(poly) == 1


class TestAnalyticOracle:
    def test_inverse_instance(self):
        decls, assignment = parse_jets("poly x 0 1\ndefine y x^3\nat 2\n")
        assert analytic_derivative("y", "x", 2, assignment, decls) == 12

    def test_chain_instance(self):
        decls, assignment = parse_jets(CHAIN_JETS)
        assert analytic_derivative("y", "t", 2, assignment, decls) == 30
        assert analytic_derivative("y", "x", 2, assignment, decls) == 6
        assert analytic_derivative("x", "t", 1, assignment, decls) == 2

    def test_function_bodies_resolve_through_their_arguments(self):
        decls, assignment = parse_jets(
            "function f x y\npoly t 0 1\ndefine x t^2\ndefine y t^3\nbody f x^2 + y^2\nat 1\n"
        )
        assert analytic_derivative("f", "t", 1, assignment, decls) == 10

    @pytest.mark.parametrize("case", range(40))
    def test_derivatives_survive_reparameterization(self, case):
        rng = rng_for(case, 40)
        x_poly = (Fraction(0), random_rational(rng, nonzero=True)) + random_poly(rng, 0, 2)
        y_poly = random_poly(rng)
        decls = parse_decls("base q\ndepends x q\ndepends y x\n")
        assignment = JetAssignment({"x": x_poly}, 0, definitions={"y": poly_in("x", y_poly)})
        moved = reparameterize(
            assignment, local_reparameterization(0, random_rational(rng, nonzero=True), random_rational(rng))
        )
        for n in (1, 2):
            assert analytic_derivative("y", "x", n, moved, decls) == analytic_derivative("y", "x", n, assignment, decls)
            assert analytic_derivative("y", "x", n, assignment, decls) == poly_derivative_at(y_poly, n, 0)


class TestSampler:
    def test_same_seed_same_assignment(self):
        decls = parse_decls("base q\ndepends t q\ndepends x t\ndepends y x\nfunction f x y\n")
        assert JetSampler(seed=7).assignment(decls) == JetSampler(seed=7).assignment(decls)

    def test_roots_get_polynomials_and_the_rest_definitions(self):
        decls = parse_decls("base q\ndepends t q\ndepends x t\nfunction f x t\n")
        assignment = JetSampler(seed=3).assignment(decls)
        assert set(assignment.polys) == {"t"}
        assert set(assignment.definitions) == {"x"}
        assert set(assignment.bodies) == {"f"}

    @pytest.mark.parametrize("seed", range(20))
    def test_polynomials_have_a_nonzero_leading_coefficient(self, seed):
        sampler = JetSampler(seed=seed, max_degree=3)
        coefficients = sampler.polynomial()
        assert coefficients[-1] != 0
        assert 2 <= len(coefficients) <= 4
