from fractions import Fraction

import pytest

from hyperdiff.errors import ExprError, OrderGuardExceeded
from hyperdiff.services.catalog import default_catalog
from hyperdiff.services.derivatives import (
    CheckMode,
    Identity,
    collapse_derivative,
    expand_derivative,
    expand_derivatives,
)
from hyperdiff.services.differential import differential
from hyperdiff.utils.expr import ONE, ZERO, Const, DerivAtom, Var, d, normalize
from hyperdiff.utils.parser import parse_expr
from hyperdiff.utils.render import render_text
from tests.generators import CASES, random_expr, rng_for

x, y, t = Var("x"), Var("y"), Var("t")


class TestExpansion:
    def test_first_derivative_is_a_ratio(self):
        assert expand_derivative("y", "x") == normalize(d(y) / d(x))

    def test_second_derivative(self):
        second = expand_derivative("y", "x", 2)
        assert second == normalize(d(y, 2) / d(x) ** 2 - d(y) * d(x, 2) / d(x) ** 3)
        assert render_text(second) == "d[y,2]/d[x]^2 - d[x,2]*d[y]/d[x]^3"

    def test_third_derivative_coefficients(self):
        expected = normalize(
            d(y, 3) / d(x) ** 3
            - 3 * d(y, 2) * d(x, 2) / d(x) ** 4
            - d(y) * d(x, 3) / d(x) ** 4
            + 3 * d(y) * d(x, 2) ** 2 / d(x) ** 5
        )
        assert expand_derivative("y", "x", 3) == expected

    def test_concrete_expression(self):
        assert render_text(expand_derivative(t ** 6, "t", 2)) == "30*t^4"

    def test_derivative_of_a_variable_by_itself(self):
        assert expand_derivative("x", "x") == ONE
        assert expand_derivative("x", "x", 2) == ZERO

    def test_order_guard(self):
        with pytest.raises(OrderGuardExceeded):
            expand_derivative("y", "x", 5)
        with pytest.raises(ValueError):
            expand_derivative("y", "x", 0)

    def test_nested_atoms_expand(self):
        nested = DerivAtom(DerivAtom(y, x, 1), x, 1)
        assert expand_derivatives(nested) == expand_derivative("y", "x", 2)

    @pytest.mark.parametrize("case", CASES)
    def test_each_order_differentiates_the_previous_one(self, case):
        rng = rng_for(case, 36)
        target = normalize(random_expr(rng, differentials=False, names=("x", "y")))
        n = 2 + case % 3
        previous = expand_derivative(target, "x", n - 1)
        assert expand_derivative(target, "x", n) == normalize(differential(previous) / d(x))


class TestCollapse:
    def test_expanded_form_collapses(self):
        assert collapse_derivative(expand_derivative("y", "x", 2)) == DerivAtom(y, x, 2)
        assert render_text(collapse_derivative(parse_expr("d[y,2]/d[x]^2 - d[x,2]*d[y]/d[x]^3"))) == "D[y;x;2]"

    def test_scaled_form_collapses(self):
        scaled = normalize(3 * expand_derivative("y", "x", 3))
        assert collapse_derivative(scaled, "x") == normalize(3 * DerivAtom(y, x, 3))

    def test_other_expressions_are_unchanged(self):
        e = normalize(x * d(y))
        assert collapse_derivative(e) == e
        assert collapse_derivative(ZERO) == ZERO


class TestIdentities:
    def test_sides_must_share_a_grade(self):
        with pytest.raises(ExprError):
            Identity("bad", d(x), ONE)

    def test_denominator_variables(self):
        identity = Identity("ratio", d(y) / d(x), d(y) / d(x))
        assert identity.denominator_variables() == ("x",)
        assert identity.grade == 0

    @pytest.mark.parametrize("name", ["inverse1", "inverse2", "chain2", "chain_multi", "dxdx_zero"])
    def test_true_identities_hold_symbolically(self, name):
        identity = default_catalog().get(name)
        assert normalize(identity.lhs - identity.rhs) == ZERO

    def test_naive_chain_rule_drops_a_term(self):
        identity = default_catalog().get("naive_chain2_counterexample")
        assert normalize(identity.lhs - identity.rhs) != ZERO
        assert not identity.expect_pass

    def test_old_notation_gives_one_equals_two(self):
        identity = default_catalog().get("contradiction_1eq2")
        assert identity.lhs == Const(1)
        assert identity.rhs == Const(2)

    def test_multivariate_chain_uses_leading_order(self):
        assert default_catalog().get("chain_multi").mode is CheckMode.LEADING

    def test_instance_expectations_come_from_the_analytic_oracle(self):
        catalog = default_catalog()
        inverse = catalog.get("inverse2").instance
        assert (inverse.expected_lhs, inverse.expected_rhs) == (Fraction(-1, 144), Fraction(-1, 144))
        assert catalog.get("chain_multi").instance.expected_rhs == 10
        naive = catalog.get("naive_chain2_counterexample").instance
        assert (naive.expected_lhs, naive.expected_rhs) == (24, 30)
        assert catalog.get("dxdx_zero").instance.expected_lhs == 0
