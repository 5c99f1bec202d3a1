from fractions import Fraction

import pytest

from hyperdiff.errors import (
    CyclicDependency,
    DivisionByZero,
    ExprError,
    NonIntegerGrade,
    VaryVarNotArgument,
)
from hyperdiff.services.verifier import eval_jet
from hyperdiff.utils.expr import (
    MIXED,
    ZERO,
    Add,
    Const,
    DependencyDecls,
    DerivAtom,
    DiffAtom,
    Func,
    Mul,
    PartialAtom,
    Pow,
    Var,
    d,
    free_vars,
    grade,
    is_zero,
    normalize,
    substitute,
    terms_of,
)
from tests.generators import CASES, agree, random_assignment, random_expr, rng_for

x, y, z, t = Var("x"), Var("y"), Var("z"), Var("t")


class TestNormalize:
    def test_like_terms_merge(self):
        assert normalize(x + x) == Mul((Const(2), x))
        assert normalize(x - x) == ZERO
        assert normalize(x * x) == Pow(x, 2)

    def test_products_expand(self):
        expanded = normalize((x + 1) * (x - 1))
        assert expanded == Add((Pow(x, 2), Const(-1)))

    def test_differentials_cancel(self):
        assert normalize(d(x) / d(x)) == Const(1)
        assert normalize(d(x) * d(x) ** -2) == Pow(d(x), -1)

    def test_constant_term_comes_last(self):
        assert terms_of(normalize(3 + x))[-1] == Const(3)

    def test_sum_under_negative_power_stays_a_base(self):
        e = normalize((2 * x + 2) ** -1)
        assert e == Mul((Const(Fraction(1, 2)), Pow(Add((x, Const(1))), -1)))

    def test_zero_to_a_negative_power(self):
        with pytest.raises(DivisionByZero):
            normalize((x - x) ** -1)

    def test_rational_constants_simplify(self):
        assert normalize(Pow(Const(4), Fraction(1, 2))) == Const(2)
        assert normalize(Pow(Const(2), Fraction(1, 2))) == Pow(Const(2), Fraction(1, 2))

    def test_is_zero(self):
        assert is_zero(d(x) * y - y * d(x))
        assert not is_zero(d(x))

    @pytest.mark.parametrize("case", CASES)
    def test_idempotent(self, case):
        e = normalize(random_expr(rng_for(case, 10), negative=True))
        assert normalize(e) == e

    @pytest.mark.parametrize("case", CASES)
    def test_order_independent(self, case):
        rng = rng_for(case, 11)
        u, v = random_expr(rng, negative=True), random_expr(rng, negative=True)
        assert normalize(u + v) == normalize(v + u)
        assert normalize(u * v) == normalize(v * u)

    @pytest.mark.parametrize("case", CASES)
    def test_jet_value_is_preserved(self, case):
        rng = rng_for(case, 12)
        e = random_expr(rng)
        assignment = random_assignment(rng)
        assert agree(eval_jet(e, assignment), eval_jet(normalize(e), assignment))


class TestGrade:
    def test_grades(self):
        assert grade(x) == 0
        assert grade(normalize(d(x) ** 2)) == 2
        assert grade(normalize(x * d(x))) == 1
        assert grade(d(x, 3)) == 3
        assert grade(normalize(d(y, 2) / d(x) ** 2)) == 0
        assert grade(PartialAtom(Func("f", (x, y)), (x,))) == 1

    def test_mixed(self):
        assert grade(normalize(d(x) + d(x, 2))) is MIXED
        assert grade(Func("sin", (d(x),))) is MIXED

    def test_non_integer_grade(self):
        with pytest.raises(NonIntegerGrade):
            grade(Pow(d(x), Fraction(1, 2)))
        with pytest.raises(NonIntegerGrade):
            normalize(Pow(d(x), Fraction(1, 2)))


class TestAtoms:
    def test_differential_atoms_hold_variables(self):
        with pytest.raises(TypeError):
            DiffAtom(x + y)
        with pytest.raises(ValueError):
            DiffAtom(x, 0)

    def test_partial_atoms_vary_arguments(self):
        with pytest.raises(VaryVarNotArgument):
            PartialAtom(Func("f", (x, y)), (z,))
        with pytest.raises(ValueError):
            PartialAtom(Func("f", (x, y)), (x, x))

    def test_free_vars(self):
        e = x * d(y) + Func("f", (z,)) + DerivAtom(y, t, 2)
        assert free_vars(e) == {"x", "y", "z", "t"}


class TestSubstitute:
    def test_substitute_expands(self):
        assert substitute(x ** 2, {"x": y + 1}) == normalize(y ** 2 + 2 * y + 1)

    def test_differentials_follow_renames(self):
        assert substitute(d(x, 2) * x, {x: y}) == normalize(d(y, 2) * y)

    def test_empty_bindings_normalize(self):
        assert substitute(x + x, {}) == normalize(2 * x)


class TestDependencyDecls:
    def test_dependency_order(self):
        decls = DependencyDecls(base="q", depends={"t": frozenset({"q"}), "x": frozenset({"t"})})
        order = decls.dependency_order()
        assert order.index("q") < order.index("t") < order.index("x")
        assert decls.depends_on("x", "q")
        assert decls.roots() == ("t",)

    def test_cycle(self):
        decls = DependencyDecls(depends={"x": frozenset({"y"}), "y": frozenset({"x"})})
        with pytest.raises(CyclicDependency):
            decls.validate()

    def test_every_variable_reaches_the_base(self):
        decls = DependencyDecls(base="q", depends={"x": frozenset({"y"})})
        with pytest.raises(ExprError):
            decls.validate()

    def test_function_application(self):
        decls = DependencyDecls(functions={"f": ("x", "y")})
        assert decls.function_application("f") == Func("f", (x, y))
        assert decls.has_function("f") and not decls.has_function("g")
