import json
from fractions import Fraction

import pytest

from hyperdiff.errors import InsufficientTruncation, UnboundFunction, UnboundVariable, UnknownIdentity
from hyperdiff.services import hyperreal as hr
from hyperdiff.services.catalog import default_catalog
from hyperdiff.services.derivatives import Identity, expand_derivative
from hyperdiff.services.jets import JetAssignment, local_reparameterization, poly_derivative_at
from hyperdiff.services.verifier import (
    EXPECTED_FAIL,
    FAIL,
    PASS,
    all_met,
    eval_jet,
    run_paper_suite,
    standard_parts,
    verify_identity,
)
from hyperdiff.utils.expr import ZERO, Add, Const, Func, Mul, PartialAtom, Pow, Var, d, normalize
from hyperdiff.utils.parser import parse_decls, parse_expr, parse_jets
from hyperdiff.utils.report import suite_frame, to_json_lines, to_text_table
from tests.generators import random_poly, random_rational, rng_for

x, y = Var("x"), Var("y")

SQUARE = JetAssignment({"x": (0, 0, 1)}, 3)
ORACLE_DECLS = parse_decls("base q\ndepends t q\ndepends y t\n")

INSTANCE_STANDARD_PARTS = {
    "inverse1": (Fraction(1, 6), Fraction(1, 6)),
    "inverse2": (Fraction(-1, 144), Fraction(-1, 144)),
    "chain2": (Fraction(30), Fraction(30)),
    "chain_multi": (Fraction(10), Fraction(10)),
    "naive_chain2_counterexample": (Fraction(24), Fraction(30)),
    "contradiction_1eq2": (Fraction(1), Fraction(2)),
    "dxdx_zero": (Fraction(0), Fraction(0)),
}


def poly_in(name, coefficients):
    return normalize(Add(tuple(Mul((Const(c), Pow(Var(name), k))) for k, c in enumerate(coefficients))))


class TestEvaluation:
    def test_differentials_are_forward_differences(self):
        assert eval_jet(d(x), SQUARE).terms == ((1, 6), (2, 1))
        assert eval_jet(d(x, 2), SQUARE).terms == ((2, 2),)
        assert eval_jet(d(x), JetAssignment({"x": (0, 1)}, 5)).terms == ((1, 1),)

    def test_values_at_the_sample_point(self):
        assert eval_jet(x ** 2 + 1, SQUARE).terms == ((0, 82),)
        assert hr.standard_part(eval_jet(d(x, 2) / d(x) ** 2, SQUARE)) == Fraction(1, 18)

    def test_parsed_expression(self):
        decls, assignment = parse_jets("base q\ndepends x q\npoly x 0 0 1\nat 1\n")
        value = eval_jet(parse_expr("d[x]", decls), assignment, decls)
        assert hr.to_text(value) == "2*eps + eps^2"
        assert hr.standard_part(value) == 0
        assert str(hr.principal_part(value)) == "2*eps"

    def test_second_differential_over_dt_squared(self):
        decls, assignment = parse_jets("base q\ndepends t q\npoly t 0 1\nat 1\n")
        value = eval_jet(parse_expr("d[t^6,2]/d[t]^2", decls), assignment, decls)
        assert hr.to_text(value) == "30"

    def test_insufficient_truncation(self):
        with pytest.raises(InsufficientTruncation):
            eval_jet(d(x, 2), SQUARE.with_trunc(3))

    def test_unbound_names(self):
        with pytest.raises(UnboundVariable):
            eval_jet(Var("z"), SQUARE)
        with pytest.raises(UnboundFunction):
            eval_jet(Func("g", (x,)), SQUARE)

    def test_function_bodies_and_partials(self):
        decls, assignment = parse_jets("function f x y\npoly x 0 1\npoly y 0 1\nbody f x*y\nat 2\n")
        f = Func("f", (x, y))
        assert eval_jet(f, assignment, decls).terms == ((0, 4),)
        assert eval_jet(Var("f"), assignment, decls).terms == ((0, 4),)
        assert eval_jet(PartialAtom(f, (x,)), assignment, decls).terms == ((1, 2),)

    def test_elementary_functions(self):
        assignment = JetAssignment({"x": (0, 1)}, 0)
        assert hr.standard_part(eval_jet(Func("sin", (d(x),)) / d(x), assignment)) == 1
        assert hr.standard_part(eval_jet(Func("exp", (x,)), assignment)) == 1

    @pytest.mark.parametrize("case", range(30))
    def test_expanded_derivatives_match_the_analytic_oracle(self, case):
        rng = rng_for(case, 50)
        coefficients = random_poly(rng, 1, 5)
        q0 = Fraction(int(rng.integers(-3, 4)))
        n = int(rng.integers(1, 4))
        assignment = JetAssignment({"t": (0, 1)}, q0, definitions={"y": poly_in("t", coefficients)})
        value = eval_jet(expand_derivative("y", "t", n, ORACLE_DECLS), assignment, ORACLE_DECLS)
        assert hr.standard_part(value) == poly_derivative_at(coefficients, n, q0)

    @pytest.mark.parametrize("case", range(30))
    def test_reparameterized_base_gives_the_same_derivative(self, case):
        rng = rng_for(case, 51)
        coefficients = random_poly(rng, 1, 4)
        q0 = Fraction(int(rng.integers(-2, 3)))
        t_poly = local_reparameterization(q0, random_rational(rng, nonzero=True), random_rational(rng))
        assignment = JetAssignment({"t": t_poly}, q0, definitions={"y": poly_in("t", coefficients)})
        for n in (1, 2):
            value = eval_jet(expand_derivative("y", "t", n, ORACLE_DECLS), assignment, ORACLE_DECLS)
            assert hr.standard_part(value) == poly_derivative_at(coefficients, n, q0)


class TestVerifyIdentity:
    def test_true_identity(self):
        report = verify_identity(Identity("square", x ** 2, x * x), [SQUARE])
        assert report.symbolic_pass
        assert report.difference == ZERO
        assert report.outcome == PASS
        assert [v.label for v in report.numeric] == ["given-0"]

    def test_false_identity(self):
        report = verify_identity(Identity("wrong", x ** 2, 2 * x), [SQUARE])
        assert not report.symbolic_pass
        assert not report.numeric[0].passed
        assert (report.numeric[0].lhs_st, report.numeric[0].rhs_st) == (81, 18)
        assert report.outcome == FAIL

    def test_expected_failure(self):
        identity = Identity("wrong", x ** 2, 2 * x, expect_pass=False)
        assert verify_identity(identity, [SQUARE]).outcome == EXPECTED_FAIL

    def test_evaluation_errors_fail_the_verdict(self):
        report = verify_identity(Identity("unbound", Var("z"), Var("z")), [SQUARE])
        assert report.symbolic_pass
        assert report.numeric[0].error
        assert report.outcome == FAIL


class TestSuite:
    def test_every_identity_meets_its_expectation(self):
        reports = run_paper_suite(count=5)
        assert [r.name for r in reports] == default_catalog().names()
        assert all_met(reports)
        outcomes = {r.name: r.outcome for r in reports}
        assert outcomes["naive_chain2_counterexample"] == EXPECTED_FAIL
        assert outcomes["contradiction_1eq2"] == EXPECTED_FAIL
        assert outcomes["chain2"] == PASS
        assert standard_parts(reports) == INSTANCE_STANDARD_PARTS

    def test_random_jets_are_labelled(self):
        (report,) = run_paper_suite(count=3, names=["inverse2"])
        assert [v.label for v in report.numeric] == ["instance", "random-0", "random-1", "random-2"]
        assert all(v.passed for v in report.numeric)

    def test_symbolic_only(self):
        reports = run_paper_suite(count=0)
        assert all(not r.numeric for r in reports)
        assert all_met(reports)

    def test_deterministic_for_a_seed(self):
        first = to_json_lines(run_paper_suite(seed=11, count=2))
        second = to_json_lines(run_paper_suite(seed=11, count=2))
        assert first == second

    def test_unknown_identity(self):
        with pytest.raises(UnknownIdentity):
            run_paper_suite(count=0, names=["nosuch"])

    def test_negative_count(self):
        with pytest.raises(ValueError):
            run_paper_suite(count=-1)


class TestReportTables:
    def test_suite_frame_and_records(self):
        reports = run_paper_suite(count=1, names=["naive_chain2_counterexample"])
        frame = suite_frame(reports)
        assert list(frame["outcome"]) == [EXPECTED_FAIL]
        assert list(frame["lhs_st"]) == ["24"]
        assert list(frame["numeric"])[0].endswith("/2")
        record = json.loads(to_json_lines(reports))
        assert record["instance_rhs_st"] == "30"
        assert record["symbolic_pass"] is False
        assert "naive_chain2_counterexample" in to_text_table(reports)

    def test_empty_table(self):
        assert to_text_table([]) == "(no identities)"
