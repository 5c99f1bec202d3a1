import json

import pytest

from hyperdiff.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main

SECOND_DERIVATIVE_TEXT = "d[y,2]/d[x]^2 - d[x,2]*d[y]/d[x]^3"


@pytest.fixture
def jets_file(tmp_path):
    path = tmp_path / "square.jets"
    path.write_text("base q\ndepends x q\npoly x 0 0 1\nat 1\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def decls_file(tmp_path):
    path = tmp_path / "f.decls"
    path.write_text("base q\ndepends x q\ndepends y q\nfunction f x y\n", encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestExpressionCommands:
    def test_diff(self, capsys):
        assert run(capsys, "diff", "x^2", "--order", "2")[:2] == (EXIT_OK, "2*x*d[x,2] + 2*d[x]^2\n")
        assert run(capsys, "diff", "5")[1] == "0\n"

    def test_derive(self, capsys):
        assert run(capsys, "derive", "t^6", "--wrt", "t", "-n", "2")[1] == "30*t^4\n"
        assert run(capsys, "derive", "y", "--wrt", "x", "-n", "2")[1] == SECOND_DERIVATIVE_TEXT + "\n"
        assert run(capsys, "derive", "x", "--wrt", "x")[1] == "1\n"

    def test_latex_output(self, capsys):
        code, out, _ = run(capsys, "derive", "y", "--wrt", "x", "-n", "2", "--latex")
        assert code == EXIT_OK
        assert out.startswith(r"\frac{\mathrm{d}^2y}{\mathrm{d}x^2}")

    def test_structured_output(self, capsys):
        code, out, _ = run(capsys, "diff", "x^2", "--structured")
        assert code == EXIT_OK
        assert json.loads(out) == {"text": "2*x*d[x]", "latex": r"2 x \mathrm{d}x"}

    def test_partial(self, capsys, decls_file):
        assert run(capsys, "partial", "f", "x", "--decls", decls_file)[1] == "pd[f,x]\n"
        assert run(capsys, "partial", "x^2*y", "x")[1] == "2*x*y*d[x]\n"

    def test_render_collapse(self, capsys):
        code, out, _ = run(capsys, "render", SECOND_DERIVATIVE_TEXT, "--collapse")
        assert (code, out) == (EXIT_OK, "D[y;x;2]\n")


class TestEval:
    def test_value_and_parts(self, capsys, jets_file):
        code, out, _ = run(capsys, "eval", "d[x]", jets_file)
        assert code == EXIT_OK
        assert out.splitlines() == ["value: 2*eps + eps^2", "st: 0", "pt: 2*eps"]

    def test_ratio(self, capsys, jets_file):
        assert run(capsys, "eval", "d[x]/d[x]", jets_file)[1].splitlines()[1] == "st: 1"

    def test_structured(self, capsys, jets_file):
        record = json.loads(run(capsys, "eval", "d[x]", jets_file, "--structured")[1])
        assert record["st"] == "0"
        assert record["trunc_order"] == 8

    def test_insufficient_truncation(self, capsys, jets_file):
        code, _, err = run(capsys, "eval", "d[x,2]", jets_file, "--trunc", "3")
        assert code == EXIT_FAILURE
        assert "truncation" in err

    def test_unbound_variable(self, capsys, jets_file):
        assert run(capsys, "eval", "z", jets_file)[0] == EXIT_USAGE

    def test_missing_jets_file(self, capsys, tmp_path):
        assert run(capsys, "eval", "x", str(tmp_path / "missing.jets"))[0] == EXIT_USAGE


class TestVerify:
    def test_single_identity(self, capsys):
        code, out, _ = run(capsys, "verify", "chain2", "--count", "2")
        assert code == EXIT_OK
        assert "pass" in out
        assert "1/1 identities met their expected outcome" in out

    def test_counterexample_is_expected_to_fail(self, capsys):
        code, out, _ = run(capsys, "verify", "naive_chain2_counterexample", "--count", "1")
        assert code == EXIT_OK
        assert "expected-fail" in out
        assert "24" in out and "30" in out

    def test_structured_lines(self, capsys):
        code, out, _ = run(capsys, "verify", "all", "--count", "0", "--structured")
        assert code == EXIT_OK
        records = [json.loads(line) for line in out.splitlines()]
        assert [r["name"] for r in records][:2] == ["inverse1", "inverse2"]
        assert all(r["verdicts"] == [] for r in records)

    def test_unknown_identity(self, capsys):
        code, _, err = run(capsys, "verify", "nosuch")
        assert code == EXIT_USAGE
        assert "nosuch" in err


class TestUsage:
    def test_parse_error_points_at_the_input(self, capsys):
        code, _, err = run(capsys, "diff", "x +")
        assert code == EXIT_USAGE
        assert "expected" in err
        assert "^" in err

    def test_bad_options(self, capsys):
        assert run(capsys, "diff", "x", "--trunc", "2")[0] == EXIT_USAGE
        assert run(capsys, "verify", "all", "--count", "-1")[0] == EXIT_USAGE
        assert run(capsys, "diff", "x", "--latex", "--structured")[0] == EXIT_USAGE
        assert run(capsys)[0] == EXIT_USAGE

    def test_order_guard(self, capsys):
        assert run(capsys, "diff", "x", "--order", "9")[0] == EXIT_USAGE


class TestFlagPlacement:
    def test_flags_before_the_subcommand(self, capsys, jets_file):
        code, out, _ = run(capsys, "--structured", "diff", "x^2")
        assert code == EXIT_OK
        assert json.loads(out) == {"text": "2*x*d[x]", "latex": r"2 x \mathrm{d}x"}
        assert run(capsys, "--trunc", "3", "eval", "d[x,2]", jets_file)[0] == EXIT_FAILURE

    def test_subcommand_flags_keep_earlier_values(self, capsys, jets_file):
        code, out, _ = run(capsys, "--trunc", "3", "eval", "d[x]", jets_file, "--structured")
        assert code == EXIT_OK
        assert json.loads(out)["trunc_order"] == 3
