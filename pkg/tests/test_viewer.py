import os

from streamlit.testing.v1 import AppTest

from hyperdiff.config import APP_TITLE
from hyperdiff.ui.workbench import EXAMPLE_DECLS, compute
from hyperdiff.utils.expr import DerivAtom, Var
from hyperdiff.utils.render import render_text

APP_PATH = os.path.join(os.path.dirname(__file__), "..", "hyperdiff", "main.py")


class TestWorkbench:
    def test_operations(self):
        assert render_text(compute("differential", "x^2", order=2)) == "2*x*d[x,2] + 2*d[x]^2"
        assert render_text(compute("derivative", "y", EXAMPLE_DECLS, "x", 2)) == (
            "d[y,2]/d[x]^2 - d[x,2]*d[y]/d[x]^3"
        )
        collapsed = compute("render", "d[y,2]/d[x]^2 - d[x,2]*d[y]/d[x]^3", EXAMPLE_DECLS, "x", collapse=True)
        assert collapsed == DerivAtom(Var("y"), Var("x"), 2)


class TestApp:
    def test_loads_without_a_suite_run(self):
        at = AppTest.from_file(APP_PATH, default_timeout=60).run()
        assert not at.exception
        assert at.title[0].value == APP_TITLE
        assert any("Run the suite" in info.value for info in at.info)

    def test_suite_run_fills_the_report(self):
        at = AppTest.from_file(APP_PATH, default_timeout=120).run()
        at.sidebar.button[0].click().run()
        assert not at.exception
        assert not at.error
        assert len(at.dataframe) >= 1
