"""
Expression workbench: differentials, expanded derivatives and rendering
"""
import os
import sys

import streamlit as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))
from hyperdiff.errors import HyperdiffError
from hyperdiff.services import registry
from hyperdiff.services.derivatives import collapse_derivative, expand_derivative, expand_derivatives
from hyperdiff.services.differential import nth_differential
from hyperdiff.utils.parser import parse_decls, parse_expr
from hyperdiff.utils.render import render_latex, render_text
from hyperdiff.utils.state import ss

OPERATIONS = ("differential", "derivative", "render")

EXAMPLE_DECLS = "base q\ndepends x q\ndepends y x\n"


def compute(operation, source, decls_source="", wrt="x", order=1, collapse=False):
    """Runs one workbench operation and returns the normalized result"""
    cfg = registry.diff_config
    decls = parse_decls(decls_source) if decls_source.strip() else None
    e = parse_expr(source, decls, cfg)
    if operation == "differential":
        return nth_differential(expand_derivatives(e, decls, cfg), order, decls, cfg)
    if operation == "derivative":
        return expand_derivative(e, wrt, order, decls, cfg)
    if collapse:
        return collapse_derivative(e, wrt or None, decls, cfg)
    return e


def show_workbench():
    st.subheader("Workbench")
    operation = st.radio("Operation", OPERATIONS, horizontal=True)
    source = st.text_input("Expression", value="y")
    decls_source = st.text_area("Declarations", value=EXAMPLE_DECLS, height=100)
    wrt = st.text_input("With respect to", value="x")
    order = st.number_input("Order", min_value=1, max_value=4, value=2, step=1)
    collapse = st.checkbox("Collapse expanded derivatives", value=False)

    if st.button("Compute"):
        try:
            result = compute(operation, source, decls_source, wrt, int(order), collapse)
            ss.workbench_output = {"text": render_text(result), "latex": render_latex(result)}
        except (HyperdiffError, TypeError, ValueError) as e:
            ss.workbench_output = {"error": str(e)}

    output = ss.workbench_output
    if "error" in output:
        st.error(output["error"])
    elif output:
        st.latex(output["latex"])
        st.code(output["text"])
