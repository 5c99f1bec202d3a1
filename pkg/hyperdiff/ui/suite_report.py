"""
Suite report: the outcome table and a detail view per identity
"""
import os
import sys

import streamlit as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))
from hyperdiff import config
from hyperdiff.services import registry
from hyperdiff.utils.render import render_latex
from hyperdiff.utils.report import suite_frame, verdicts_frame
from hyperdiff.utils.state import ss


def _outcome_style(value):
    color = config.VERDICT_COLORS.get(value)
    return f"color: {color}; font-weight: bold" if color else ""


def show_suite_report(reports):
    """Renders the table of outcomes and the selected identity"""
    if not reports:
        st.info("Run the suite from the sidebar to see identity verdicts.")
        return

    seed, count, trunc = ss.last_run or (None, None, None)
    st.caption(f"seed {seed}, {count} random jets per identity, truncation order {trunc}")

    met = sum(r.met_expectation for r in reports)
    st.metric("Identities meeting their expected outcome", f"{met}/{len(reports)}")

    frame = suite_frame(reports)
    st.dataframe(frame.style.map(_outcome_style, subset=["outcome"]), hide_index=True)

    names = [r.name for r in reports]
    index = names.index(ss.selected_identity) if ss.selected_identity in names else 0
    ss.selected_identity = st.selectbox("Identity", names, index=index)
    show_identity(next(r for r in reports if r.name == ss.selected_identity))


def show_identity(report):
    identity = registry.catalog.get(report.name)
    st.subheader(report.name)
    if report.description:
        st.write(report.description)

    left, right = st.columns(2)
    with left:
        st.markdown("**Left side**")
        st.latex(render_latex(identity.lhs))
    with right:
        st.markdown("**Right side**")
        st.latex(render_latex(identity.rhs))

    st.markdown("**Normalized difference**")
    st.latex(render_latex(report.difference))

    if identity.instance is not None:
        st.markdown(f"**Worked instance:** {identity.instance.description}")

    if report.numeric:
        st.dataframe(verdicts_frame(report), hide_index=True)
    else:
        st.caption("Symbolic verdict only (no jets were evaluated).")
