"""
Hyperdiff report viewer - identity suite and expression workbench
"""
import asyncio
import os
import sys

import nest_asyncio
import streamlit as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from hyperdiff.config import APP_DESCRIPTION, APP_ICON, APP_TITLE

from hyperdiff.services.verifier import run_paper_suite
from hyperdiff.ui import show_suite_report, show_workbench, sidebar_controls
from hyperdiff.utils.state import _init_session_state, ss, store_suite_results

_init_session_state()


def _event_loop():
    # the script thread has no loop of its own
    try:
        return asyncio.get_event_loop()
    except RuntimeError:
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
        return loop


nest_asyncio.apply(_event_loop())

# header
st.set_page_config(
    page_title=APP_TITLE,
    page_icon=APP_ICON,
    layout="wide"
)

# title
st.title(APP_TITLE)
st.caption(APP_DESCRIPTION)

# sidebar
controls = sidebar_controls()

# suite run
if controls["do_run"]:
    try:
        with st.spinner("Verifying identities..."):
            reports = run_paper_suite(
                controls["seed"], controls["count"], controls["names"], trunc=controls["trunc"]
            )
        store_suite_results(reports, controls["seed"], controls["count"], controls["trunc"])
    except Exception as e:
        st.error(f"Suite run failed: {e}")
        ss.reset_reports()

report_tab, workbench_tab = st.tabs(["Identity suite", "Workbench"])

with report_tab:
    try:
        show_suite_report(ss.reports)
    except Exception as e:
        st.error(f"Could not display the report: {e}")

with workbench_tab:
    show_workbench()

# footer
st.divider()
