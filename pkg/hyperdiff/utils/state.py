import streamlit as st

from .. import config

_DEFAULTS = {
    "reports": list,
    "selected_identity": lambda: None,
    "last_run": lambda: None,
    "workbench_output": dict,
}


def _init_session_state():
    """Creates the session keys the viewer reads, once per session"""
    for key, factory in _DEFAULTS.items():
        if key not in st.session_state:
            st.session_state[key] = factory()


_init_session_state()


class SessionState:
    def __init__(self):
        _init_session_state()

    @property
    def reports(self):
        """IdentityReports from the last suite run, in catalog order"""
        if "reports" not in st.session_state:
            st.session_state.reports = []
        return st.session_state.reports

    @reports.setter
    def reports(self, value):
        st.session_state.reports = value

    @property
    def selected_identity(self):
        if "selected_identity" not in st.session_state:
            st.session_state.selected_identity = None
        return st.session_state.selected_identity

    @selected_identity.setter
    def selected_identity(self, value):
        st.session_state.selected_identity = value

    @property
    def last_run(self):
        """(seed, count, trunc) of the stored reports"""
        if "last_run" not in st.session_state:
            st.session_state.last_run = None
        return st.session_state.last_run

    @last_run.setter
    def last_run(self, value):
        st.session_state.last_run = value

    @property
    def workbench_output(self):
        if "workbench_output" not in st.session_state:
            st.session_state.workbench_output = {}
        return st.session_state.workbench_output

    @workbench_output.setter
    def workbench_output(self, value):
        st.session_state.workbench_output = value

    def reset_reports(self):
        st.session_state.reports = []
        st.session_state.selected_identity = None
        st.session_state.last_run = None


ss = SessionState()


def store_suite_results(reports, seed, count, trunc):
    """Keeps a finished suite run for the report page"""
    st.session_state.reports = reports
    st.session_state.last_run = (seed, count, trunc or config.DEFAULT_TRUNC)
    if reports and st.session_state.selected_identity not in {r.name for r in reports}:
        st.session_state.selected_identity = reports[0].name
