"""
Sidebar with the suite controls
"""
import os
import sys

import streamlit as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))
from hyperdiff import config
from hyperdiff.services import registry


def sidebar_controls():
    """Renders the suite settings and returns them with the run flag"""
    with st.sidebar:
        st.header("Suite settings")

        seed = st.number_input("Seed", value=config.DEFAULT_SEED, step=1)
        count = st.slider("Random jets per identity", 0, 20, config.DEFAULT_UI_COUNT)
        trunc = st.slider("Truncation order", config.MIN_TRUNC, 16, config.DEFAULT_TRUNC)

        names = registry.catalog.names()
        selected = st.multiselect("Identities", names, default=names)

        do_run = st.button("Run suite", type="primary")

        return {
            "seed": int(seed),
            "count": count,
            "trunc": trunc,
            "names": selected,
            "do_run": do_run,
        }
