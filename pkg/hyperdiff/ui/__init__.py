# Explicit imports to avoid circular loading issues
from hyperdiff.ui.sidebar import sidebar_controls
from hyperdiff.ui.suite_report import show_suite_report
from hyperdiff.ui.workbench import show_workbench
