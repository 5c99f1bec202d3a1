"""
Tabulation and serialization of identity reports
"""
import json
import math

import pandas as pd

from ..services.hyperreal import format_standard_part
from .render import render_text

SUITE_COLUMNS = ["identity", "mode", "expected", "symbolic", "numeric", "lhs_st", "rhs_st", "outcome"]
VERDICT_COLUMNS = ["label", "assignment", "passed", "valuation", "lhs_st", "rhs_st", "resamples", "error"]


def _st(value):
    return None if value is None else format_standard_part(value)


def _valuation(value):
    if value is None:
        return None
    return "inf" if value == math.inf else int(value)


def verdict_record(verdict):
    return {
        "label": verdict.label,
        "assignment": verdict.assignment,
        "passed": verdict.passed,
        "valuation": _valuation(verdict.valuation),
        "lhs_st": _st(verdict.lhs_st),
        "rhs_st": _st(verdict.rhs_st),
        "resamples": verdict.resamples,
        "error": verdict.error,
    }


def report_record(report):
    """One structured record; rationals are 'p/q' strings."""
    instance = report.instance
    return {
        "name": report.name,
        "mode": str(report.mode),
        "expect_pass": report.expect_pass,
        "symbolic_pass": report.symbolic_pass,
        "difference": render_text(report.difference),
        "passed": report.passed,
        "outcome": report.outcome,
        "instance_lhs_st": _st(instance.lhs_st) if instance else None,
        "instance_rhs_st": _st(instance.rhs_st) if instance else None,
        "verdicts": [verdict_record(v) for v in report.numeric],
    }


def suite_frame(reports):
    """One row per identity"""
    rows = []
    for r in reports:
        instance = r.instance
        passed = sum(v.passed for v in r.numeric)
        rows.append({
            "identity": r.name,
            "mode": str(r.mode),
            "expected": "pass" if r.expect_pass else "fail",
            "symbolic": "pass" if r.symbolic_pass else "fail",
            "numeric": f"{passed}/{len(r.numeric)}",
            "lhs_st": _st(instance.lhs_st) if instance else "",
            "rhs_st": _st(instance.rhs_st) if instance else "",
            "outcome": r.outcome,
        })
    return pd.DataFrame(rows, columns=SUITE_COLUMNS)


def verdicts_frame(report):
    """One row per evaluated assignment of a single identity"""
    return pd.DataFrame([verdict_record(v) for v in report.numeric], columns=VERDICT_COLUMNS)


def to_json_lines(reports):
    """One JSON object per line, in report order."""
    return "".join(json.dumps(report_record(r)) + "\n" for r in reports)


def to_text_table(reports):
    frame = suite_frame(reports)
    if frame.empty:
        return "(no identities)"
    return frame.to_string(index=False)
