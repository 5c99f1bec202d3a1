"""
Helpers: expression trees, parsing, rendering and report tables
"""
