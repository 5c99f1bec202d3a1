"""
Named identities checked by the suite, each with its declarations and a
worked instance.
"""
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from ..errors import UnknownIdentity
from ..utils.parser import parse_decls, parse_jets
from .derivatives import (
    ReferenceInstance,
    chain_multivariate,
    chain_second,
    contradiction_one_equals_two,
    inverse_first,
    inverse_second,
    naive_chain_second,
    second_derivative_of_self,
)
from .jets import analytic_derivative

logger = logging.getLogger(__name__)

INVERSE_DECLS = """\
base q
depends x q
depends y x
"""

CHAIN_DECLS = """\
base q
depends t q
depends x t
depends y x
"""

MULTI_DECLS = """\
base q
depends t q
depends x t
depends y t
function f x y
"""

SELF_DECLS = """\
base q
depends x q
"""

CHAIN_INSTANCE = """\
poly t 0 1
define x t^2
define y x^3
at 1
"""

MULTI_INSTANCE = """\
poly t 0 1
define x t^2
define y t^3
body f x^2 + y^2
at 1
"""


# expected standard parts of (lhs, rhs) on the worked instance, from the sympy oracle

def _both_sides(y, x, n):
    def expected(assignment, decls):
        value = analytic_derivative(y, x, n, assignment, decls)
        return value, value
    return expected


def _naive_chain_sides(assignment, decls):
    lhs = analytic_derivative("y", "x", 2, assignment, decls) * analytic_derivative("x", "t", 1, assignment, decls) ** 2
    return lhs, analytic_derivative("y", "t", 2, assignment, decls)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable
    decls_source: str
    instance_source: str
    instance_description: str
    expected: Optional[Callable] = None


ENTRIES = (
    CatalogEntry(
        "inverse1",
        lambda decls: inverse_first("y", "x", decls),
        INVERSE_DECLS,
        "poly x 0 1\ndefine y x^2\nat 3\n",
        "y = x^2 at x = 3",
        _both_sides("x", "y", 1),
    ),
    CatalogEntry(
        "inverse2",
        lambda decls: inverse_second("y", "x", decls),
        INVERSE_DECLS,
        "poly x 0 1\ndefine y x^3\nat 2\n",
        "y = x^3 at x = 2",
        _both_sides("x", "y", 2),
    ),
    CatalogEntry(
        "chain2",
        lambda decls: chain_second("y", "x", "t", decls),
        CHAIN_DECLS,
        CHAIN_INSTANCE,
        "y = x^3, x = t^2 at t = 1",
        _both_sides("y", "t", 2),
    ),
    CatalogEntry(
        "chain_multi",
        lambda decls: chain_multivariate("f", None, "t", decls),
        MULTI_DECLS,
        MULTI_INSTANCE,
        "f = x^2 + y^2, x = t^2, y = t^3 at t = 1",
        _both_sides("f", "t", 1),
    ),
    CatalogEntry(
        "naive_chain2_counterexample",
        lambda decls: naive_chain_second("y", "x", "t", decls),
        CHAIN_DECLS,
        CHAIN_INSTANCE,
        "y = x^3, x = t^2 at t = 1: 24t^4 instead of 30t^4",
        _naive_chain_sides,
    ),
    CatalogEntry(
        "contradiction_1eq2",
        lambda decls: contradiction_one_equals_two("f", None, "t", decls),
        MULTI_DECLS,
        MULTI_INSTANCE,
        "f = x^2 + y^2, x = t^2, y = t^3 at t = 1",
        lambda assignment, decls: (Fraction(1), Fraction(2)),
    ),
    CatalogEntry(
        "dxdx_zero",
        lambda decls: second_derivative_of_self("x", decls),
        SELF_DECLS,
        "poly x 0 0 1\nat 1\n",
        "x = q^2 at q = 1",
        _both_sides("x", "x", 2),
    ),
)


class IdentityCatalog:
    """Identities by name, built on first use."""

    def __init__(self, entries=ENTRIES):
        self._entries = {entry.name: entry for entry in entries}
        self._order = tuple(entry.name for entry in entries)
        self._built = {}

    def names(self):
        return list(self._order)

    def __contains__(self, name):
        return name in self._entries

    def __iter__(self):
        return (self.get(name) for name in self._order)

    def __len__(self):
        return len(self._order)

    def entry(self, name) -> CatalogEntry:
        if name not in self._entries:
            known = ", ".join(self._order)
            raise UnknownIdentity(f"unknown identity {name!r}; known identities: {known}")
        return self._entries[name]

    def index(self, name):
        self.entry(name)
        return self._order.index(name)

    def get(self, name):
        entry = self.entry(name)
        if name not in self._built:
            self._built[name] = _build(entry)
            logger.debug("built identity %s", name)
        return self._built[name]


def _build(entry):
    decls = parse_decls(entry.decls_source)
    identity = entry.build(decls)
    _, assignment = parse_jets(entry.instance_source, decls)
    expected = entry.expected(assignment, decls) if entry.expected else (None, None)
    instance = ReferenceInstance(assignment, entry.instance_description, *expected)
    return replace(identity, name=entry.name, instance=instance)


@lru_cache(maxsize=1)
def default_catalog():
    return IdentityCatalog()
