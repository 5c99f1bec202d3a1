"""
Numeric oracle and suite runner.

Expressions are evaluated under a jet assignment: the base parameter steps
from q0 by eps, a differential d^n x is the n-th forward difference of x over
q0, q0 + eps, ..., q0 + n*eps, and a partial differential shifts only the
arguments it varies. All arithmetic is exact on truncated Levi-Civita series.
"""
import asyncio
import logging
import operator
from dataclasses import dataclass, field
from functools import reduce, singledispatchmethod
from math import comb
from typing import Optional, Sequence, Tuple

import numpy as np
from tqdm.auto import tqdm

from .. import config
from ..errors import (
    EvaluationError,
    HyperrealError,
    InsufficientTruncation,
    UnboundFunction,
    UnboundVariable,
)
from ..utils.expr import (
    Add,
    Const,
    DependencyDecls,
    DerivAtom,
    DiffAtom,
    Func,
    Mul,
    PartialAtom,
    Pow,
    Var,
    as_expr,
    normalize,
    walk,
)
from . import hyperreal as hr
from .derivatives import CheckMode, Identity, expand_derivatives
from .differential import DiffConfig, default_config, differential_order
from .hyperreal import LeviCivitaNumber, StandardPart
from .jets import JetAssignment, JetSampler

logger = logging.getLogger(__name__)

PASS = "pass"
EXPECTED_FAIL = "expected-fail"
FAIL = "FAIL"

_ELEMENTARY = {"exp": hr.exp, "sin": hr.sin, "cos": hr.cos, "ln": hr.ln}


# ---------------------------------------------------------------------------
# evaluation

class JetEvaluator:
    """Evaluates expressions at q0 under one assignment."""

    def __init__(self, assignment: JetAssignment, decls: Optional[DependencyDecls] = None,
                 cfg: Optional[DiffConfig] = None):
        self.assignment = assignment
        self.decls = decls or DependencyDecls()
        self.cfg = cfg or default_config()
        self.trunc = assignment.trunc
        self._values = {}

    # variable values along the step sequence

    def point(self, step):
        """q0 + step*eps."""
        return LeviCivitaNumber.from_terms({0: self.assignment.q0, 1: step}, self.trunc, exact=True)

    def value(self, name, step=0):
        key = (name, step)
        if key not in self._values:
            self._values[key] = self._resolve(name, step)
        return self._values[key]

    def _resolve(self, name, step):
        a = self.assignment
        if name == a.base:
            return self.point(step)
        if name in a.polys:
            q = self.point(step)
            result = LeviCivitaNumber.zero(self.trunc)
            for c in reversed(a.polys[name]):
                result = result * q + c
            return result
        if name in a.definitions:
            return self._at_step(step).apply(a.definitions[name])
        if self.decls.has_function(name) and name in a.bodies:
            return self._at_step(step).apply(self.decls.function_application(name))
        raise UnboundVariable(f"variable {name} has no polynomial or definition in the assignment")

    def _at_step(self, step):
        return _Evaluation(self, lambda name: self.value(name, step))

    def forward_difference(self, name, order):
        """sum_j (-1)^(n-j) C(n, j) x(q0 + j*eps)."""
        total = LeviCivitaNumber.zero(self.trunc)
        for j in range(order + 1):
            total = total + hr.scale(self.value(name, j), (-1) ** (order - j) * comb(order, j))
        return total

    def body(self, name):
        if name not in self.assignment.bodies:
            raise UnboundFunction(f"function {name} has no body in the assignment")
        if not self.decls.has_function(name):
            raise UnboundFunction(f"function {name} has a body but no declared arguments")
        return self.decls.arguments(name), self.assignment.bodies[name]

    # public entry point

    def evaluate(self, e):
        e = as_expr(e)
        if any(isinstance(node, DerivAtom) for node in walk(e)):
            e = expand_derivatives(e, self.decls, self.cfg)
        order = differential_order(e)
        if self.trunc < order + 2:
            raise InsufficientTruncation(
                f"truncation order {self.trunc} is too small for differentials of order {order}"
            )
        result = self._at_step(0).apply(e)
        if result.trunc_order < 0:
            raise InsufficientTruncation(
                f"the result is only known up to eps^{result.trunc_order}; raise the truncation order"
            )
        return result


class _Evaluation:
    def __init__(self, evaluator, lookup):
        self.evaluator = evaluator
        self.lookup = lookup

    def constant(self, value):
        return LeviCivitaNumber.from_rational(value, self.evaluator.trunc)

    @singledispatchmethod
    def apply(self, e):
        raise TypeError(f"not an expression: {e!r}")

    @apply.register
    def _(self, e: Const):
        return self.constant(e.value)

    @apply.register
    def _(self, e: Var):
        return self.lookup(e.name)

    @apply.register
    def _(self, e: Add):
        if not e.terms:
            return self.constant(0)
        return reduce(operator.add, (self.apply(t) for t in e.terms))

    @apply.register
    def _(self, e: Mul):
        if not e.factors:
            return self.constant(1)
        return reduce(operator.mul, (self.apply(f) for f in e.factors))

    @apply.register
    def _(self, e: Pow):
        base = self.apply(e.base)
        if e.exponent.denominator == 1:
            return hr.pow_int(base, int(e.exponent))
        return hr.rational_power(base, e.exponent)

    @apply.register
    def _(self, e: Func):
        args = [self.apply(a) for a in e.args]
        if e.name in _ELEMENTARY:
            return _ELEMENTARY[e.name](*args)
        params, body = self.evaluator.body(e.name)
        bound = dict(zip(params, args))
        return _Evaluation(self.evaluator, lambda name: _bound(bound, name, e.name)).apply(body)

    @apply.register
    def _(self, e: DiffAtom):
        return self.evaluator.forward_difference(e.target.name, e.order)

    @apply.register
    def _(self, e: PartialAtom):
        moving = {v.name for v in e.vary}
        evaluator = self.evaluator
        moved = _Evaluation(evaluator, lambda name: evaluator.value(name, 1 if name in moving else 0))
        return moved.apply(e.target) - self.apply(e.target)

    @apply.register
    def _(self, e: DerivAtom):
        return self.apply(expand_derivatives(e, self.evaluator.decls, self.evaluator.cfg))


def _bound(bound, name, function):
    if name not in bound:
        raise UnboundVariable(f"the body of {function} uses {name}, which is not one of its arguments")
    return bound[name]


def eval_jet(e, assignment, decls=None, cfg=None):
    """Exact truncated series of e at q0 under the assignment."""
    return JetEvaluator(assignment, decls, cfg).evaluate(e)


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class NumericVerdict:
    label: str
    assignment: str
    passed: bool
    valuation: Optional[object] = None
    lhs_st: Optional[StandardPart] = None
    rhs_st: Optional[StandardPart] = None
    error: Optional[str] = None
    resamples: int = 0
    matches_expected: Optional[bool] = None


@dataclass(frozen=True)
class IdentityReport:
    name: str
    description: str
    mode: CheckMode
    expect_pass: bool
    symbolic_pass: bool
    difference: object
    numeric: Tuple[NumericVerdict, ...] = field(default_factory=tuple)

    @property
    def passed(self):
        return self.symbolic_pass and all(v.passed for v in self.numeric)

    @property
    def instance(self) -> Optional[NumericVerdict]:
        for v in self.numeric:
            if v.label == "instance":
                return v
        return None

    @property
    def outcome(self):
        instance = self.instance
        reproduces = instance is None or instance.matches_expected in (None, True)
        if self.expect_pass:
            return PASS if self.passed and reproduces else FAIL
        return EXPECTED_FAIL if not self.passed and reproduces else FAIL

    @property
    def met_expectation(self):
        return self.outcome != FAIL


def _judge(mode, difference):
    if mode is CheckMode.EXACT:
        return difference.is_zero
    return hr.standard_part(difference) == 0 and hr.valuation(difference) >= 1


def _check_assignment(identity, assignment, decls, cfg, label, resamples=0, expected=None):
    """Evaluate both sides; evaluation errors become a failed verdict."""
    try:
        evaluator = JetEvaluator(assignment, decls, cfg)
        lhs = evaluator.evaluate(identity.lhs)
        rhs = evaluator.evaluate(identity.rhs)
        difference = lhs - rhs
        lhs_st, rhs_st = hr.standard_part(lhs), hr.standard_part(rhs)
    except (EvaluationError, HyperrealError) as e:
        logger.info("%s: evaluation failed under %s: %s", identity.name, label, e)
        return NumericVerdict(label, assignment.describe(), False, error=str(e), resamples=resamples)
    matches = None
    if expected is not None and any(x is not None for x in expected):
        matches = all(x is None or x == got for x, got in zip(expected, (lhs_st, rhs_st)))
    return NumericVerdict(
        label=label,
        assignment=assignment.describe(),
        passed=_judge(identity.mode, difference),
        valuation=hr.valuation(difference),
        lhs_st=lhs_st,
        rhs_st=rhs_st,
        resamples=resamples,
        matches_expected=matches,
    )


def _admissible(identity, assignment, decls, cfg):
    """Every differential divided by is a first-order infinitesimal, and both sides evaluate."""
    evaluator = JetEvaluator(assignment, decls, cfg)
    try:
        for name in identity.denominator_variables():
            if hr.valuation(evaluator.evaluate(DiffAtom(Var(name), 1))) != 1:
                return False
        evaluator.evaluate(identity.lhs)
        evaluator.evaluate(identity.rhs)
    except InsufficientTruncation:
        return True
    except (EvaluationError, HyperrealError):
        return False
    return True


def _random_verdict(identity, decls, cfg, rng, trunc, label):
    sampler = JetSampler(trunc=trunc, rng=rng)
    assignment = None
    for attempt in range(config.JET_RESAMPLE_LIMIT):
        assignment = sampler.assignment(decls)
        if _admissible(identity, assignment, decls, cfg):
            return _check_assignment(identity, assignment, decls, cfg, label, resamples=attempt)
        logger.debug("%s: resampling %s (attempt %d)", identity.name, label, attempt + 1)
    logger.warning("%s: no admissible jet after %d samples", identity.name, config.JET_RESAMPLE_LIMIT)
    return NumericVerdict(
        label,
        assignment.describe() if assignment else "",
        False,
        error=f"no admissible jet after {config.JET_RESAMPLE_LIMIT} samples",
        resamples=config.JET_RESAMPLE_LIMIT,
    )


async def _gather(calls):
    """Run blocking calls concurrently, results in input order."""
    if config.PARALLEL_ASSIGNMENTS:
        return list(await asyncio.gather(*(asyncio.to_thread(call) for call in calls)))
    return [call() for call in calls]


def _symbolic(identity):
    difference = normalize(identity.lhs - identity.rhs)
    return difference, difference == Const(0)


async def verify_identity_async(identity: Identity, assignments: Sequence[JetAssignment],
                                decls=None, cfg=None) -> IdentityReport:
    decls = decls if decls is not None else identity.decls
    difference, symbolic_pass = _symbolic(identity)
    calls = [
        (lambda a=a, i=i: _check_assignment(identity, a, decls, cfg, f"given-{i}"))
        for i, a in enumerate(assignments)
    ]
    numeric = await _gather(calls)
    return _report(identity, difference, symbolic_pass, numeric)


def verify_identity(identity: Identity, assignments: Sequence[JetAssignment], decls=None, cfg=None):
    """Decide an identity symbolically and under each given assignment.

    Args:
        identity: the identity to check
        assignments: jet assignments to evaluate both sides under
        decls: dependency declarations, the identity's own by default

    Returns:
        IdentityReport
    """
    return asyncio.run(verify_identity_async(identity, assignments, decls, cfg))


def _report(identity, difference, symbolic_pass, numeric):
    report = IdentityReport(
        name=identity.name,
        description=identity.description,
        mode=identity.mode,
        expect_pass=identity.expect_pass,
        symbolic_pass=symbolic_pass,
        difference=difference,
        numeric=tuple(numeric),
    )
    logger.info("%s: %s", identity.name, report.outcome)
    if not report.met_expectation:
        logger.warning("%s did not meet its expected outcome", identity.name)
    return report


async def check_random(identity: Identity, seed: int, count: int, index: int = 0,
                       trunc: Optional[int] = None, cfg=None) -> IdentityReport:
    """Symbolic verdict plus `count` random jets and the identity's own instance.

    Every random assignment draws from its own generator seeded by
    (seed, index, k), so the report does not depend on execution order.
    """
    trunc = trunc if trunc is not None else config.DEFAULT_TRUNC
    decls = identity.decls
    difference, symbolic_pass = _symbolic(identity)
    calls = []
    if count > 0 and identity.instance is not None:
        instance = identity.instance
        expected = (instance.expected_lhs, instance.expected_rhs)
        assignment = instance.assignment.with_trunc(max(trunc, instance.assignment.trunc))
        calls.append(lambda: _check_assignment(identity, assignment, decls, cfg, "instance",
                                               expected=expected))
    for k in range(count):
        rng = np.random.default_rng([seed, index, k])
        calls.append(lambda rng=rng, k=k: _random_verdict(identity, decls, cfg, rng, trunc, f"random-{k}"))
    numeric = await _gather(calls)
    return _report(identity, difference, symbolic_pass, numeric)


async def run_suite_async(seed, count, names=None, catalog=None, cfg=None, trunc=None, progress=None):
    from .registry import catalog as default_catalog

    catalog = catalog or default_catalog
    names = list(names) if names is not None else catalog.names()
    show = config.SHOW_PROGRESS if progress is None else progress
    reports = []
    for name in tqdm(names, desc="identities", disable=not show):
        identity = catalog.get(name)
        index = catalog.index(name)
        logger.info("verifying %s", name)
        reports.append(await check_random(identity, seed, count, index, trunc, cfg))
    return reports


def run_paper_suite(seed=config.DEFAULT_SEED, count=config.DEFAULT_ASSIGNMENT_COUNT, names=None,
                    catalog=None, cfg=None, trunc=None, progress=None):
    """Run the named identity catalog; deterministic for a given seed.

    Returns:
        list of IdentityReport, in catalog order
    """
    if count < 0:
        raise ValueError(f"assignment count must be non-negative, got {count}")
    return asyncio.run(run_suite_async(seed, count, names, catalog, cfg, trunc, progress))


def all_met(reports):
    return all(r.met_expectation for r in reports)


def standard_parts(reports):
    """{name: (lhs st, rhs st)} from each report's instance verdict."""
    out = {}
    for r in reports:
        if r.instance is not None:
            out[r.name] = (r.instance.lhs_st, r.instance.rhs_st)
    return out
