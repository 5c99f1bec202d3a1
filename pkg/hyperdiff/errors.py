"""
Exception hierarchy shared by every layer of hyperdiff
"""


class HyperdiffError(Exception):
    """Base class for all errors raised by hyperdiff."""


# hyperreal arithmetic

class HyperrealError(HyperdiffError):
    pass


class DivisionByZero(HyperrealError, ZeroDivisionError):
    pass


class IndeterminateOrder(HyperrealError):
    """Two values agree over their whole known window, so their order is unknown."""


class IrrationalValue(HyperrealError):
    """The exact result is not a rational series."""


# expressions

class ExprError(HyperdiffError):
    pass


class NonIntegerGrade(ExprError):
    pass


# parsing

class ParseError(HyperdiffError):
    """`position` indexes characters of `source`; `offset` counts UTF-8 bytes before it."""

    def __init__(self, source, position, expected, found=None):
        position = max(0, min(position, len(source)))
        self.source = source
        self.position = position
        self.offset = len(source[:position].encode("utf-8", "surrogatepass"))
        self.line = source.count("\n", 0, position) + 1
        self.column = position - (source.rfind("\n", 0, position) + 1) + 1
        self.expected = expected
        if found is None:
            found = repr(source[position]) if position < len(source) else "end of input"
        self.found = found
        super().__init__(
            f"line {self.line}, column {self.column} (offset {self.offset}): "
            f"expected {self.expected}, found {self.found}"
        )


class UnknownFunction(ParseError):
    pass


class CyclicDependency(ParseError):
    pass


class DuplicateDeclaration(ParseError):
    pass


# differentials

class DifferentialError(HyperdiffError):
    pass


class OrderGuardExceeded(DifferentialError):
    pass


class UnsupportedDifferential(DifferentialError):
    pass


class VaryVarNotArgument(ParseError, DifferentialError):
    """A partial differential names a variable that is not an argument of its function."""


# jet evaluation

class EvaluationError(HyperdiffError):
    pass


class InsufficientTruncation(EvaluationError):
    pass


class UnboundFunction(EvaluationError):
    pass


class UnboundVariable(EvaluationError):
    pass


# identity catalog

class UnknownIdentity(HyperdiffError, KeyError):
    def __str__(self):
        return Exception.__str__(self)
