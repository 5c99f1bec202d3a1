"""
Recursive-descent parser for expressions, dependency declarations and jet files.

Expression grammar:

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" exponent)?
    exponent := ["-"] int ["/" int] | "(" ["-"] int ["/" int] ")"
    atom     := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
              | "d" "[" expr ("," int)? "]"
              | "pd" "[" ident ("," ident)+ "]"
              | "D" "[" expr ";" ident (";" int)? "]"

Declarations, one per line, `#` starts a comment:

    base q | var x | depends x t [u ...] | function f x y

Jet files add

    poly x c0 c1 ...   (coefficients ascending in q)
    at [q0] r
    define y <expr>
    body f <expr>
    trunc M
"""
import logging
import re
from collections import namedtuple
from fractions import Fraction

from .. import config
from ..errors import (
    CyclicDependency,
    DuplicateDeclaration,
    ParseError,
    UnknownFunction,
    VaryVarNotArgument,
)
from ..services.derivatives import expand_derivatives
from ..services.differential import default_config, nth_differential
from ..services.jets import DEFAULT_BASE, JetAssignment
from .expr import (
    Add,
    Const,
    DependencyDecls,
    DerivAtom,
    Func,
    Mul,
    PartialAtom,
    Pow,
    Var,
    free_vars,
    normalize,
)

logger = logging.getLogger(__name__)

Token = namedtuple("Token", "kind text offset")

_TOKEN = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<number>\d+(?:\.\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),;\[\]])"
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")
_WORD = re.compile(r"\S+")

RESERVED = ("d", "pd", "D")
DECL_KEYWORDS = ("base", "var", "depends", "function")
JET_KEYWORDS = ("poly", "at", "define", "body", "trunc")


def _describe(token):
    return "end of input" if token.kind == "end" else repr(token.text)


def tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if match is None:
            raise ParseError(source, pos, "a number, name or operator")
        if match.lastgroup != "space":
            tokens.append(Token(match.lastgroup, match.group(), pos))
        pos = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _ExprParser:
    def __init__(self, source, decls, cfg):
        self.source = source
        self.decls = decls
        self.cfg = cfg
        self.tokens = tokenize(source)
        self.i = 0

    # token helpers

    @property
    def peek(self):
        return self.tokens[self.i]

    def lookahead(self, k=1):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self):
        token = self.tokens[self.i]
        if token.kind != "end":
            self.i += 1
        return token

    def at(self, text):
        return self.peek.kind == "op" and self.peek.text == text

    def error(self, expected, token=None, cls=ParseError):
        token = token or self.peek
        return cls(self.source, token.offset, expected, _describe(token))

    def expect(self, text):
        if not self.at(text):
            raise self.error(repr(text))
        return self.advance()

    def identifier(self):
        if self.peek.kind != "name":
            raise self.error("an identifier")
        return self.advance()

    def _integer_follows(self):
        token = self.lookahead()
        return token.kind == "number" and "." not in token.text

    def integer(self, what="an integer"):
        token = self.peek
        if token.kind != "number" or "." in token.text:
            raise self.error(what)
        self.advance()
        return int(token.text), token

    # grammar

    def parse(self):
        e = self.expr()
        if self.peek.kind != "end":
            raise self.error("an operator or end of input")
        return e

    def expr(self):
        terms = [self.term()]
        while self.at("+") or self.at("-"):
            op = self.advance().text
            term = self.term()
            terms.append(term if op == "+" else Mul((Const(-1), term)))
        return terms[0] if len(terms) == 1 else normalize(Add(tuple(terms)))

    def term(self):
        factors = [self.unary()]
        while self.at("*") or self.at("/"):
            op = self.advance().text
            factor = self.unary()
            factors.append(factor if op == "*" else Pow(factor, Fraction(-1)))
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self):
        if self.at("-"):
            self.advance()
            return Mul((Const(-1), self.unary()))
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            start = self.peek
            exponent = self.exponent()
            if abs(exponent.numerator) > config.MAX_EXPONENT:
                raise self.error(f"an exponent of magnitude at most {config.MAX_EXPONENT}", start)
            return Pow(base, exponent)
        return base

    def exponent(self):
        if self.at("("):
            self.advance()
            value = self.rational(fraction=True)
            self.expect(")")
            return value
        return self.rational()

    def rational(self, fraction=False):
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        numerator, _ = self.integer("a rational exponent")
        denominator = 1
        if self.at("/") and (fraction or self._integer_follows()):
            self.advance()
            denominator, token = self.integer("an integer denominator")
            if denominator == 0:
                raise self.error("a nonzero denominator", token)
        return Fraction(sign * numerator, denominator)

    def atom(self):
        token = self.peek
        if token.kind == "number":
            self.advance()
            return Const(Fraction(token.text))
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if token.kind != "name":
            raise self.error("an expression")
        bracket = self.lookahead().kind == "op" and self.lookahead().text == "["
        if token.text == "d" and bracket:
            return self.differential()
        if token.text == "pd" and bracket:
            return self.partial()
        if token.text == "D" and bracket:
            return self.derivative()
        self.advance()
        if self.at("("):
            return self.call(token)
        if self.decls is not None and self.decls.has_function(token.text):
            return self.decls.function_application(token.text)
        return Var(token.text)

    def call(self, name):
        self.expect("(")
        args = [self.expr()]
        while self.at(","):
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if name.text == "sqrt" and len(args) == 1:
            return Pow(args[0], Fraction(1, 2))
        if self.cfg.is_elementary(name.text):
            if len(args) != 1:
                raise self.error(f"one argument to {name.text}", name)
            return Func(name.text, tuple(args))
        if self.decls is None or not self.decls.has_function(name.text):
            raise self.error("a declared function", name, UnknownFunction)
        arity = len(self.decls.arguments(name.text))
        if len(args) != arity:
            raise self.error(f"{arity} arguments to {name.text}", name)
        return Func(name.text, tuple(normalize(a) for a in args))

    def differential(self):
        self.advance()
        self.expect("[")
        target = self.expr()
        order = 1
        if self.at(","):
            self.advance()
            order, token = self.integer("a differential order")
            if order < 1:
                raise self.error("a positive differential order", token)
        self.expect("]")
        target = expand_derivatives(target, self.decls, self.cfg)
        return nth_differential(target, order, self.decls, self.cfg)

    def partial(self):
        self.advance()
        self.expect("[")
        name = self.identifier()
        if self.decls is None or not self.decls.has_function(name.text):
            raise self.error("a declared function", name, UnknownFunction)
        arguments = self.decls.arguments(name.text)
        vary = []
        self.expect(",")
        while True:
            v = self.identifier()
            if v.text not in arguments:
                raise self.error(f"an argument of {name.text}", v, VaryVarNotArgument)
            if Var(v.text) in vary:
                raise self.error("a variable not already listed", v)
            vary.append(Var(v.text))
            if not self.at(","):
                break
            self.advance()
        self.expect("]")
        return PartialAtom(self.decls.function_application(name.text), tuple(vary))

    def derivative(self):
        self.advance()
        self.expect("[")
        target = self.expr()
        self.expect(";")
        wrt = self.identifier()
        order = 1
        if self.at(";"):
            self.advance()
            order, token = self.integer("a derivative order")
            if order < 1:
                raise self.error("a positive derivative order", token)
        self.expect("]")
        return DerivAtom(normalize(target), Var(wrt.text), order)


def parse_expr(source, decls=None, cfg=None):
    """Parse and normalize one expression."""
    cfg = cfg or default_config()
    try:
        return normalize(_ExprParser(source, decls, cfg).parse())
    except RecursionError:
        raise ParseError(source, 0, "less deeply nested input") from None


# ---------------------------------------------------------------------------
# declarations

def _words(line, line_offset):
    return [(m.group(), line_offset + m.start()) for m in _WORD.finditer(line)]


def _lines(source):
    offset = 0
    for line in source.splitlines(keepends=True):
        content = line.split("#", 1)[0]
        yield content, offset
        offset += len(line)


class _DeclsBuilder:
    def __init__(self, source, decls=None):
        self.source = source
        self.base = decls.base if decls else None
        self.variables = list(decls.variables) if decls else []
        self.depends = {v: set(ds) for v, ds in decls.depends.items()} if decls else {}
        self.functions = dict(decls.functions) if decls else {}

    def fail(self, cls, offset, expected, found):
        return cls(self.source, offset, expected, found)

    def name(self, word):
        text, offset = word
        if not _IDENT.match(text):
            raise self.fail(ParseError, offset, "an identifier", repr(text))
        return text

    def reaches(self, start, goal):
        stack, seen = [start], set()
        while stack:
            v = stack.pop()
            if v == goal:
                return True
            if v not in seen:
                seen.add(v)
                stack.extend(self.depends.get(v, ()))
        return False

    def statement(self, words):
        keyword, offset = words[0]
        args = words[1:]
        if keyword == "base":
            self._expect_count(words, 1, 1)
            if self.base is not None:
                raise self.fail(DuplicateDeclaration, offset, "a single base declaration", "a second base")
            self.base = self.name(args[0])
        elif keyword == "var":
            self._expect_count(words, 1, None)
            for word in args:
                v = self.name(word)
                if v in self.variables:
                    raise self.fail(DuplicateDeclaration, word[1], "a new variable", repr(v))
                self.variables.append(v)
        elif keyword == "depends":
            self._expect_count(words, 2, None)
            self.add_dependencies(args[0], args[1:])
        elif keyword == "function":
            self._expect_count(words, 2, None)
            f = self.name(args[0])
            if f in self.functions:
                raise self.fail(DuplicateDeclaration, args[0][1], "a new function", repr(f))
            if f in RESERVED or f == "sqrt" or default_config().is_elementary(f):
                raise self.fail(ParseError, args[0][1], "a function name that is not built in", repr(f))
            params = [self.name(w) for w in args[1:]]
            if len(set(params)) != len(params):
                raise self.fail(ParseError, args[1][1], "distinct argument names", " ".join(params))
            self.functions[f] = tuple(params)
        else:
            raise self.fail(ParseError, offset, "one of " + ", ".join(DECL_KEYWORDS), repr(keyword))

    def add_dependencies(self, word, deps):
        v = self.name(word)
        for dep_word in deps:
            dep = self.name(dep_word)
            if dep in self.depends.get(v, ()):
                raise self.fail(DuplicateDeclaration, dep_word[1], "a new dependency", f"{v} on {dep} again")
            if dep == v or self.reaches(dep, v):
                raise self.fail(CyclicDependency, dep_word[1], "an acyclic dependency graph",
                                f"{v} -> {dep} closing a cycle")
            self.depends.setdefault(v, set()).add(dep)

    def _expect_count(self, words, low, high):
        count = len(words) - 1
        if count < low or (high is not None and count > high):
            keyword, offset = words[0]
            wanted = f"{low}" if high == low else f"at least {low}"
            end = words[-1][1] + len(words[-1][0])
            raise self.fail(ParseError, end if count < low else words[high + 1][1],
                            f"{wanted} name(s) after {keyword}", f"{count}")

    def snapshot(self):
        return DependencyDecls(
            base=self.base,
            variables=tuple(self.variables),
            depends={v: frozenset(ds) for v, ds in self.depends.items()},
            functions=dict(self.functions),
        )

    def build(self):
        if self.base is not None:
            names = set(self.variables) | set(self.depends)
            for ds in self.depends.values():
                names |= ds
            for params in self.functions.values():
                names |= set(params)
            for v in sorted(names - {self.base}):
                if not self.depends.get(v):
                    self.depends.setdefault(v, set()).add(self.base)
        return self.snapshot().validate()


def parse_decls(source):
    builder = _DeclsBuilder(source)
    for line, offset in _lines(source):
        words = _words(line, offset)
        if words:
            builder.statement(words)
    decls = builder.build()
    logger.debug("parsed %d variables and %d functions", len(decls.all_variables()), len(decls.functions))
    return decls


# ---------------------------------------------------------------------------
# jets

def _rest_of_line(line, offset, words, skip):
    """Text after the first `skip` words, with its absolute offset."""
    start = words[skip - 1][1] + len(words[skip - 1][0]) - offset
    return line[start:].rstrip("\r\n"), offset + start


def _parse_at(source, text, start, decls, cfg):
    try:
        return parse_expr(text, decls, cfg)
    except ParseError as e:
        raise type(e)(source, start + e.position, e.expected, e.found) from None


def parse_jets(source, decls=None, trunc=None, cfg=None):
    """Parse a jet file into (declarations, assignment).

    Declaration lines may appear alongside the jet lines; they extend `decls`.
    """
    cfg = cfg or default_config()
    builder = _DeclsBuilder(source, decls)
    polys, q0, trunc_line = {}, None, None
    pending_defines, pending_bodies = [], []

    for line, offset in _lines(source):
        words = _words(line, offset)
        if not words:
            continue
        keyword, key_offset = words[0]
        if keyword in DECL_KEYWORDS:
            builder.statement(words)
        elif keyword == "poly":
            if len(words) < 3:
                raise ParseError(source, key_offset + len(line.rstrip()), "a variable and coefficients")
            v = builder.name(words[1])
            if v in polys:
                raise DuplicateDeclaration(source, words[1][1], "one polynomial per variable", repr(v))
            polys[v] = tuple(_coefficient(source, w) for w in words[2:])
        elif keyword == "at":
            if q0 is not None:
                raise DuplicateDeclaration(source, key_offset, "a single sample point", "a second 'at'")
            if len(words) not in (2, 3):
                raise ParseError(source, key_offset, "'at [name] <rational>'", line.strip())
            q0 = _coefficient(source, words[-1])
        elif keyword == "trunc":
            if len(words) != 2 or not words[1][0].isdecimal():
                raise ParseError(source, key_offset, "'trunc <integer>'", line.strip())
            trunc_line = int(words[1][0])
        elif keyword in ("define", "body"):
            if len(words) < 3:
                raise ParseError(source, key_offset, f"'{keyword} <name> <expression>'", line.strip())
            target = builder.name(words[1])
            text, start = _rest_of_line(line, offset, words, 2)
            (pending_defines if keyword == "define" else pending_bodies).append((target, words[1][1], text, start))
        else:
            raise ParseError(source, key_offset,
                             "one of " + ", ".join(DECL_KEYWORDS + JET_KEYWORDS), repr(keyword))

    definitions = {}
    for target, target_offset, text, start in pending_defines:
        if target in definitions or target in polys:
            raise DuplicateDeclaration(source, target_offset, "one definition per variable", repr(target))
        definition = _parse_at(source, text, start, builder.snapshot(), cfg)
        if not builder.depends.get(target):
            deps = sorted(free_vars(definition))
            if deps:
                builder.add_dependencies((target, target_offset), [(d, target_offset) for d in deps])
        definitions[target] = definition

    decls = builder.build()
    bodies = {}
    for name, name_offset, text, start in pending_bodies:
        if not decls.has_function(name):
            raise UnknownFunction(source, name_offset, "a declared function", repr(name))
        if name in bodies:
            raise DuplicateDeclaration(source, name_offset, "one body per function", repr(name))
        body = _parse_at(source, text, start, decls, cfg)
        stray = sorted(free_vars(body) - set(decls.arguments(name)))
        if stray:
            raise ParseError(source, start, f"only the arguments of {name}", ", ".join(stray))
        bodies[name] = body

    trunc = trunc if trunc is not None else trunc_line if trunc_line is not None else config.DEFAULT_TRUNC
    assignment = JetAssignment(
        polys=polys,
        q0=q0 if q0 is not None else Fraction(0),
        trunc=trunc,
        definitions=definitions,
        bodies=bodies,
        base=decls.base or DEFAULT_BASE,
    )
    return decls, assignment


def _coefficient(source, word):
    text, offset = word
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(source, offset, "a rational number", repr(text)) from None
