"""
Command-line front end: parse, expand, evaluate, verify and render.

Exit codes: 0 success (or every identity met its expected outcome),
1 verification or evaluation failure, 2 usage or parse error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import List, Optional

from . import config
from .errors import (
    DifferentialError,
    EvaluationError,
    ExprError,
    HyperdiffError,
    HyperrealError,
    InsufficientTruncation,
    ParseError,
    UnboundFunction,
    UnboundVariable,
    UnknownIdentity,
)
from .services import hyperreal as hr
from .services.derivatives import collapse_derivative, expand_derivative, expand_derivatives
from .services.differential import nth_differential, partial_differential
from .services.verifier import all_met, eval_jet, run_paper_suite
from .utils.parser import parse_decls, parse_expr, parse_jets
from .utils.render import render_latex, render_series_latex, render_text
from .utils.report import to_json_lines, to_text_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

OUTPUT_FORMATS = ("text", "latex", "structured")


@dataclass(frozen=True)
class CliConfig:
    decls_path: Optional[str] = None
    trunc: Optional[int] = None
    seed: int = config.DEFAULT_SEED
    count: int = config.DEFAULT_ASSIGNMENT_COUNT
    output: str = "text"
    progress: bool = config.SHOW_PROGRESS

    def __post_init__(self):
        if self.trunc is not None and self.trunc < config.MIN_TRUNC:
            raise ValueError(f"--trunc must be at least {config.MIN_TRUNC}, got {self.trunc}")
        if self.count < 0:
            raise ValueError(f"--count must be non-negative, got {self.count}")
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output!r}")

    @classmethod
    def from_args(cls, args):
        output = "structured" if args.structured else "latex" if args.latex else "text"
        return cls(args.decls, args.trunc, args.seed, args.count, output,
                   args.progress or config.SHOW_PROGRESS)

    def load_decls(self):
        if self.decls_path is None:
            return None
        return parse_decls(_read(self.decls_path))


class UsageError(HyperdiffError):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _emit_expr(e, cfg, **extra):
    if cfg.output == "structured":
        print(json.dumps({"text": render_text(e), "latex": render_latex(e), **extra}))
    elif cfg.output == "latex":
        print(render_latex(e))
    else:
        print(render_text(e))


# ---------------------------------------------------------------------------
# commands

def cmd_diff(args, cfg):
    decls = cfg.load_decls()
    e = expand_derivatives(parse_expr(args.expr, decls), decls)
    _emit_expr(nth_differential(e, args.order, decls), cfg)
    return EXIT_OK


def cmd_derive(args, cfg):
    decls = cfg.load_decls()
    y = parse_expr(args.expr, decls)
    _emit_expr(expand_derivative(y, args.wrt, args.n, decls), cfg)
    return EXIT_OK


def cmd_partial(args, cfg):
    decls = cfg.load_decls()
    f = parse_expr(args.function, decls)
    _emit_expr(partial_differential(f, args.vary, decls), cfg)
    return EXIT_OK


def cmd_eval(args, cfg):
    decls, assignment = parse_jets(_read(args.jets), cfg.load_decls(), cfg.trunc)
    e = parse_expr(args.expr, decls)
    value = eval_jet(e, assignment, decls)
    st = hr.standard_part(value)
    pt = hr.principal_part(value)
    if cfg.output == "structured":
        print(json.dumps({
            "value": hr.to_text(value),
            "trunc_order": value.trunc_order,
            "st": hr.format_standard_part(st),
            "pt": str(pt),
        }))
    elif cfg.output == "latex":
        print(render_series_latex(value))
    else:
        print(f"value: {hr.to_text(value)}")
        print(f"st: {hr.format_standard_part(st)}")
        print(f"pt: {pt}")
    return EXIT_OK


def cmd_verify(args, cfg):
    names = None if args.identity == "all" else [args.identity]
    reports = run_paper_suite(cfg.seed, cfg.count, names, trunc=cfg.trunc, progress=cfg.progress)
    if cfg.output == "structured":
        sys.stdout.write(to_json_lines(reports))
    else:
        print(to_text_table(reports))
        met = sum(r.met_expectation for r in reports)
        print(f"{met}/{len(reports)} identities met their expected outcome")
    return EXIT_OK if all_met(reports) else EXIT_FAILURE


def cmd_render(args, cfg):
    decls = cfg.load_decls()
    e = parse_expr(args.expr, decls)
    if args.collapse:
        e = collapse_derivative(e, args.wrt, decls)
    _emit_expr(e, cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _common(defaults=True):
    """Options accepted before or after the subcommand.

    The subcommand copy suppresses its defaults so an option given before the
    subcommand is not overwritten.
    """
    def default(value):
        return value if defaults else argparse.SUPPRESS

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--decls", metavar="FILE", default=default(None), help="dependency declarations file")
    p.add_argument("--trunc", type=int, metavar="M", default=default(None),
                   help="truncation order of jet arithmetic")
    p.add_argument("--seed", type=int, default=default(config.DEFAULT_SEED), help="suite seed")
    p.add_argument("--count", type=int, default=default(config.DEFAULT_ASSIGNMENT_COUNT),
                   help="random jet assignments per identity")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--latex", action="store_true", default=default(False), help="LaTeX output")
    fmt.add_argument("--structured", action="store_true", default=default(False), help="JSON output")
    p.add_argument("--log-level", default=default(config.LOG_LEVEL), help="logging level (stderr)")
    p.add_argument("--progress", action="store_true", default=default(False),
                   help="progress bar during verification")
    return p


def build_parser():
    common = _common(defaults=False)
    p = argparse.ArgumentParser(
        prog="hyperdiff",
        parents=[_common()],
        description="Differentials as algebraic objects, checked on exact infinitesimal jets",
    )
    sub = p.add_subparsers(dest="command", required=True)

    diff = sub.add_parser("diff", parents=[common], help="n-th differential of an expression")
    diff.add_argument("expr")
    diff.add_argument("--order", type=int, default=1)
    diff.set_defaults(handler=cmd_diff)

    derive = sub.add_parser("derive", parents=[common], help="expanded derivative D[expr;x;n]")
    derive.add_argument("expr")
    derive.add_argument("--wrt", required=True)
    derive.add_argument("-n", type=int, default=1)
    derive.set_defaults(handler=cmd_derive)

    partial = sub.add_parser("partial", parents=[common], help="partial differential pd[f, vars]")
    partial.add_argument("function", help="declared function name or polynomial expression")
    partial.add_argument("vary", nargs="+")
    partial.set_defaults(handler=cmd_partial)

    evaluate = sub.add_parser("eval", parents=[common], help="evaluate under a jets file")
    evaluate.add_argument("expr")
    evaluate.add_argument("jets", metavar="JETS_FILE")
    evaluate.set_defaults(handler=cmd_eval)

    verify = sub.add_parser("verify", parents=[common], help="check catalog identities")
    verify.add_argument("identity", help="identity name or 'all'")
    verify.set_defaults(handler=cmd_verify)

    render = sub.add_parser("render", parents=[common], help="normalize and print an expression")
    render.add_argument("expr")
    render.add_argument("--collapse", action="store_true", help="fold expanded derivatives into D[...]")
    render.add_argument("--wrt", help="variable to collapse derivatives against")
    render.set_defaults(handler=cmd_render)
    return p


def _error(message):
    print(f"error: {message}", file=sys.stderr)


def _parse_error(e: ParseError):
    _error(str(e))
    if e.source:
        line = e.source.splitlines()[e.line - 1] if e.source.splitlines() else ""
        print(f"  {line}", file=sys.stderr)
        print("  " + " " * (e.column - 1) + "^", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = CliConfig.from_args(args)
    except ValueError as e:
        _error(str(e))
        return EXIT_USAGE

    try:
        return args.handler(args, cfg)
    except ParseError as e:
        _parse_error(e)
        return EXIT_USAGE
    except (UnknownIdentity, UnboundVariable, UnboundFunction, UsageError,
            DifferentialError, ExprError) as e:
        _error(str(e))
        return EXIT_USAGE
    except InsufficientTruncation as e:
        _error(str(e))
        return EXIT_FAILURE
    except (EvaluationError, HyperrealError) as e:
        _error(str(e))
        return EXIT_FAILURE
    except (TypeError, ValueError) as e:
        _error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
