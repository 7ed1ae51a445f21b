"""Command-line entry point.

Exit codes: 0 when everything holds, 1 when a bound or reduction is
violated, 2 on usage, configuration or input errors. Machine-readable output
goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import List, Optional, Sequence

from . import __version__
from .config import SuiteConfig
from .errors import BlockdetError, ConfigInvalid
from .formatting import FORMATS, render
from .gen import COMPLEX, REAL, GenConfig, random_block_pd, random_pd, random_psd_singular
from .harness import SuiteReport, check_reductions, run_suite, write_report
from .registry import BOUND_NAMES, evaluate_bound
from .reports import DEFAULT_TOL
from .serialize import input_to_dict, load_input, load_json, dumps, write_json

logger = logging.getLogger("blockdet")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

# flag dest -> SuiteConfig field
_SUITE_FLAGS = {
    "seed": "seed",
    "samples": "samples_per_bound",
    "max_n": "max_n",
    "max_block": "max_block_dim",
    "max_factors": "max_factors",
    "cond_cap": "cond_cap",
    "tol": "tol",
    "bounds": "bounds",
    "include_singular": "include_singular",
}


def _bound_list(text: str) -> tuple:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if names == ["all"]:
        return BOUND_NAMES
    return tuple(names)


def _add_suite_flags(parser: argparse.ArgumentParser, with_bounds: bool) -> None:
    parser.add_argument("--config", help="YAML suite configuration; explicit flags override it")
    parser.add_argument("--seed", type=int, help="suite seed (default 42)")
    parser.add_argument("--samples", type=int, help="samples per bound (default 1000)")
    parser.add_argument("--max-n", type=int, help="block-grid order cap (default 5)")
    parser.add_argument("--max-block", type=int, help="block order cap (default 3)")
    parser.add_argument("--max-factors", type=int, help="factor count cap (default 4)")
    parser.add_argument("--cond-cap", type=float, help="condition number cap (default 1e4)")
    parser.add_argument("--tol", type=float, help="log-margin tolerance (default 1e-8)")
    parser.add_argument("--out", help="write the suite report JSON here instead of stdout")
    if with_bounds:
        parser.add_argument("--bounds", type=_bound_list, help="comma-separated bound names (default all)")
        parser.add_argument("--include-singular", action="store_true", default=None,
                            help="route rank-deficient factors to the bounds (perturbed for PD-only bounds)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockdet",
        description="Verify Oppenheim-type determinant inequalities for Hadamard and Khatri-Rao products.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS,
                        help="log progress to stderr (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="run the sampled verification suite")
    _add_suite_flags(verify, with_bounds=True)
    verify.set_defaults(handler=cmd_verify)

    bound = sub.add_parser("bound", parents=[common], help="evaluate one bound on JSON inputs")
    bound.add_argument("--name", required=True, choices=BOUND_NAMES)
    bound.add_argument("--inputs", nargs="+", required=True, help="matrix, block-matrix or array JSON files")
    bound.add_argument("--tol", type=float, default=DEFAULT_TOL)
    bound.add_argument("--split", type=int, help="fischer: rows in the leading block")
    bound.add_argument("--q", type=int, help="coro24: exponent")
    bound.set_defaults(handler=cmd_bound)

    gen = sub.add_parser("gen", parents=[common], help="generate a random instance")
    gen.add_argument("--kind", choices=("pd", "psd", "block-pd"), default="pd")
    gen.add_argument("--dim", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--block-dim", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--cond-cap", type=float, default=1e4)
    gen.add_argument("--rank-deficit", type=int, default=0)
    gen.add_argument("--complex", action="store_true", help="complex Hermitian entries")
    gen.add_argument("--out")
    gen.set_defaults(handler=cmd_gen)

    report = sub.add_parser("report", parents=[common], help="summarize a suite report")
    report.add_argument("--in", dest="input", required=True)
    report.add_argument("--format", choices=FORMATS, default="csv")
    report.set_defaults(handler=cmd_report)

    reductions = sub.add_parser("reductions", parents=[common], help="check that each bound reduces to its special cases")
    _add_suite_flags(reductions, with_bounds=False)
    reductions.set_defaults(handler=cmd_reductions)
    return parser


def suite_config(args: argparse.Namespace) -> SuiteConfig:
    cfg = SuiteConfig.from_yaml(args.config) if args.config else SuiteConfig()
    overrides = {
        field: getattr(args, flag)
        for flag, field in _SUITE_FLAGS.items()
        if getattr(args, flag, None) is not None
    }
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validate()


def _emit_suite(report: SuiteReport, out: Optional[str]) -> int:
    text = write_report(report, out)
    if out is None:
        sys.stdout.write(text)
    if report.errors:
        logger.warning("%d instance(s) failed with numerical errors", report.errors)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = suite_config(args)
    return _emit_suite(run_suite(cfg), args.out)


def cmd_reductions(args: argparse.Namespace) -> int:
    cfg = suite_config(args)
    return _emit_suite(check_reductions(cfg), args.out)


def cmd_bound(args: argparse.Namespace) -> int:
    inputs = [load_input(path) for path in args.inputs]
    params = {}
    if args.split is not None:
        params["split"] = args.split
    if args.q is not None:
        params["q"] = args.q
    report = evaluate_bound(args.name, inputs, args.tol, params)
    sys.stdout.write(dumps(report.to_dict()))
    return EXIT_OK if report.verified else EXIT_VIOLATION


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        seed=args.seed,
        dim=args.dim,
        n=args.n,
        block_dim=args.block_dim,
        cond_cap=args.cond_cap,
        scalar_kind=COMPLEX if args.complex else REAL,
        rank_deficit=args.rank_deficit,
    )
    if args.kind == "pd":
        value = random_pd(cfg)
    elif args.kind == "psd":
        value = random_psd_singular(cfg)
    else:
        if cfg.n is None or cfg.block_dim is None:
            raise ConfigInvalid("block-pd needs --n and --block-dim")
        value = random_block_pd(cfg)
    text = write_json(input_to_dict(value), args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = SuiteReport.from_dict(load_json(args.input))
    sys.stdout.write(render(report, args.format))
    return EXIT_OK


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except BlockdetError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_USAGE
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


def run(argv: Optional[List[str]] = None) -> None:
    """Console-script wrapper."""
    sys.exit(main(argv))
