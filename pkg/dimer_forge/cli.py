"""Command-line entry point for dimer-forge."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

from dimer_forge import __version__
from dimer_forge.commands import CommandRegistry, default_registry
from dimer_forge.config.schema import Config
from dimer_forge.render.schema import validate_report
from dimer_forge.utils.helpers import dumps_json, write_json

logger = logging.getLogger("dimer_forge")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT_ERROR = 2


def build_parser(registry: CommandRegistry) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimer-forge",
        description="Dimer models, T-graphs and Kasteleyn tilings.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug output")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    registry.build_parser(parser)
    return parser


def _emit(report: dict[str, Any], destination: str | None) -> None:
    if destination:
        write_json(Path(destination), report)
    else:
        sys.stdout.write(dumps_json(report))


def main(argv: Sequence[str] | None = None, registry: CommandRegistry | None = None) -> int:
    """Run one command; returns 0 on success, 1 on failed checks, 2 on bad input.

    Library errors derive from ValueError, so DimerForgeError and JSON decoding errors both
    land in the input-error branch.
    """
    registry = registry or default_registry()
    parser = build_parser(registry)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT_ERROR
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = Config.from_env()
        if args.seed is not None:
            config = replace(config, sampler=replace(config.sampler, seed=args.seed))
        outcome = registry.execute(args.command, args, config)
    except (ValueError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INPUT_ERROR

    report = {
        "command": args.command,
        "version": __version__,
        "seed": config.sampler.seed,
        "ok": outcome.ok,
        "input": str(args.input),
        "failures": outcome.failures,
        "result": outcome.result,
    }
    violations = validate_report(report)
    if violations:
        logger.error("report does not match its schema: %s", "; ".join(violations))
        return EXIT_FAILED
    _emit(report, args.report)
    for failure in outcome.failures:
        logger.warning("check failed: %s", failure)
    return EXIT_OK if outcome.ok else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
