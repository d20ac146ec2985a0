"""``sample``: Wilson samples of a plane T-graph streamed as NDJSON."""

from __future__ import annotations

import argparse
import logging
from collections.abc import Iterator
from pathlib import Path
from typing import Any

from dimer_forge.commands.base import Command, CommandResult, is_segment_file, read_json_input
from dimer_forge.config.schema import Config
from dimer_forge.construct.psi import build_psi
from dimer_forge.construct.roundtrip import tgraph_from_psi
from dimer_forge.dimers.planarmap import graph_from_dict
from dimer_forge.sampler.report import empirical_report, sample_stream
from dimer_forge.sampler.wilson import RngConfig
from dimer_forge.tgraph.tgraph import TGraph, build_from_segments, segments_from_dict
from dimer_forge.utils.helpers import append_ndjson

logger = logging.getLogger(__name__)


def load_plane_tgraph(data: dict[str, Any], config: Config) -> TGraph:
    """A segment file as is, or the T-graph constructed from a plane graph file."""
    if is_segment_file(data):
        segments, ambient = segments_from_dict(data)
        return build_from_segments(segments, ambient, config)
    psi = build_psi(graph_from_dict(data), seed=config.sampler.seed, config=config)
    return tgraph_from_psi(psi, config)


class SampleCommand(Command):
    @property
    def name(self) -> str:
        return "sample"

    @property
    def help(self) -> str:
        return "sample dimer configurations through random spanning forests"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", type=Path, help="plane segment file or plane graph file")
        parser.add_argument("-n", "--samples", type=int, default=1000,
                            help="number of samples (default 1000)")
        parser.add_argument("--out", type=Path, required=True, help="NDJSON output path")
        parser.add_argument("--empirical", action="store_true",
                            help="compare the sample histogram with the exact law")

    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        if args.samples < 0:
            raise ValueError(f"sample count must be non-negative, got {args.samples}")
        graph = load_plane_tgraph(read_json_input(args.input), config)
        rng = RngConfig(config.sampler.seed, config.sampler.algorithm)
        if args.out.exists():
            args.out.unlink()

        def records() -> Iterator[dict[str, Any]]:
            yield {
                "header": True,
                "seed": rng.seed,
                "algorithm": rng.algorithm,
                "samples": args.samples,
                "segments": graph.n,
            }
            stream = sample_stream(graph, args.samples, rng) if args.samples else iter(())
            for index, (_, marked) in enumerate(stream):
                yield {
                    "index": index,
                    "edges": list(marked.edges),
                    "marks": [list(mark) for mark in marked.marks],
                }

        written = append_ndjson(args.out, records())
        logger.info("wrote %d samples to %s", written - 1, args.out)
        outcome = CommandResult({"samples": written - 1, "output": str(args.out)})
        if args.empirical and args.samples:
            report = empirical_report(graph, args.samples, rng, config=config)
            outcome.result["empirical"] = report.to_json()
            if report.p_value is not None and report.p_value < 1e-3:
                outcome.failures.append(f"chi-square p-value {report.p_value:.3g} below 0.001")
        return outcome
