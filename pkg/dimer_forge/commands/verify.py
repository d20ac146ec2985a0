"""``verify``: Kasteleyn, degeneracy and correspondence checks on an input file."""

from __future__ import annotations

import argparse
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

from dimer_forge.commands.base import Command, CommandResult, is_segment_file, read_json_input
from dimer_forge.config.schema import Config
from dimer_forge.dimers.degeneracy import degeneracy_report
from dimer_forge.dimers.kasteleyn import (
    assign_signs,
    determinant,
    enumerate_matchings,
    partition_function,
)
from dimer_forge.dimers.planarmap import PlanarMap, graph_from_dict
from dimer_forge.periodic.spectral import matching_class_check, spectral_polynomial
from dimer_forge.tgraph.correspondence import (
    duality_check,
    torus_correspondence_check,
    verify_measure_preservation,
)
from dimer_forge.tgraph.tgraph import (
    build_from_segments,
    martingale_residual,
    roots_reachable,
    segments_from_dict,
)
from dimer_forge.utils.helpers import format_fraction

logger = logging.getLogger(__name__)


class VerifyCommand(Command):
    @property
    def name(self) -> str:
        return "verify"

    @property
    def help(self) -> str:
        return "check a graph file (Kasteleyn, degeneracy) or a segment file (bijection)"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", type=Path, help="graph file or segment file")
        parser.add_argument("--bijection", action="store_true",
                            help="treat the input as a segment file and check the bijection")
        parser.add_argument("--require-2-nondegenerate", dest="require_2_nondegenerate",
                            action="store_true", help="fail when the map has a 1-cut")

    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        data = read_json_input(args.input)
        if args.bijection or is_segment_file(data):
            return self._verify_segments(data, config)
        graph = graph_from_dict(data)
        if graph.surface == "torus":
            return self._verify_torus(graph, config)
        return self._verify_plane(graph, args.require_2_nondegenerate, config)

    def _verify_plane(self, graph: PlanarMap, require_2: bool, config: Config) -> CommandResult:
        outcome = CommandResult({"kind": "graph", "surface": "plane"})
        matrix = assign_signs(graph)
        det = determinant(matrix, config)
        partition = partition_function(matrix, config)
        outcome.result["determinant"] = (
            format_fraction(det) if isinstance(det, Fraction) else f"{det.real:.12g}"
        )
        outcome.result["partition_function"] = format_fraction(partition)
        if graph.vertex_count <= config.kasteleyn.enumeration_limit:
            enumeration = enumerate_matchings(graph, config)
            outcome.result["matchings"] = len(enumeration)
            if enumeration.partition_function != partition:
                outcome.failures.append(
                    f"|det K| = {format_fraction(partition)} but matchings sum to "
                    f"{format_fraction(enumeration.partition_function)}"
                )
        report = degeneracy_report(graph, config)
        outcome.result["degeneracy"] = report.to_json()
        if require_2 and (report.has_cut(1) or report.k_nondegenerate.get(2) is False):
            cuts = ", ".join(str(list(cut)) for cut in report.one_cuts) or "none listed"
            outcome.failures.append(f"map is not 2-nondegenerate; 1-cuts: {cuts}")
        return outcome

    def _verify_torus(self, graph: PlanarMap, config: Config) -> CommandResult:
        outcome = CommandResult({"kind": "graph", "surface": "torus"})
        enumeration = enumerate_matchings(graph, config)
        outcome.result["matchings"] = len(enumeration)
        outcome.result["partition_function"] = format_fraction(enumeration.partition_function)
        check = matching_class_check(graph, spectral_polynomial(graph, config), config)
        outcome.result["sanity"] = {
            "abs_coefficient_sum": format_fraction(check.abs_coefficient_sum),
            "matching_weight_sum": format_fraction(check.matching_weight_sum),
            "consistent": check.consistent,
        }
        if not check.consistent:
            outcome.failures.append("spectral polynomial disagrees with the quotient's matchings")
        return outcome

    def _verify_segments(self, data: dict[str, Any], config: Config) -> CommandResult:
        segments, ambient = segments_from_dict(data)
        graph = build_from_segments(segments, ambient, config)
        outcome = CommandResult({
            "kind": "segments",
            "segments": graph.n,
            "faces": len(graph.faces),
            "martingale_residual": format_fraction(martingale_residual(graph)),
            "stability_radius": graph.stability_radius,
        })
        if ambient == "torus":
            if graph.n <= config.geometry.torus_segment_limit:
                torus = torus_correspondence_check(graph, config)
                outcome.result["torus"] = torus.to_json()
                if not torus.consistent:
                    outcome.failures.append("torus matchings and forests disagree")
            return outcome
        if not roots_reachable(graph):
            outcome.failures.append("some interior vertex cannot reach a root")
            return outcome
        if graph.n > config.geometry.bijection_segment_limit:
            logger.warning("skipping exhaustive bijection check for %d segments", graph.n)
            return outcome
        bijection = verify_measure_preservation(graph, config=config)
        outcome.result["bijection"] = bijection.to_json()
        if not bijection.bijective:
            outcome.failures.append(
                f"correspondence is not measure preserving "
                f"(discrepancy {format_fraction(bijection.max_discrepancy)})"
            )
        duality = duality_check(graph)
        outcome.result["duality"] = duality.to_json()
        if not duality.all_dual_trees:
            outcome.failures.append("some forest complement is not a dual spanning tree")
        return outcome
