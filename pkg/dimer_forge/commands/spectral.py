"""``spectral``: spectral polynomial, unit-torus roots and nullvectors of a torus graph."""

from __future__ import annotations

import argparse
from pathlib import Path

from dimer_forge.commands.base import Command, CommandResult, read_json_input
from dimer_forge.config.schema import Config
from dimer_forge.dimers.planarmap import graph_from_dict
from dimer_forge.errors import NonGenericWeights, NotTGraph, RankDeficient
from dimer_forge.periodic.spectral import (
    matching_class_check,
    nullvectors,
    root_count_trials,
    spectral_polynomial,
    unit_torus_roots,
)
from dimer_forge.utils.helpers import complex_to_json, format_fraction


class SpectralCommand(Command):
    @property
    def name(self) -> str:
        return "spectral"

    @property
    def help(self) -> str:
        return "compute P(alpha, beta), its unit-torus roots and the nullvectors there"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", type=Path, help="torus graph file")
        parser.add_argument("--out", dest="report", default=None,
                            help="write spectral.json here (same as --report)")
        parser.add_argument("--trials", type=int, default=0,
                            help="also count roots over this many random-weight trials")

    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        graph = graph_from_dict(read_json_input(args.input))
        if graph.surface != "torus":
            raise NotTGraph("spectral needs a torus graph")
        poly = spectral_polynomial(graph, config)
        check = matching_class_check(graph, poly, config)
        outcome = CommandResult({
            "polynomial": poly.to_json(),
            "sanity": {
                "value_at_one": complex_to_json(check.value_at_one),
                "determinant_at_one": complex_to_json(check.determinant_at_one),
                "abs_coefficient_sum": format_fraction(check.abs_coefficient_sum),
                "matching_weight_sum": format_fraction(check.matching_weight_sum),
                "consistent": check.consistent,
            },
        })
        if not check.consistent:
            outcome.failures.append("spectral polynomial disagrees with the quotient's matchings")
        try:
            roots = unit_torus_roots(poly, config)
        except NonGenericWeights as exc:
            outcome.failures.append(str(exc))
            outcome.result["roots"] = []
            return outcome
        outcome.result["roots"] = [root.to_json() for root in roots]
        vectors = []
        for root in roots:
            try:
                found = nullvectors(graph, root, config.sampler.seed, config)
            except RankDeficient as exc:
                outcome.failures.append(str(exc))
                continue
            vectors.append(found.to_json())
            if found.f_zero or found.g_zero:
                outcome.failures.append("nullvector has zero entries; weights are not generic")
        outcome.result["nullvectors"] = vectors
        if args.trials:
            outcome.result["trials"] = root_count_trials(
                graph, args.trials, config.sampler.seed, config
            )
        return outcome
