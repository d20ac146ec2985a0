"""``tile`` and ``tile-periodic``: draw T-graphs as SVG."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from dimer_forge.commands.base import (
    Command,
    CommandResult,
    is_segment_file,
    parse_window,
    read_json_input,
)
from dimer_forge.config.schema import Config
from dimer_forge.construct.flat import detect_flat_faces
from dimer_forge.construct.psi import build_psi
from dimer_forge.construct.roundtrip import roundtrip_check
from dimer_forge.dimers.planarmap import graph_from_dict
from dimer_forge.errors import NotTGraph
from dimer_forge.periodic.patch import almost_periodic_patch
from dimer_forge.periodic.spectral import spectral_polynomial, unit_torus_roots
from dimer_forge.render.svg import (
    RenderStyle,
    Scene,
    render_svg,
    scene_from_patch,
    scene_from_psi,
    scene_from_tgraph,
)
from dimer_forge.tgraph.tgraph import build_from_segments, segments_from_dict

logger = logging.getLogger(__name__)


def _write_svg(path: Path, scene: Scene, config: Config, seed: int) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    svg = render_svg(scene, RenderStyle.from_config(config.render), seed)
    path.write_text(svg, encoding="utf-8")


class TileCommand(Command):
    @property
    def name(self) -> str:
        return "tile"

    @property
    def help(self) -> str:
        return "build the T-graph of a plane graph (or draw a segment file) as SVG"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", type=Path, help="plane graph file or segment file")
        parser.add_argument("--out", type=Path, required=True, help="SVG output path")
        parser.add_argument("--b0", type=int, default=None, help="boundary black used as cut point")
        parser.add_argument("--roundtrip", action="store_true",
                            help="rebuild the T-graph and compare it with the input graph")

    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        data = read_json_input(args.input)
        seed = config.sampler.seed
        if is_segment_file(data):
            segments, ambient = segments_from_dict(data)
            graph = build_from_segments(segments, ambient, config)
            scene = scene_from_tgraph(graph)
            _write_svg(args.out, scene, config, seed)
            return CommandResult({
                "kind": "segments",
                "segments": graph.n,
                "faces": len(scene.polygons),
                "svg": str(args.out),
            })

        graph = graph_from_dict(data)
        if graph.surface != "plane":
            raise NotTGraph("tile needs a plane graph; use tile-periodic for torus maps")
        psi = build_psi(graph, b0=args.b0, seed=seed, config=config)
        scene = scene_from_psi(psi)
        _write_svg(args.out, scene, config, seed)
        diagnostics = psi.diagnostics
        outcome = CommandResult({
            "kind": "graph",
            "segments": len(psi.segments),
            "faces": len(scene.polygons),
            "svg": str(args.out),
            "diagnostics": diagnostics.to_json(),
        })
        if diagnostics.flat:
            outcome.result["flat_components"] = [
                component.to_json() for component in detect_flat_faces(psi)
            ]
        if not diagnostics.convex:
            outcome.failures.append("some white face is not convex")
        if diagnostics.area_defect > config.construct.area_tolerance * abs(diagnostics.polygon_area):
            outcome.failures.append(f"face areas miss the polygon by {diagnostics.area_defect:.3g}")
        if args.roundtrip:
            report = roundtrip_check(graph, psi.polygon, psi.b0, seed, config)
            outcome.result["roundtrip"] = report.to_json()
            if not report.ok:
                outcome.failures.append("rebuilt T-graph does not reproduce the input graph")
        return outcome


class TilePeriodicCommand(Command):
    @property
    def name(self) -> str:
        return "tile-periodic"

    @property
    def help(self) -> str:
        return "draw an almost periodic T-graph patch of a torus graph as SVG"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", type=Path, help="torus graph file")
        parser.add_argument("--out", type=Path, required=True, help="SVG output path")
        parser.add_argument("--window", type=parse_window, default=(10, 10),
                            help="window of fundamental domains, JxK (default 10x10)")
        parser.add_argument("--root-index", type=int, default=0,
                            help="which unit-torus root to use (default 0)")

    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        graph = graph_from_dict(read_json_input(args.input))
        if graph.surface != "torus":
            raise NotTGraph("tile-periodic needs a torus graph")
        roots = unit_torus_roots(spectral_polynomial(graph, config), config)
        outcome = CommandResult({"window": list(args.window)})
        if not roots:
            outcome.failures.append("spectral polynomial has no zeros on the unit torus")
            return outcome
        root = roots[args.root_index % len(roots)]
        seed = config.sampler.seed
        patch = almost_periodic_patch(graph, root, args.window, seed, config)
        scene = scene_from_patch(patch)
        _write_svg(args.out, scene, config, seed)
        outcome.result.update({
            "segments": len(patch.segments),
            "faces": len(scene.polygons),
            "svg": str(args.out),
            "diagnostics": {
                "martingale_residual": patch.martingale_residual,
                "rotation_residual": patch.rotation_residual,
                "closure_residual": patch.closure_residual,
                "diameter": patch.diameter,
            },
        })
        if patch.martingale_residual > 1e-6:
            outcome.failures.append(f"martingale residual {patch.martingale_residual:.3g}")
        if patch.rotation_residual > 1e-6:
            outcome.failures.append(f"rotation residual {patch.rotation_residual:.3g}")
        return outcome
