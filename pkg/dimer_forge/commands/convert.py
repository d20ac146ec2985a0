"""``convert``: normalize graph and segment files or convert between them."""

from __future__ import annotations

import argparse
from pathlib import Path

from dimer_forge.commands.base import Command, CommandResult, is_segment_file, read_json_input
from dimer_forge.commands.sample import load_plane_tgraph
from dimer_forge.config.schema import Config
from dimer_forge.dimers.planarmap import dump_graph, graph_from_dict
from dimer_forge.tgraph.tgraph import build_from_segments, dump_segments, segments_from_dict


class ConvertCommand(Command):
    @property
    def name(self) -> str:
        return "convert"

    @property
    def help(self) -> str:
        return "rewrite a file as a normalized graph file or segment file"

    def configure(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("input", type=Path, help="graph file or segment file")
        parser.add_argument("--out", type=Path, required=True, help="output path")
        parser.add_argument("--to", choices=("graph", "segments"), default="graph",
                            help="output format (default graph)")

    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        data = read_json_input(args.input)
        source = "segments" if is_segment_file(data) else "graph"
        if source == "segments" and args.to == "graph":
            segments, ambient = segments_from_dict(data)
            text = dump_graph(build_from_segments(segments, ambient, config).dimer_graph.dimer_map)
        elif source == "segments":
            segments, ambient = segments_from_dict(data)
            text = dump_segments(segments, ambient)
        elif args.to == "graph":
            text = dump_graph(graph_from_dict(data))
        else:
            graph = load_plane_tgraph(data, config)
            text = dump_segments(graph.segments, graph.ambient)
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
        return CommandResult({"kind": source, "output": str(args.out)})
