"""Command registry."""

from __future__ import annotations

import argparse

from dimer_forge.commands.base import Command, CommandResult
from dimer_forge.config.schema import Config


class CommandRegistry:
    """In-memory registry of CLI commands."""

    def __init__(self) -> None:
        self._commands: dict[str, Command] = {}

    def register(self, command: Command) -> None:
        """Register or replace a command."""
        self._commands[command.name] = command

    def get(self, name: str) -> Command | None:
        return self._commands.get(name)

    def build_parser(self, parser: argparse.ArgumentParser) -> None:
        """Attach one sub-parser per registered command, with the shared flags."""
        subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
        for command in self._commands.values():
            sub = subparsers.add_parser(command.name, help=command.help, description=command.help)
            sub.add_argument("--seed", type=int, default=None,
                             help="random seed (default: DIMER_FORGE_SEED or 0)")
            sub.add_argument("--report", default=None,
                             help="write the JSON report here instead of stdout")
            command.configure(sub)

    def execute(self, name: str, args: argparse.Namespace, config: Config) -> CommandResult:
        """Execute a registered command."""
        command = self._commands.get(name)
        if command is None:
            raise KeyError(f"command {name!r} not found")
        return command.run(args, config)

    @property
    def command_names(self) -> list[str]:
        """Return registered command names."""
        return list(self._commands.keys())
