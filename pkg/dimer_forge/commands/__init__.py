"""Command-line commands."""

from dimer_forge.commands.base import Command, CommandResult
from dimer_forge.commands.convert import ConvertCommand
from dimer_forge.commands.registry import CommandRegistry
from dimer_forge.commands.sample import SampleCommand
from dimer_forge.commands.spectral import SpectralCommand
from dimer_forge.commands.tile import TileCommand, TilePeriodicCommand
from dimer_forge.commands.verify import VerifyCommand


def default_registry() -> CommandRegistry:
    """Registry with every built-in command."""
    registry = CommandRegistry()
    for command in (
        VerifyCommand(),
        TileCommand(),
        TilePeriodicCommand(),
        SampleCommand(),
        SpectralCommand(),
        ConvertCommand(),
    ):
        registry.register(command)
    return registry


__all__ = [
    "Command",
    "CommandRegistry",
    "CommandResult",
    "ConvertCommand",
    "SampleCommand",
    "SpectralCommand",
    "TileCommand",
    "TilePeriodicCommand",
    "VerifyCommand",
    "default_registry",
]
