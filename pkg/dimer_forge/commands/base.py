"""Base class for command-line commands."""

from __future__ import annotations

import argparse
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from dimer_forge.config.schema import Config
from dimer_forge.errors import FormatError


@dataclass
class CommandResult:
    """Result payload of a command; ``failures`` turn into exit code 1."""

    result: dict[str, Any] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


class Command(ABC):
    """A subcommand exposed by the ``dimer-forge`` entry point."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Subcommand name."""

    @property
    @abstractmethod
    def help(self) -> str:
        """One-line help text."""

    @abstractmethod
    def configure(self, parser: argparse.ArgumentParser) -> None:
        """Add command-specific arguments."""

    @abstractmethod
    def run(self, args: argparse.Namespace, config: Config) -> CommandResult:
        """Execute the command."""


def read_json_input(path: Path) -> dict[str, Any]:
    """Load an input file as a JSON object."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path} must contain a JSON object")
    return data


def is_segment_file(data: dict[str, Any]) -> bool:
    return "segments" in data and "edges" not in data


def parse_window(text: str) -> tuple[int, int]:
    """Parse ``JxK`` into a pair of positive integers."""
    try:
        cols, rows = (int(part) for part in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window must look like 10x10, got {text!r}") from exc
    if cols < 1 or rows < 1:
        raise argparse.ArgumentTypeError(f"window must be positive, got {text!r}")
    return cols, rows
