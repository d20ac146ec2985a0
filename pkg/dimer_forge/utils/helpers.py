"""Common helper functions."""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

Point = tuple[float, float]


def parse_fraction(value: Any) -> Fraction:
    """Parse an int, a decimal number or a "p/q" string into an exact rational."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction | int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"expected a finite number, got {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational {value!r}") from exc
    raise ValueError(f"expected a number, got {value!r}")


def format_fraction(value: Fraction) -> str:
    """Format a rational as "p/q", or "p" when the denominator is one."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def complex_to_json(value: complex) -> list[float]:
    """Encode a complex number as a [re, im] pair."""
    return [float(value.real), float(value.imag)]


def signed_area(points: Sequence[Point]) -> float:
    """Return the shoelace signed area, positive for counterclockwise polygons."""
    total = 0.0
    count = len(points)
    for index in range(count):
        x0, y0 = points[index]
        x1, y1 = points[(index + 1) % count]
        total += x0 * y1 - x1 * y0
    return total / 2.0


def dumps_json(payload: Any) -> str:
    """Serialize a report deterministically."""
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, payload: Any) -> None:
    """Write a report as deterministic JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(payload), encoding="utf-8")


def append_ndjson(path: Path, records: Iterable[dict[str, Any]]) -> int:
    """Append one JSON record per line and return the number written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("a", encoding="utf-8") as file:
        for record in records:
            file.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count


def read_ndjson(path: Path) -> list[dict[str, Any]]:
    """Load NDJSON records, skipping blank lines."""
    if not path.exists():
        return []
    rows: list[dict[str, Any]] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows
