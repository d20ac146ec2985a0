"""Shared utilities for dimer-forge."""

from dimer_forge.utils.helpers import (
    Point,
    append_ndjson,
    complex_to_json,
    dumps_json,
    format_fraction,
    parse_fraction,
    read_ndjson,
    signed_area,
    write_json,
)

__all__ = [
    "Point",
    "append_ndjson",
    "complex_to_json",
    "dumps_json",
    "format_fraction",
    "parse_fraction",
    "read_ndjson",
    "signed_area",
    "write_json",
]
