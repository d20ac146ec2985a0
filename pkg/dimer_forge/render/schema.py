"""Validation of JSON reports against the shipped report schema."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any

_TYPE_MAP: dict[str, type[Any] | tuple[type[Any], ...]] = {
    "string": str,
    "integer": int,
    "number": (int, float),
    "boolean": bool,
    "array": list,
    "object": dict,
    "null": type(None),
}


@lru_cache(maxsize=1)
def report_schema() -> dict[str, Any]:
    """Load ``schemas/report.schema.json`` from the package."""
    text = resources.files("dimer_forge").joinpath("schemas/report.schema.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


def validate(value: Any, schema: dict[str, Any], path: str = "") -> list[str]:
    """Return the violations of ``value`` against a schema using type, enum, required,
    properties, items and minLength."""
    t_raw = schema.get("type")
    t = t_raw if isinstance(t_raw, str) else ""
    label = path or "report"
    expected = _TYPE_MAP.get(t)
    if expected is not None and not isinstance(value, expected):
        return [f"{label} should be {t}"]
    if t in ("integer", "number") and isinstance(value, bool):
        return [f"{label} should be {t}"]

    errors: list[str] = []
    if "enum" in schema and value not in schema["enum"]:
        errors.append(f"{label} must be one of {schema['enum']}")
    if t == "string" and "minLength" in schema and len(value) < schema["minLength"]:
        errors.append(f"{label} must be at least {schema['minLength']} chars")
    if t == "object":
        props = schema.get("properties", {})
        for key in schema.get("required", []):
            if key not in value:
                errors.append(f"missing required {path + '.' + key if path else key}")
        for key, nested in value.items():
            if key in props:
                errors.extend(validate(nested, props[key], f"{path}.{key}" if path else key))
    if t == "array" and "items" in schema:
        for index, item in enumerate(value):
            errors.extend(validate(item, schema["items"], f"{label}[{index}]"))
    return errors


def validate_report(report: dict[str, Any]) -> list[str]:
    return validate(report, report_schema())
