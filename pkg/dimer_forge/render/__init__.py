"""SVG output and report validation."""

from dimer_forge.render.schema import report_schema, validate, validate_report
from dimer_forge.render.svg import (
    RenderStyle,
    Scene,
    render_svg,
    scene_from_patch,
    scene_from_psi,
    scene_from_tgraph,
)

__all__ = [
    "RenderStyle",
    "Scene",
    "render_svg",
    "report_schema",
    "scene_from_patch",
    "scene_from_psi",
    "scene_from_tgraph",
    "validate",
    "validate_report",
]
