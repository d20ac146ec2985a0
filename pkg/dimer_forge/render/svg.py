"""Deterministic SVG drawings of T-graphs, psi images and periodic patches."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections.abc import Sequence
from dataclasses import dataclass, field

from dimer_forge.config.schema import RenderConfig
from dimer_forge.construct.psi import PsiMapping
from dimer_forge.periodic.patch import AlmostPeriodicPatch
from dimer_forge.tgraph.geometry import to_float
from dimer_forge.tgraph.tgraph import TGraph
from dimer_forge.utils.helpers import Point

SVG_NAMESPACE = "http://www.w3.org/2000/svg"

DEFAULT_PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


@dataclass(frozen=True)
class RenderStyle:
    stroke_width: float = 1.5
    palette: tuple[str, ...] = DEFAULT_PALETTE
    canvas_size: int = 800
    margin: int = 20
    stroke: str = "#222222"
    root_color: str = "#d62728"
    root_radius: float = 4.0
    fill_opacity: float = 0.8

    @classmethod
    def from_config(cls, config: RenderConfig) -> RenderStyle:
        return cls(
            stroke_width=config.stroke_width,
            canvas_size=config.canvas_size,
            margin=config.margin,
        )

    def fill(self, key: int) -> str:
        return self.palette[key % len(self.palette)]


@dataclass(frozen=True)
class Scene:
    """Face polygons keyed by white id, complete edges and root points in model coordinates."""

    polygons: tuple[tuple[int, tuple[Point, ...]], ...] = ()
    segments: tuple[tuple[Point, Point], ...] = ()
    roots: tuple[Point, ...] = ()
    notes: dict[str, str] = field(default_factory=dict)

    def points(self) -> list[Point]:
        found = [point for _, polygon in self.polygons for point in polygon]
        found.extend(point for segment in self.segments for point in segment)
        found.extend(self.roots)
        return found


def _pair(value: complex) -> Point:
    return value.real, value.imag


def scene_from_tgraph(graph: TGraph) -> Scene:
    """Faces become white regions (white id n + face id); outer faces close along the hull chord."""
    polygons = tuple(
        (graph.n + face.id, face.polygon) for face in graph.faces if len(face.polygon) >= 2
    )
    segments = tuple((to_float(segment.p), to_float(segment.q)) for segment in graph.segments)
    roots = tuple(to_float(graph.vertices[root].position) for root in graph.roots)
    return Scene(polygons, segments, roots, {"ambient": graph.ambient})


def scene_from_psi(psi: PsiMapping) -> Scene:
    polygons = tuple(
        (white, tuple(_pair(point) for point in points))
        for white, points in sorted(psi.white_polygons.items())
    )
    roots = tuple(_pair(vertex) for vertex in psi.polygon.vertices)
    return Scene(polygons, tuple(psi.segment_list()), roots, {"b0": str(psi.b0)})


def scene_from_patch(patch: AlmostPeriodicPatch) -> Scene:
    polygons = tuple(
        (white, tuple(_pair(point) for point in points))
        for (white, _), points in sorted(patch.white_polygons.items())
    )
    segments = tuple((_pair(p), _pair(q)) for _, (p, q) in sorted(patch.segments.items()))
    return Scene(polygons, segments, (), {"window": f"{patch.window[0]}x{patch.window[1]}"})


def _format(value: float) -> str:
    text = f"{value:.4f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


class _Viewport:
    """Uniform scaling into the canvas with the y axis pointing up."""

    def __init__(self, points: Sequence[Point], style: RenderStyle) -> None:
        xs = [x for x, _ in points] or [0.0]
        ys = [y for _, y in points] or [0.0]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys), 1e-12)
        self.margin = style.margin
        self.scale = (style.canvas_size - 2 * style.margin) / span

    def __call__(self, point: Point) -> tuple[str, str]:
        x = self.margin + (point[0] - self.x0) * self.scale
        y = self.margin + (self.y1 - point[1]) * self.scale
        return _format(x), _format(y)


def render_svg(scene: Scene, style: RenderStyle | None = None, seed: int | None = None) -> str:
    """One polygon per white face, one line per complete edge, one circle per root."""
    style = style or RenderStyle()
    size = str(style.canvas_size)
    root = ET.Element(
        "svg",
        xmlns=SVG_NAMESPACE,
        version="1.1",
        width=f"{size}px",
        height=f"{size}px",
        viewBox=f"0 0 {size} {size}",
    )
    header = " ".join(f"{key}={value}" for key, value in sorted(scene.notes.items()))
    root.append(ET.Comment(f" dimer-forge seed={seed if seed is not None else 'none'} {header} "))
    view = _Viewport(scene.points(), style)

    faces = ET.SubElement(root, "g", id="faces", stroke="none")
    for key, polygon in scene.polygons:
        ET.SubElement(
            faces,
            "polygon",
            points=" ".join(",".join(view(point)) for point in polygon),
            fill=style.fill(key),
            **{"fill-opacity": _format(style.fill_opacity), "data-white": str(key)},
        )

    edges = ET.SubElement(
        root, "g", id="segments", stroke=style.stroke,
        **{"stroke-width": _format(style.stroke_width), "stroke-linecap": "round"},
    )
    for p, q in scene.segments:
        (x1, y1), (x2, y2) = view(p), view(q)
        ET.SubElement(edges, "line", x1=x1, y1=y1, x2=x2, y2=y2)

    marks = ET.SubElement(root, "g", id="roots", fill=style.root_color)
    for point in scene.roots:
        cx, cy = view(point)
        ET.SubElement(marks, "circle", cx=cx, cy=cy, r=_format(style.root_radius))

    return ET.tostring(root, encoding="unicode") + "\n"
