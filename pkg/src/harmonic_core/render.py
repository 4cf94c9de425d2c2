"""Deterministic SVG rendering of a curve instance.

Output is SVG 1.1 built with ElementTree. Every coordinate is printed with six
decimals and attributes are emitted in a fixed order, so equal scenes give
byte-identical documents.
"""

from __future__ import annotations

import cmath
import math
import xml.etree.ElementTree as ET
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from harmonic_core.angles import AngleLike, as_radians
from harmonic_core.errors import DomainError

SVG_NS = "http://www.w3.org/2000/svg"
DEFAULT_VIEW_HALF_WIDTH = 1.6

# Polylines are kept from their first to their last point inside the view grown by this factor.
_CUT_MARGIN = 1.05


def fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


@dataclass(frozen=True)
class Style:
    """Colors and sizes; sizes are fractions of the view half-width."""

    curve_color: str = "#000000"
    curve_width: float = 0.006
    circle_color: str = "#606060"
    circle_width: float = 0.004
    root_color: str = "#000000"
    root_radius: float = 0.022
    gon_color: str = "#000000"
    gon_width: float = 0.004
    cross_size: float = 0.03
    gon_dash: str = "0.04 0.03"
    asymptote_color: str = "#909090"
    asymptote_width: float = 0.003
    legend_size: float = 0.06
    background: str = "#ffffff"


@dataclass(frozen=True)
class UnitCircleLayer:
    kind: str = field(default="circle", init=False)


@dataclass(frozen=True)
class RootsLayer:
    points: Tuple[complex, ...]
    kind: str = field(default="roots", init=False)


@dataclass(frozen=True)
class GonLayer:
    vertices: Tuple[complex, ...]
    kind: str = field(default="gon", init=False)


@dataclass(frozen=True)
class CurvesLayer:
    polylines: Tuple[Tuple[complex, ...], ...]
    kind: str = field(default="curves", init=False)


@dataclass(frozen=True)
class AsymptotesLayer:
    origin: complex
    angles: Tuple[float, ...]
    length: float
    kind: str = field(default="asymptotes", init=False)


@dataclass(frozen=True)
class LegendLayer:
    lines: Tuple[str, ...]
    kind: str = field(default="legend", init=False)


Layer = Union[UnitCircleLayer, RootsLayer, GonLayer, CurvesLayer, AsymptotesLayer, LegendLayer]


@dataclass(frozen=True)
class Scene:
    center: complex
    half_width: float
    layers: Tuple[Layer, ...]
    style: Style = Style()


class _Canvas:
    def __init__(self, scene: Scene) -> None:
        self.scene = scene
        self.w = scene.half_width
        self.style = scene.style

    def xy(self, z: complex) -> Tuple[str, str]:
        # SVG y grows downwards; flip so counterclockwise stays counterclockwise.
        return fmt(z.real), fmt(-z.imag)

    def size(self, frac: float) -> str:
        return fmt(frac * self.w)

    def points_attr(self, pts: Sequence[complex]) -> str:
        return " ".join(",".join(self.xy(z)) for z in pts)


def _draw_circle(parent: ET.Element, c: _Canvas) -> None:
    ET.SubElement(
        parent,
        "circle",
        {
            "class": "unit-circle",
            "cx": "0.000000",
            "cy": "0.000000",
            "r": "1.000000",
            "fill": "none",
            "stroke": c.style.circle_color,
            "stroke-width": c.size(c.style.circle_width),
        },
    )


def _draw_roots(parent: ET.Element, c: _Canvas, layer: RootsLayer) -> None:
    r = c.style.root_radius * c.w
    g = ET.SubElement(parent, "g", {"class": "roots", "fill": c.style.root_color, "stroke": "none"})
    for z in layer.points:
        y = c.xy(z)[1]
        d = f"M {fmt(z.real - r)} {y} a {fmt(r)} {fmt(r)} 0 1 0 {fmt(2 * r)} 0 a {fmt(r)} {fmt(r)} 0 1 0 {fmt(-2 * r)} 0 z"
        ET.SubElement(g, "path", {"class": "root-dot", "d": d})


def _draw_gon(parent: ET.Element, c: _Canvas, layer: GonLayer) -> None:
    g = ET.SubElement(
        parent,
        "g",
        {"class": "gon", "fill": "none", "stroke": c.style.gon_color, "stroke-width": c.size(c.style.gon_width)},
    )
    if len(layer.vertices) >= 2:
        dash = " ".join(fmt(float(v) * c.w) for v in c.style.gon_dash.split())
        ET.SubElement(g, "polygon", {"class": "gon-chords", "points": c.points_attr(layer.vertices), "stroke-dasharray": dash})
    s = c.style.cross_size * c.w
    for z in layer.vertices:
        x0, x1 = fmt(z.real - s), fmt(z.real + s)
        y0, y1 = fmt(-z.imag - s), fmt(-z.imag + s)
        ET.SubElement(g, "path", {"class": "gon-cross", "d": f"M {x0} {y0} L {x1} {y1} M {x0} {y1} L {x1} {y0}"})


def _draw_curves(parent: ET.Element, c: _Canvas, layer: CurvesLayer) -> None:
    g = ET.SubElement(
        parent,
        "g",
        {
            "class": "curves",
            "fill": "none",
            "stroke": c.style.curve_color,
            "stroke-width": c.size(c.style.curve_width),
            "stroke-linejoin": "round",
        },
    )
    for line in layer.polylines:
        if len(line) >= 2:
            ET.SubElement(g, "polyline", {"class": "curve", "points": c.points_attr(line)})


def _draw_asymptotes(parent: ET.Element, c: _Canvas, layer: AsymptotesLayer) -> None:
    g = ET.SubElement(
        parent,
        "g",
        {"class": "asymptotes", "stroke": c.style.asymptote_color, "stroke-width": c.size(c.style.asymptote_width)},
    )
    x1, y1 = c.xy(layer.origin)
    for a in layer.angles:
        x2, y2 = c.xy(layer.origin + layer.length * cmath.exp(1j * a))
        ET.SubElement(g, "line", {"class": "asymptote", "x1": x1, "y1": y1, "x2": x2, "y2": y2})


def _draw_legend(parent: ET.Element, c: _Canvas, layer: LegendLayer) -> None:
    size = c.style.legend_size * c.w
    x = fmt(c.scene.center.real - c.w + size)
    top = -c.scene.center.imag - c.w + 1.5 * size
    g = ET.SubElement(parent, "g", {"class": "legend", "font-family": "monospace", "font-size": fmt(size)})
    for i, text in enumerate(layer.lines):
        t = ET.SubElement(g, "text", {"x": x, "y": fmt(top + 1.3 * size * i)})
        t.text = text


_DRAW = {
    "circle": lambda parent, c, layer: _draw_circle(parent, c),
    "roots": _draw_roots,
    "gon": _draw_gon,
    "curves": _draw_curves,
    "asymptotes": _draw_asymptotes,
    "legend": _draw_legend,
}


def render_svg(scene: Scene) -> str:
    if not (math.isfinite(scene.half_width) and scene.half_width > 0.0):
        raise DomainError(f"degenerate window: half_width must be > 0, got {scene.half_width!r}")
    if not scene.layers:
        raise DomainError("scene has no layers")

    w = scene.half_width
    side = fmt(2.0 * w)
    root = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "version": "1.1",
            "viewBox": f"{fmt(scene.center.real - w)} {fmt(-scene.center.imag - w)} {side} {side}",
            "width": "800",
            "height": "800",
        },
    )
    root.append(ET.Comment(" y axis flipped: SVG y = -Im(z), so angles run counterclockwise as in the plane "))
    ET.SubElement(
        root,
        "rect",
        {"x": fmt(scene.center.real - w), "y": fmt(-scene.center.imag - w), "width": side, "height": side, "fill": scene.style.background},
    )
    canvas = _Canvas(scene)
    for layer in scene.layers:
        _DRAW[layer.kind](root, canvas, layer)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def cut_to_view(points: Sequence[complex], center: complex, half_width: float) -> Tuple[complex, ...]:
    """Points from the first to the last one inside the (slightly grown) view square."""
    lim = half_width * _CUT_MARGIN
    inside = [i for i, z in enumerate(points) if abs(z.real - center.real) <= lim and abs(z.imag - center.imag) <= lim]
    if not inside:
        return ()
    return tuple(points[inside[0]: inside[-1] + 1])


def figure_scene(
    roots: Sequence[complex],
    gon: Sequence[complex],
    polylines: Sequence[Sequence[complex]],
    *,
    theta: Optional[AngleLike] = None,
    asymptote_origin: Optional[complex] = None,
    asymptote_angles: Sequence[float] = (),
    half_width: float = DEFAULT_VIEW_HALF_WIDTH,
    legend: Sequence[str] = (),
    style: Style = Style(),
) -> Scene:
    """Unit circle, curve, gon and roots in the usual drawing order, curves cut to the view."""
    center = 0j
    cut = tuple(c for c in (cut_to_view(list(line), center, half_width) for line in polylines) if len(c) >= 2)
    layers: List[Layer] = [UnitCircleLayer()]
    if asymptote_angles:
        origin = 0j if asymptote_origin is None else complex(asymptote_origin)
        layers.append(AsymptotesLayer(origin=origin, angles=tuple(asymptote_angles), length=4.0 * half_width))
    layers.append(CurvesLayer(polylines=cut))
    layers.append(GonLayer(vertices=tuple(complex(v) for v in gon)))
    layers.append(RootsLayer(points=tuple(complex(z) for z in roots)))
    lines = list(legend)
    if theta is not None and not lines:
        lines = [f"n = {len(roots)}, theta = {as_radians(theta):.6f}"]
    if lines:
        layers.append(LegendLayer(lines=tuple(lines)))
    return Scene(center=center, half_width=float(half_width), layers=tuple(layers), style=style)


def _pt(z: complex) -> List[float]:
    return [z.real, z.imag]


def scene_to_dict(scene: Scene) -> Dict[str, Any]:
    layers: List[Dict[str, Any]] = []
    for layer in scene.layers:
        if isinstance(layer, UnitCircleLayer):
            layers.append({"kind": "circle"})
        elif isinstance(layer, RootsLayer):
            layers.append({"kind": "roots", "points": [_pt(z) for z in layer.points]})
        elif isinstance(layer, GonLayer):
            layers.append({"kind": "gon", "vertices": [_pt(z) for z in layer.vertices]})
        elif isinstance(layer, CurvesLayer):
            layers.append({"kind": "curves", "polylines": [[_pt(z) for z in line] for line in layer.polylines]})
        elif isinstance(layer, AsymptotesLayer):
            layers.append(
                {"kind": "asymptotes", "origin": _pt(layer.origin), "angles": list(layer.angles), "length": layer.length}
            )
        elif isinstance(layer, LegendLayer):
            layers.append({"kind": "legend", "lines": list(layer.lines)})
    return {
        "center": _pt(scene.center),
        "half_width": scene.half_width,
        "layers": layers,
        "style": asdict(scene.style),
    }


def scene_from_dict(d: Dict[str, Any]) -> Scene:
    def cz(v: Sequence[float]) -> complex:
        return complex(float(v[0]), float(v[1]))

    layers: List[Layer] = []
    for item in d.get("layers", []):
        kind = item.get("kind")
        if kind == "circle":
            layers.append(UnitCircleLayer())
        elif kind == "roots":
            layers.append(RootsLayer(points=tuple(cz(v) for v in item["points"])))
        elif kind == "gon":
            layers.append(GonLayer(vertices=tuple(cz(v) for v in item["vertices"])))
        elif kind == "curves":
            layers.append(CurvesLayer(polylines=tuple(tuple(cz(v) for v in line) for line in item["polylines"])))
        elif kind == "asymptotes":
            layers.append(
                AsymptotesLayer(origin=cz(item["origin"]), angles=tuple(float(a) for a in item["angles"]), length=float(item["length"]))
            )
        elif kind == "legend":
            layers.append(LegendLayer(lines=tuple(str(s) for s in item["lines"])))
        else:
            raise DomainError(f"unknown scene layer kind {kind!r}")
    style = Style(**d["style"]) if "style" in d else Style()
    return Scene(center=cz(d.get("center", [0.0, 0.0])), half_width=float(d["half_width"]), layers=tuple(layers), style=style)
