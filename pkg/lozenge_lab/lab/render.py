"""SVG pictures of tilings, double-dimer superpositions and wired trees.

Coordinates are rounded before they are written, so the same object always
produces the same file.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import svgwrite

from lozenge_lab.dimers.double_dimer import LoopDecomposition
from lozenge_lab.dimers.hexlattice import (
    DimerConfig,
    Edge,
    lozenge_type,
    face_point,
    triangle_corners,
    triangle_point,
)
from lozenge_lab.errors import LabError
from lozenge_lab.trees.ust import WiredTree
from lozenge_lab.utils.file_handler import FileHandler

Point = Tuple[float, float]
Renderable = Union[DimerConfig, LoopDecomposition, WiredTree]

SCALE = 20.0
MARGIN = 10.0
LOZENGE_COLOURS = {"a": "#e4572e", "b": "#f3a712", "c": "#29335c"}
ORIENTATION_COLOURS = {1: "#1b998b", -1: "#c5283d", None: "#555555"}
PATH_COLOUR = "#000000"
TREE_COLOUR = "#2e4057"


def _lozenge_corners(edge: Edge) -> List[Point]:
    faces = set(triangle_corners(edge[0])) | set(triangle_corners(edge[1]))
    points = [face_point(f) for f in faces]
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)
    return sorted(points, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


class _Canvas:
    """Maps lattice coordinates to SVG pixels with the y axis pointing up."""

    def __init__(self, points: Iterable[Point]):
        points = list(points)
        if not points:
            raise LabError("Nothing to render")
        self.x0 = min(p[0] for p in points)
        self.y1 = max(p[1] for p in points)
        width = (max(p[0] for p in points) - self.x0) * SCALE + 2 * MARGIN
        height = (self.y1 - min(p[1] for p in points)) * SCALE + 2 * MARGIN
        self.drawing = svgwrite.Drawing(size=(round(width, 3), round(height, 3)), debug=False)

    def map(self, points: Sequence[Point]) -> List[Point]:
        return [
            (round((x - self.x0) * SCALE + MARGIN, 3), round((self.y1 - y) * SCALE + MARGIN, 3))
            for x, y in points
        ]

    def polygon(self, points: Sequence[Point], **style) -> None:
        self.drawing.add(self.drawing.polygon(self.map(points), **style))

    def polyline(self, points: Sequence[Point], **style) -> None:
        self.drawing.add(self.drawing.polyline(self.map(points), fill="none", **style))

    def tostring(self) -> str:
        return self.drawing.tostring()


def _render_tiling(m: DimerConfig) -> str:
    edges = m.sorted_edges()
    canvas = _Canvas(p for e in edges for p in _lozenge_corners(e))
    for edge in edges:
        canvas.polygon(_lozenge_corners(edge), fill=LOZENGE_COLOURS[lozenge_type(edge)],
                       stroke="#ffffff", stroke_width=1)
    return canvas.tostring()


def _render_decomposition(d: LoopDecomposition) -> str:
    triangles = sorted(d.domain.triangles)
    canvas = _Canvas(p for t in triangles for p in map(face_point, triangle_corners(t)))
    for t in triangles:
        canvas.polygon([face_point(f) for f in triangle_corners(t)], fill="none",
                       stroke="#dddddd", stroke_width=0.5)
    for edge in sorted(d.doubled):
        canvas.polyline([triangle_point(edge[0]), triangle_point(edge[1])],
                        stroke="#999999", stroke_width=1)
    for loop in d.loops:
        canvas.polygon([triangle_point(v) for v in loop.vertices], fill="none",
                       stroke=ORIENTATION_COLOURS[loop.orientation], stroke_width=2)
    for path in d.paths:
        canvas.polyline([triangle_point(v) for v in path.vertices],
                        stroke=PATH_COLOUR, stroke_width=3)
    return canvas.tostring()


def _render_tree(t: WiredTree) -> str:
    g = t.graph
    canvas = _Canvas(g.position(v) for v in g.vertices)
    for v in sorted(g.boundary, key=repr):
        x, y = canvas.map([g.position(v)])[0]
        canvas.drawing.add(canvas.drawing.circle(center=(x, y), r=1.5, fill="#888888"))
    for a, b in sorted(t.edges(), key=repr):
        canvas.polyline([g.position(a), g.position(b)], stroke=TREE_COLOUR, stroke_width=1.5)
    return canvas.tostring()


def render_svg(obj: Renderable, path: Union[str, Path]) -> Path:
    """Draw ``obj`` and write the SVG to ``path``.

    Tilings are drawn as lozenges coloured by their orientation class, a
    superposition as its loops (coloured by orientation) and paths, and a
    wired tree as its edges on top of the boundary vertices.
    """
    if isinstance(obj, DimerConfig):
        svg = _render_tiling(obj)
    elif isinstance(obj, LoopDecomposition):
        svg = _render_decomposition(obj)
    elif isinstance(obj, WiredTree):
        svg = _render_tree(obj)
    else:
        raise LabError(f"Cannot render {type(obj).__name__}")
    FileHandler().write(path, svg)
    return Path(path)
