"""SVG rendering of a drawing with its arrows.

The output flips the y axis so the picture has the same orientation as the
layout coordinates (y up).  Element classes: ``vertex``, ``edge``,
``arrow``, and optionally ``candidate``, ``conflict`` and ``overlap``.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Optional, Tuple

from .conflict import ConflictGraph
from .formats import fmt
from .geom import Point
from .model import CandidateSet, Layout, Placement, overlap_pairs

# half-angle between the apex direction and each base corner
ARROW_BASE_ANGLE = math.radians(140.0)


class RenderError(ValueError):
    pass


def arrow_triangle(center: Point, source: Point, target: Point, r_e: float) -> Tuple[Point, Point, Point]:
    """Isosceles triangle inscribed in the arrow circle, apex pointing to the target."""
    theta = math.atan2(target.y - source.y, target.x - source.x)
    pts = []
    for a in (0.0, ARROW_BASE_ANGLE, -ARROW_BASE_ANGLE):
        pts.append(Point(center.x + r_e * math.cos(theta + a), center.y + r_e * math.sin(theta + a)))
    return pts[0], pts[1], pts[2]


def render_svg(
    layout: Layout,
    placement: Optional[Placement] = None,
    candidates: Optional[CandidateSet] = None,
    conflicts: Optional[ConflictGraph] = None,
    show_candidates: bool = False,
    show_conflicts: bool = False,
    highlight_overlaps: bool = True,
    margin: Optional[float] = None,
) -> str:
    g = layout.graph
    if placement is not None and len(placement.choice) != g.m:
        raise RenderError(f"placement has {len(placement.choice)} arrows, layout has {g.m} edges")
    if show_candidates and candidates is None:
        raise RenderError("show_candidates needs a candidate set")
    if show_conflicts and (conflicts is None or candidates is None):
        raise RenderError("show_conflicts needs a conflict graph and its candidate set")
    r_e, r_v = layout.r_e, layout.r_v
    pad = margin if margin is not None else 2.0 * (r_e + r_v)
    xs = [p.x for p in layout.pos.values()] or [0.0]
    ys = [p.y for p in layout.pos.values()] or [0.0]
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad

    def X(p: Point) -> str:
        return fmt(p.x - x0)

    def Y(p: Point) -> str:
        return fmt(y1 - p.y)

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": fmt(x1 - x0),
        "height": fmt(y1 - y0),
        "viewBox": f"0 0 {fmt(x1 - x0)} {fmt(y1 - y0)}",
    })
    stroke = fmt(max(r_e / 10.0, 0.05))
    layer_edges = ET.SubElement(svg, "g", {"id": "edges"})
    for e in g.edges:
        a, b = layout.pos[e.source], layout.pos[e.target]
        ET.SubElement(layer_edges, "line", {
            "class": "edge", "data-edge": str(e.id),
            "x1": X(a), "y1": Y(a), "x2": X(b), "y2": Y(b),
            "stroke": "#555555", "stroke-width": stroke,
        })
    if show_conflicts:
        layer = ET.SubElement(svg, "g", {"id": "conflicts"})
        for i, j in conflicts.edge_pairs():
            a, b = conflicts.nodes[i].center, conflicts.nodes[j].center
            ET.SubElement(layer, "line", {
                "class": "conflict", "x1": X(a), "y1": Y(a), "x2": X(b), "y2": Y(b),
                "stroke": "#e08000", "stroke-width": stroke, "stroke-dasharray": "2,2",
            })
    if show_candidates:
        layer = ET.SubElement(svg, "g", {"id": "candidates"})
        for p in candidates.positions():
            ET.SubElement(layer, "circle", {
                "class": "candidate", "data-edge": str(p.edge), "data-rank": str(p.rank),
                "cx": X(p.center), "cy": Y(p.center), "r": fmt(r_e),
                "fill": "none", "stroke": "#3070c0" if p.valid else "#c03030",
                "stroke-width": stroke, "stroke-dasharray": "1,1",
            })
    # point vertices still get a visible dot
    vr = fmt(r_v if r_v > 0 else r_e / 5.0)
    layer_v = ET.SubElement(svg, "g", {"id": "vertices"})
    for v in g.vertices:
        p = layout.pos[v]
        ET.SubElement(layer_v, "circle", {
            "class": "vertex", "data-vertex": str(v),
            "cx": X(p), "cy": Y(p), "r": vr, "fill": "#dddddd", "stroke": "#222222", "stroke-width": stroke,
        })
    if placement is not None:
        hot = set()
        if highlight_overlaps:
            for i, j in overlap_pairs(placement, r_e):
                hot.update((i, j))
        if hot:
            layer = ET.SubElement(svg, "g", {"id": "overlaps"})
            for i in sorted(hot):
                c = placement.choice[i].center
                ET.SubElement(layer, "circle", {
                    "class": "overlap", "data-edge": str(i), "cx": X(c), "cy": Y(c), "r": fmt(r_e),
                    "fill": "#ff000033", "stroke": "#ff0000", "stroke-width": stroke,
                })
        layer_a = ET.SubElement(svg, "g", {"id": "arrows"})
        for e in g.edges:
            p = placement.choice[e.id]
            tri = arrow_triangle(p.center, layout.pos[e.source], layout.pos[e.target], r_e)
            ET.SubElement(layer_a, "polygon", {
                "class": "arrow", "data-edge": str(e.id),
                "points": " ".join(f"{X(q)},{Y(q)}" for q in tri),
                "fill": "#000000" if p.valid else "#c03030",
            })
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"
