"""Arrow radii and discrete candidate positions for each edge of a drawing."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .geom import Circle, Point, circle_segment_overlap, circles_overlap, dist, dist_point_segment, lerp, point_along
from .model import ArrowPosition, CandidateSet, Digraph, Layout, LayoutError, VertexId

# Slack on the source-clearance test so a slot exactly at the limit survives rounding.
_CLEARANCE_RTOL = 1e-9


@dataclass(frozen=True)
class RadiusConfig:
    pct_shortest: float = 0.40
    pct_average: float = 0.25
    cap_px: float = 10.0
    floor_px: float = 3.0
    rv_equals_re: bool = True
    r_v: Optional[float] = None
    r_e: Optional[float] = None

    def __post_init__(self) -> None:
        if not (0 < self.floor_px <= self.cap_px):
            raise ValueError("need 0 < floor_px <= cap_px")
        for name in ("pct_shortest", "pct_average"):
            v = getattr(self, name)
            if not (0 < v < 1):
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


def radii_from_lengths(lengths: Sequence[float], cfg: RadiusConfig = RadiusConfig()) -> Tuple[float, float]:
    positive = [L for L in lengths if L > 0]
    if cfg.r_e is not None:
        r_e = cfg.r_e
    else:
        if not positive:
            raise LayoutError("cannot derive arrow radius: no edge has positive length")
        shortest = min(positive)
        average = sum(positive) / len(positive)
        r_e = max(cfg.floor_px, min(cfg.pct_shortest * shortest, cfg.pct_average * average, cfg.cap_px))
    if cfg.r_v is not None:
        r_v = cfg.r_v
    else:
        r_v = r_e if cfg.rv_equals_re else 0.0
    return r_v, r_e


def edge_lengths(graph: Digraph, pos: Mapping[VertexId, Point]) -> List[float]:
    return [dist(pos[e.source], pos[e.target]) for e in graph.edges]


def compute_radii(graph: Digraph, pos: Mapping[VertexId, Point], cfg: RadiusConfig = RadiusConfig()) -> Tuple[float, float]:
    """Return ``(r_v, r_e)``.

    ``r_e`` is the smallest of 40% of the shortest edge, 25% of the average
    edge and 10 px, but never below 3 px.  Zero-length edges are ignored.
    """
    return radii_from_lengths(edge_lengths(graph, pos), cfg)


def candidate_slots(source: Point, target: Point, r_v: float, r_e: float) -> List[Point]:
    """Slot centres at distance ``r_v + i*r_e`` from the target, i = 1, 2, ...

    Slots are kept while they stay at least ``r_v + r_e`` away from the source.
    """
    length = dist(source, target)
    clearance = r_v + r_e
    slack = _CLEARANCE_RTOL * max(length, 1.0)
    out = []
    i = 1
    while True:
        d_target = r_v + i * r_e
        if length - d_target < clearance - slack:
            break
        out.append(point_along(target, source, d_target))
        i += 1
    return out


def editor_center(source: Point, target: Point, r_v: float, r_e: float) -> Point:
    """The first slot next to the target, clamped onto the segment."""
    length = dist(source, target)
    return point_along(target, source, min(r_v + r_e, length))


class _ObstacleGrid:
    """Uniform grid over vertices and segments for slot validity queries.

    A segment is registered in every cell whose centre lies within
    ``half_diagonal + pad`` of it, so any point within ``pad`` of the segment
    finds it in its own cell.
    """

    def __init__(self, layout: Layout) -> None:
        self.layout = layout
        self.pad = layout.r_e
        self.cell = max(layout.r_e + layout.r_v, 1e-9)
        self.points: Dict[Tuple[int, int], List[Point]] = defaultdict(list)
        self.segments: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        for v in layout.graph.vertices:
            p = layout.pos[v]
            self.points[self._key(p)].append(p)
        half_diag = self.cell * math.sqrt(0.5)
        for g in layout.graph.edges:
            seg = layout.segment(g.id)
            x0, y0 = self._key(Point(min(seg.a.x, seg.b.x) - self.pad, min(seg.a.y, seg.b.y) - self.pad))
            x1, y1 = self._key(Point(max(seg.a.x, seg.b.x) + self.pad, max(seg.a.y, seg.b.y) + self.pad))
            for i in range(x0, x1 + 1):
                for j in range(y0, y1 + 1):
                    centre = Point((i + 0.5) * self.cell, (j + 0.5) * self.cell)
                    if dist_point_segment(centre, seg) <= half_diag + self.pad:
                        self.segments[(i, j)].append(g.id)

    def _key(self, p: Point) -> Tuple[int, int]:
        return math.floor(p.x / self.cell), math.floor(p.y / self.cell)

    def valid(self, c: Point, edge_id: int) -> bool:
        layout = self.layout
        arrow = Circle(c, layout.r_e)
        kx, ky = self._key(c)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for p in self.points.get((kx + dx, ky + dy), ()):
                    if circles_overlap(arrow, Circle(p, layout.r_v)):
                        return False
        for gid in self.segments.get((kx, ky), ()):
            if gid != edge_id and circle_segment_overlap(arrow, layout.segment(gid)):
                return False
        return True


def generate_candidates(layout: Layout) -> CandidateSet:
    """Filter the slots of every edge by vertex and edge overlap.

    Survivors are ranked 1.. by distance from the target.  An edge without
    survivors gets one invalid fallback: its first slot, or its midpoint when
    the edge is too short to carry any slot.

    Obstacles are looked up through a grid; the result equals testing every
    slot with :func:`arrowplace.model.is_valid_position`.
    """
    grid = _ObstacleGrid(layout)
    per_edge = []
    for e in layout.graph.edges:
        src = layout.pos[e.source]
        tgt = layout.pos[e.target]
        slots = candidate_slots(src, tgt, layout.r_v, layout.r_e)
        kept = [c for c in slots if grid.valid(c, e.id)]
        if kept:
            cands = tuple(ArrowPosition(e.id, c, k + 1, True) for k, c in enumerate(kept))
        elif slots:
            cands = (ArrowPosition(e.id, slots[0], 1, False),)
        else:
            cands = (ArrowPosition(e.id, lerp(src, tgt, 0.5), 1, False),)
        per_edge.append(cands)
    return CandidateSet(tuple(per_edge), layout.r_e)
