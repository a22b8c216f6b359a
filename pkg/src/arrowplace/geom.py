"""Planar primitives and the overlap predicates used for validity and conflicts.

Overlap is tested against the *open* disk: a circle and a segment (or two
circles) overlap when the segment enters the interior of the disk.  Touching
at a single point never counts.  A small signed tolerance keeps exact
tangencies stable under floating point.
"""

from __future__ import annotations

import math
import os
from typing import NamedTuple, Optional

EPS_ENV_VAR = "ARROWPLACE_EPS"
DEFAULT_EPS_SCALE = 1e-9


def env_eps_scale() -> float:
    """Tolerance scale from the environment, or the built-in default."""
    raw = os.environ.get(EPS_ENV_VAR)
    return DEFAULT_EPS_SCALE if raw is None else float(raw)


_eps_scale = env_eps_scale()


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)


class Circle(NamedTuple):
    center: Point
    radius: float


def set_eps_scale(scale: float) -> None:
    """Set the relative tolerance used when callers pass ``eps=None``."""
    global _eps_scale
    if not (scale >= 0.0 and math.isfinite(scale)):
        raise ValueError(f"eps scale must be finite and >= 0, got {scale!r}")
    _eps_scale = float(scale)


def get_eps_scale() -> float:
    return _eps_scale


def default_eps(scale: float) -> float:
    return _eps_scale * max(scale, 1.0)


def dist(p: Point, q: Point) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def closest_point_on_segment(p: Point, s: Segment) -> Point:
    ax, ay = s.a
    dx = s.b.x - ax
    dy = s.b.y - ay
    den = dx * dx + dy * dy
    if den == 0.0:
        return s.a
    t = ((p.x - ax) * dx + (p.y - ay) * dy) / den
    t = min(1.0, max(0.0, t))
    return Point(ax + t * dx, ay + t * dy)


def dist_point_segment(p: Point, s: Segment) -> float:
    """Distance from ``p`` to the closest point of ``s`` (degenerate ``s`` is a point)."""
    return dist(p, closest_point_on_segment(p, s))


def circles_overlap(c1: Circle, c2: Circle, eps: Optional[float] = None) -> bool:
    reach = c1.radius + c2.radius
    if eps is None:
        eps = default_eps(reach)
    return dist(c1.center, c2.center) < reach - eps


def circle_segment_overlap(c: Circle, s: Segment, eps: Optional[float] = None) -> bool:
    if eps is None:
        eps = default_eps(c.radius)
    return dist_point_segment(c.center, s) < c.radius - eps


def point_along(a: Point, b: Point, t: float) -> Point:
    """Point at distance ``t`` from ``a`` towards ``b``."""
    length = dist(a, b)
    if length == 0.0:
        return a
    f = t / length
    return Point(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))


def lerp(a: Point, b: Point, f: float) -> Point:
    return Point(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
