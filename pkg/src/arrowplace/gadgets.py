"""Geometric building blocks of the arrow-placement hardness reduction.

Gadgets are straight-line drawings with point vertices (``r_v = 0``) whose
arrows have explicit candidate centres instead of the slot grid used for
ordinary drawings.  Every edge's candidates are derived from its continuous
feasible set: the parameters along the edge where an arrow overlaps no
vertex, no other edge, and no arrow that is forced (an edge whose feasible
set is a single point).  Two-candidate edges take the two extremes of that
interval.  One extreme is labelled ``solid`` and the other ``dashed``; a
placement using only solid (or only dashed) positions is overlap free.

Dimensions, with ``r`` the arrow radius:

* triangle side ``2*sqrt(3)*r``;
* trapezoid minor base ``2*sqrt(3)*r``, height ``r*(1 + sqrt(2)/2)``,
  major base ``height + minor``, diagonal ``sqrt(2)*height``;
* the special clause edge ``e*`` has length ``r*(4*sqrt(3) - 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .geom import Point, Segment, dist
from .model import ArrowPosition, CandidateSet, Digraph, Edge, Layout

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

SOLID = "solid"
DASHED = "dashed"
UNIQUE = "unique"
SAMPLE = "sample"


def triangle_side(r_e: float) -> float:
    return 2.0 * SQRT3 * r_e


def trapezoid_height(r_e: float) -> float:
    return r_e * (1.0 + SQRT2 / 2.0)


def e_star_length(r_e: float) -> float:
    return r_e * (4.0 * SQRT3 - 2.0)


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class GadgetAssembly:
    """A gadget drawing with explicit candidates.

    ``labels[e][k]`` names candidate ``k`` (rank ``k+1``) of edge ``e``.
    ``groups`` maps names such as ``"leg.left"`` or ``"e_star"`` to edge ids.
    """

    kind: str
    layout: Layout
    candidates: CandidateSet
    labels: Tuple[Tuple[str, ...], ...]
    groups: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def r_e(self) -> float:
        return self.layout.r_e

    def rank_of(self, edge: int, label: str) -> int:
        try:
            return self.labels[edge].index(label) + 1
        except ValueError:
            raise KeyError(f"edge {edge} has no {label} candidate") from None

    def position(self, edge: int, label: str) -> ArrowPosition:
        return self.candidates[edge][self.rank_of(edge, label) - 1]

    def uniform(self, label: str, edges: Optional[Iterable[int]] = None) -> Dict[int, int]:
        """Edge -> rank map choosing ``label`` on every edge that has it."""
        ids = range(len(self.labels)) if edges is None else edges
        return {e: self.labels[e].index(label) + 1 for e in ids if label in self.labels[e]}


# ---------------------------------------------------------------------------
# feasible intervals along an edge
# ---------------------------------------------------------------------------


def _disk_interval(a: Point, u: Tuple[float, float], c: Point, radius: float) -> Optional[Tuple[float, float]]:
    wx, wy = a.x - c.x, a.y - c.y
    b = u[0] * wx + u[1] * wy
    disc = b * b - (wx * wx + wy * wy - radius * radius)
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    return -b - root, -b + root


def _linear_range(c0: float, c1: float, lo: float, hi: float) -> Optional[Tuple[float, float]]:
    """``{t : lo < c0 + c1*t < hi}`` as an interval, or None."""
    if c1 == 0.0:
        return (-math.inf, math.inf) if lo < c0 < hi else None
    t0, t1 = (lo - c0) / c1, (hi - c0) / c1
    return (t0, t1) if t0 < t1 else (t1, t0)


def _band_interval(a: Point, u: Tuple[float, float], s: Segment, radius: float) -> Optional[Tuple[float, float]]:
    length = s.length
    if length == 0.0:
        return None
    vx, vy = (s.b.x - s.a.x) / length, (s.b.y - s.a.y) / length
    wx, wy = a.x - s.a.x, a.y - s.a.y
    along = _linear_range(wx * vx + wy * vy, u[0] * vx + u[1] * vy, 0.0, length)
    across = _linear_range(-wx * vy + wy * vx, -u[0] * vy + u[1] * vx, -radius, radius)
    if along is None or across is None:
        return None
    lo, hi = max(along[0], across[0]), min(along[1], across[1])
    return (lo, hi) if lo < hi else None


def _segment_interval(a: Point, u: Tuple[float, float], s: Segment, radius: float) -> Optional[Tuple[float, float]]:
    # the radius-neighbourhood of a segment is convex, so its trace on a line is one interval
    parts = [p for p in (_disk_interval(a, u, s.a, radius), _disk_interval(a, u, s.b, radius),
                         _band_interval(a, u, s, radius)) if p is not None]
    if not parts:
        return None
    return min(p[0] for p in parts), max(p[1] for p in parts)


def feasible_intervals(
    seg: Segment,
    points: Sequence[Point],
    segments: Sequence[Segment],
    disks: Sequence[Tuple[Point, float]],
    r_e: float,
    tol: float,
) -> List[Tuple[float, float]]:
    """Closed parameter intervals on ``seg`` where an arrow of radius ``r_e`` fits.

    ``points`` are point vertices, ``segments`` other edges and ``disks``
    ``(centre, reach)`` pairs an arrow centre must stay ``reach`` away from.
    Forbidden sets are open, so tangent positions remain feasible.  Gaps
    shorter than ``tol`` collapse to single points.
    """
    length = seg.length
    u = ((seg.b.x - seg.a.x) / length, (seg.b.y - seg.a.y) / length)
    forbidden = []
    for p in points:
        iv = _disk_interval(seg.a, u, p, r_e)
        if iv:
            forbidden.append(iv)
    for s in segments:
        iv = _segment_interval(seg.a, u, s, r_e)
        if iv:
            forbidden.append(iv)
    for c, reach in disks:
        iv = _disk_interval(seg.a, u, c, reach)
        if iv:
            forbidden.append(iv)
    forbidden.sort()
    pieces = []
    cur = 0.0
    for lo, hi in forbidden:
        if hi <= cur:
            continue
        if lo >= cur - tol and cur <= length:
            pieces.append((cur, min(max(cur, lo), length)))
        cur = max(cur, hi)
    if cur <= length + tol:
        pieces.append((min(cur, length), length))
    return pieces


# ---------------------------------------------------------------------------
# assembly builder
# ---------------------------------------------------------------------------


@dataclass
class _EdgeSpec:
    a: Point
    b: Point
    solid_end: Optional[Point]
    group: str
    sampled: bool = False


class GadgetBuilder:
    """Collects segments (deduplicated) and derives the explicit candidates."""

    def __init__(self, r_e: float, sample_count: Optional[int] = None):
        if not r_e > 0:
            raise GadgetError("r_e must be positive")
        self.r_e = r_e
        # sampled edges: spacing r/4 by default, or this many evenly spaced points
        self.sample_count = sample_count
        self._tol = 1e-7 * r_e
        self._vertices: List[Point] = []
        self._vertex_index: Dict[Tuple[int, int], int] = {}
        self._edges: List[_EdgeSpec] = []
        self._edge_index: Dict[Tuple[int, int], int] = {}
        self._groups: Dict[str, List[int]] = {}

    def _vkey(self, p: Point) -> Tuple[int, int]:
        q = 1e-6 * self.r_e
        return round(p.x / q), round(p.y / q)

    def vertex(self, p: Point) -> int:
        key = self._vkey(p)
        if key not in self._vertex_index:
            self._vertex_index[key] = len(self._vertices)
            self._vertices.append(p)
        return self._vertex_index[key]

    def edge(self, a: Point, b: Point, solid_end: Optional[Point] = None, group: str = "", sampled: bool = False) -> int:
        va, vb = self.vertex(a), self.vertex(b)
        if va == vb:
            raise GadgetError("degenerate gadget edge")
        key = (min(va, vb), max(va, vb))
        if key in self._edge_index:
            e = self._edge_index[key]
            es = self._edges[e]
            if solid_end is not None and es.solid_end is not None:
                if self.vertex(solid_end) != self.vertex(es.solid_end):
                    raise GadgetError(f"shared edge {e} gets contradicting solid ends")
        else:
            e = len(self._edges)
            self._edge_index[key] = e
            self._edges.append(_EdgeSpec(self._vertices[va], self._vertices[vb], solid_end, group, sampled))
        if group:
            self._groups.setdefault(group, [])
            if e not in self._groups[group]:
                self._groups[group].append(e)
        return e

    def build(self, kind: str) -> GadgetAssembly:
        r = self.r_e
        segs = [Segment(s.a, s.b) for s in self._edges]
        others = [[t for j, t in enumerate(segs) if j != i] for i in range(len(segs))]
        base = [feasible_intervals(segs[i], self._vertices, others[i], (), r, self._tol) for i in range(len(segs))]
        forced: Dict[int, Point] = {}
        for i, pieces in enumerate(base):
            if not pieces:
                raise GadgetError(f"edge {i} admits no valid position")
            if len(pieces) == 1 and pieces[0][1] - pieces[0][0] <= self._tol:
                t = 0.5 * (pieces[0][0] + pieces[0][1])
                forced[i] = _at(segs[i], t)
        per_edge = []
        labels = []
        for i, es in enumerate(self._edges):
            seg = segs[i]
            if i in forced:
                centres, names = [forced[i]], [UNIQUE]
            else:
                disks = [(c, 2.0 * r) for j, c in forced.items() if j != i]
                pieces = feasible_intervals(seg, self._vertices, others[i], disks, r, self._tol)
                if es.sampled:
                    ts = self._samples(pieces)
                    centres, names = [_at(seg, t) for t in ts], [SAMPLE] * len(ts)
                else:
                    if len(pieces) != 1 or pieces[0][1] - pieces[0][0] <= self._tol:
                        raise GadgetError(f"edge {i} ({es.group}) has feasible set {pieces}, expected one interval")
                    lo, hi = pieces[0]
                    ends = [_at(seg, lo), _at(seg, hi)]
                    if es.solid_end is None:
                        names = [SOLID, DASHED]
                    else:
                        near_lo = dist(ends[0], es.solid_end) < dist(ends[1], es.solid_end)
                        names = [SOLID, DASHED] if near_lo else [DASHED, SOLID]
                    centres = ends
            # rank 1 is closest to the target endpoint b
            order = sorted(range(len(centres)), key=lambda k: dist(centres[k], seg.b))
            per_edge.append(tuple(ArrowPosition(i, centres[k], n + 1, True) for n, k in enumerate(order)))
            labels.append(tuple(names[k] for k in order))
        graph = Digraph(
            tuple(range(len(self._vertices))),
            tuple(Edge(i, self.vertex(s.a), self.vertex(s.b)) for i, s in enumerate(self._edges)),
        )
        layout = Layout(graph, {i: p for i, p in enumerate(self._vertices)}, 0.0, r)
        return GadgetAssembly(kind, layout, CandidateSet(tuple(per_edge), r), tuple(labels),
                              {k: tuple(v) for k, v in self._groups.items()})


    def _samples(self, pieces: Sequence[Tuple[float, float]]) -> List[float]:
        if self.sample_count is None:
            return [t for lo, hi in pieces for t in _grid(lo, hi, self.r_e / 4.0, self._tol)]
        total = sum(hi - lo for lo, hi in pieces)
        step = total / max(self.sample_count - 1, 1)
        return [t for lo, hi in pieces for t in _grid(lo, hi, step, self._tol)]


def _at(seg: Segment, t: float) -> Point:
    f = t / seg.length
    return Point(seg.a.x + f * (seg.b.x - seg.a.x), seg.a.y + f * (seg.b.y - seg.a.y))


def _grid(lo: float, hi: float, step: float, tol: float) -> List[float]:
    out = []
    k = 0
    while lo + k * step < hi - tol:
        out.append(lo + k * step)
        k += 1
    out.append(hi)
    return out


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------


def _mirror(p: Point, axis_x: Optional[float]) -> Point:
    return p if axis_x is None else Point(2.0 * axis_x - p.x, p.y)


def add_triangle(b: GadgetBuilder, base_mid: Point, flip: bool, group: str = "triangle",
                 invert: bool = False, mirror_x: Optional[float] = None) -> List[int]:
    """Equilateral triangle on a horizontal base centred at ``base_mid``.

    The apex points up, or down when ``flip``.  Solid positions sit at the
    head of each side when walking counter-clockwise around an upright
    triangle, and at the tail for a flipped one, so that triangles sharing
    a side agree.  ``invert`` swaps solid and dashed; ``mirror_x`` reflects
    the block (labels included) about a vertical line.
    """
    r = b.r_e
    s = triangle_side(r)
    height = 1.5 * s / SQRT3
    left = Point(base_mid.x - s / 2.0, base_mid.y)
    right = Point(base_mid.x + s / 2.0, base_mid.y)
    apex = Point(base_mid.x, base_mid.y - height if flip else base_mid.y + height)
    if not flip:
        sides = [(left, right, right), (right, apex, apex), (apex, left, left)]
    else:
        sides = [(apex, right, apex), (right, left, right), (left, apex, left)]
    out = []
    for p, q, solid in sides:
        if invert:
            solid = q if solid == p else p
        out.append(b.edge(_mirror(p, mirror_x), _mirror(q, mirror_x), _mirror(solid, mirror_x), group))
    return out


def make_triangle_block(base_mid: Point = Point(0.0, 0.0), flip: bool = False, r_e: float = 1.0) -> GadgetAssembly:
    b = GadgetBuilder(r_e)
    add_triangle(b, base_mid, flip)
    return b.build("triangle")


def add_triangle_chain(b: GadgetBuilder, k: int, origin: Point, group: str, invert: bool = False,
                       mirror_x: Optional[float] = None) -> List[int]:
    """``k`` triangles in a row; the even ones are flipped and share their slanted sides.

    ``origin`` is the left end of the first base.
    """
    r = b.r_e
    s = triangle_side(r)
    height = 1.5 * s / SQRT3
    edges: List[int] = []
    for i in range(1, k + 1):
        flip = i % 2 == 0
        mid = Point(origin.x + i * s / 2.0, origin.y + (height if flip else 0.0))
        for e in add_triangle(b, mid, flip, group, invert, mirror_x):
            if e not in edges:
                edges.append(e)
    return edges


def make_variable_chain(k: int = 5, origin: Point = Point(0.0, 0.0), r_e: float = 1.0) -> GadgetAssembly:
    """Variable gadget: an odd chain of ``k >= 5`` triangles (``2k+1`` edges)."""
    if k < 5 or k % 2 == 0:
        raise GadgetError(f"variable chain needs an odd k >= 5, got {k}")
    b = GadgetBuilder(r_e)
    add_triangle_chain(b, k, origin, "variable")
    return b.build("variable")


def add_trapezoid(b: GadgetBuilder, level: int, right: bool, anchor: Point, group: str,
                  minor_len: Optional[float] = None, with_minor: bool = False,
                  minor_group: Optional[str] = None, sampled: bool = False, invert: bool = False,
                  mirror_x: Optional[float] = None) -> Tuple[int, int, Optional[int]]:
    """Trapezoid ``level`` (0-based) of a leg whose bottom-left corner is ``anchor``.

    Left trapezoids have the diagonal on the left, right ones on the right;
    the vertical side is never drawn.  Returns (major base, diagonal, minor
    base or None).  Solid labels alternate between levels: odd bases (1st,
    3rd, ...) are solid on the right, even ones on the left.  ``invert`` and
    ``mirror_x`` act as in :func:`add_triangle`.
    """
    r = b.r_e
    s = triangle_side(r)
    h = trapezoid_height(r)
    y0 = anchor.y + level * h
    y1 = y0 + h
    ax = anchor.x

    def edge(p: Point, q: Point, solid: Optional[Point], grp: str, smp: bool = False) -> int:
        if solid is not None and invert:
            solid = q if solid == p else p
        m = lambda z: _mirror(z, mirror_x)
        return b.edge(m(p), m(q), None if solid is None else m(solid), grp, smp)

    if not right:
        q3, q5 = Point(ax, y0), Point(ax + h + s, y0)
        q1 = Point(ax + h, y1)
        major = edge(q3, q5, q5 if level % 2 == 0 else q3, group)
    else:
        q3, q5 = Point(ax + 2 * h + s, y0), Point(ax + h, y0)
        q1 = Point(ax + h + s, y1)
        major = edge(q5, q3, q3 if level % 2 == 0 else q5, group)
    diag = edge(q3, q1, None, group)
    minor = None
    if with_minor:
        length = s if minor_len is None else minor_len
        p, q = Point(ax + h, y1), Point(ax + h + length, y1)
        solid = q if (level + 1) % 2 == 0 else p
        minor = edge(p, q, None if sampled else solid, minor_group or group, sampled)
    return major, diag, minor


def add_leg(b: GadgetBuilder, k: int, anchor: Point, group: str, top_len: Optional[float] = None,
            top_group: Optional[str] = None, sampled_top: bool = False, invert: bool = False,
            mirror_x: Optional[float] = None) -> List[int]:
    """Vertical chain of ``k`` trapezoids, left and right alternating from the bottom."""
    edges: List[int] = []
    for level in range(k):
        top = level == k - 1
        major, diag, minor = add_trapezoid(b, level, level % 2 == 1, anchor, group,
                                           minor_len=top_len if top else None, with_minor=top,
                                           minor_group=top_group, sampled=sampled_top and top,
                                           invert=invert, mirror_x=mirror_x)
        edges.extend([major, diag])
        if minor is not None:
            edges.append(minor)
    return edges


def make_leg_chain(k: int = 3, anchor: Point = Point(0.0, 0.0), r_e: float = 1.0) -> GadgetAssembly:
    """Clause leg: ``k`` (odd) stacked trapezoids, ``2k+1`` edges."""
    if k < 1 or k % 2 == 0:
        raise GadgetError(f"leg chain needs an odd k >= 1, got {k}")
    b = GadgetBuilder(r_e)
    add_leg(b, k, anchor, "leg")
    return b.build("leg")


def make_trapezoid_block(right: bool = False, anchor: Point = Point(0.0, 0.0), r_e: float = 1.0) -> GadgetAssembly:
    """A single trapezoid with its minor base drawn."""
    b = GadgetBuilder(r_e)
    add_trapezoid(b, 0, right, anchor, "trapezoid", with_minor=True)
    return b.build("trapezoid")


CLAUSE_LEGS = ("left", "middle", "right")


def _bottom_base_mid(k: int, anchor: Point, r_e: float, mirror_x: Optional[float] = None) -> float:
    """x of the point halfway between the two candidates of a leg's bottom base."""
    leg = GadgetBuilder(r_e)
    add_leg(leg, k, anchor, "leg", mirror_x=mirror_x)
    asm = leg.build("leg")
    bottom = asm.groups["leg"][0]
    a, b = asm.candidates[bottom]
    return 0.5 * (a.center.x + b.center.x)


def make_clause_gadget(
    leg_attach: Sequence[bool] = (False, False, False),
    r_e: float = 1.0,
    chain_len: int = 9,
    leg_k: int = 3,
    stubs: bool = True,
    stub_k: int = 5,
    star_samples: Optional[int] = None,
) -> GadgetAssembly:
    """Single clause: two horizontal triangle chains, three legs and e*.

    The chains share the line ``y = 0``; the right chain is the mirror image
    of the left one with solid and dashed swapped, separated so that the
    slanted edges facing each other carry tangent arrows around ``p``.  Legs
    hang below at distance ``d = r(1 + sqrt(2)/2)``.  The left leg sits under
    the first triangle of the left chain, the right leg under the outermost
    triangle of the right chain, and the middle leg's long top base, ``e*``,
    is centred under ``p``.  ``e*`` carries arrows sampled every ``r/4``
    along its feasible sub-segment (or ``star_samples`` evenly spaced ones).

    With ``stubs`` each leg ends on a short variable chain one more
    distance ``d`` below; ``leg_attach[i]`` tells whether leg ``i`` carries a
    negated literal (attached under an upside-down triangle's base) or a
    plain one (attached under the vertex between two such bases).

    Leg labels are oriented so that a leg is dashed exactly when it
    transmits false; all three dashed leaves ``e*`` without an arrow
    position free of overlaps.  Edge groups: ``chain.left``, ``chain.right``,
    ``leg.<name>``, ``leg.<name>.bottom``, ``e_star`` and ``var.<name>``.
    """
    if len(leg_attach) != 3:
        raise GadgetError("leg_attach needs one flag per leg")
    if chain_len < 1 or chain_len % 2 == 0:
        raise GadgetError(f"chain length must be odd, got {chain_len}")
    if leg_k < 1 or leg_k % 2 == 0:
        raise GadgetError(f"leg chain needs an odd k >= 1, got {leg_k}")
    if stubs and (stub_k < 5 or stub_k % 2 == 0):
        raise GadgetError(f"variable chain needs an odd k >= 5, got {stub_k}")
    r = r_e
    s = triangle_side(r)
    h = trapezoid_height(r)
    tri_h = 1.5 * s / SQRT3
    gap = 2.0 * r - 2.0 * r / SQRT3
    axis = (chain_len + 1) * s / 2.0 + gap / 2.0
    star = e_star_length(r)
    leg_y = -(leg_k + 1) * h

    b = GadgetBuilder(r, star_samples)
    add_triangle_chain(b, chain_len, Point(0.0, 0.0), "chain.left", invert=True)
    add_triangle_chain(b, chain_len, Point(0.0, 0.0), "chain.right", invert=True, mirror_x=axis)
    anchors = {
        "left": Point(-h, leg_y),
        "middle": Point(axis - h - star / 2.0, leg_y),
        "right": Point(2.0 * axis - s - h, leg_y),
    }
    invert = {"left": True, "middle": True, "right": False}
    bottoms = {}
    for name in CLAUSE_LEGS:
        middle = name == "middle"
        edges = add_leg(b, leg_k, anchors[name], f"leg.{name}", top_len=star if middle else None,
                        top_group="e_star" if middle else None, sampled_top=middle, invert=invert[name])
        bottoms[name] = edges[0]
    if stubs:
        var_y = leg_y - h - tri_h
        for name, negated in zip(CLAUSE_LEGS, leg_attach):
            qx = _bottom_base_mid(leg_k, anchors[name], r)
            # flipped triangle T_2 has its base centred at origin + s, T_2/T_4 share origin + 1.5 s
            origin_x = qx - (s if negated else 1.5 * s)
            add_triangle_chain(b, stub_k, Point(origin_x, var_y), f"var.{name}", invert=invert[name])
    asm = b.build("clause")
    groups = dict(asm.groups)
    for name in CLAUSE_LEGS:
        groups[f"leg.{name}.bottom"] = (bottoms[name],)
    return GadgetAssembly(asm.kind, asm.layout, asm.candidates, asm.labels, groups)


def restrict(asm: GadgetAssembly, fixed: Dict[int, str]) -> GadgetAssembly:
    """Keep only the candidate labelled ``fixed[e]`` on each listed edge (re-ranked to 1)."""
    per_edge = list(asm.candidates)
    labels = list(asm.labels)
    for e, label in fixed.items():
        p = asm.position(e, label)
        per_edge[e] = (ArrowPosition(e, p.center, 1, p.valid),)
        labels[e] = (label,)
    return GadgetAssembly(asm.kind, asm.layout, CandidateSet(tuple(per_edge), asm.candidates.r_e),
                          tuple(labels), asm.groups)


def fix_legs(asm: GadgetAssembly, states: Sequence[Optional[str]]) -> GadgetAssembly:
    """Pin the bottom base of each clause leg to ``solid``/``dashed`` (None leaves it free)."""
    if len(states) != 3:
        raise GadgetError("need one state per leg")
    fixed = {}
    for name, st in zip(CLAUSE_LEGS, states):
        if st is None:
            continue
        if st not in (SOLID, DASHED):
            raise GadgetError(f"leg state must be {SOLID} or {DASHED}, got {st!r}")
        fixed[asm.groups[f"leg.{name}.bottom"][0]] = st
    return restrict(asm, fixed)
