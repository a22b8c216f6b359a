"""Digraph drawings, candidate arrow positions, placements and their metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .geom import Circle, Point, Segment, circle_segment_overlap, circles_overlap

VertexId = Hashable

SOLVER_TAGS = ("exact", "heur_global", "heur_local", "editor")


class LayoutError(ValueError):
    """Raised when a graph or drawing violates the model invariants."""


@dataclass(frozen=True)
class Edge:
    id: int
    source: VertexId
    target: VertexId


@dataclass(frozen=True)
class Digraph:
    vertices: Tuple[VertexId, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self) -> None:
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise LayoutError(f"duplicate vertex id {v!r}")
            seen.add(v)
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise LayoutError(f"edge ids must be dense 0..{len(self.edges) - 1}; got {e.id} at index {i}")
            if e.source not in seen or e.target not in seen:
                raise LayoutError(f"edge {e.id} references unknown vertex")
            if e.source == e.target:
                raise LayoutError(f"edge {e.id} is a self-loop on vertex {e.source!r}")

    @classmethod
    def from_pairs(cls, vertices: Sequence[VertexId], pairs: Sequence[Tuple[VertexId, VertexId]]) -> "Digraph":
        return cls(tuple(vertices), tuple(Edge(i, s, t) for i, (s, t) in enumerate(pairs)))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Layout:
    graph: Digraph
    pos: Mapping[VertexId, Point]
    r_v: float
    r_e: float

    def __post_init__(self) -> None:
        for v in self.graph.vertices:
            if v not in self.pos:
                raise LayoutError(f"vertex {v!r} has no position")
            x, y = self.pos[v]
            if not (math.isfinite(x) and math.isfinite(y)):
                raise LayoutError(f"vertex {v!r} has non-finite coordinates")
        if not (self.r_e > 0 and math.isfinite(self.r_e)):
            raise LayoutError(f"r_e must be positive and finite, got {self.r_e!r}")
        if not (self.r_v >= 0 and math.isfinite(self.r_v)):
            raise LayoutError(f"r_v must be >= 0 and finite, got {self.r_v!r}")

    def segment(self, edge_id: int) -> Segment:
        e = self.graph.edges[edge_id]
        return Segment(self.pos[e.source], self.pos[e.target])

    def segments(self) -> List[Segment]:
        return [self.segment(e.id) for e in self.graph.edges]

    def with_radii(self, r_v: float, r_e: float) -> "Layout":
        return Layout(self.graph, self.pos, r_v, r_e)


@dataclass(frozen=True)
class ArrowPosition:
    edge: int
    center: Point
    rank: int
    valid: bool = True


@dataclass(frozen=True)
class CandidateSet:
    """Per-edge candidate lists, each sorted by rank (1 = closest to the target)."""

    per_edge: Tuple[Tuple[ArrowPosition, ...], ...]
    r_e: float

    def __post_init__(self) -> None:
        for e, cands in enumerate(self.per_edge):
            if not cands:
                raise LayoutError(f"edge {e} has no candidate position")
            for k, p in enumerate(cands):
                if p.edge != e or p.rank != k + 1:
                    raise LayoutError(f"edge {e}: candidate {k} has edge={p.edge} rank={p.rank}")
            if any(not p.valid for p in cands) and len(cands) != 1:
                raise LayoutError(f"edge {e}: an invalid fallback must be the only candidate")

    def __len__(self) -> int:
        return len(self.per_edge)

    def __iter__(self) -> Iterator[Tuple[ArrowPosition, ...]]:
        return iter(self.per_edge)

    def __getitem__(self, e: int) -> Tuple[ArrowPosition, ...]:
        return self.per_edge[e]

    def positions(self) -> List[ArrowPosition]:
        return [p for cands in self.per_edge for p in cands]

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.per_edge)

    @property
    def max_per_edge(self) -> int:
        return max((len(c) for c in self.per_edge), default=0)

    def search_space(self) -> int:
        out = 1
        for c in self.per_edge:
            out *= len(c)
        return out


@dataclass(frozen=True)
class Placement:
    choice: Tuple[ArrowPosition, ...]
    solver_tag: str
    optimal: Optional[bool] = None
    stats: Dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.solver_tag not in SOLVER_TAGS:
            raise ValueError(f"unknown solver tag {self.solver_tag!r}")
        for e, p in enumerate(self.choice):
            if p.edge != e:
                raise ValueError(f"choice {e} belongs to edge {p.edge}")

    @property
    def rank_sum(self) -> int:
        return sum(p.rank for p in self.choice)

    def ranks(self) -> Tuple[int, ...]:
        return tuple(p.rank for p in self.choice)


def arrow_circle(p: ArrowPosition, r_e: float) -> Circle:
    return Circle(p.center, r_e)


def arrow_violations(center: Point, edge_id: int, layout: Layout) -> Tuple[int, int]:
    """Count (vertex, edge) overlaps of an arrow centred at ``center`` on ``edge_id``.

    Vertex overlaps use radius ``r_v``; the arrow's own segment is never tested.
    """
    arrow = Circle(center, layout.r_e)
    vertex_hits = 0
    for v in layout.graph.vertices:
        if circles_overlap(arrow, Circle(layout.pos[v], layout.r_v)):
            vertex_hits += 1
    edge_hits = 0
    for g in layout.graph.edges:
        if g.id != edge_id and circle_segment_overlap(arrow, layout.segment(g.id)):
            edge_hits += 1
    return vertex_hits, edge_hits


def is_valid_position(center: Point, edge_id: int, layout: Layout) -> bool:
    return arrow_violations(center, edge_id, layout) == (0, 0)


def overlap_pairs(pl: Placement, r_e: float) -> List[Tuple[int, int]]:
    chosen = pl.choice
    out = []
    for i in range(len(chosen)):
        ci = arrow_circle(chosen[i], r_e)
        for j in range(i + 1, len(chosen)):
            if circles_overlap(ci, arrow_circle(chosen[j], r_e)):
                out.append((i, j))
    return out


def overlap_number(pl: Placement, layout: Layout) -> int:
    """Number of unordered pairs of placed arrows whose circles overlap."""
    return len(overlap_pairs(pl, layout.r_e))


def crossing_count(pl: Placement, layout: Layout) -> Tuple[int, int]:
    """Return ``(crossings, invalid_positions)`` for a placement.

    Crossings count every (arrow, vertex) and (arrow, other edge) overlap.
    """
    crossings = 0
    invalid = 0
    for p in pl.choice:
        hv, he = arrow_violations(p.center, p.edge, layout)
        crossings += hv + he
        if not p.valid:
            invalid += 1
    return crossings, invalid


def objective_value(pl: Placement, cs: CandidateSet, M: float, layout: Optional[Layout] = None) -> float:
    """Overlap number plus the rank sum scaled by ``1/M``.

    ``cs`` supplies the arrow radius when ``layout`` is omitted.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    r_e = layout.r_e if layout is not None else cs.r_e
    return len(overlap_pairs(pl, r_e)) + pl.rank_sum / M


def default_M(cs: CandidateSet) -> int:
    """``|E| * max_e |A_e|``: keeps the rank term below one overlap."""
    return max(1, len(cs) * cs.max_per_edge)
