"""Arrow conflict graphs over all candidate positions."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .geom import Circle, circles_overlap, default_eps
from .model import ArrowPosition, CandidateSet, Digraph

FULL = "full"
LOCAL = "local"


@dataclass(frozen=True)
class ConflictGraph:
    """Nodes are all candidate positions, indexed in (edge, rank) order."""

    nodes: Tuple[ArrowPosition, ...]
    adjacency: Tuple[Tuple[int, ...], ...]
    variant: str
    offsets: Tuple[int, ...]

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def node_of(self, edge: int, rank: int) -> int:
        base = self.offsets[edge]
        if not (1 <= rank <= self.offsets[edge + 1] - base):
            raise KeyError(f"edge {edge} has no rank {rank}")
        return base + rank - 1

    def nodes_of_edge(self, edge: int) -> range:
        return range(self.offsets[edge], self.offsets[edge + 1])

    def edge_pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, adj in enumerate(self.adjacency) for j in adj if i < j]

    def to_text(self) -> str:
        """Debug dump: one ``edge:rank edge:rank`` line per conflict."""
        lines = []
        for i, j in self.edge_pairs():
            a, b = self.nodes[i], self.nodes[j]
            lines.append(f"{a.edge}:{a.rank} {b.edge}:{b.rank}")
        return "\n".join(lines) + ("\n" if lines else "")


def degree(cg: ConflictGraph, node: int) -> int:
    if not (0 <= node < cg.num_nodes):
        raise KeyError(f"unknown conflict-graph node {node}")
    return len(cg.adjacency[node])


def _offsets(cs: CandidateSet) -> Tuple[int, ...]:
    out = [0]
    for cands in cs:
        out.append(out[-1] + len(cands))
    return tuple(out)


def _finish(cs: CandidateSet, nbrs: Sequence[Set[int]], variant: str) -> ConflictGraph:
    return ConflictGraph(
        nodes=tuple(cs.positions()),
        adjacency=tuple(tuple(sorted(s)) for s in nbrs),
        variant=variant,
        offsets=_offsets(cs),
    )


def _conflicting(p: ArrowPosition, q: ArrowPosition, r_e: float) -> bool:
    return p.edge != q.edge and circles_overlap(Circle(p.center, r_e), Circle(q.center, r_e))


def build_full_pairs(cs: CandidateSet) -> ConflictGraph:
    """All-pairs construction, O(|A|^2) overlap tests."""
    nodes = cs.positions()
    n = len(nodes)
    xs = [p.center.x for p in nodes]
    ys = [p.center.y for p in nodes]
    es = [p.edge for p in nodes]
    reach = 2.0 * cs.r_e
    limit = reach - default_eps(reach)
    hypot = math.hypot
    nbrs: List[Set[int]] = [set() for _ in nodes]
    for i in range(n):
        xi, yi, ei = xs[i], ys[i], es[i]
        ni = nbrs[i]
        for j in range(i + 1, n):
            # same test as geom.circles_overlap with two radius-r_e circles
            if es[j] != ei and hypot(xi - xs[j], yi - ys[j]) < limit:
                ni.add(j)
                nbrs[j].add(i)
    return _finish(cs, nbrs, FULL)


def build_full_grid(cs: CandidateSet) -> ConflictGraph:
    """Full conflict graph via a uniform grid with cell size ``2*r_e``.

    Produces the same graph as :func:`build_full_pairs`; only pairs in
    neighbouring cells are tested.
    """
    nodes = cs.positions()
    cell = 2.0 * cs.r_e
    grid: Dict[Tuple[int, int], List[int]] = defaultdict(list)
    keys = []
    for i, p in enumerate(nodes):
        key = (math.floor(p.center.x / cell), math.floor(p.center.y / cell))
        keys.append(key)
        grid[key].append(i)
    nbrs: List[Set[int]] = [set() for _ in nodes]
    for i, p in enumerate(nodes):
        cx, cy = keys[i]
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in grid.get((cx + dx, cy + dy), ()):
                    if j > i and _conflicting(p, nodes[j], cs.r_e):
                        nbrs[i].add(j)
                        nbrs[j].add(i)
    return _finish(cs, nbrs, FULL)


def build_full(cs: CandidateSet, method: str = "pairs") -> ConflictGraph:
    """Conflict edge between positions of different edges whose arrows overlap.

    ``method="pairs"`` compares all pairs; ``"grid"`` uses a spatial hash and
    yields the identical graph.
    """
    if method == "pairs":
        return build_full_pairs(cs)
    if method == "grid":
        return build_full_grid(cs)
    raise ValueError(f"unknown method {method!r}")


def adjacent_edge_pairs(g: Digraph) -> List[Tuple[int, int]]:
    """Pairs ``(e, f)``, ``e < f``, of edges sharing at least one endpoint."""
    incident: Dict[object, List[int]] = defaultdict(list)
    for e in g.edges:
        incident[e.source].append(e.id)
        if e.target != e.source:
            incident[e.target].append(e.id)
    pairs = set()
    for ids in incident.values():
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                e, f = ids[a], ids[b]
                pairs.add((e, f) if e < f else (f, e))
    return sorted(pairs)


def build_local(cs: CandidateSet, g: Digraph) -> ConflictGraph:
    """Conflict graph restricted to positions of edges that share an endpoint."""
    offsets = _offsets(cs)
    nodes = cs.positions()
    nbrs: List[Set[int]] = [set() for _ in nodes]
    for e, f in adjacent_edge_pairs(g):
        for i in range(offsets[e], offsets[e + 1]):
            for j in range(offsets[f], offsets[f + 1]):
                if _conflicting(nodes[i], nodes[j], cs.r_e):
                    nbrs[i].add(j)
                    nbrs[j].add(i)
    return _finish(cs, nbrs, LOCAL)


def build(cs: CandidateSet, g: Optional[Digraph] = None, variant: str = FULL) -> ConflictGraph:
    if variant == FULL:
        return build_full(cs)
    if variant == LOCAL:
        if g is None:
            raise ValueError("local conflict graph needs the digraph")
        return build_local(cs, g)
    raise ValueError(f"unknown conflict-graph variant {variant!r}")
