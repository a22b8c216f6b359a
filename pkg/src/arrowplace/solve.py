"""Arrow placement solvers.

Exact solving follows the 0-1 program

    min  sum_{(p,q) in E_A} y_pq + (1/M) sum_e sum_{p in A_e} d(p) x_p
    s.t. sum_{p in A_e} x_p = 1                for every edge e
         x_p + x_q <= y_pq + 1                  for every conflict (p, q)

with binary ``x`` and ``y``.  Because each ``y_pq`` only appears with a
positive coefficient in the objective, any optimum sets
``y_pq = max(0, x_p + x_q - 1)``, i.e. ``y_pq = 1`` exactly when both ends of
the conflict are chosen.  The program therefore minimises
``overlaps(choice) + rank_sum(choice) / M`` over one position per edge, which
is what :func:`solve_exact` does by branch-and-bound over edges.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import sys
import time
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .conflict import FULL, ConflictGraph
from .model import ArrowPosition, CandidateSet, Layout, Placement, default_M, is_valid_position
from .posgen import editor_center

log = logging.getLogger(__name__)

ORACLE_CAP = 10**6


class OracleCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveConfig:
    M: Optional[float] = None
    time_limit: Optional[float] = None  # seconds
    node_limit: Optional[int] = None
    seed: Optional[int] = None

    def resolve_M(self, cs: CandidateSet) -> float:
        M = default_M(cs) if self.M is None else self.M
        if M <= 0:
            raise ValueError("M must be positive")
        return M


def _placement(cs: CandidateSet, picks: Sequence[int], tag: str, optimal: Optional[bool], stats: Dict[str, float]) -> Placement:
    return Placement(tuple(cs[e][k] for e, k in enumerate(picks)), tag, optimal, stats)


def _node_tables(cg: ConflictGraph) -> Tuple[List[int], List[int]]:
    edge_of = [p.edge for p in cg.nodes]
    rank_of = [p.rank for p in cg.nodes]
    return edge_of, rank_of


def scaled_objective(cg: ConflictGraph, nodes: Sequence[int], M: float) -> float:
    """``M * objective`` for the chosen nodes (an integer when M is)."""
    chosen = set(nodes)
    ov = sum(1 for i in nodes for j in cg.adjacency[i] if j in chosen) // 2
    return ov * M + sum(cg.nodes[i].rank for i in nodes)


# ---------------------------------------------------------------------------
# exact
# ---------------------------------------------------------------------------


def _edge_components(cs: CandidateSet, cg: ConflictGraph, edge_of: Sequence[int]) -> List[List[int]]:
    m = len(cs)
    nbr_edges: List[set] = [set() for _ in range(m)]
    for i, adj in enumerate(cg.adjacency):
        for j in adj:
            nbr_edges[edge_of[i]].add(edge_of[j])
    seen = [False] * m
    comps = []
    for start in range(m):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            e = queue.popleft()
            for f in sorted(nbr_edges[e]):
                if not seen[f]:
                    seen[f] = True
                    comp.append(f)
                    queue.append(f)
        comps.append(sorted(comp))
    return comps


class _SearchAborted(Exception):
    pass


class _BranchAndBound:
    """Depth-first branch-and-bound over edges.

    The lower bound adds, for every undecided edge, its cheapest position
    counting only conflicts with positions already fixed (``sigma``);
    conflicts among undecided edges are bounded by zero, so the bound is
    admissible.  Whenever the undecided edges fall apart into groups that
    share no conflict, each group is solved on its own and the optima add up.
    """

    def __init__(self, cg: ConflictGraph, edges: Sequence[int], M: float,
                 deadline: Optional[float], node_budget: Optional[int]):
        self.cg = cg
        self.M = M
        self.rank = [p.rank for p in cg.nodes]
        self.edge_of = [p.edge for p in cg.nodes]
        total_deg = {e: sum(len(cg.adjacency[i]) for i in cg.nodes_of_edge(e)) for e in edges}
        order = sorted(edges, key=lambda e: (len(cg.nodes_of_edge(e)), -total_deg[e], e))
        self.priority = {e: k for k, e in enumerate(order)}
        self.sigma = [0] * cg.num_nodes
        nbr_edges: Dict[int, set] = {e: set() for e in edges}
        for e in edges:
            for i in cg.nodes_of_edge(e):
                for j in cg.adjacency[i]:
                    f = self.edge_of[j]
                    if f in nbr_edges:
                        nbr_edges[e].add(f)
        self.nbr_edges = {e: sorted(fs, key=self.priority.__getitem__) for e, fs in nbr_edges.items()}
        self.adjset = {i: frozenset(cg.adjacency[i]) for e in edges for i in cg.nodes_of_edge(e)}
        self.deadline = deadline
        self.node_budget = node_budget
        self.nodes = 0

    def _sorted_costs(self, e: int) -> List[Tuple[float, int]]:
        return sorted((self._cost(i), i) for i in self.cg.nodes_of_edge(e))

    def _pair_min(self, ce: List[Tuple[float, int]], cf: List[Tuple[float, int]]) -> float:
        """Cheapest joint cost of two undecided edges, a conflict adding ``M``."""
        best = ce[0][0] + cf[0][0] + self.M
        fmin = cf[0][0]
        for a, p in ce:
            if a + fmin >= best:
                break
            adj = self.adjset[p]
            for b, q in cf:
                if a + b >= best:
                    break
                if q in adj:
                    if a + b + self.M < best:
                        best = a + b + self.M
                else:
                    best = a + b
                    break
        return best

    def _lower_bound(self, edges: List[int]) -> float:
        """Sum of per-edge minima, strengthened on a greedy matching of conflicting edges."""
        inside = set(edges)
        costs = {e: self._sorted_costs(e) for e in edges}
        used = set()
        lb = 0
        for e in edges:
            if e in used:
                continue
            used.add(e)
            ce = costs[e]
            best_gain = 0
            partner = None
            for f in self.nbr_edges[e]:
                if f in inside and f not in used:
                    cf = costs[f]
                    gain = self._pair_min(ce, cf) - ce[0][0] - cf[0][0]
                    if gain > best_gain:
                        best_gain = gain
                        partner = f
            if partner is None:
                lb += ce[0][0]
            else:
                used.add(partner)
                lb += ce[0][0] + costs[partner][0][0] + best_gain
        return lb

    def _cost(self, i: int) -> float:
        return self.sigma[i] * self.M + self.rank[i]

    def _edge_min(self, e: int) -> float:
        return min(self._cost(i) for i in self.cg.nodes_of_edge(e))

    def _components(self, undecided: List[int]) -> List[List[int]]:
        inside = set(undecided)
        seen = set()
        comps = []
        for e in undecided:
            if e in seen:
                continue
            seen.add(e)
            comp = [e]
            stack = [e]
            while stack:
                f = stack.pop()
                for g in self.nbr_edges[f]:
                    if g in inside and g not in seen:
                        seen.add(g)
                        comp.append(g)
                        stack.append(g)
            comp.sort(key=self.priority.__getitem__)
            comps.append(comp)
        return comps

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise _SearchAborted
        if self.deadline is not None and (self.nodes & 255) == 0 and time.perf_counter() > self.deadline:
            raise _SearchAborted

    def solve(self, undecided: List[int], ub: float) -> Optional[Tuple[float, List[int]]]:
        """Optimum for ``undecided`` (sorted by priority) if it is below ``ub``."""
        self._tick()
        if not undecided:
            return (0, []) if 0 < ub else None
        comps = self._components(undecided)
        if len(comps) > 1:
            lbs = [sum(self._edge_min(e) for e in comp) for comp in comps]
            rest = sum(lbs)
            if rest >= ub:
                return None
            total = 0
            chosen: List[int] = []
            for comp, lb in zip(comps, lbs):
                rest -= lb
                sub = self._solve_connected(comp, ub - total - rest)
                if sub is None:
                    return None
                total += sub[0]
                chosen.extend(sub[1])
            return total, chosen
        return self._solve_connected(undecided, ub)

    def _solve_connected(self, comp: List[int], ub: float) -> Optional[Tuple[float, List[int]]]:
        if len(comp) == 1:
            e = comp[0]
            i = min(self.cg.nodes_of_edge(e), key=lambda k: (self._cost(k), k))
            c = self._cost(i)
            return (c, [i]) if c < ub else None
        e, rest_edges = comp[0], comp[1:]
        cg = self.cg
        sigma = self.sigma
        inside = set(rest_edges)
        best: Optional[Tuple[float, List[int]]] = None
        bound = ub
        options = sorted(cg.nodes_of_edge(e), key=lambda k: (self._cost(k), k))
        base = sum(self._edge_min(f) for f in rest_edges)
        for i in options:
            step = self._cost(i)
            if step + base >= bound:
                # options are sorted by step and sigma only grows
                break
            touched = [j for j in cg.adjacency[i] if self.edge_of[j] in inside]
            for j in touched:
                sigma[j] += 1
            try:
                if step + self._lower_bound(rest_edges) >= bound:
                    sub = None
                else:
                    sub = self.solve(rest_edges, bound - step)
            finally:
                for j in touched:
                    sigma[j] -= 1
            if sub is not None:
                bound = step + sub[0]
                best = (bound, [i] + sub[1])
        return best


def solve_exact(cs: CandidateSet, cg: ConflictGraph, cfg: SolveConfig = SolveConfig()) -> Placement:
    """Minimise overlaps, then rank sum, with a proof of optimality.

    The search is seeded with the greedy placement as incumbent.  When a time
    or node limit stops it, the best placement found so far is returned with
    ``optimal=False``.
    """
    t0 = time.perf_counter()
    M = cfg.resolve_M(cs)
    edge_of, _ = _node_tables(cg)
    greedy = solve_greedy(cs, cg, cfg)
    greedy_nodes = [cg.node_of(p.edge, p.rank) for p in greedy.choice]
    deadline = None if cfg.time_limit is None else t0 + cfg.time_limit
    picks = [i - cg.offsets[e] for e, i in enumerate(greedy_nodes)]
    proven = True
    explored = 0
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(cs) + 1000))
    try:
        for comp in _edge_components(cs, cg, edge_of):
            seed_cost = scaled_objective(cg, [greedy_nodes[e] for e in comp], M)
            budget = None if cfg.node_limit is None else max(0, cfg.node_limit - explored)
            bb = _BranchAndBound(cg, comp, M, deadline, budget)
            try:
                found = bb.solve(sorted(comp, key=bb.priority.__getitem__), seed_cost)
            except _SearchAborted:
                found = None
                proven = False
            explored += bb.nodes
            if found is not None:
                for i in found[1]:
                    picks[edge_of[i]] = i - cg.offsets[edge_of[i]]
    finally:
        sys.setrecursionlimit(limit)
    stats = {"bb_nodes": float(explored), "placement_ms": (time.perf_counter() - t0) * 1000.0}
    if not proven:
        log.warning("exact solver stopped by limit after %d nodes; result not proven optimal", explored)
    return _placement(cs, picks, "exact", proven, stats)


# ---------------------------------------------------------------------------
# greedy
# ---------------------------------------------------------------------------


def solve_greedy(cs: CandidateSet, cg: ConflictGraph, cfg: SolveConfig = SolveConfig()) -> Placement:
    """Greedy placement; HeurGlobal on a full graph, HeurLocal on a local one.

    Every iteration fixes the cheapest remaining position, where a position
    costs ``delta + d/M + T*sigma``: ``delta`` is its degree in the residual
    graph, ``d`` its rank and ``sigma`` the number of chosen positions it
    conflicts with.  ``T`` is the largest initial cost of a valid position,
    so a position clashing with a chosen arrow is only taken when its edge
    has nothing else left.  Invalid fallbacks are taken last.  Ties go to the
    lower edge id, then the lower rank.

    Costs are kept multiplied by ``M`` so that integer ``M`` gives exact ties.
    """
    t0 = time.perf_counter()
    M = cfg.resolve_M(cs)
    n = cg.num_nodes
    edge_of, rank_of = _node_tables(cg)
    valid = [p.valid for p in cg.nodes]
    delta = [len(a) for a in cg.adjacency]
    sigma = [0] * n
    TM = max((delta[i] * M + rank_of[i] for i in range(n) if valid[i]), default=0)
    alive = [True] * n

    def cost(i: int) -> float:
        return delta[i] * M + rank_of[i] + TM * sigma[i]

    current = [cost(i) for i in range(n)]
    heap = [(not valid[i], current[i], edge_of[i], rank_of[i], i) for i in range(n)]
    heapq.heapify(heap)
    picks = [-1] * len(cs)
    remaining = len(cs)
    while remaining:
        _, c, e, _, i = heapq.heappop(heap)
        if not alive[i] or c != current[i]:
            continue
        picks[e] = i - cg.offsets[e]
        remaining -= 1
        dirty = set()
        for u in cg.nodes_of_edge(e):
            alive[u] = False
        for u in cg.nodes_of_edge(e):
            for w in cg.adjacency[u]:
                if alive[w]:
                    delta[w] -= 1
                    dirty.add(w)
        for w in cg.adjacency[i]:
            if alive[w]:
                sigma[w] += 1
                dirty.add(w)
        for w in dirty:
            current[w] = cost(w)
            heapq.heappush(heap, (not valid[w], current[w], edge_of[w], rank_of[w], w))
    tag = "heur_global" if cg.variant == FULL else "heur_local"
    stats = {"placement_ms": (time.perf_counter() - t0) * 1000.0}
    return _placement(cs, picks, tag, None, stats)


# ---------------------------------------------------------------------------
# editor baseline
# ---------------------------------------------------------------------------


def solve_editor(cs: CandidateSet, layout: Layout) -> Placement:
    """Put every arrow at the first slot next to its target, valid or not."""
    t0 = time.perf_counter()
    choice = []
    tol = 1e-9 * max(layout.r_e, 1.0)
    for e in layout.graph.edges:
        src, tgt = layout.pos[e.source], layout.pos[e.target]
        c = editor_center(src, tgt, layout.r_v, layout.r_e)
        member = next((p for p in cs[e.id] if abs(p.center.x - c.x) <= tol and abs(p.center.y - c.y) <= tol), None)
        if member is None:
            member = ArrowPosition(e.id, c, 1, is_valid_position(c, e.id, layout))
        choice.append(member)
    return Placement(tuple(choice), "editor", None, {"placement_ms": (time.perf_counter() - t0) * 1000.0})


def editor_within_candidates(pl: Placement, cs: CandidateSet) -> bool:
    return all(p in cs[p.edge] for p in pl.choice)


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def brute_force_oracle(cs: CandidateSet, cg: ConflictGraph, M: Optional[float] = None, cap: int = ORACLE_CAP) -> Placement:
    """Enumerate every assignment; ties keep the lexicographically first rank vector."""
    space = cs.search_space()
    if space > cap:
        raise OracleCapExceeded(f"search space {space} exceeds cap {cap}")
    if M is None:
        M = default_M(cs)
    adj = [set(a) for a in cg.adjacency]
    ranges = [list(cg.nodes_of_edge(e)) for e in range(len(cs))]
    best_key = None
    best: Tuple[int, ...] = ()
    for combo in itertools.product(*ranges):
        ov = 0
        for a in range(len(combo)):
            na = adj[combo[a]]
            for b in range(a + 1, len(combo)):
                if combo[b] in na:
                    ov += 1
        key = ov * M + sum(cg.nodes[i].rank for i in combo)
        if best_key is None or key < best_key:
            best_key = key
            best = combo
    picks = [i - cg.offsets[e] for e, i in enumerate(best)]
    return _placement(cs, picks, "exact", True, {"objective_scaled": float(best_key or 0)})


def zero_overlap_placements(
    cs: CandidateSet,
    cg: ConflictGraph,
    allowed: Optional[Dict[int, Sequence[int]]] = None,
    limit: Optional[int] = None,
) -> List[Tuple[int, ...]]:
    """All conflict-free choices, as tuples of ranks, found by exhaustive backtracking.

    ``allowed`` restricts some edges to the given ranks.  The search always
    branches on the undecided edge with the fewest remaining options and
    prunes as soon as an edge runs out of options, so it is complete but far
    cheaper than enumerating the product space.  Stops after ``limit``
    placements when given.
    """
    n = len(cs)
    options: List[set] = []
    for e in range(n):
        ranks = range(1, len(cs[e]) + 1) if allowed is None or e not in allowed else allowed[e]
        options.append({cg.node_of(e, k) for k in ranks})
    edge_of = [p.edge for p in cg.nodes]
    found: List[Tuple[int, ...]] = []
    chosen: Dict[int, int] = {}

    def recurse(opts: List[set]) -> bool:
        if len(chosen) == n:
            found.append(tuple(cg.nodes[chosen[e]].rank for e in range(n)))
            return limit is not None and len(found) >= limit
        e = min((f for f in range(n) if f not in chosen), key=lambda f: (len(opts[f]), f))
        for node in sorted(opts[e]):
            nxt = list(opts)
            dead = False
            for nb in cg.adjacency[node]:
                f = edge_of[nb]
                if f not in chosen and nb in nxt[f]:
                    if nxt[f] is opts[f]:
                        nxt[f] = set(opts[f])
                    nxt[f].discard(nb)
                    if not nxt[f]:
                        dead = True
                        break
            if dead:
                continue
            chosen[e] = node
            if recurse(nxt):
                return True
            del chosen[e]
        return False

    if all(options):
        recurse(options)
    return found
