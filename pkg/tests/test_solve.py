import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arrowplace.conflict import FULL, LOCAL, ConflictGraph, build_full, build_local
from arrowplace.geom import Point
from arrowplace.model import (
    ArrowPosition,
    CandidateSet,
    Digraph,
    Layout,
    default_M,
    objective_value,
    overlap_number,
)
from arrowplace.posgen import generate_candidates
from arrowplace.solve import (
    OracleCapExceeded,
    SolveConfig,
    brute_force_oracle,
    editor_within_candidates,
    scaled_objective,
    solve_editor,
    solve_exact,
    solve_greedy,
    zero_overlap_placements,
)
from strategies import candidate_sets


def _key(pl, cs, cg):
    M = default_M(cs)
    nodes = [cg.node_of(p.edge, p.rank) for p in pl.choice]
    return scaled_objective(cg, nodes, M)


def _graph(sizes, conflicts):
    """Conflict graph given directly: ``conflicts`` holds ((edge, rank), (edge, rank)) pairs."""
    per_edge = tuple(tuple(ArrowPosition(e, Point(100.0 * e, 10.0 * k), k + 1) for k in range(n))
                     for e, n in enumerate(sizes))
    cs = CandidateSet(per_edge, 1.0)
    offsets = [0]
    for n in sizes:
        offsets.append(offsets[-1] + n)
    adj = [set() for _ in range(offsets[-1])]
    for (e, a), (f, b) in conflicts:
        i, j = offsets[e] + a - 1, offsets[f] + b - 1
        adj[i].add(j)
        adj[j].add(i)
    cg = ConflictGraph(tuple(cs.positions()), tuple(tuple(sorted(s)) for s in adj), FULL, tuple(offsets))
    return cs, cg


# a1-b1, b1-c1, a1-c1, a2-b1, a2-b2, c2-a1
TRIANGLE = _graph([2, 2, 2], [((0, 1), (1, 1)), ((1, 1), (2, 1)), ((0, 1), (2, 1)), ((0, 2), (1, 1)),
                              ((0, 2), (1, 2)), ((2, 2), (0, 1))])


def test_oracle_frozen_triangle():
    cs, cg = TRIANGLE
    pl = brute_force_oracle(cs, cg)
    assert pl.ranks() == (1, 2, 1)
    assert _key(pl, cs, cg) == 1 * 6 + 4


def test_exact_frozen_triangle():
    cs, cg = TRIANGLE
    pl = solve_exact(cs, cg)
    assert pl.ranks() == (1, 2, 1)
    assert pl.optimal is True


def test_greedy_frozen_triangle():
    # costs (x M=6): a1 19, a2 14, b1 19, b2 8, c1 13, c2 8.
    # b2 wins the tie on edge id; then c1 costs 7 and a1 is left.
    cs, cg = TRIANGLE
    pl = solve_greedy(cs, cg)
    assert pl.ranks() == (1, 2, 1)
    assert pl.solver_tag == "heur_global"


def test_conflict_free_instance_takes_rank_one():
    cs, cg = _graph([3, 2, 4], [])
    for solver in (solve_exact, solve_greedy, brute_force_oracle):
        assert solver(cs, cg).ranks() == (1, 1, 1)


def test_two_edges_only_first_ranks_conflict():
    cs, cg = _graph([2, 2], [((0, 1), (1, 1))])
    pl = solve_exact(cs, cg)
    assert sorted(pl.ranks()) == [1, 2]
    assert objective_value(pl, cs, 4, Layout(Digraph.from_pairs([0, 1, 2, 3], [(0, 1), (2, 3)]),
                                              {i: Point(i * 1000.0, 0) for i in range(4)}, 0, 1)) == 0.75
    assert brute_force_oracle(cs, cg).ranks() == (1, 2)


def test_unavoidable_conflict():
    cs, cg = _graph([1, 1], [((0, 1), (1, 1))])
    assert _key(brute_force_oracle(cs, cg), cs, cg) == 2 + 2
    assert _key(solve_exact(cs, cg), cs, cg) == 2 + 2


def test_greedy_first_pick_has_minimum_degree_then_rank():
    # edge 0: rank 1 has degree 2, rank 2 has degree 0; edge 1 all degree 1
    cs, cg = _graph([2, 1, 1], [((0, 1), (1, 1)), ((0, 1), (2, 1))])
    pl = solve_greedy(cs, cg)
    assert pl.ranks() == (2, 1, 1)


def test_greedy_takes_clashing_position_only_when_forced():
    # e0 has one position conflicting with both positions of e1 and with e2's rank 1.
    cs, cg = _graph([1, 2, 2], [((0, 1), (1, 1)), ((0, 1), (1, 2)), ((0, 1), (2, 1)), ((1, 2), (2, 2))])
    pl = solve_greedy(cs, cg)
    chosen = {cg.node_of(p.edge, p.rank) for p in pl.choice}
    # e2 avoids e0's arrow although its rank 1 is cheaper; e1 cannot
    e0 = cg.node_of(0, 1)
    assert e0 in chosen
    assert cg.node_of(2, 1) not in chosen
    assert pl.ranks()[2] == 2


def _reference_greedy(cs, cg):
    """Straightforward greedy: recompute every cost from scratch each round."""
    M = default_M(cs)
    n = cg.num_nodes
    edge_of = [p.edge for p in cg.nodes]
    rank = [p.rank for p in cg.nodes]
    valid = [p.valid for p in cg.nodes]
    T = max((len(cg.adjacency[i]) * M + rank[i] for i in range(n) if valid[i]), default=0)
    chosen = {}
    while len(chosen) < len(cs):
        best = None
        for i in range(n):
            if edge_of[i] in chosen:
                continue
            delta = sum(1 for j in cg.adjacency[i] if edge_of[j] not in chosen)
            sigma = sum(1 for j in cg.adjacency[i] if chosen.get(edge_of[j]) == j)
            key = (not valid[i], delta * M + rank[i] + T * sigma, edge_of[i], rank[i])
            if best is None or key < best[0]:
                best = (key, i)
        chosen[edge_of[best[1]]] = best[1]
    return tuple(rank[chosen[e]] for e in range(len(cs)))


@settings(max_examples=150, deadline=None)
@given(candidate_sets(max_edges=10, max_per_edge=5))
def test_greedy_matches_reference(cs):
    cg = build_full(cs)
    assert solve_greedy(cs, cg).ranks() == _reference_greedy(cs, cg)


@settings(max_examples=100, deadline=None)
@given(candidate_sets(max_edges=8, max_per_edge=4))
def test_greedy_clashes_only_when_forced(cs):
    """When a pick clashes with an earlier pick, every alternative of its edge clashed too."""
    cg = build_full(cs)
    M = default_M(cs)
    ranks = solve_greedy(cs, cg).ranks()
    chosen = [cg.node_of(e, k) for e, k in enumerate(ranks)]
    # pick order: replay the reference rules
    order = []
    decided = {}
    rank = [p.rank for p in cg.nodes]
    edge_of = [p.edge for p in cg.nodes]
    T = max(len(cg.adjacency[i]) * M + rank[i] for i in range(cg.num_nodes))
    while len(decided) < len(cs):
        best = None
        for i in range(cg.num_nodes):
            if edge_of[i] in decided:
                continue
            delta = sum(1 for j in cg.adjacency[i] if edge_of[j] not in decided)
            sigma = sum(1 for j in cg.adjacency[i] if decided.get(edge_of[j]) == j)
            key = (delta * M + rank[i] + T * sigma, edge_of[i], rank[i])
            if best is None or key < best[0]:
                best = (key, i, sigma)
        _, i, sigma = best
        if sigma > 0:
            for alt in cg.nodes_of_edge(edge_of[i]):
                assert any(decided.get(edge_of[j]) == j for j in cg.adjacency[alt])
        decided[edge_of[i]] = i
        order.append(i)
    assert sorted(order) == sorted(chosen)


@settings(max_examples=150, deadline=None)
@given(candidate_sets())
def test_exact_matches_oracle(cs):
    cg = build_full(cs)
    assert _key(solve_exact(cs, cg), cs, cg) == _key(brute_force_oracle(cs, cg), cs, cg)


@settings(max_examples=100, deadline=None)
@given(candidate_sets(max_edges=8, max_per_edge=4))
def test_exact_never_worse_than_greedy(cs):
    cg = build_full(cs)
    ex = solve_exact(cs, cg)
    assert _key(ex, cs, cg) <= _key(solve_greedy(cs, cg), cs, cg)
    assert ex.optimal is True


def test_greedy_is_deterministic():
    rng = random.Random(5)
    from strategies import random_candidates
    for _ in range(20):
        cs = random_candidates(rng, 12, 5)
        cg = build_full(cs)
        assert solve_greedy(cs, cg).choice == solve_greedy(cs, cg).choice


def test_local_graph_tags_heur_local():
    cs, _ = _graph([1, 1], [])
    g = Digraph.from_pairs([0, 1, 2], [(0, 1), (1, 2)])
    assert solve_greedy(cs, build_local(cs, g)).solver_tag == "heur_local"


def test_node_limit_reports_unproven():
    from strategies import random_candidates
    cs = random_candidates(random.Random(0), 30, 4, box=4.0)
    cg = build_full(cs)
    pl = solve_exact(cs, cg, SolveConfig(node_limit=3))
    assert pl.optimal is False
    assert _key(pl, cs, cg) >= _key(solve_exact(cs, cg), cs, cg)


def test_oracle_cap():
    cs, cg = _graph([4] * 5, [])
    with pytest.raises(OracleCapExceeded):
        brute_force_oracle(cs, cg, cap=100)


def _fan(k, spread_deg, r=5.0, length=100.0):
    verts = list(range(k + 1))
    pos = {0: Point(0.0, 0.0)}
    for i in range(k):
        a = math.radians(spread_deg * i)
        pos[i + 1] = Point(length * math.cos(a), length * math.sin(a))
    g = Digraph.from_pairs(verts, [(i + 1, 0) for i in range(k)])
    return Layout(g, pos, r, r)


def test_editor_on_isolated_edge_matches_exact():
    lay = _fan(1, 0)
    cs = generate_candidates(lay)
    assert solve_editor(cs, lay).choice == solve_exact(cs, build_full(cs)).choice


def test_editor_fan_overlaps():
    # consecutive edges 40 degrees apart, below 2*asin(r/(r_v+r)) = 60 degrees;
    # editor arrows 10 from the hub are 6.84 apart, edges 80 degrees apart are clear
    lay = _fan(4, 40.0)
    cs = generate_candidates(lay)
    ed = solve_editor(cs, lay)
    ex = solve_exact(cs, build_full(cs))
    assert editor_within_candidates(ed, cs)
    assert overlap_number(ed, lay) == 3
    assert overlap_number(ex, lay) == 0


def test_editor_off_candidates_on_tight_fan():
    lay = _fan(4, 10.0)
    cs = generate_candidates(lay)
    ed = solve_editor(cs, lay)
    assert not editor_within_candidates(ed, cs)
    assert all(not p.valid for p in ed.choice)
    assert overlap_number(ed, lay) == 6


@settings(max_examples=80, deadline=None)
@given(candidate_sets(max_edges=6, max_per_edge=3), st.data())
def test_zero_overlap_enumeration_matches_product(cs, data):
    cg = build_full(cs)
    fixed_edge = data.draw(st.integers(0, len(cs) - 1))
    fixed_rank = data.draw(st.integers(1, len(cs[fixed_edge])))
    allowed = {fixed_edge: [fixed_rank]}
    adj = [set(a) for a in cg.adjacency]
    expected = []
    for ranks in itertools.product(*[range(1, len(c) + 1) for c in cs]):
        if ranks[fixed_edge] != fixed_rank:
            continue
        nodes = [cg.node_of(e, k) for e, k in enumerate(ranks)]
        if all(b not in adj[a] for a, b in itertools.combinations(nodes, 2)):
            expected.append(ranks)
    assert sorted(zero_overlap_placements(cs, cg, allowed)) == expected
