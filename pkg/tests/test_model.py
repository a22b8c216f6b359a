import random

import pytest
from hypothesis import given, strategies as st

from arrowplace.conflict import build_full
from arrowplace.geom import Point
from arrowplace.model import (
    ArrowPosition,
    CandidateSet,
    Digraph,
    Edge,
    Layout,
    LayoutError,
    Placement,
    crossing_count,
    default_M,
    objective_value,
    overlap_number,
)
from strategies import candidate_sets, pick


def _layout_with_edges(m):
    verts = list(range(2 * m))
    pairs = [(2 * i, 2 * i + 1) for i in range(m)]
    pos = {v: Point(100.0 * v, 0.0) for v in verts}
    return Layout(Digraph.from_pairs(verts, pairs), pos, 0.0, 1.0)


def test_digraph_rejects_self_loop():
    with pytest.raises(LayoutError, match="self-loop"):
        Digraph.from_pairs([0, 1], [(0, 0)])


def test_digraph_rejects_sparse_ids_and_unknown_vertices():
    with pytest.raises(LayoutError):
        Digraph((0, 1), (Edge(1, 0, 1),))
    with pytest.raises(LayoutError):
        Digraph.from_pairs([0, 1], [(0, 7)])


def test_parallel_edges_allowed():
    g = Digraph.from_pairs([0, 1], [(0, 1), (0, 1), (1, 0)])
    assert g.m == 3


def test_layout_radius_checks():
    g = Digraph.from_pairs([0, 1], [(0, 1)])
    with pytest.raises(LayoutError):
        Layout(g, {0: Point(0, 0), 1: Point(1, 0)}, 0.0, 0.0)
    with pytest.raises(LayoutError):
        Layout(g, {0: Point(0, 0)}, 0.0, 1.0)


def test_candidate_set_invariants():
    with pytest.raises(LayoutError):
        CandidateSet(((),), 1.0)
    with pytest.raises(LayoutError):
        CandidateSet(((ArrowPosition(0, Point(0, 0), 2),),), 1.0)
    with pytest.raises(LayoutError):
        CandidateSet(((ArrowPosition(0, Point(0, 0), 1, False), ArrowPosition(0, Point(1, 0), 2)),), 1.0)


def test_overlap_number_examples():
    lay = _layout_with_edges(0)
    assert overlap_number(Placement((), "exact"), lay) == 0
    lay = _layout_with_edges(3)
    two = Placement((ArrowPosition(0, Point(0, 0), 1), ArrowPosition(1, Point(1.9, 0), 1),
                     ArrowPosition(2, Point(50, 0), 1)), "exact")
    assert overlap_number(two, lay) == 1
    three = Placement(tuple(ArrowPosition(i, Point(0.1 * i, 0), 1) for i in range(3)), "exact")
    assert overlap_number(three, lay) == 3


def test_crossing_count_fallback_arrow():
    # arrow 0 sits on edges 1 and 2 and on the start vertex of edge 2
    g = Digraph.from_pairs([0, 1, 2, 3, 4, 5], [(0, 1), (2, 3), (4, 5)])
    pos = {0: Point(0, 0), 1: Point(20, 0), 2: Point(10, -10), 3: Point(10, 10),
           4: Point(10.5, -0.5), 5: Point(20, -10)}
    lay = Layout(g, pos, 0.5, 1.0)
    arrows = (ArrowPosition(0, Point(10, 0), 1, False), ArrowPosition(1, Point(10, 8), 1),
              ArrowPosition(2, Point(18, -8), 1))
    assert crossing_count(Placement(arrows, "exact"), lay) == (3, 1)


def test_crossing_count_all_valid():
    lay = _layout_with_edges(2)
    pl = Placement((ArrowPosition(0, Point(50, 0), 1), ArrowPosition(1, Point(250, 0), 1)), "exact")
    assert crossing_count(pl, lay) == (0, 0)


def test_objective_value_examples():
    lay = _layout_with_edges(4)
    far = Placement(tuple(ArrowPosition(i, Point(10.0 * i, 0), 1) for i in range(4)), "exact")
    cs = CandidateSet(tuple((p,) for p in far.choice), 1.0)
    assert objective_value(far, cs, 16) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        objective_value(far, cs, 0)


def test_objective_two_overlaps_rank_sum_seven():
    ranks = [1, 2, 4]
    per_edge = []
    for e, k in enumerate(ranks):
        per_edge.append(tuple(ArrowPosition(e, Point(0.5 * e if i == k - 1 else 100 + 10 * e + i, 0), i + 1)
                              for i in range(k)))
    cs = CandidateSet(tuple(per_edge), 1.0)
    pl = Placement(tuple(cs[e][k - 1] for e, k in enumerate(ranks)), "exact")
    # centres 0, 0.5, 1.0: pairs (0,1), (1,2) overlap, (0,2) are 1.0 apart -> also overlap
    assert objective_value(pl, cs, 100) == pytest.approx(3.07)


@given(candidate_sets(), st.randoms(use_true_random=False))
def test_objective_order_is_lexicographic(cs, rnd):
    M = default_M(cs)
    a = pick(cs, [rnd.randint(1, len(c)) for c in cs])
    b = pick(cs, [rnd.randint(1, len(c)) for c in cs])
    ova, ovb = overlap_number(a, _layout_with_edges(len(cs))), overlap_number(b, _layout_with_edges(len(cs)))
    if ova < ovb:
        assert objective_value(a, cs, M) < objective_value(b, cs, M)


@given(candidate_sets(), st.randoms(use_true_random=False))
def test_overlap_invariant_under_edge_relabeling(cs, rnd):
    ranks = [rnd.randint(1, len(c)) for c in cs]
    perm = list(range(len(cs)))
    rnd.shuffle(perm)
    chosen = [cs[e][ranks[e] - 1] for e in range(len(cs))]
    relabeled = tuple(ArrowPosition(new, chosen[old].center, 1) for new, old in enumerate(perm))
    lay = _layout_with_edges(len(cs))
    assert overlap_number(Placement(tuple(chosen), "exact"), lay) == overlap_number(Placement(relabeled, "exact"), lay)


@given(candidate_sets(), st.randoms(use_true_random=False))
def test_overlap_equals_conflict_graph_count(cs, rnd):
    cg = build_full(cs)
    ranks = [rnd.randint(1, len(c)) for c in cs]
    nodes = {cg.node_of(e, k) for e, k in enumerate(ranks)}
    via_graph = sum(1 for i, j in cg.edge_pairs() if i in nodes and j in nodes)
    assert overlap_number(pick(cs, ranks), _layout_with_edges(len(cs))) == via_graph


def test_placement_rejects_unknown_tag():
    with pytest.raises(ValueError):
        Placement((), "cplex")
