import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arrowplace.generate import random_layout
from arrowplace.geom import Point, dist
from arrowplace.model import Digraph, Layout, LayoutError, is_valid_position
from arrowplace.posgen import (
    RadiusConfig,
    candidate_slots,
    compute_radii,
    editor_center,
    generate_candidates,
    radii_from_lengths,
)
from radius_table import RADIUS_TABLE


@pytest.mark.parametrize("lengths, expected, why", RADIUS_TABLE)
def test_radius_table(lengths, expected, why):
    r_v, r_e = radii_from_lengths(lengths)
    assert r_e == expected, why
    assert r_v == r_e


def test_compute_radii_from_drawing():
    g = Digraph.from_pairs([0, 1, 2], [(0, 1), (1, 2)])
    pos = {0: Point(0, 0), 1: Point(30, 0), 2: Point(30, 100)}
    assert compute_radii(g, pos) == (10.0, 10.0)


def test_radius_overrides_and_errors():
    assert radii_from_lengths([100], RadiusConfig(rv_equals_re=False)) == (0.0, 10.0)
    assert radii_from_lengths([100], RadiusConfig(r_e=2.5, r_v=1.0)) == (1.0, 2.5)
    with pytest.raises(LayoutError):
        radii_from_lengths([0, 0])
    with pytest.raises(ValueError):
        RadiusConfig(pct_shortest=1.5)
    with pytest.raises(ValueError):
        RadiusConfig(floor_px=11)


def test_slots_example():
    slots = candidate_slots(Point(0, 0), Point(100, 0), 5, 5)
    assert len(slots) == 17
    assert [round(s.x, 9) for s in slots] == [90 - 5 * i for i in range(17)]


def test_slots_boundary_lengths():
    r = 5.0
    assert len(candidate_slots(Point(0, 0), Point(4 * r, 0), r, r)) == 1
    assert len(candidate_slots(Point(0, 0), Point(4 * r - 0.1, 0), r, r)) == 0


def test_editor_center_is_first_slot_or_clamped():
    assert editor_center(Point(0, 0), Point(100, 0), 5, 5) == Point(90, 0)
    assert editor_center(Point(0, 0), Point(6, 0), 5, 5) == Point(0, 0)


def _single_edge(length=100.0, r=5.0):
    g = Digraph.from_pairs([0, 1], [(0, 1)])
    return Layout(g, {0: Point(0, 0), 1: Point(length, 0)}, r, r)


def test_isolated_edge_all_slots_valid():
    cs = generate_candidates(_single_edge())
    assert len(cs[0]) == 17
    assert cs[0][0].rank == 1 and cs[0][0].center == Point(90, 0)


def test_vertex_in_the_middle_removes_slots_and_reranks():
    g = Digraph.from_pairs([0, 1, 2, 3], [(0, 1), (2, 3)])
    pos = {0: Point(0, 0), 1: Point(100, 0), 2: Point(50, 3), 3: Point(50, 80)}
    lay = Layout(g, pos, 5.0, 5.0)
    cs = generate_candidates(lay)
    kept = [p.center.x for p in cs[0]]
    expected = [x for x in (90 - 5 * i for i in range(17))
                if is_valid_position(Point(x, 0), 0, lay)]
    assert [round(x, 9) for x in kept] == expected
    assert len(kept) < 17
    assert [p.rank for p in cs[0]] == list(range(1, len(kept) + 1))


def test_blocked_edge_gets_invalid_fallback():
    g = Digraph.from_pairs([0, 1, 2, 3], [(0, 1), (2, 3)])
    # edge 1 runs on top of edge 0
    pos = {0: Point(0, 0), 1: Point(40, 0), 2: Point(-10, 0.5), 3: Point(50, 0.5)}
    cs = generate_candidates(Layout(g, pos, 2.0, 2.0))
    assert len(cs[0]) == 1 and not cs[0][0].valid
    assert cs[0][0].center == Point(36, 0)


def test_short_edge_fallback_is_midpoint():
    g = Digraph.from_pairs([0, 1], [(0, 1)])
    cs = generate_candidates(Layout(g, {0: Point(0, 0), 1: Point(10, 0)}, 3.0, 3.0))
    assert cs[0] == (cs[0][0],) and not cs[0][0].valid and cs[0][0].center == Point(5, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.floats(1.0, 2.5), st.integers(0, 10**6), st.floats(2.0, 15.0))
def test_grid_validity_matches_brute_force(n, density, seed, min_sep):
    g, pos = random_layout(n, density, seed, min_sep=min_sep)
    r_v, r_e = compute_radii(g, pos)
    lay = Layout(g, pos, r_v, r_e)
    cs = generate_candidates(lay)
    for e in g.edges:
        slots = candidate_slots(pos[e.source], pos[e.target], r_v, r_e)
        valid = [c for c in slots if is_valid_position(c, e.id, lay)]
        got = [p.center for p in cs[e.id]]
        if valid:
            assert got == valid
            assert all(p.valid for p in cs[e.id])
        else:
            assert len(got) == 1 and not cs[e.id][0].valid


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**6))
def test_ranks_increase_with_distance_from_target(n, seed):
    g, pos = random_layout(n, 1.5, seed)
    cs = generate_candidates(Layout(g, pos, *compute_radii(g, pos)))
    for e in g.edges:
        d = [dist(p.center, pos[e.target]) for p in cs[e.id]]
        assert d == sorted(d)
        assert [p.rank for p in cs[e.id]] == list(range(1, len(d) + 1))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**6), st.floats(0.3, 1.0))
def test_shrinking_arrows_keeps_valid_positions_valid(n, seed, factor):
    g, pos = random_layout(n, 1.5, seed)
    r_v, r_e = compute_radii(g, pos)
    lay = Layout(g, pos, r_v, r_e)
    small = Layout(g, pos, r_v, r_e * factor)
    for cands in generate_candidates(lay):
        for p in cands:
            if p.valid:
                assert is_valid_position(p.center, p.edge, small)


def test_generation_is_deterministic():
    g, pos = random_layout(60, 1.5, 11)
    lay = Layout(g, pos, *compute_radii(g, pos))
    assert generate_candidates(lay) == generate_candidates(lay)
