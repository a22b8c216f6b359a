"""Seeded random straight-line drawings for experiments."""

from __future__ import annotations

import logging
import math
import random
from typing import Dict, List, Tuple

from .geom import Point
from .model import Digraph

log = logging.getLogger(__name__)

MAX_POINT_TRIES = 1000


class GenerationError(ValueError):
    pass


def random_points(n: int, rng: random.Random, side: float, min_sep: float) -> List[Point]:
    pts: List[Point] = []
    cell = max(min_sep, 1e-12)
    grid: Dict[Tuple[int, int], List[Point]] = {}
    for _ in range(n):
        for _attempt in range(MAX_POINT_TRIES):
            p = Point(rng.uniform(0.0, side), rng.uniform(0.0, side))
            gx, gy = int(p.x // cell), int(p.y // cell)
            ok = True
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for q in grid.get((gx + dx, gy + dy), ()):
                        if math.hypot(p.x - q.x, p.y - q.y) < min_sep:
                            ok = False
                            break
            if ok:
                break
        else:
            raise GenerationError(
                f"could not place {n} points with separation {min_sep} in a {side:.1f} square; try a smaller min_sep")
        pts.append(p)
        grid.setdefault((gx, gy), []).append(p)
    return pts


def random_layout(n: int, density: float, seed: int, min_sep: float = 10.0) -> Tuple[Digraph, Dict[int, Point]]:
    """Random digraph on ``n`` points in a square of side ``40*sqrt(n)``.

    Draws ``floor(density*n)`` distinct vertex pairs (no self-loops, no
    parallel edges), each with a random direction.  When fewer pairs exist
    than requested, all of them are used and a warning is logged.
    """
    if n < 2:
        raise GenerationError("need at least 2 vertices")
    if density < 1.0:
        raise GenerationError("density must be >= 1.0")
    rng = random.Random(seed)
    side = 40.0 * math.sqrt(n)
    pts = random_points(n, rng, side, min_sep)
    want = int(math.floor(density * n))
    max_pairs = n * (n - 1) // 2
    if want > max_pairs:
        log.warning("requested %d edges but only %d vertex pairs exist; using %d", want, max_pairs, max_pairs)
        want = max_pairs
    chosen = set()
    pairs: List[Tuple[int, int]] = []
    if want > max_pairs // 2:
        all_pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        picked = rng.sample(all_pairs, want)
    else:
        picked = []
        while len(picked) < want:
            a, b = rng.randrange(n), rng.randrange(n)
            if a == b:
                continue
            key = (min(a, b), max(a, b))
            if key in chosen:
                continue
            chosen.add(key)
            picked.append(key)
    for a, b in picked:
        pairs.append((a, b) if rng.random() < 0.5 else (b, a))
    graph = Digraph.from_pairs(list(range(n)), pairs)
    return graph, {i: p for i, p in enumerate(pts)}
