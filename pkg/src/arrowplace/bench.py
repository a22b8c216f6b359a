"""Benchmark harness: every solver on every layout file of a directory."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

from .formats import BenchRow, parse_layout
from .pipeline import SOLVERS, place
from .posgen import RadiusConfig
from .solve import SolveConfig

log = logging.getLogger(__name__)

LAYOUT_SUFFIX = ".layout"


def list_instances(directory: Path) -> List[Path]:
    return sorted(p for p in Path(directory).iterdir() if p.is_file() and p.suffix == LAYOUT_SUFFIX)


def bench_instance(path: Path, solvers: Sequence[str], radius_cfg: RadiusConfig = RadiusConfig(),
                   solve_cfg: SolveConfig = SolveConfig()) -> List[BenchRow]:
    """One row per solver; a failure marks the affected rows and is logged."""
    name = path.stem
    try:
        lf = parse_layout(path.read_text(), str(path))
    except Exception as exc:  # noqa: BLE001 - any bad instance becomes a failed row
        log.error("instance %s: %s", name, exc)
        return [BenchRow(name, SOLVERS.get(s, s), status="failed") for s in solvers]
    rows = []
    for s in solvers:
        try:
            res = place(lf, s, radius_cfg, solve_cfg)
        except Exception as exc:  # noqa: BLE001
            log.error("instance %s, solver %s: %s", name, s, exc)
            rows.append(BenchRow(name, SOLVERS.get(s, s), n_vertices=len(lf.nodes), n_edges=len(lf.edges),
                                 status="failed"))
            continue
        status = "ok" if res.placement.optimal is not False else "limit"
        rows.append(BenchRow(
            instance=name,
            solver=res.placement.solver_tag,
            n_vertices=res.layout.graph.n,
            n_edges=res.layout.graph.m,
            n_positions=res.candidates.size,
            n_conflicts=res.conflicts.num_edges if res.conflicts is not None else 0,
            overlap=res.overlap,
            crossings=res.crossings,
            invalid_positions=res.invalid_positions,
            placement_ms=res.placement_ms,
            conflict_build_ms=res.conflict_build_ms,
            total_ms=res.total_ms,
            status=status,
        ))
    return rows


def run_bench(directory: Path, solvers: Sequence[str], radius_cfg: RadiusConfig = RadiusConfig(),
              solve_cfg: SolveConfig = SolveConfig(), workers: Optional[int] = None) -> List[BenchRow]:
    """Rows come back in instance order, then in the order of ``solvers``.

    With ``workers > 1`` instances run in a thread pool; the order of the
    result does not depend on completion order.
    """
    for s in solvers:
        if s not in SOLVERS:
            raise ValueError(f"unknown solver {s!r}; choose from {', '.join(SOLVERS)}")
    paths = list_instances(directory)
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda p: bench_instance(p, solvers, radius_cfg, solve_cfg), paths))
    else:
        chunks = [bench_instance(p, solvers, radius_cfg, solve_cfg) for p in paths]
    return [row for chunk in chunks for row in chunk]
