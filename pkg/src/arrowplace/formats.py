"""Line-oriented text formats for layouts, candidate sets, placements and bench rows.

Every file starts with ``format <kind> <version>``.  Each further line is a
keyword followed by whitespace separated fields; blank lines and lines
starting with ``#`` are ignored.  Reals are written with six decimals, so a
parsed file serialises back to the identical text.

Layout::

    format arrowplace-layout 1
    radii <r_v> <r_e>            (optional)
    tolerance <eps scale>        (optional)
    node <id> <x> <y>
    edge <id> <source> <target>

Candidates (explicit ``A_e`` for every edge)::

    format arrowplace-candidates 1
    r_e <r_e>
    cand <edge> <rank> <x> <y> <valid 0|1> [label]

Placement::

    format arrowplace-placement 1
    solver <exact|heur_global|heur_local|editor>
    optimal <yes|no|na>
    r_e <r_e>
    overlap_number / crossings / invalid_positions / rank_sum <int>
    placement_time_ms / total_time_ms <real>
    arrow <edge> <x> <y> <rank> <valid 0|1>

``tolerance`` lets a layout ask for a larger overlap tolerance than the
default; gadget files use it because rounding to six decimals moves exactly
tangent arrows by up to about 1e-6.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .geom import Point
from .model import SOLVER_TAGS, ArrowPosition, CandidateSet, Digraph, Edge, Layout, LayoutError, Placement

LAYOUT_FORMAT = "arrowplace-layout"
CANDIDATES_FORMAT = "arrowplace-candidates"
PLACEMENT_FORMAT = "arrowplace-placement"
FORMAT_VERSION = 1

TIMING_KEYS = ("placement_time_ms", "total_time_ms")

BENCH_HEADER = (
    "instance", "n_vertices", "n_edges", "n_positions", "n_conflicts", "solver", "overlap", "crossings",
    "invalid_positions", "placement_ms", "conflict_build_ms", "total_ms", "status",
)


class FormatError(ValueError):
    """Malformed input; the message names the source and line."""

    def __init__(self, message: str, source: str = "<input>", line: Optional[int] = None):
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


def fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _records(text: str, kind: str, source: str) -> List[Tuple[int, List[str]]]:
    out = []
    header_seen = False
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if not header_seen:
            if parts[0] != "format" or len(parts) != 3:
                raise FormatError(f"expected 'format {kind} {FORMAT_VERSION}'", source, no)
            if parts[1] != kind:
                raise FormatError(f"expected a {kind} file, got {parts[1]}", source, no)
            if parts[2] != str(FORMAT_VERSION):
                raise FormatError(f"unsupported version {parts[2]}", source, no)
            header_seen = True
            continue
        out.append((no, parts))
    if not header_seen:
        raise FormatError("empty file, missing format line", source)
    return out


def _expect(parts: List[str], n: int, source: str, no: int) -> None:
    if len(parts) != n:
        raise FormatError(f"'{parts[0]}' takes {n - 1} fields, got {len(parts) - 1}", source, no)


def _int(tok: str, what: str, source: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {tok!r}", source, no) from None


def _real(tok: str, what: str, source: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(f"{what} must be a number, got {tok!r}", source, no) from None
    if not math.isfinite(v):
        raise FormatError(f"{what} must be finite, got {tok!r}", source, no)
    return v


def _flag(tok: str, what: str, source: str, no: int) -> bool:
    if tok not in ("0", "1"):
        raise FormatError(f"{what} must be 0 or 1, got {tok!r}", source, no)
    return tok == "1"


# ---------------------------------------------------------------------------
# layouts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayoutFile:
    """A drawing as stored on disk; radii are optional."""

    nodes: Tuple[Tuple[int, float, float], ...]
    edges: Tuple[Tuple[int, int, int], ...]
    r_v: Optional[float] = None
    r_e: Optional[float] = None
    tolerance: Optional[float] = None

    @property
    def graph(self) -> Digraph:
        return Digraph(tuple(n[0] for n in self.nodes), tuple(Edge(*e) for e in self.edges))

    @property
    def pos(self) -> Dict[int, Point]:
        return {i: Point(x, y) for i, x, y in self.nodes}

    def layout(self, r_v: float, r_e: float) -> Layout:
        return Layout(self.graph, self.pos, r_v, r_e)

    @classmethod
    def from_graph(cls, graph: Digraph, pos, r_v: Optional[float] = None, r_e: Optional[float] = None,
                   tolerance: Optional[float] = None) -> "LayoutFile":
        nodes = tuple((v, float(pos[v].x), float(pos[v].y)) for v in graph.vertices)
        edges = tuple((e.id, e.source, e.target) for e in graph.edges)
        return cls(nodes, edges, r_v, r_e, tolerance).canonical()

    def canonical(self) -> "LayoutFile":
        """Coordinates and radii rounded the way they are written."""
        r = lambda v: None if v is None else float(fmt(v))
        nodes = tuple((i, float(fmt(x)), float(fmt(y))) for i, x, y in self.nodes)
        return LayoutFile(nodes, self.edges, r(self.r_v), r(self.r_e), self.tolerance)


def dump_layout(lf: LayoutFile) -> str:
    lines = [f"format {LAYOUT_FORMAT} {FORMAT_VERSION}"]
    if (lf.r_v is None) != (lf.r_e is None):
        raise ValueError("radii must be given together")
    if lf.r_e is not None:
        lines.append(f"radii {fmt(lf.r_v)} {fmt(lf.r_e)}")
    if lf.tolerance is not None:
        lines.append(f"tolerance {lf.tolerance:.1e}")
    lines.extend(f"node {i} {fmt(x)} {fmt(y)}" for i, x, y in lf.nodes)
    lines.extend(f"edge {i} {s} {t}" for i, s, t in lf.edges)
    return "\n".join(lines) + "\n"


def parse_layout(text: str, source: str = "<layout>") -> LayoutFile:
    nodes: List[Tuple[int, float, float]] = []
    edges: List[Tuple[int, int, int]] = []
    node_ids: Dict[int, int] = {}
    r_v = r_e = tol = None
    for no, parts in _records(text, LAYOUT_FORMAT, source):
        key = parts[0]
        if key == "node":
            _expect(parts, 4, source, no)
            i = _int(parts[1], "node id", source, no)
            if i in node_ids:
                raise FormatError(f"duplicate node id {i} (first on line {node_ids[i]})", source, no)
            node_ids[i] = no
            nodes.append((i, _real(parts[2], "x", source, no), _real(parts[3], "y", source, no)))
        elif key == "edge":
            _expect(parts, 4, source, no)
            i = _int(parts[1], "edge id", source, no)
            if i != len(edges):
                raise FormatError(f"edge ids must be 0,1,2,... in order; expected {len(edges)}, got {i}", source, no)
            s = _int(parts[2], "edge source", source, no)
            t = _int(parts[3], "edge target", source, no)
            for v in (s, t):
                if v not in node_ids:
                    raise FormatError(f"edge {i} references unknown node {v}", source, no)
            if s == t:
                raise FormatError(f"edge {i} is a self-loop on node {s}", source, no)
            edges.append((i, s, t))
        elif key == "radii":
            _expect(parts, 3, source, no)
            r_v = _real(parts[1], "r_v", source, no)
            r_e = _real(parts[2], "r_e", source, no)
            if r_v < 0 or r_e <= 0:
                raise FormatError("radii need r_v >= 0 and r_e > 0", source, no)
        elif key == "tolerance":
            _expect(parts, 2, source, no)
            tol = _real(parts[1], "tolerance", source, no)
            if tol < 0:
                raise FormatError("tolerance must be >= 0", source, no)
        else:
            raise FormatError(f"unknown record {key!r}", source, no)
    return LayoutFile(tuple(nodes), tuple(edges), r_v, r_e, tol)


# ---------------------------------------------------------------------------
# candidate sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CandidatesFile:
    candidates: CandidateSet
    labels: Tuple[Tuple[str, ...], ...] = ()


def dump_candidates(cs: CandidateSet, labels: Sequence[Sequence[str]] = ()) -> str:
    lines = [f"format {CANDIDATES_FORMAT} {FORMAT_VERSION}", f"r_e {fmt(cs.r_e)}"]
    for e, cands in enumerate(cs):
        for k, p in enumerate(cands):
            tail = f" {labels[e][k]}" if labels else ""
            lines.append(f"cand {e} {p.rank} {fmt(p.center.x)} {fmt(p.center.y)} {int(p.valid)}{tail}")
    return "\n".join(lines) + "\n"


def parse_candidates(text: str, source: str = "<candidates>") -> CandidatesFile:
    r_e = None
    per_edge: List[List[ArrowPosition]] = []
    labels: List[List[str]] = []
    for no, parts in _records(text, CANDIDATES_FORMAT, source):
        if parts[0] == "r_e":
            _expect(parts, 2, source, no)
            r_e = _real(parts[1], "r_e", source, no)
        elif parts[0] == "cand":
            if len(parts) not in (6, 7):
                raise FormatError(f"'cand' takes 5 or 6 fields, got {len(parts) - 1}", source, no)
            e = _int(parts[1], "edge", source, no)
            rank = _int(parts[2], "rank", source, no)
            if e == len(per_edge):
                per_edge.append([])
                labels.append([])
            elif e != len(per_edge) - 1:
                raise FormatError(f"candidates must be grouped by edge in order; got edge {e}", source, no)
            if rank != len(per_edge[e]) + 1:
                raise FormatError(f"edge {e}: expected rank {len(per_edge[e]) + 1}, got {rank}", source, no)
            c = Point(_real(parts[3], "x", source, no), _real(parts[4], "y", source, no))
            per_edge[e].append(ArrowPosition(e, c, rank, _flag(parts[5], "valid", source, no)))
            labels[e].append(parts[6] if len(parts) == 7 else "")
        else:
            raise FormatError(f"unknown record {parts[0]!r}", source, no)
    if r_e is None:
        raise FormatError("missing r_e line", source)
    try:
        cs = CandidateSet(tuple(tuple(c) for c in per_edge), r_e)
    except LayoutError as exc:
        raise FormatError(str(exc), source) from None
    has_labels = any(l for ls in labels for l in ls)
    return CandidatesFile(cs, tuple(tuple(ls) for ls in labels) if has_labels else ())


# ---------------------------------------------------------------------------
# placements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlacementFile:
    solver: str
    optimal: Optional[bool]
    r_e: float
    arrows: Tuple[ArrowPosition, ...]
    overlap_number: int
    crossings: int
    invalid_positions: int
    rank_sum: int
    placement_time_ms: float = 0.0
    total_time_ms: float = 0.0

    def placement(self) -> Placement:
        return Placement(self.arrows, self.solver, self.optimal)

    def canonical(self) -> "PlacementFile":
        arrows = tuple(ArrowPosition(p.edge, Point(float(fmt(p.center.x)), float(fmt(p.center.y))), p.rank, p.valid)
                       for p in self.arrows)
        return PlacementFile(self.solver, self.optimal, float(fmt(self.r_e)), arrows, self.overlap_number,
                             self.crossings, self.invalid_positions, self.rank_sum,
                             float(f"{self.placement_time_ms:.3f}"), float(f"{self.total_time_ms:.3f}"))


_OPT = {True: "yes", False: "no", None: "na"}


def dump_placement(pf: PlacementFile) -> str:
    lines = [
        f"format {PLACEMENT_FORMAT} {FORMAT_VERSION}",
        f"solver {pf.solver}",
        f"optimal {_OPT[pf.optimal]}",
        f"r_e {fmt(pf.r_e)}",
        f"overlap_number {pf.overlap_number}",
        f"crossings {pf.crossings}",
        f"invalid_positions {pf.invalid_positions}",
        f"rank_sum {pf.rank_sum}",
        f"placement_time_ms {pf.placement_time_ms:.3f}",
        f"total_time_ms {pf.total_time_ms:.3f}",
    ]
    lines.extend(f"arrow {p.edge} {fmt(p.center.x)} {fmt(p.center.y)} {p.rank} {int(p.valid)}" for p in pf.arrows)
    return "\n".join(lines) + "\n"


def parse_placement(text: str, source: str = "<placement>") -> PlacementFile:
    fields: Dict[str, str] = {}
    arrows: List[ArrowPosition] = []
    ints = ("overlap_number", "crossings", "invalid_positions", "rank_sum")
    for no, parts in _records(text, PLACEMENT_FORMAT, source):
        key = parts[0]
        if key == "arrow":
            _expect(parts, 6, source, no)
            e = _int(parts[1], "edge", source, no)
            if e != len(arrows):
                raise FormatError(f"arrows must be listed by edge id; expected {len(arrows)}, got {e}", source, no)
            c = Point(_real(parts[2], "x", source, no), _real(parts[3], "y", source, no))
            arrows.append(ArrowPosition(e, c, _int(parts[4], "rank", source, no), _flag(parts[5], "valid", source, no)))
            continue
        _expect(parts, 2, source, no)
        if key == "solver" and parts[1] not in SOLVER_TAGS:
            raise FormatError(f"unknown solver {parts[1]!r}", source, no)
        if key == "optimal" and parts[1] not in ("yes", "no", "na"):
            raise FormatError(f"optimal must be yes, no or na, got {parts[1]!r}", source, no)
        if key in ints:
            _int(parts[1], key, source, no)
        elif key in ("r_e",) + TIMING_KEYS:
            _real(parts[1], key, source, no)
        elif key not in ("solver", "optimal"):
            raise FormatError(f"unknown record {key!r}", source, no)
        fields[key] = parts[1]
    missing = [k for k in ("solver", "optimal", "r_e") + ints if k not in fields]
    if missing:
        raise FormatError(f"missing fields: {', '.join(missing)}", source)
    opt = {"yes": True, "no": False, "na": None}[fields["optimal"]]
    return PlacementFile(
        fields["solver"], opt, float(fields["r_e"]), tuple(arrows),
        *(int(fields[k]) for k in ints),
        float(fields.get("placement_time_ms", 0.0)), float(fields.get("total_time_ms", 0.0)),
    )


def mask_timings(text: str) -> str:
    """Blank out timing values so two runs can be compared byte for byte.

    Handles placement files and bench CSV output.
    """
    lines = text.splitlines(keepends=True)
    if lines and lines[0].rstrip("\n") == ",".join(BENCH_HEADER):
        timed = [i for i, name in enumerate(BENCH_HEADER) if name.endswith("_ms")]
        out = [lines[0]]
        for line in lines[1:]:
            cells = line.rstrip("\n").split(",")
            for i in timed:
                if i < len(cells):
                    cells[i] = "*"
            out.append(",".join(cells) + "\n")
        return "".join(out)
    out = []
    for line in text.splitlines(keepends=True):
        key = line.split(" ", 1)[0]
        out.append(f"{key} *\n" if key in TIMING_KEYS else line)
    return "".join(out)


# ---------------------------------------------------------------------------
# bench rows
# ---------------------------------------------------------------------------


@dataclass
class BenchRow:
    instance: str
    solver: str
    n_vertices: int = 0
    n_edges: int = 0
    n_positions: int = 0
    n_conflicts: int = 0
    overlap: int = 0
    crossings: int = 0
    invalid_positions: int = 0
    placement_ms: float = 0.0
    conflict_build_ms: float = 0.0
    total_ms: float = 0.0
    status: str = "ok"

    def values(self) -> List[str]:
        out = []
        for key in BENCH_HEADER:
            v = getattr(self, key)
            out.append(f"{v:.3f}" if isinstance(v, float) else str(v))
        return out


def dump_bench(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for row in rows:
        w.writerow(row.values())
    return buf.getvalue()


def parse_bench(text: str) -> List[Dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != BENCH_HEADER:
        raise FormatError("unexpected bench header", "<bench>", 1)
    return list(reader)
