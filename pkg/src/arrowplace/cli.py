"""Command-line interface.

Subcommands: ``place``, ``render``, ``gen random``, ``bench`` and ``gadget``.
Exit status is 0 on success, 1 on bad input and 2 when the exact solver
hit a limit before proving optimality.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import gadgets
from .bench import run_bench
from .conflict import build_full
from .formats import (
    CandidatesFile,
    FormatError,
    LayoutFile,
    dump_bench,
    dump_candidates,
    dump_layout,
    dump_placement,
    parse_candidates,
    parse_layout,
    parse_placement,
)
from .generate import GenerationError, random_layout
from .geom import EPS_ENV_VAR, env_eps_scale, get_eps_scale, set_eps_scale
from .model import LayoutError
from .pipeline import SOLVERS, place, resolve_layout
from .posgen import RadiusConfig, generate_candidates
from .render import RenderError, render_svg
from .solve import SolveConfig

log = logging.getLogger("arrowplace")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_LIMIT = 2

GADGET_KINDS = ("triangle", "trapezoid", "variable", "leg", "clause")
# tolerance written into gadget files; covers the six-decimal rounding of tangent arrows
GADGET_TOLERANCE = 1e-5


class InputError(Exception):
    pass


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _apply_tolerance(args: argparse.Namespace, lf: Optional[LayoutFile] = None) -> None:
    """``--eps`` beats the environment, which beats a file's tolerance line."""
    if args.eps is not None:
        set_eps_scale(args.eps)
    elif EPS_ENV_VAR not in os.environ and lf is not None and lf.tolerance is not None:
        set_eps_scale(lf.tolerance)


def _radius_cfg(args: argparse.Namespace) -> RadiusConfig:
    return RadiusConfig(r_v=args.r_v, r_e=args.r_e)


def _solve_cfg(args: argparse.Namespace) -> SolveConfig:
    return SolveConfig(time_limit=args.time_limit, node_limit=args.node_limit, seed=args.seed)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_place(args: argparse.Namespace) -> int:
    lf = parse_layout(_read(args.input), args.input)
    _apply_tolerance(args, lf)
    explicit = parse_candidates(_read(args.candidates), args.candidates) if args.candidates else None
    res = place(lf, args.solver, _radius_cfg(args), _solve_cfg(args), explicit)
    _write(args.output, dump_placement(res.to_file()))
    log.info("%s: overlap %d, crossings %d, invalid %d", args.solver, res.overlap, res.crossings, res.invalid_positions)
    if res.placement.optimal is False:
        log.warning("solver limit reached before optimality was proven")
        return EXIT_LIMIT
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    lf = parse_layout(_read(args.layout), args.layout)
    _apply_tolerance(args, lf)
    placement = None
    explicit: Optional[CandidatesFile] = None
    if args.candidates:
        explicit = parse_candidates(_read(args.candidates), args.candidates)
    if args.placement:
        pf = parse_placement(_read(args.placement), args.placement)
        if len(pf.arrows) != len(lf.edges):
            raise RenderError(f"placement has {len(pf.arrows)} arrows, layout has {len(lf.edges)} edges")
        placement = pf.placement()
        layout = lf.layout(lf.r_v if lf.r_v is not None else pf.r_e, pf.r_e)
    elif explicit is not None:
        layout = lf.layout(lf.r_v if lf.r_v is not None else 0.0, explicit.candidates.r_e)
    else:
        layout = resolve_layout(lf, _radius_cfg(args))
    cs = None
    cg = None
    if args.show_candidates or args.show_conflicts:
        cs = explicit.candidates if explicit is not None else generate_candidates(layout)
        if args.show_conflicts:
            cg = build_full(cs)
    svg = render_svg(layout, placement, cs, cg, args.show_candidates, args.show_conflicts)
    _write(args.output, svg)
    return EXIT_OK


def cmd_gen_random(args: argparse.Namespace) -> int:
    graph, pos = random_layout(args.n, args.density, args.seed, args.min_sep)
    _write(args.output, dump_layout(LayoutFile.from_graph(graph, pos)))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise InputError(f"{directory} is not a directory")
    _apply_tolerance(args)
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    rows = run_bench(directory, solvers, _radius_cfg(args), _solve_cfg(args), args.workers)
    _write(args.output, dump_bench(rows))
    return EXIT_OK


def _parse_states(text: str) -> List[Optional[str]]:
    names = {"s": gadgets.SOLID, "solid": gadgets.SOLID, "d": gadgets.DASHED, "dashed": gadgets.DASHED,
             "-": None, "free": None}
    parts = [p.strip().lower() for p in text.split(",")]
    if len(parts) != 3 or any(p not in names for p in parts):
        raise InputError(f"--legs needs three of s, d, - separated by commas, got {text!r}")
    return [names[p] for p in parts]


def _parse_attach(text: str) -> List[bool]:
    names = {"p": False, "plain": False, "n": True, "neg": True, "negated": True}
    parts = [p.strip().lower() for p in text.split(",")]
    if len(parts) != 3 or any(p not in names for p in parts):
        raise InputError(f"--attach needs three of p, n separated by commas, got {text!r}")
    return [names[p] for p in parts]


def build_gadget(args: argparse.Namespace) -> gadgets.GadgetAssembly:
    r = args.r_e
    if args.kind == "triangle":
        return gadgets.make_triangle_block(flip=args.flip, r_e=r)
    if args.kind == "trapezoid":
        return gadgets.make_trapezoid_block(right=args.right, r_e=r)
    if args.kind == "variable":
        return gadgets.make_variable_chain(5 if args.k is None else args.k, r_e=r)
    if args.kind == "leg":
        return gadgets.make_leg_chain(3 if args.k is None else args.k, r_e=r)
    asm = gadgets.make_clause_gadget(_parse_attach(args.attach), r_e=r, leg_k=3 if args.k is None else args.k,
                                     stubs=not args.no_stubs)
    if args.legs:
        asm = gadgets.fix_legs(asm, _parse_states(args.legs))
    return asm


def cmd_gadget(args: argparse.Namespace) -> int:
    if args.r_e <= 0:
        raise InputError("--r-e must be positive")
    asm = build_gadget(args)
    lay = asm.layout
    lf = LayoutFile.from_graph(lay.graph, lay.pos, lay.r_v, lay.r_e, GADGET_TOLERANCE)
    out = Path(args.output)
    cand_path = Path(args.candidates_out) if args.candidates_out else out.with_suffix(".cand")
    out.write_text(dump_layout(lf))
    cand_path.write_text(dump_candidates(asm.candidates, asm.labels))
    log.info("wrote %s (%d edges) and %s", out, lay.graph.m, cand_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; status 2 is reserved for solver limits
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every random choice")
    common.add_argument("--eps", type=float, default=argparse.SUPPRESS,
                        help=f"relative overlap tolerance (overrides ${EPS_ENV_VAR})")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    radii = argparse.ArgumentParser(add_help=False)
    radii.add_argument("--r-e", dest="r_e", type=float, default=None, help="arrow radius override")
    radii.add_argument("--r-v", dest="r_v", type=float, default=None, help="vertex radius override")

    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--time-limit", type=float, default=None, help="exact solver limit in seconds")
    limits.add_argument("--node-limit", type=_positive_int, default=None, help="exact solver search-node limit")

    p = _Parser(prog="arrowplace", description="Place arrowheads in straight-line digraph drawings.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("place", parents=[common, radii, limits], help="compute a placement")
    sp.add_argument("input", help="layout file")
    sp.add_argument("--solver", choices=list(SOLVERS), default="exact")
    sp.add_argument("--candidates", help="explicit candidate file (skips position generation)")
    sp.add_argument("-o", "--output", help="placement file (default stdout)")
    sp.set_defaults(func=cmd_place)

    sp = sub.add_parser("render", parents=[common, radii], help="draw a layout and placement as SVG")
    sp.add_argument("layout")
    sp.add_argument("--placement")
    sp.add_argument("--candidates", help="explicit candidate file")
    sp.add_argument("--show-candidates", action="store_true")
    sp.add_argument("--show-conflicts", action="store_true")
    sp.add_argument("-o", "--output", help="SVG file (default stdout)")
    sp.set_defaults(func=cmd_render)

    gp = sub.add_parser("gen", help="generate inputs")
    gsub = gp.add_subparsers(dest="generator", required=True)
    sp = gsub.add_parser("random", parents=[common], help="random layout")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", type=float, default=1.5)
    sp.add_argument("--min-sep", type=float, default=10.0)
    sp.add_argument("-o", "--output", help="layout file (default stdout)")
    sp.set_defaults(func=cmd_gen_random)

    sp = sub.add_parser("bench", parents=[common, radii, limits], help="run solvers on a directory of layouts")
    sp.add_argument("directory")
    sp.add_argument("--solvers", default=",".join(SOLVERS))
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("-o", "--output", help="CSV file (default stdout)")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("gadget", parents=[common], help="write a hardness gadget with its candidates")
    sp.add_argument("kind", choices=GADGET_KINDS)
    sp.add_argument("--k", type=int, default=None, help="chain length (variable: 5, leg and clause legs: 3)")
    sp.add_argument("--r-e", dest="r_e", type=float, default=10.0)
    sp.add_argument("--flip", action="store_true", help="triangle: apex down")
    sp.add_argument("--right", action="store_true", help="trapezoid: diagonal on the right")
    sp.add_argument("--legs", help="clause: fix legs, e.g. d,d,s (s solid, d dashed, - free)")
    sp.add_argument("--attach", default="p,p,p", help="clause: literal per leg, p plain or n negated")
    sp.add_argument("--no-stubs", action="store_true", help="clause: omit the variable chains")
    sp.add_argument("-o", "--output", required=True, help="layout file")
    sp.add_argument("--candidates-out", help="candidate file (default: output with .cand suffix)")
    sp.set_defaults(func=cmd_gadget)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", 0), ("eps", None), ("verbose", 0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s")
    saved = get_eps_scale()
    try:
        set_eps_scale(env_eps_scale())
        return args.func(args)
    except (InputError, FormatError, LayoutError, GenerationError, RenderError, gadgets.GadgetError, ValueError) as exc:
        print(f"arrowplace: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        set_eps_scale(saved)


if __name__ == "__main__":
    sys.exit(main())
