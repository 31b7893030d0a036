"""Command-line interface.

Exit codes: 0 success, 1 analysis failure (infeasible, stalled, nothing
visible), 2 input errors (bad scene, bad flags).
"""
import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import orjson
import pandas as pd
from pydantic import ValidationError

from jointflex import structures
from jointflex.adapters import SolverRegistry
from jointflex.analyses.cross_beam import CrossBeamSuggestion, suggest_cross_beam
from jointflex.analyses.flock import FlockSpec, run_flock, x_spread
from jointflex.analyses.objectives import direction_objective, radial_objective
from jointflex.analyses.tolerance import ToleranceQuery, resolve_track_body, tolerance_search
from jointflex.app_logging import get_logger, setup_logging
from jointflex.constraints.system import assemble
from jointflex.errors import (
    InputError,
    InvalidObjectiveError,
    JointFlexError,
    SceneFormatError,
)
from jointflex.geometry.scene import Scene
from jointflex.lp.flex import Objective, classify_separability
from jointflex.rendering import render_svg
from jointflex.schemas.scene import scene_json_schema
from jointflex.stepper import StepParams, StepTrace, flex_iterate
from jointflex.storage.scene_files import SceneDocument, load_scene
from jointflex.storage.trace_files import build_trace, write_trace

logger = get_logger(__name__)


def _builtin_flock() -> SceneDocument:
    scene, spec = structures.flock_formation(rows=3)
    return SceneDocument(scene, spec, scene.names)


BUILTIN_SCENES: dict[str, Callable[[], SceneDocument]] = {
    "two_squares": lambda: _document(structures.two_squares()),
    "enclosed_block": lambda: _document(structures.block_in_cavity(0.05)),
    "square_ring": lambda: _document(structures.square_ring()),
    "flock_small": _builtin_flock,
}


def _document(scene: Scene) -> SceneDocument:
    return SceneDocument(scene, None, scene.names)


def resolve_scene(source: str) -> SceneDocument:
    """Load a scene file, or build the built-in scene of that name."""
    path = Path(source)
    if path.exists():
        return load_scene(path)
    if source in BUILTIN_SCENES:
        return BUILTIN_SCENES[source]()
    raise SceneFormatError(
        f"no scene file or built-in scene named {source!r} "
        f"(built-ins: {', '.join(sorted(BUILTIN_SCENES))})"
    )


def parse_vector(text: str) -> tuple[float, float]:
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'dx,dy', got {text!r}") from exc
    return (x, y)


def _load_objective(path: str, scene: Scene) -> Objective:
    try:
        raw = orjson.loads(Path(path).read_bytes())
    except (OSError, orjson.JSONDecodeError) as exc:
        raise InvalidObjectiveError(f"cannot read objective file {path}: {exc}") from exc
    weights = raw.get("weights") if isinstance(raw, dict) else raw
    if not isinstance(weights, list):
        raise InvalidObjectiveError("objective file must hold a weight list")
    objective = Objective(np.asarray(weights, dtype=float), provenance="file")
    objective.check_size(scene.n_dof)
    return objective


def build_objective(args: argparse.Namespace, scene: Scene, default_body: Optional[int] = None) -> Objective:
    if getattr(args, "objective", None):
        return _load_objective(args.objective, scene)
    if getattr(args, "radial", False):
        return radial_objective(scene)
    direction = getattr(args, "direction", None)
    if direction is None and default_body is None:
        raise InvalidObjectiveError("choose --direction, --radial or --objective")
    if args.body:
        try:
            bodies = [scene.body_index(name) for name in args.body]
        except KeyError as exc:
            raise InvalidObjectiveError(str(exc)) from exc
    elif default_body is not None:
        bodies = [default_body]
    else:
        bodies = list(scene.free_indices)
    return direction_objective(scene, direction or (1.0, 0.0), bodies)


def build_params(args: argparse.Namespace) -> StepParams:
    options = {
        "eta": args.eta,
        "max_iters": args.max_iters,
        "corner_mode": args.corner_mode,
        "solver": args.solver,
    }
    return StepParams(**{k: v for k, v in options.items() if v is not None})


def _report_trace(trace: StepTrace) -> None:
    print(f"terminal: {trace.terminal.value}")
    print(f"iterations: {trace.n_iterations}")
    gain = float(trace.cumulative_objective[-1]) if trace.n_iterations else 0.0
    print(f"objective gain: {gain:.6g}")
    moves = trace.total_displacement.reshape(-1, 3)
    names = trace.initial.names
    for body, (dx, dy, dtheta) in zip(trace.initial.free_indices, moves):
        if abs(dx) + abs(dy) + abs(dtheta) > 0:
            print(f"  {names[body]}: dx={dx:.6g} dy={dy:.6g} dtheta={dtheta:.6g}")


def _outputs(
    args: argparse.Namespace,
    trace: StepTrace,
    params: StepParams,
    flock: Optional[FlockSpec] = None,
    beam: Optional[CrossBeamSuggestion] = None,
) -> None:
    if args.trace:
        write_trace(args.trace, build_trace(trace, args.command, params, flock))
        logger.info(f"Wrote trace to {args.trace}")
    if args.svg:
        render_svg(trace.initial, trace.final, args.svg, beam)


def cmd_validate(args: argparse.Namespace) -> int:
    document = resolve_scene(args.scene)
    scene = document.scene
    system = assemble(scene)
    stats = system.stats()
    print(f"bodies: {len(scene)} ({scene.n_free} free, {len(scene) - scene.n_free} fixed)")
    print(f"dofs: {scene.n_dof}")
    print(f"constraint rows: {stats['rows']} (non-zeros {stats['nnz']})")
    if document.flock is not None:
        print(f"flock: {len(document.flock.robots)} robots")
    print("ok")
    return 0


def cmd_schema(args: argparse.Namespace) -> int:
    print(orjson.dumps(scene_json_schema(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode())
    return 0


def cmd_flex(args: argparse.Namespace) -> int:
    scene = resolve_scene(args.scene).scene
    objective = build_objective(args, scene)
    params = build_params(args)
    trace = flex_iterate(scene, objective, params)
    _report_trace(trace)
    beam = None
    if args.beam:
        beam = suggest_cross_beam(trace.initial, trace.final)
        names = scene.names
        print(
            f"cross beam: {names[beam.pair.body_a]}.v{beam.pair.vertex_a} - "
            f"{names[beam.pair.body_b]}.v{beam.pair.vertex_b} (change {beam.change:.6g})"
        )
    _outputs(args, trace, params, beam=beam)
    trace.raise_for_terminal()
    return 0


def cmd_separate(args: argparse.Namespace) -> int:
    scene = resolve_scene(args.scene).scene
    verdict = classify_separability(scene, k=args.k, solver=args.solver)
    if not verdict.separable:
        print("inseparable under linear model")
        return 1
    direction = verdict.direction.reshape(-1, 3)
    print(f"separable (translation sum sign {verdict.sign:+d})")
    names = scene.names
    for body, (dx, dy, dtheta) in zip(scene.free_indices, direction):
        print(f"  {names[body]}: dx={dx:.6g} dy={dy:.6g} dtheta={dtheta:.6g}")
    print(f"note: {verdict.caveat}")
    return 0


def cmd_tolerance(args: argparse.Namespace) -> int:
    scene = resolve_scene(args.scene).scene
    try:
        track = resolve_track_body(scene, args.track)
    except KeyError as exc:
        raise InvalidObjectiveError(exc.args[0]) from exc
    objective = build_objective(args, scene, default_body=track)
    query = ToleranceQuery(
        t_max=args.t_max,
        threshold=args.threshold,
        track_body=track,
        objective=objective,
        bisection_tolerance=args.bisection_tolerance,
        step_params=build_params(args),
    )
    result = tolerance_search(scene, query)
    print(f"t*: {result.t_star:.6g}")
    print(f"samples: {len(result.samples)}")
    if not result.monotone:
        print("warning: flex metric was not monotone over the sampled insets")
    return 0


def cmd_flock(args: argparse.Namespace) -> int:
    document = resolve_scene(args.scene)
    if document.flock is None:
        raise SceneFormatError("scene has no flock block", field="flock")
    params = build_params(args)
    trace = run_flock(document.scene, document.flock, params)
    before = x_spread(document.flock, trace.initial)
    after = x_spread(document.flock, trace.final)
    print(f"terminal: {trace.terminal.value}")
    print(f"iterations: {trace.n_iterations}")
    print(f"x spread: {before:.6g} -> {after:.6g}")
    _outputs(args, trace, params, document.flock)
    trace.raise_for_terminal()
    return 0


def bench_one(n: int, clearance: float, max_iters: int, solver: Optional[str] = None) -> dict:
    """Flex an ``n``-piece puzzle grid toward -x (into its fixed corner) and time it."""
    started = time.perf_counter()
    scene = structures.puzzle_grid(n, clearance=clearance)
    stats = assemble(scene).stats()
    objective = direction_objective(scene, (-1.0, 0.0), scene.free_indices)
    trace = flex_iterate(scene, objective, StepParams(max_iters=max_iters, solver=solver))
    return {
        "bodies": n,
        "rows": stats["rows"],
        "cols": stats["cols"],
        "nnz": stats["nnz"],
        "iterations": trace.n_iterations,
        "terminal": trace.terminal.value,
        "assemble_s": trace.timings["assemble"],
        "solve_s": trace.timings["solve"],
        "total_s": time.perf_counter() - started,
    }


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = args.n or [36]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(bench_one, n, args.clearance, args.max_iters or 20, args.solver)
                for n in sizes
            ]
            rows = [f.result() for f in futures]
    else:
        rows = [bench_one(n, args.clearance, args.max_iters or 20, args.solver) for n in sizes]
    table = pd.DataFrame(rows).set_index("bodies")
    print(table.to_string(float_format=lambda v: f"{v:.3f}"))
    return 0


def _add_step_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eta", type=float, help="Line-search violation tolerance")
    parser.add_argument("--max-iters", type=int, help="Iteration cap")
    parser.add_argument("--corner-mode", choices=["averaged", "plain"])


def _add_objective_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--direction", type=parse_vector, help="Translation direction 'dx,dy'")
    group.add_argument("--radial", action="store_true", help="Push every body away from the centroid")
    group.add_argument("--objective", help="JSON file with LP weights")
    parser.add_argument("--body", action="append", help="Body to push (repeatable)")


def _add_solver_option(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a value given before the subcommand
    parser.add_argument(
        "--solver", choices=SolverRegistry.list_solvers(), default=argparse.SUPPRESS,
        help="LP backend (default from settings)",
    )


def _add_outputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trace", help="Write a JSON trace here")
    parser.add_argument("--svg", help="Write an SVG overlay here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jointflex", description="Free-motion analysis of loosely jointed planar assemblies"
    )
    parser.add_argument("--log-level", help="Logging level (default from settings)")
    parser.add_argument("--log-format", choices=["json", "text"])
    parser.add_argument(
        "--solver", choices=SolverRegistry.list_solvers(), help="LP backend (default from settings)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Parse a scene and report its constraint system")
    p.add_argument("scene")
    _add_solver_option(p)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("schema", help="Print the scene file JSON schema")
    p.set_defaults(handler=cmd_schema)

    p = sub.add_parser("flex", help="Iterate the flex LP from a scene")
    p.add_argument("scene")
    _add_solver_option(p)
    _add_objective_options(p)
    _add_step_options(p)
    _add_outputs(p)
    p.add_argument("--beam", action="store_true", help="Suggest a cross beam")
    p.set_defaults(handler=cmd_flex)

    p = sub.add_parser("separate", help="Classify a scene as separable or interlocked")
    p.add_argument("scene")
    _add_solver_option(p)
    p.add_argument("--k", type=float, help="Translation-sum lower bound")
    p.set_defaults(handler=cmd_separate)

    p = sub.add_parser("tolerance", help="Search the loosest acceptable joint inset")
    p.add_argument("scene")
    _add_solver_option(p)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--track", help="Tracked body (default: first free body)")
    p.add_argument("--bisection-tolerance", type=float, default=1e-4)
    _add_objective_options(p)
    _add_step_options(p)
    p.set_defaults(handler=cmd_tolerance)

    p = sub.add_parser("flock", help="Compress a flock toward its leader's x")
    p.add_argument("scene")
    _add_solver_option(p)
    _add_step_options(p)
    _add_outputs(p)
    p.set_defaults(handler=cmd_flock)

    p = sub.add_parser("bench", help="Time the flex loop on generated puzzle grids")
    _add_solver_option(p)
    p.add_argument("--n", type=int, action="append", help="Grid size in pieces (repeatable)")
    p.add_argument("--clearance", type=float, default=0.02)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    setup_logging(args.log_level, args.log_format)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc.errors()[0]['msg']}", file=sys.stderr)
        return 2
    except JointFlexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
