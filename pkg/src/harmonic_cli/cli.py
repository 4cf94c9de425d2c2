from __future__ import annotations

import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import typer

from harmonic_cli.config import ANGLE_RANGES, load_config, normalize_angle_range, save_config
from harmonic_cli.helptext import HELP_TEXT
from harmonic_cli.output import dumps, format_float, in_angle_range
from harmonic_cli.parsing import InstanceSpec, batch_instances, expand_argv, parse_radians, resolve_instance
from harmonic_core.angles import arg
from harmonic_core.circle_gon import gon_vertices, verify_proposition
from harmonic_core.errors import DomainError, HarmonicError, NonGenericError, NumericalError, TransitionError
from harmonic_core.necklace import DEFAULT_GUARD, SLOW_BEAD_FRACTIONS, BEAD_FRACTIONS, build_necklace, necklace_debug_sweep
from harmonic_core.polynomial import RootMultiset, poly_from_roots
from harmonic_core.render import DEFAULT_VIEW_HALF_WIDTH, Scene, figure_scene, render_svg, scene_from_dict, scene_to_dict
from harmonic_core.rng import XorShift64Star, random_circle_angles
from harmonic_core.tangents import circle_tangency_test, tangent_directions
from harmonic_core.tracer import (
    Window,
    asymptote_fan,
    components,
    default_window,
    is_noncrossing,
    matching as continuation_matching,
    matching_from_components,
    trace as trace_curve,
)

logger = logging.getLogger(__name__)

DEMO_SEED = 42
DEMO_N = 7

app = typer.Typer(no_args_is_help=True, add_completion=False)
config_app = typer.Typer(no_args_is_help=True)
app.add_typer(config_app, name="config", help="Show/set persisted CLI defaults.")


@app.callback()
def root(
    ctx: typer.Context,
    verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="Log INFO (-v) or DEBUG (-vv) to stderr."),
    angle_range: Optional[str] = typer.Option(
        None,
        "--angle-range",
        help="Output range for circle angles: 0-2pi (default) or pi for (-pi, pi]. Overrides config.",
    ),
) -> None:
    """Harmonic algebraic curves: verify, trace, match and draw C_theta(P)."""
    if verbose:
        logging.basicConfig(
            level=logging.INFO if verbose == 1 else logging.DEBUG,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
            force=True,
        )
    cfg = load_config()
    rng = cfg.angle_range
    if angle_range is not None:
        try:
            rng = normalize_angle_range(angle_range)
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--angle-range") from e
    ctx.obj = {"angle_range": rng}


@contextmanager
def _cli_errors() -> Iterator[None]:
    try:
        yield
    except DomainError as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(code=2)
    except NumericalError as e:
        typer.echo(f"numerical error: {e}", err=True)
        diagnostics: Dict[str, Any] = {}
        if isinstance(e, NonGenericError):
            diagnostics = e.diagnostics
        elif isinstance(e, TransitionError):
            diagnostics = {"thetas": e.thetas, "matchings": e.matchings}
        if diagnostics:
            typer.echo(f"diagnostics: {dumps(diagnostics)}", err=True)
        raise typer.Exit(code=3)


def _angle_range(ctx: typer.Context) -> str:
    obj = ctx.obj if isinstance(ctx.obj, dict) else {}
    return str(obj.get("angle_range", load_config().angle_range))


def _roots_opt() -> Any:
    return typer.Option(None, "--roots", help='JSON file {"roots": [[re, im], ...], "multiplicities": [...]}.')


def _angles_opt() -> Any:
    return typer.Option(None, "--roots-angles", help="Root angles in radians: --roots-angles A1 A2 ...")


def _random_opt() -> Any:
    return typer.Option(None, "--random", min=1, help="Number of random roots on the unit circle (needs --seed).")


def _seed_opt() -> Any:
    return typer.Option(None, "--seed", min=0, help="Seed for --random (xorshift64*).")


def _theta_opt() -> Any:
    return typer.Option("0", "--theta", help="Curve parameter theta in radians (e.g. 0.5, pi/2).")


def _instance(
    roots_file: Optional[Path],
    roots_angles: Optional[List[str]],
    random_n: Optional[int],
    seed: Optional[int],
    theta: Optional[str],
) -> InstanceSpec:
    return resolve_instance(
        roots_file=roots_file,
        roots_angles=roots_angles,
        random_n=random_n,
        seed=seed,
        theta=theta,
    )


def _pt(z: complex) -> List[float]:
    return [z.real, z.imag]


def _ranged_report(d: Dict[str, Any], rng: str) -> Dict[str, Any]:
    d = dict(d)
    d["omega"] = in_angle_range(d["omega"], rng)
    d["zeros"] = [dict(z, angle=in_angle_range(z["angle"], rng)) for z in d["zeros"]]
    d["predicted"] = [in_angle_range(a, rng) for a in d["predicted"]]
    d["matched_pairs"] = [
        dict(m, predicted=in_angle_range(m["predicted"], rng), found=in_angle_range(m["found"], rng))
        for m in d["matched_pairs"]
    ]
    d["unmatched_predicted"] = [in_angle_range(a, rng) for a in d["unmatched_predicted"]]
    d["unmatched_found"] = [in_angle_range(a, rng) for a in d["unmatched_found"]]
    return d


def _verify_batch_item(item: Tuple[int, Tuple[float, ...], float, float]) -> Dict[str, Any]:
    index, angles, theta, tol = item
    roots = RootMultiset.from_angles(angles)
    try:
        rep = verify_proposition(roots, theta, tol)
    except HarmonicError as e:
        return {"index": index, "n": roots.degree, "theta": theta, "pass": False, "max_distance": None, "error": str(e)}
    return {"index": index, "n": roots.degree, "theta": theta, "pass": rep.passed, "max_distance": rep.max_distance}


@app.command()
def verify(
    ctx: typer.Context,
    roots_file: Optional[Path] = _roots_opt(),
    roots_angles: Optional[List[str]] = _angles_opt(),
    random_n: Optional[int] = _random_opt(),
    seed: Optional[int] = _seed_opt(),
    theta: str = _theta_opt(),
    tol: Optional[float] = typer.Option(None, "--tol", help="Matching tolerance in radians (default: config verify_tol)."),
    samples: Optional[int] = typer.Option(None, "--samples", help="Circle samples (default max(4096, 64n))."),
    batch: Optional[int] = typer.Option(None, "--batch", min=1, help="Verify N seeded random instances instead."),
    jobs: int = typer.Option(1, "--jobs", min=1, help="Worker processes for --batch."),
) -> None:
    """Check that the curve meets the unit circle exactly in the roots and the n-gon."""
    cfg = load_config()
    tol_v = float(tol) if tol is not None else cfg.verify_tol

    if batch is not None:
        base_seed = 0 if seed is None else seed
        logger.info("verifying %d seeded instances with %d job(s)", batch, jobs)
        items = [(i, tuple(angles), th, tol_v) for i, (angles, th) in enumerate(batch_instances(base_seed, batch))]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(_verify_batch_item, items))
        else:
            results = [_verify_batch_item(it) for it in items]
        passed = sum(1 for r in results if r["pass"])
        worst = max((r["max_distance"] for r in results if r["max_distance"] is not None), default=0.0)
        typer.echo(
            dumps(
                {
                    "pass": passed == len(results),
                    "instances": len(results),
                    "passed": passed,
                    "seed": base_seed,
                    "max_distance": worst,
                    "results": results,
                }
            )
        )
        if passed != len(results):
            raise typer.Exit(code=1)
        return

    with _cli_errors():
        inst = _instance(roots_file, roots_angles, random_n, seed, theta)
        report = verify_proposition(inst.roots, inst.theta, tol_v, samples=samples, circle_tol=cfg.circle_tol)
    out = _ranged_report(report.to_dict(), _angle_range(ctx))
    out = {"n": inst.roots.degree, **out}
    typer.echo(dumps(out))
    if not report.passed:
        raise typer.Exit(code=1)


@app.command()
def trace(
    roots_file: Optional[Path] = _roots_opt(),
    roots_angles: Optional[List[str]] = _angles_opt(),
    random_n: Optional[int] = _random_opt(),
    seed: Optional[int] = _seed_opt(),
    theta: str = _theta_opt(),
    window: Optional[float] = typer.Option(
        None, "--window", help="Window half-width about the root centroid (default: reach the asymptote radius)."
    ),
    cells: Optional[int] = typer.Option(None, "--cells", min=8, help="Grid cells per axis (default: config cells)."),
    grading: Optional[float] = typer.Option(
        None, "--grading", min=0.0, help="Grid grading towards the center (0 = uniform; default 0 with --window, else 4)."
    ),
    output_format: str = typer.Option("json", "--format", help="json or csv."),
) -> None:
    """Trace the curve with marching squares and print its polylines."""
    fmt_l = output_format.strip().lower()
    if fmt_l not in ("json", "csv"):
        raise typer.BadParameter("--format must be json or csv")
    cfg = load_config()
    with _cli_errors():
        inst = _instance(roots_file, roots_angles, random_n, seed, theta)
        p = poly_from_roots(inst.roots)
        n_cells = cells if cells is not None else cfg.cells
        if window is None:
            win = default_window(p, cells=n_cells, grading=4.0 if grading is None else grading)
        else:
            win = Window(center=inst.roots.centroid(), half_width=window, cells=n_cells, grading=grading or 0.0)
        lines = trace_curve(p, inst.theta, win)

    if fmt_l == "csv":
        typer.echo("component,index,re,im")
        for ci, line in enumerate(lines):
            for pi_, z in enumerate(line.points):
                typer.echo(f"{ci},{pi_},{format_float(z.real)},{format_float(z.imag)}")
        return
    typer.echo(
        dumps(
            {
                "theta": inst.theta,
                "window": {
                    "center": _pt(win.center),
                    "half_width": win.half_width,
                    "cells": win.cells,
                    "grading": win.grading,
                },
                "polylines": [[_pt(z) for z in line.points] for line in lines],
                "closed": [line.closed for line in lines],
            }
        )
    )


@app.command()
def matching(
    roots_file: Optional[Path] = _roots_opt(),
    roots_angles: Optional[List[str]] = _angles_opt(),
    random_n: Optional[int] = _random_opt(),
    seed: Optional[int] = _seed_opt(),
    theta: str = _theta_opt(),
    radius: Optional[float] = typer.Option(None, "--radius", help="Tracing radius R (default 2n(1 + max|z_i|))."),
    method: str = typer.Option("continuation", "--method", help="continuation or grid."),
    cells: Optional[int] = typer.Option(None, "--cells", min=8, help="Grid cells per axis for --method grid."),
) -> None:
    """Pair the 2n asymptotes that lie on the same curve component."""
    m_l = method.strip().lower()
    if m_l not in ("continuation", "grid"):
        raise typer.BadParameter("--method must be continuation or grid")
    with _cli_errors():
        inst = _instance(roots_file, roots_angles, random_n, seed, theta)
        p = poly_from_roots(inst.roots)
        if m_l == "continuation":
            m = continuation_matching(p, inst.theta, radius)
        else:
            win = default_window(p) if cells is None else default_window(p, cells=cells)
            m = matching_from_components(components(p, inst.theta, win), p.degree)
    typer.echo(
        dumps(
            {
                "theta": inst.theta,
                "n": p.degree,
                "method": m_l,
                "pairs": [list(pr) for pr in m.pairs()],
                "noncrossing": is_noncrossing(m),
            }
        )
    )


@app.command()
def necklace(
    roots_file: Optional[Path] = _roots_opt(),
    roots_angles: Optional[List[str]] = _angles_opt(),
    random_n: Optional[int] = _random_opt(),
    seed: Optional[int] = _seed_opt(),
    guard: float = typer.Option(DEFAULT_GUARD, "--guard", help="Keep bead samples this far from critical thetas."),
    dense: bool = typer.Option(False, "--dense", help="Check 9 samples per bead instead of 3."),
    debug_sweep: bool = typer.Option(False, "--debug-sweep", help="Cross-check with 64 uniform theta samples."),
) -> None:
    """Critical thetas and the matching on each interval between them."""
    with _cli_errors():
        inst = _instance(roots_file, roots_angles, random_n, seed, None)
        p = poly_from_roots(inst.roots)
        result = build_necklace(p, guard, fractions=SLOW_BEAD_FRACTIONS if dense else BEAD_FRACTIONS)
        out = result.to_dict()
        if debug_sweep:
            mismatches = necklace_debug_sweep(p, result, guard=guard)
            out["debug_sweep"] = {
                "mismatches": [
                    {"theta": mm.theta, "expected": [list(x) for x in mm.expected.pairs()], "actual": [list(x) for x in mm.actual.pairs()]}
                    for mm in mismatches
                ],
            }
    typer.echo(dumps(out))
    if debug_sweep and out["debug_sweep"]["mismatches"]:
        raise typer.Exit(code=1)


@app.command()
def tangents(
    roots_file: Optional[Path] = _roots_opt(),
    roots_angles: Optional[List[str]] = _angles_opt(),
    random_n: Optional[int] = _random_opt(),
    seed: Optional[int] = _seed_opt(),
    theta: str = _theta_opt(),
    tol: Optional[float] = typer.Option(None, "--tol", help="Angular tolerance (default: config tangent_tol)."),
) -> None:
    """Tangent directions at every root and whether one of them is tangent to the circle."""
    cfg = load_config()
    tol_v = float(tol) if tol is not None else cfg.tangent_tol
    with _cli_errors():
        inst = _instance(roots_file, roots_angles, random_n, seed, theta)
        p = poly_from_roots(inst.roots)
        on_circle = all(abs(abs(z) - 1.0) <= cfg.circle_tol for z in inst.roots.points)
        reports: List[Dict[str, Any]] = []
        for i in range(len(inst.roots)):
            if on_circle:
                reports.append(circle_tangency_test(p, inst.roots, i, inst.theta, tol_v, circle_tol=cfg.circle_tol).to_dict())
            else:
                z, k = inst.roots.entries[i]
                dirs = tangent_directions(p, inst.roots, i, inst.theta)
                reports.append({"root": _pt(z), "multiplicity": k, "directions": [d.value for d in dirs]})
    typer.echo(dumps(reports))
    if any(r.get("consistent") is False for r in reports):
        raise typer.Exit(code=1)


def _build_scene(roots: RootMultiset, theta: float, *, view: float, asymptotes: bool, circle_tol: float) -> Tuple[Scene, int]:
    p = poly_from_roots(roots)
    on_circle = all(abs(abs(z) - 1.0) <= circle_tol for z in roots.points)
    gon = gon_vertices(roots, theta, circle_tol=circle_tol).vertices if on_circle else ()
    comps = components(p, theta)
    angles: Sequence[float] = asymptote_fan(p.degree, theta).angles if asymptotes else ()
    scene = figure_scene(
        roots.points,
        gon,
        [c.polyline.points for c in comps],
        theta=theta,
        asymptote_origin=roots.centroid(),
        asymptote_angles=angles,
        half_width=view,
    )
    return scene, len(comps)


def _write_outputs(svg: str, scene: Scene, out: Optional[Path], scene_json: Optional[Path]) -> None:
    if scene_json is not None:
        scene_json.write_text(dumps(scene_to_dict(scene)) + "\n", encoding="utf-8")
    if out is not None:
        out.write_text(svg, encoding="utf-8")


@app.command()
def render(
    roots_file: Optional[Path] = _roots_opt(),
    roots_angles: Optional[List[str]] = _angles_opt(),
    random_n: Optional[int] = _random_opt(),
    seed: Optional[int] = _seed_opt(),
    theta: str = _theta_opt(),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the SVG here (default: print it to stdout)."),
    view: float = typer.Option(DEFAULT_VIEW_HALF_WIDTH, "--view", help="Half-width of the drawn square about 0."),
    asymptotes: bool = typer.Option(False, "--asymptotes", help="Draw the 2n asymptote rays."),
    scene_json: Optional[Path] = typer.Option(None, "--scene-json", help="Also write the scene as JSON."),
    from_scene: Optional[Path] = typer.Option(None, "--from-scene", help="Render a scene JSON written by --scene-json."),
) -> None:
    """Draw an instance as SVG: unit circle, curve, gon and roots."""
    cfg = load_config()
    with _cli_errors():
        if from_scene is not None:
            try:
                data = json.loads(from_scene.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                raise DomainError(f"failed to read scene {str(from_scene)!r}: {e}") from e
            scene = scene_from_dict(data)
            count = sum(len(getattr(layer, "polylines", ())) for layer in scene.layers)
        else:
            inst = _instance(roots_file, roots_angles, random_n, seed, theta)
            scene, count = _build_scene(inst.roots, inst.theta, view=view, asymptotes=asymptotes, circle_tol=cfg.circle_tol)
        svg = render_svg(scene)
    _write_outputs(svg, scene, out, scene_json)
    if out is None:
        typer.echo(svg, nl=False)
    else:
        typer.echo(dumps({"out": str(out), "components": count, "bytes": len(svg.encode("utf-8"))}))


@app.command()
def demo(
    ctx: typer.Context,
    seed: int = typer.Option(DEMO_SEED, "--seed", min=0, help="Seed for the random roots."),
    n: int = typer.Option(DEMO_N, "--n", min=1, help="Number of roots."),
    theta: str = _theta_opt(),
    out: Path = typer.Option(Path("fig1.svg"), "--out", help="SVG output path."),
    asymptotes: bool = typer.Option(False, "--asymptotes", help="Draw the 2n asymptote rays."),
    scene_json: Optional[Path] = typer.Option(None, "--scene-json", help="Also write the scene as JSON."),
) -> None:
    """Seeded random roots on the circle, verified and drawn (default n=7, theta=0)."""
    cfg = load_config()
    rng_out = _angle_range(ctx)
    with _cli_errors():
        th = parse_radians(theta)
        angles = random_circle_angles(XorShift64Star(seed), n)
        roots = RootMultiset.from_angles(angles)
        report = verify_proposition(roots, th, cfg.verify_tol, circle_tol=cfg.circle_tol)
        scene, count = _build_scene(roots, th, view=DEFAULT_VIEW_HALF_WIDTH, asymptotes=asymptotes, circle_tol=cfg.circle_tol)
        svg = render_svg(scene)
    _write_outputs(svg, scene, out, scene_json)
    typer.echo(
        dumps(
            {
                "n": roots.degree,
                "seed": seed,
                "theta": th,
                "roots": [_pt(z) for z in roots.points],
                "root_angles": [in_angle_range(arg(z), rng_out) for z in roots.points],
                "omega": in_angle_range(report.omega, rng_out),
                "verify": {"pass": report.passed, "max_distance": report.max_distance},
                "components": count,
                "out": str(out),
            }
        )
    )
    if not report.passed:
        raise typer.Exit(code=1)


@app.command()
def help() -> None:
    """Show the extended help / usage guide."""
    typer.echo(HELP_TEXT.strip())


@config_app.command("show")
def config_show() -> None:
    """Show persisted CLI config."""
    cfg = load_config()
    typer.echo(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))


@config_app.command("set")
def config_set(
    verify_tol: Optional[float] = typer.Option(None, "--verify-tol", min=0.0, help="Default verify tolerance (radians)."),
    circle_tol: Optional[float] = typer.Option(None, "--circle-tol", min=0.0, help="Unit-circle membership tolerance."),
    tangent_tol: Optional[float] = typer.Option(None, "--tangent-tol", min=0.0, help="Default tangent tolerance (radians)."),
    cells: Optional[int] = typer.Option(None, "--cells", min=8, help="Default grid cells per axis for trace."),
    angle_range: Optional[str] = typer.Option(None, "--angle-range", help=f"One of: {', '.join(ANGLE_RANGES)}."),
) -> None:
    """Persist CLI defaults so flags are not needed on every command."""
    if all(v is None for v in (verify_tol, circle_tol, tangent_tol, cells, angle_range)):
        typer.echo("Nothing to set; pass at least one option.", err=True)
        raise typer.Exit(code=2)
    cfg = load_config()
    for name, value in (("verify_tol", verify_tol), ("circle_tol", circle_tol), ("tangent_tol", tangent_tol)):
        if value is not None:
            if value <= 0.0:
                raise typer.BadParameter(f"--{name.replace('_', '-')} must be > 0")
            setattr(cfg, name, float(value))
    if cells is not None:
        cfg.cells = int(cells)
    if angle_range is not None:
        try:
            cfg.angle_range = normalize_angle_range(angle_range)
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--angle-range") from e
    save_config(cfg)
    typer.echo("Saved.")
    typer.echo(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))


def run(argv: Sequence[str]) -> int:
    """Run the CLI on argv (without the program name) and return the exit code."""
    try:
        app(args=expand_argv(argv), prog_name="harmonic")
    except SystemExit as e:
        if e.code is None:
            return 0
        if isinstance(e.code, int):
            return e.code
        typer.echo(str(e.code), err=True)
        return 1
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
