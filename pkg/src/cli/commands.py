"""
CLI Commands for SLUE pose uncertainty bounds

JSON results go to stdout; tables and progress go to stderr.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.conformal import Norm, calibrate_all
from src.constraints import Form
from src.harness import (
    NoiseCorrelation,
    PoseSource,
    SceneConfig,
    evaluate_coverage,
    run_benchmark,
    toy2d,
)
from src.pnp import PnpProblem, pnp_estimate
from src.projection import ProjectionReport, project_joint
from src.serialization import (
    PoseModel,
    bounds_to_json,
    coverage_to_json,
    ellipsoid_from_result,
    load_bounds,
    load_calibration_records,
    load_observations,
    load_results,
    projection_to_json,
    result_to_json,
    toy2d_to_json,
    write_ellipse_slices_csv,
    write_json,
)
from src.slue import SplitTarget, solve_frame
from src.utils.config_loader import get_config
from src.utils.errors import SlueError
from src.utils.logger import get_logger

logger = get_logger(__name__)
console = Console(stderr=True)
config = get_config()

FORMS = [f.value for f in (Form.ROTMAT, Form.QUAT)]
NORMS = [n.value for n in Norm]


def _emit(data: Any, output: Optional[str]):
    """Print JSON to stdout and optionally save it"""
    click.echo(write_json(data, output))


def _scene_config(ctx: click.Context, **overrides) -> SceneConfig:
    if ctx.obj.get("seed") is not None:
        overrides["seed"] = ctx.obj["seed"]
    try:
        return SceneConfig.from_config({k: v for k, v in overrides.items() if v is not None})
    except SlueError as e:
        raise click.BadParameter(str(e))


@click.group()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
              help='YAML or JSON configuration file')
@click.option('--seed', type=int, default=None, help='Seed for every synthetic scene')
@click.pass_context
def cli(ctx, config_path, seed):
    """SLUE pose uncertainty bounds CLI"""
    ctx.ensure_object(dict)
    if config_path:
        config.reload(config_path)
    ctx.obj["seed"] = seed


@cli.command()
@click.argument('records', type=click.Path(exists=True, dir_okay=False))
@click.option('--alpha', type=float, default=None, help='Miscoverage level (config conformal.alpha)')
@click.option('--norm', type=click.Choice(NORMS), default=None, help='Score norm (config conformal.norm)')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Also write the bounds JSON here')
def calibrate(records, alpha, norm, output):
    """Calibrate per-keypoint radii from a JSON-lines records file"""
    alpha = config.get_float('conformal.alpha', 0.1) if alpha is None else alpha
    norm = norm or config.get('conformal.norm', 'infinity')
    if not 0 < alpha < 1:
        raise click.BadParameter(f"alpha must lie in (0, 1), got {alpha}", param_hint='--alpha')

    try:
        bounds = calibrate_all(load_calibration_records(records), alpha, norm)
    except SlueError as e:
        raise click.ClickException(str(e))

    table = Table(title=f"Keypoint bounds (alpha={alpha}, {norm} norm)",
                  show_header=True, header_style="bold magenta")
    table.add_column("Keypoint", style="cyan", justify="right")
    table.add_column("Radius (px)", style="green", justify="right")
    table.add_column("Records", style="yellow", justify="right")
    for kid, bound in bounds.items():
        radius = "[red]inf[/red]" if bound.infinite else f"{bound.radius:.3f}"
        table.add_row(str(kid), radius, str(bound.n_records))
    console.print(table)

    _emit(bounds_to_json(bounds, alpha, norm), output)


@cli.command()
@click.argument('observations', type=click.Path(exists=True, dir_okay=False))
@click.option('--bounds', 'bounds_path', type=click.Path(exists=True, dir_okay=False),
              help='Calibrated bounds JSON for frames without radii')
@click.option('--pnp', 'use_pnp', is_flag=True, help='Center on the PnP estimate instead of the frame pose')
@click.option('--form', type=click.Choice(FORMS), default=None, help='Constraint form (default by order)')
@click.option('--order', type=click.IntRange(min=1), default=1, help='Relaxation order')
@click.option('--split', type=click.Choice([t.value for t in SplitTarget]), default=None,
              help='Bound one block only')
@click.option('--dump-lmi', type=click.Path(file_okay=False), default=None,
              help='Directory for per-frame LMI triplet dumps')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Also write the results JSON here')
def bound(observations, bounds_path, use_pnp, form, order, split, dump_lmi, output):
    """Certify a pose ellipsoid for every frame of an observations file"""
    try:
        frames = load_observations(observations)
        bounds = load_bounds(bounds_path) if bounds_path else None
    except SlueError as e:
        raise click.ClickException(str(e))

    results: List[Dict[str, Any]] = []
    for index, frame in enumerate(frames):
        try:
            obs = frame.to_observation_set(bounds)
        except SlueError as e:
            raise click.ClickException(f"frame {index}: {e}")

        if use_pnp:
            try:
                estimate = pnp_estimate(PnpProblem(obs))
            except SlueError as e:
                raise click.ClickException(f"frame {index}: {e}")
            pose = estimate.pose
            console.print(f"[cyan]Frame {index}: PnP {estimate.method}, gap {estimate.tightness:.2e}[/cyan]")
        elif frame.pose is not None:
            pose = frame.pose.to_pose()
        else:
            raise click.UsageError(f"frame {index} has no pose; pass --pnp")

        dump_path = str(Path(dump_lmi) / f"frame_{index:04d}.lmi") if dump_lmi else None
        result = solve_frame(index, obs, pose, form, order, split, dump_path=dump_path)
        style = "green" if result.ok else "red"
        detail = f"logdet {result.logdet:.4f}" if result.ok else result.message
        console.print(f"[{style}]Frame {index}: {result.status.value}[/{style}] "
                      f"({result.solve_time:.3f}s) {detail}")
        results.append(result_to_json(result, frame=index))

    _emit({"results": results}, output)


def _display_projection(index: int, report: ProjectionReport):
    content = Text()
    content.append("Translation volume: ", style="bold")
    content.append(f"{report.volumes['translation_m3']:.3e} m^3\n", style="green")
    content.append("Angular volume: ", style="bold")
    content.append(f"{report.volumes['angular_deg3']:.3e} deg^3\n", style="green")
    content.append("Representation: ", style="bold")
    content.append(report.angular.representation.value, style="cyan")
    console.print(Panel(content, title=f"Frame {index}", border_style="green", padding=(0, 2)))


@cli.command()
@click.argument('result', type=click.Path(exists=True, dir_okay=False))
@click.option('--slices', type=click.Path(dir_okay=False), default=None,
              help='CSV of 2D ellipse outlines (per frame, suffixed when several)')
@click.option('--n-points', type=click.IntRange(min=8), default=None,
              help='Points per outline (config projection.slice_points)')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Also write the projections JSON here')
def project(result, slices, n_points, output):
    """Translation and axis-angle marginals of bound results"""
    try:
        models = load_results(result)
    except SlueError as e:
        raise click.ClickException(str(e))

    projections: List[Dict[str, Any]] = []
    for model in models:
        entry: Dict[str, Any] = {"frame": model.frame, "status": model.status}
        if model.status != "ok":
            entry["message"] = model.message
            projections.append(entry)
            continue
        try:
            joint, pose = ellipsoid_from_result(model)
            if pose is None:
                raise click.ClickException(f"frame {model.frame}: result has no pose_estimate")
            report = project_joint(joint, pose.rotation,
                                   np.array(model.reference_quaternion) if model.reference_quaternion else None)
        except SlueError as e:
            entry["status"] = "degenerate"
            entry["message"] = str(e)
            projections.append(entry)
            continue

        entry.update(projection_to_json(report))
        projections.append(entry)
        _display_projection(model.frame, report)

        if slices:
            path = Path(slices)
            if len(models) > 1:
                path = path.with_name(f"{path.stem}_{model.frame:04d}{path.suffix}")
            write_ellipse_slices_csv(path, report.translation, report.angular, n_points)

    _emit({"projections": projections}, output)


@cli.command()
@click.option('--alpha', type=float, default=None, help='Miscoverage level (config conformal.alpha)')
@click.option('--order', type=click.IntRange(min=1), default=1, help='Relaxation order')
@click.option('--form', type=click.Choice(FORMS), default=None, help='Constraint form (default by order)')
@click.option('--n-calibration', type=click.IntRange(min=1), default=200, help='Calibration frames')
@click.option('--n-eval', type=click.IntRange(min=1), default=100, help='Evaluation frames')
@click.option('--pose-source', type=click.Choice([p.value for p in PoseSource]), default=PoseSource.PNP.value,
              help='Ellipsoid center provider')
@click.option('--correlation', type=click.Choice([c.value for c in NoiseCorrelation]), default=None,
              help='Noise correlation across keypoints (config harness.noise_correlation)')
@click.option('--no-solve', is_flag=True, help='Skip ellipsoid solves (keypoint and set coverage only)')
@click.option('--workers', type=click.IntRange(min=1), default=None, help='Frame-parallel threads')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Also write the report JSON here')
@click.pass_context
def coverage(ctx, alpha, order, form, n_calibration, n_eval, pose_source, correlation, no_solve, workers, output):
    """Empirical keypoint, set and ellipsoid coverage on synthetic scenes"""
    alpha = config.get_float('conformal.alpha', 0.1) if alpha is None else alpha
    if not 0 < alpha < 1:
        raise click.BadParameter(f"alpha must lie in (0, 1), got {alpha}", param_hint='--alpha')
    cfg = _scene_config(ctx, noise_correlation=correlation)

    console.print(f"\n[bold cyan]Coverage run: alpha={alpha}, order {order}, "
                  f"{n_calibration} calibration / {n_eval} evaluation frames[/bold cyan]\n")
    try:
        report = evaluate_coverage(cfg, alpha, order, form, n_calibration, n_eval,
                                   solve=not no_solve, pose_source=pose_source, workers=workers)
    except SlueError as e:
        raise click.ClickException(str(e))

    table = Table(title="Coverage", show_header=True, header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green", justify="right")
    table.add_row("Target (1 - alpha)", f"{1 - alpha:.3f}")
    table.add_row("Keypoint", f"{report.keypoint_coverage:.3f}")
    table.add_row("Set", f"{report.set_coverage:.3f}")
    if report.ellipsoid_coverage is not None:
        table.add_row("Ellipsoid", f"{report.ellipsoid_coverage:.3f}")
        table.add_row("Set (solved frames)", f"{report.solved_set_coverage:.3f}")
        table.add_row("Set outside ellipsoid", str(report.containment_violations))
    table.add_row("Failed frames", f"{report.n_failed}/{report.n_frames}")
    console.print(table)

    _emit(coverage_to_json(report), output)


@cli.command(name='toy2d')
@click.argument('constraints', type=click.Path(exists=True, dir_okay=False), required=False)
@click.option('--kappa-max', type=click.IntRange(min=0), default=3, help='Largest multiplier half-degree')
@click.option('--extent', type=float, default=2.0, help='Half-width of the checking grid')
@click.option('--grid-points', type=click.IntRange(min=3), default=201, help='Grid resolution per axis')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Also write the report JSON here')
def toy2d_command(constraints, kappa_max, extent, grid_points, output):
    """
    Hierarchy of ellipses for a planar set

    CONSTRAINTS is a JSON file {"constraints": [3x3, ...]} of homogeneous forms over
    [1, u, v] with x^T A x <= 0; the crescent set is used when omitted.
    """
    matrices = None
    if constraints:
        with open(constraints, "r") as f:
            try:
                data = json.load(f)
                matrices = [np.array(m, dtype=float) for m in data["constraints"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise click.ClickException(f"{constraints}: expected {{\"constraints\": [3x3, ...]}} ({e})")
        if any(m.shape != (3, 3) for m in matrices):
            raise click.ClickException(f"{constraints}: every constraint must be 3 x 3")

    try:
        report = toy2d(matrices, kappa_max=kappa_max, extent=extent, grid_points=grid_points)
    except SlueError as e:
        raise click.ClickException(str(e))

    table = Table(title=f"Planar hierarchy ({report.n_feasible} feasible grid points)",
                  show_header=True, header_style="bold magenta")
    table.add_column("Order", style="cyan", justify="center")
    table.add_column("logdet H", style="white", justify="right")
    table.add_column("Area", style="green", justify="right")
    table.add_column("Grid outside", style="yellow", justify="right")
    for o in report.orders:
        table.add_row(str(o.order), f"{o.logdet:.6f}", f"{o.area:.6f}", str(o.n_outside))
    console.print(table)
    if not report.monotone:
        console.print("[yellow]logdet is not monotone in order[/yellow]")

    _emit(toy2d_to_json(report), output)


@cli.command()
@click.option('--frames', 'n_frames', type=click.IntRange(min=1), default=10, help='Frames per case')
@click.option('--case', 'cases', multiple=True, metavar='FORM:ORDER',
              help='Form and order to time, e.g. rotmat:1 (repeatable)')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None,
              help='Per-frame timings as CSV')
@click.pass_context
def bench(ctx, n_frames, cases, csv_path):
    """Median solve time per form and order on synthetic frames"""
    parsed = []
    for case in cases:
        try:
            form, order = case.split(":")
            parsed.append((Form(form).value, int(order)))
        except ValueError:
            raise click.BadParameter(f"expected FORM:ORDER, got '{case}'", param_hint='--case')
    cfg = _scene_config(ctx)

    frames, summary = run_benchmark(cfg, n_frames, parsed or None)

    table = Table(title="Mean runtimes", show_header=True, header_style="bold magenta")
    table.add_column("Form", style="cyan")
    table.add_column("Order", style="cyan", justify="center")
    table.add_column("Median (s)", style="green", justify="right")
    table.add_column("Mean (s)", style="green", justify="right")
    table.add_column("Solved", style="yellow", justify="right")
    for row in summary.itertuples(index=False):
        table.add_row(row.form, str(row.order), f"{row.median_s:.3f}", f"{row.mean_s:.3f}",
                      f"{row.solved}/{row.frames}")
    console.print(table)

    if csv_path:
        frames.to_csv(csv_path, index=False)
    _emit(summary.to_dict(orient="records"), None)


@cli.command()
@click.argument('observations', type=click.Path(exists=True, dir_okay=False))
@click.option('--bounds', 'bounds_path', type=click.Path(exists=True, dir_okay=False),
              help='Calibrated bounds JSON for frames without radii (used as weights)')
@click.option('--no-refine', is_flag=True, help='Skip the least-squares polish')
def pnp(observations, bounds_path, no_refine):
    """Weighted PnP pose estimate for every frame"""
    try:
        frames = load_observations(observations)
        bounds = load_bounds(bounds_path) if bounds_path else None
    except SlueError as e:
        raise click.ClickException(str(e))

    estimates = []
    for index, frame in enumerate(frames):
        try:
            result = pnp_estimate(PnpProblem(frame.to_observation_set(bounds)),
                                  refine=False if no_refine else None)
        except SlueError as e:
            raise click.ClickException(f"frame {index}: {e}")
        console.print(f"[cyan]Frame {index}: {result.method}, gap {result.tightness:.2e}[/cyan]")
        estimates.append({
            "frame": index,
            "pose": PoseModel.from_pose(result.pose).model_dump(),
            "method": result.method,
            "tightness": result.tightness,
            "objective": result.objective,
        })

    _emit({"estimates": estimates}, None)


if __name__ == '__main__':
    cli()
