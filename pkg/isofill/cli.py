"""Command-line front end.

Run from the command line::

    isofill build --preset grid:3x3 --out g.cx
    isofill --jobs 4 --report run.json profile --complex g.cx --dim 1 --lmax 8 --ring Z:abs --out g.csv

Exit status: 0 success, 1 usage, 2 contract or configuration error,
3 budget exhaustion, 4 certification failure.
"""
from datetime import datetime, timezone
import json
import logging
from pathlib import Path
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

import click
from dotenv import load_dotenv
from pydantic import BaseModel, Field
import typer

from isofill import __version__
from isofill.builders.complexes import parse_preset, rips_complex
from isofill.builders.groups import cayley_ball
from isofill.config import ProfilerSettings, Settings
from isofill.errors import BudgetExhaustedError, ContractError, IsofillError
from isofill.flows.filling import area_flow, delta_flow, fill_flow, hypfill_batch_flow, hypfill_flow
from isofill.flows.profiling import axioms_flow, coning_flow, profile_flow
from isofill.formats import (
    load_complex,
    load_metric,
    load_presentation,
    read_profile,
    save_complex,
    write_plotdata,
)
from isofill.profiler.profile import GrowthClass, IsoProfile, check_subeuclidean, classify_growth
from isofill.rings import make_ring

logger = logging.getLogger("isofill.cli")

app = typer.Typer(add_completion=False, help="Homological filling norms and isoperimetric profiles.")


class JobConfig(BaseModel):
    command: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    ring: Optional[str] = None
    budget_nodes: Optional[int] = None
    budget_ms: Optional[int] = None
    seed: Optional[int] = None
    outputs: Dict[str, str] = Field(default_factory=dict)
    jobs: int = 1
    verbosity: int = 0


class RunReport(BaseModel):
    command: JobConfig
    version: str = __version__
    started: str
    wall_time: float
    summary: Dict[str, Any] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)


class _Options(BaseModel):
    report: Optional[Path] = None
    config: Optional[str] = None
    budget_nodes: Optional[int] = None
    budget_ms: Optional[int] = None
    jobs: int = 1
    verbose: int = 0


UNCERTIFIED = ("upper_bound", "no_filling", "infeasible_within_budget")


def _warnings(summary: Any, where: str = "") -> List[str]:
    """Uncertified statuses found anywhere in a summary."""
    found = []
    if isinstance(summary, dict):
        for key, item in summary.items():
            if key.endswith("status") and item in UNCERTIFIED:
                found.append(f"{where}{key}: {item}")
            found += _warnings(item, f"{where}{key}.")
    elif isinstance(summary, list):
        for i, item in enumerate(summary):
            found += _warnings(item, f"{where}{i}.")
    return found


def _job(command: str, ring: Optional[str] = None, seed: Optional[int] = None, outputs=None, **inputs) -> JobConfig:
    """JobConfig with paths and other values rendered as plain text or numbers."""

    def plain(value):
        return str(value) if isinstance(value, Path) else value

    return JobConfig(
        command=command,
        inputs={k: plain(v) for k, v in inputs.items()},
        ring=ring,
        seed=seed,
        outputs={k: str(v) for k, v in (outputs or {}).items() if v is not None},
    )


def _run(ctx: typer.Context, job: JobConfig, work) -> Dict[str, Any]:
    """Run ``work``, echo its summary and write the run report."""
    options: _Options = ctx.obj
    job.budget_nodes = options.budget_nodes
    job.budget_ms = options.budget_ms
    job.jobs = options.jobs
    job.verbosity = options.verbose
    started = datetime.now(timezone.utc).isoformat()
    start = time.time()
    summary = work()
    report = RunReport(
        command=job,
        started=started,
        wall_time=round(time.time() - start, 3),
        summary=summary,
        warnings=_warnings(summary),
    )
    for warning in report.warnings:
        logger.warning(warning)
    typer.echo(json.dumps(summary, indent=2, default=str))
    if options.report:
        options.report.write_text(json.dumps(report.model_dump(mode="json"), indent=2) + "\n")
    return summary


def _flow_kwargs(ctx: typer.Context) -> Dict[str, Any]:
    options: _Options = ctx.obj
    return {"config_file": options.config, "budget_nodes": options.budget_nodes, "budget_ms": options.budget_ms}


def _override_budget(ctx: typer.Context, budget_nodes: Optional[int], budget_ms: Optional[int]):
    """Per-command budgets win over the global ones."""
    update = {k: v for k, v in {"budget_nodes": budget_nodes, "budget_ms": budget_ms}.items() if v is not None}
    ctx.obj = ctx.obj.model_copy(update=update)


@app.callback()
def common(
    ctx: typer.Context,
    report: Optional[Path] = typer.Option(None, help="Write a JSON run report here."),
    config: Optional[str] = typer.Option(None, help="Alternate config.yml.", envvar="ISOFILL_CONFIG"),
    budget_nodes: Optional[int] = typer.Option(
        None, help="Search node budget per filling.", envvar="ISOFILL_BUDGET_NODES"
    ),
    budget_ms: Optional[int] = typer.Option(
        None, help="Search time budget per filling (ms).", envvar="ISOFILL_BUDGET_MS"
    ),
    jobs: int = typer.Option(1, min=1, help="Concurrent filling batches; outputs do not depend on it."),
    verbose: int = typer.Option(0, "--verbose", "-v", count=True),
):
    logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING)
    ctx.obj = _Options(
        report=report, config=config, budget_nodes=budget_nodes, budget_ms=budget_ms, jobs=jobs, verbose=verbose
    )


def _complex_summary(complex) -> Dict[str, Any]:
    return {
        "vertices": complex.n_vertices,
        "cells": {str(k): complex.count(k) for k in range(complex.dimension + 1)},
        "max_degree": complex.max_degree(),
    }


@app.command()
def build(
    ctx: typer.Context,
    out: Path = typer.Option(..., help="Complex file to write."),
    preset: Optional[str] = typer.Option(None, help="f2, f3, z, z2, z2ab, genus2, grid:WxH or tree:V,D."),
    presentation: Optional[Path] = typer.Option(None, help="YAML presentation file."),
    radius: Optional[int] = typer.Option(None, min=0, help="Ball radius for group presets."),
):
    """Build a preset complex or a Cayley ball."""
    if (preset is None) == (presentation is None):
        raise ContractError("build needs exactly one of --preset or --presentation")

    def work():
        if preset is not None:
            complex, _ = parse_preset(preset, radius)
        else:
            if radius is None:
                raise ContractError("a presentation needs --radius")
            complex, _ = cayley_ball(load_presentation(presentation), radius)
        save_complex(complex, out)
        return _complex_summary(complex)

    _run(ctx, _job("build", outputs={"complex": out}, preset=preset, presentation=presentation, radius=radius), work)


@app.command()
def rips(
    ctx: typer.Context,
    scale: str = typer.Option(..., help="Rips scale d (rational)."),
    out: Path = typer.Option(..., help="Complex file to write."),
    complex_path: Optional[Path] = typer.Option(None, "--complex", help="Take the metric of this complex."),
    metric: Optional[Path] = typer.Option(None, help="CSV distance matrix."),
    preset: Optional[str] = typer.Option(None, help="Take the metric of a preset."),
    radius: Optional[int] = typer.Option(None, min=0),
    max_dim: int = typer.Option(2, min=1),
    epsilon: str = typer.Option("1", help="Geodesic constant of a matrix metric."),
):
    """Rips complex P_d of a finite metric space."""
    sources = [x for x in (complex_path, metric, preset) if x is not None]
    if len(sources) != 1:
        raise ContractError("rips needs exactly one of --complex, --metric or --preset")

    def work():
        if complex_path is not None:
            m = load_complex(complex_path).metric
            if m is None:
                raise ContractError(f"{complex_path} carries no metric")
        elif metric is not None:
            m = load_metric(metric, epsilon)
        else:
            _, m = parse_preset(preset, radius)
        complex = rips_complex(m, scale, max_dim)
        save_complex(complex, out)
        summary = _complex_summary(complex)
        summary["scale"] = str(scale)
        return summary

    job = _job(
        "rips", outputs={"complex": out}, complex=complex_path, metric=metric, preset=preset, radius=radius,
        scale=scale, max_dim=max_dim,
    )
    _run(ctx, job, work)


@app.command()
def delta(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex"),
    mode: str = typer.Option("exact", help="exact or sampled."),
    samples: Optional[int] = typer.Option(None, min=1),
    seed: Optional[int] = typer.Option(None),
):
    """Four-point hyperbolicity constant of the complex's metric."""
    options: _Options = ctx.obj
    _run(
        ctx,
        _job("delta", seed=seed, complex=complex_path, mode=mode, samples=samples),
        lambda: delta_flow(str(complex_path), mode, samples, seed, options.config),
    )


def _budget_check(summary: Dict[str, Any]):
    if summary.get("status") == "infeasible_within_budget":
        raise BudgetExhaustedError("the search budget ran out before any filling was found")


@app.command()
def fill(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex"),
    cycle: Path = typer.Option(..., help="Chain file holding the cycle."),
    ring: str = typer.Option(..., help="Z:abs, Z:disc, Q:abs, Q:disc or ZmodM:disc."),
    out: Optional[Path] = typer.Option(None, help="Chain file for the filling."),
    budget_nodes: Optional[int] = typer.Option(None, min=1, help="Search node budget for this filling."),
    budget_ms: Optional[int] = typer.Option(None, min=1, help="Search time budget for this filling (ms)."),
):
    """Least-norm filling of a cycle."""
    make_ring(ring)
    _override_budget(ctx, budget_nodes, budget_ms)

    def work():
        summary = fill_flow(str(complex_path), str(cycle), ring, str(out) if out else None, **_flow_kwargs(ctx))
        _budget_check(summary)
        return summary

    _run(ctx, _job("fill", ring=ring, outputs={"filling": out}, complex=complex_path, cycle=cycle), work)


@app.command()
def area(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex"),
    loop: Path = typer.Option(..., help="File with the closed vertex path."),
    ring: str = typer.Option("Z:abs"),
    out: Optional[Path] = typer.Option(None),
    budget_nodes: Optional[int] = typer.Option(None, min=1, help="Search node budget for this loop."),
    budget_ms: Optional[int] = typer.Option(None, min=1, help="Search time budget for this loop (ms)."),
):
    """Area of a loop: the filling norm of its 1-chain."""
    make_ring(ring)
    _override_budget(ctx, budget_nodes, budget_ms)

    def work():
        summary = area_flow(str(complex_path), str(loop), ring, str(out) if out else None, **_flow_kwargs(ctx))
        _budget_check(summary)
        return summary

    _run(ctx, _job("area", ring=ring, outputs={"filling": out}, complex=complex_path, loop=loop), work)


@app.command()
def hypfill(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex", help="Rips complex with its metric."),
    cycle: Optional[Path] = typer.Option(None, help="Chain file; omit with --random."),
    ring: str = typer.Option("Z:disc"),
    delta_value: Optional[str] = typer.Option(None, "--delta", help="δ; estimated exactly when omitted."),
    epsilon: Optional[str] = typer.Option(None),
    basepoint: int = typer.Option(0, "--basepoint", help="Basepoint vertex."),
    out: Optional[Path] = typer.Option(None),
    trace: Optional[Path] = typer.Option(None, help="Reduction trace file."),
    random_count: Optional[int] = typer.Option(
        None, "--random", min=1, help="Fill this many seeded random cycles instead."
    ),
    max_length: int = typer.Option(10, min=3),
    seed: int = typer.Option(0),
    compare: int = typer.Option(0, min=0, help="Also fill this many of the shortest cycles exactly."),
):
    """Linear filling in a Rips complex of a hyperbolic space."""
    options: _Options = ctx.obj
    make_ring(ring)
    if (cycle is None) == (random_count is None):
        raise ContractError("hypfill needs exactly one of --cycle or --random")

    def work():
        if cycle is not None:
            return hypfill_flow(
                str(complex_path), str(cycle), ring, delta_value, epsilon, basepoint,
                str(out) if out else None, str(trace) if trace else None, options.config,
            )
        return hypfill_batch_flow(
            str(complex_path), random_count, max_length, seed, ring, delta_value, basepoint, compare, options.jobs,
            **_flow_kwargs(ctx),
        )

    job = _job(
        "hypfill", ring=ring, seed=seed, outputs={"filling": out, "trace": trace}, complex=complex_path,
        cycle=cycle, delta=delta_value, basepoint=basepoint, random=random_count, max_length=max_length,
        compare=compare,
    )
    _run(ctx, job, work)


@app.command()
def profile(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex"),
    dim: int = typer.Option(1, min=1),
    lmax: int = typer.Option(..., min=1),
    ring: str = typer.Option("Z:abs"),
    out: Path = typer.Option(..., help="Profile CSV."),
    exhaustive_to: Optional[int] = typer.Option(None, min=0),
    samples: Optional[int] = typer.Option(None, min=0),
    seed: Optional[int] = typer.Option(None),
    rectangles: Optional[int] = typer.Option(None, min=1, help="Profile rectangle loops up to this side."),
):
    """Empirical isoperimetric profile."""
    options: _Options = ctx.obj
    make_ring(ring)
    _run(
        ctx,
        _job(
            "profile", ring=ring, seed=seed, outputs={"profile": out}, complex=complex_path, dim=dim, lmax=lmax,
            exhaustive_to=exhaustive_to, samples=samples, rectangles=rectangles,
        ),
        lambda: profile_flow(
            str(complex_path), dim, lmax, ring, str(out), exhaustive_to, samples, seed, rectangles, options.jobs,
            **_flow_kwargs(ctx),
        ),
    )


def _profiler_settings(ctx: typer.Context) -> ProfilerSettings:
    options: _Options = ctx.obj
    return Settings.load(options.config).profiler


@app.command()
def classify(ctx: typer.Context, profile_path: Path = typer.Option(..., "--profile")):
    """Growth class of a profile and the sub-Euclidean check."""

    def work():
        p = read_profile(profile_path)
        settings = _profiler_settings(ctx)
        summary = classify_growth(p, settings).as_dict()
        summary["subeuclidean"] = check_subeuclidean(p, p.n, settings).as_dict()
        return summary

    _run(ctx, _job("classify", profile=profile_path), work)


@app.command()
def coning(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex"),
    base: int = typer.Option(..., help="Basepoint vertex."),
    radii: str = typer.Option(..., help="Comma separated, e.g. 2,3,4."),
    dim: int = typer.Option(1, min=1),
    ring: str = typer.Option("Z:abs"),
    samples: Optional[int] = typer.Option(None, min=0),
    seed: Optional[int] = typer.Option(None),
):
    """Empirical coning constants c_hat(r)."""
    options: _Options = ctx.obj
    make_ring(ring)
    try:
        values = [int(r) for r in radii.split(",") if r.strip()]
    except ValueError:
        raise ContractError(f"radii must be comma separated integers, got {radii!r}")
    _run(
        ctx,
        _job("coning", ring=ring, seed=seed, complex=complex_path, base=base, radii=values, dim=dim, samples=samples),
        lambda: coning_flow(
            str(complex_path), base, values, dim, ring, samples, seed, options.jobs, **_flow_kwargs(ctx)
        ),
    )


@app.command()
def axioms(
    ctx: typer.Context,
    complex_path: Path = typer.Option(..., "--complex"),
    ring: str = typer.Option("Z:abs"),
    triples: int = typer.Option(200, min=0),
    max_side: int = typer.Option(3, min=1),
    seed: int = typer.Option(0),
):
    """Theta and rectangle inequalities for loop areas."""
    make_ring(ring)
    _run(
        ctx,
        _job("axioms", ring=ring, seed=seed, complex=complex_path, triples=triples, max_side=max_side),
        lambda: axioms_flow(str(complex_path), ring, triples, max_side, seed, True, **_flow_kwargs(ctx)),
    )


def emit_plotdata(p: IsoProfile, out: Path, settings: Optional[ProfilerSettings] = None) -> GrowthClass:
    """Write l, f_hat and fitted-curve rows for external plotting."""
    if not p.entries:
        raise ContractError("profile is empty")
    growth = classify_growth(p, settings)
    write_plotdata(p, growth, out)
    return growth


@app.command()
def plotdata(
    ctx: typer.Context,
    profile_path: Path = typer.Option(..., "--profile"),
    out: Path = typer.Option(...),
):
    """Plot data with the fitted power law."""

    def work():
        return emit_plotdata(read_profile(profile_path), out, _profiler_settings(ctx)).as_dict()

    _run(ctx, _job("plotdata", outputs={"plotdata": out}, profile=profile_path), work)


def dispatch(args: Sequence[str]) -> int:
    """Run one sub-command and return its exit status."""
    command = typer.main.get_command(app)
    try:
        result = command.main(list(args), prog_name="isofill", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except IsofillError as e:
        logger.error(f"{type(e).__name__}: {e}")
        typer.echo(f"error: {e}", err=True)
        return e.exit_code
    return result if isinstance(result, int) else 0


def main():
    load_dotenv()
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
