"""Prefect flows behind the fill, area, hypfill and delta commands."""
from typing import Dict, List, Optional, Sequence

from prefect import flow, get_run_logger, task
from prefect.task_runners import ConcurrentTaskRunner

from isofill.builders.metrics import estimate_delta
from isofill.chains import Chain, Complex, l1_norm
from isofill.config import Settings
from isofill.errors import CertificationError, ContractError
from isofill.formats import load_chain, load_complex, load_loop, save_chain, save_trace
from isofill.hypfill import linear_fill_many, make_context, random_cycles
from isofill.profiler.profile import Filler
from isofill.rings import make_ring
from isofill.solver import Budget, FillingResult, Status, exact_filling, path_chain


def load_settings(
    config_file: Optional[str] = None, budget_nodes: Optional[int] = None, budget_ms: Optional[int] = None
) -> Settings:
    """Settings from the config file, with explicit budgets taking precedence."""
    settings = Settings.load(config_file)
    if budget_nodes is not None:
        settings.solver.budget_nodes = budget_nodes
    if budget_ms is not None:
        settings.solver.budget_ms = budget_ms
    return settings


def chunk(items: Sequence, jobs: int) -> List[List]:
    """Split into at most ``jobs`` contiguous chunks, keeping order."""
    jobs = max(1, min(jobs, len(items)))
    size, extra = divmod(len(items), jobs)
    out, at = [], 0
    for i in range(jobs):
        step = size + (1 if i < extra else 0)
        out.append(list(items[at:at + step]))
        at += step
    return [c for c in out if c]


@task(name="fill_batch")
def fill_batch(complex: Complex, cycles: List[Chain], settings: Settings) -> List[FillingResult]:
    logger = get_run_logger()
    budget = Budget.from_settings(settings.solver)
    return [exact_filling(complex, z, budget=budget, settings=settings.solver, logger=logger) for z in cycles]


def batched_filler(complex: Complex, settings: Settings, jobs: int = 1) -> Filler:
    """Filler that spreads cycles over ``jobs`` task submissions; results keep input order."""

    def fill(cycles: Sequence[Chain]) -> List[FillingResult]:
        if not cycles:
            return []
        futures = [fill_batch.submit(complex, part, settings) for part in chunk(cycles, jobs)]
        return [result for future in futures for result in future.result()]

    return fill


def _report(result: FillingResult) -> Dict:
    summary = result.summary()
    summary["target_norm"] = str(l1_norm(result.target))
    return summary


@flow(name="fill", task_runner=ConcurrentTaskRunner())
def fill_flow(
    complex_path: str,
    cycle_path: str,
    ring: str,
    out: Optional[str] = None,
    config_file: Optional[str] = None,
    budget_nodes: Optional[int] = None,
    budget_ms: Optional[int] = None,
) -> Dict:
    """
    Least-norm filling of the cycle in ``cycle_path``.

    :param complex_path: complex file
    :param cycle_path: chain file holding the cycle
    :param ring: ring spec such as Z:disc; overrides the chain file's ring
    :param out: where to write the filling chain
    """
    logger = get_run_logger()
    settings = load_settings(config_file, budget_nodes, budget_ms)
    complex = load_complex(complex_path)
    z = load_chain(cycle_path, complex, make_ring(ring))
    logger.info(f"Filling a {z.dim}-cycle with {len(z)} cells over {z.ring.spec}")
    try:
        result = fill_batch(complex, [z], settings)[0]
    except Exception as e:
        logger.error(f"fill failed: {e}")
        raise
    if out and result.filling is not None:
        save_chain(result.filling, out, extra={"status": result.status.value, "norm": str(result.norm)})
    return _report(result)


@flow(name="area", task_runner=ConcurrentTaskRunner())
def area_flow(
    complex_path: str,
    loop_path: str,
    ring: str,
    out: Optional[str] = None,
    config_file: Optional[str] = None,
    budget_nodes: Optional[int] = None,
    budget_ms: Optional[int] = None,
) -> Dict:
    logger = get_run_logger()
    settings = load_settings(config_file, budget_nodes, budget_ms)
    complex = load_complex(complex_path)
    loop = load_loop(loop_path)
    z = path_chain(complex, loop, make_ring(ring))
    logger.info(f"Area of a loop of length {len(loop) - 1}")
    result = fill_batch(complex, [z], settings)[0]
    if out and result.filling is not None:
        save_chain(result.filling, out, extra={"status": result.status.value, "norm": str(result.norm)})
    summary = _report(result)
    summary["length"] = len(loop) - 1
    return summary


@task(name="delta")
def delta_task(complex: Complex, mode: str, samples: Optional[int], seed: Optional[int], settings: Settings):
    logger = get_run_logger()
    if complex.metric is None:
        raise ContractError("complex carries no metric")
    return estimate_delta(
        complex.metric, mode=mode, count=samples, seed=seed, settings=settings.hyperbolicity, logger=logger
    )


@flow(name="delta")
def delta_flow(
    complex_path: str,
    mode: str = "exact",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    config_file: Optional[str] = None,
) -> Dict:
    settings = load_settings(config_file)
    estimate = delta_task(load_complex(complex_path), mode, samples, seed, settings)
    return {
        "delta": str(estimate.delta),
        "mode": estimate.mode,
        "quadruples": estimate.quadruples,
        "seed": estimate.seed,
        "certificate": estimate.certificate,
    }


def _resolve_delta(complex: Complex, delta: Optional[str], settings: Settings, logger):
    if delta is not None:
        return delta
    estimate = delta_task(complex, "exact", None, None, settings)
    logger.info(f"δ = {estimate.delta} ({estimate.certificate})")
    return estimate.delta


@task(name="linear_fill_batch")
def linear_fill_batch(ctx, cycles: List[Chain]):
    logger = get_run_logger()
    return linear_fill_many(ctx, cycles, logger=logger)


@flow(name="hypfill", task_runner=ConcurrentTaskRunner())
def hypfill_flow(
    complex_path: str,
    cycle_path: str,
    ring: str = "Z:disc",
    delta: Optional[str] = None,
    epsilon: Optional[str] = None,
    basepoint: int = 0,
    out: Optional[str] = None,
    trace_out: Optional[str] = None,
    config_file: Optional[str] = None,
) -> Dict:
    """Linear filling of one 1-cycle in a Rips complex; writes the trace even when a step fails."""
    logger = get_run_logger()
    settings = load_settings(config_file)
    complex = load_complex(complex_path)
    z = load_chain(cycle_path, complex, make_ring(ring))
    delta = _resolve_delta(complex, delta, settings, logger)
    ctx = make_context(complex, delta, epsilon, basepoint, settings.hypfill)
    try:
        result, trace = linear_fill_batch(ctx, [z])[0]
    except Exception as e:
        logger.error(f"hypfill failed: {e}")
        partial = getattr(e, "trace", None)
        if trace_out and partial is not None:
            save_trace(partial, trace_out, extra={"error": str(e)})
        raise
    if out:
        save_chain(result.filling, out, extra={"status": result.status.value, "norm": str(result.norm)})
    if trace_out:
        save_trace(trace, trace_out)
    return {
        "norm": str(result.norm),
        "target_norm": str(l1_norm(z)),
        "N": ctx.N,
        "k": ctx.k,
        "delta": str(ctx.delta),
        "d": str(ctx.d),
        "steps": len(trace.steps),
        "certified": trace.certified,
    }


@flow(name="hypfill_batch", task_runner=ConcurrentTaskRunner())
def hypfill_batch_flow(
    complex_path: str,
    count: int = 100,
    max_length: int = 10,
    seed: int = 0,
    ring: str = "Z:disc",
    delta: Optional[str] = None,
    basepoint: int = 0,
    compare: int = 0,
    jobs: int = 1,
    config_file: Optional[str] = None,
    budget_nodes: Optional[int] = None,
    budget_ms: Optional[int] = None,
) -> Dict:
    """
    Linear fillings of seeded random cycles with the N·|z| check.

    The ``compare`` shortest cycles are also filled exactly, and the linear
    filling must not beat the exact optimum.
    """
    logger = get_run_logger()
    settings = load_settings(config_file, budget_nodes, budget_ms)
    complex = load_complex(complex_path)
    coefficients = make_ring(ring)
    delta = _resolve_delta(complex, delta, settings, logger)
    ctx = make_context(complex, delta, None, basepoint, settings.hypfill)
    cycles = random_cycles(complex, count, list(range(3, max_length + 1)), coefficients, seed)
    logger.info(f"{len(cycles)} random cycles, N = {ctx.N}")
    futures = [linear_fill_batch.submit(ctx, part) for part in chunk(cycles, jobs)]
    outcomes = [item for future in futures for item in future.result()]

    rows = []
    for z, (result, trace) in zip(cycles, outcomes):
        rows.append({"target_norm": str(l1_norm(z)), "norm": str(result.norm), "certified": trace.certified})
    shortest = sorted(range(len(cycles)), key=lambda i: (l1_norm(cycles[i]), cycles[i].key()))[:compare]
    if shortest:
        exact = batched_filler(complex, settings, jobs)([cycles[i] for i in shortest])
        for i, optimum in zip(shortest, exact):
            rows[i]["exact"] = None if optimum.norm is None else str(optimum.norm)
            rows[i]["exact_status"] = optimum.status.value
            if optimum.status == Status.OPTIMAL and outcomes[i][0].norm < optimum.norm:
                raise CertificationError(f"linear filling of cycle {i} beats the certified optimum")
    return {
        "N": ctx.N,
        "k": ctx.k,
        "delta": str(ctx.delta),
        "cycles": rows,
        "all_certified": all(trace.certified for _, trace in outcomes),
    }
