"""Prefect flows behind the profile, coning and axioms commands."""
from typing import Dict, List, Optional

from prefect import flow, get_run_logger
from prefect.task_runners import ConcurrentTaskRunner

from isofill.flows.filling import batched_filler, load_settings
from isofill.formats import load_complex, write_profile
from isofill.profiler.axioms import check_rectangle, check_theta, rectangle_loops, sample_theta_triples
from isofill.profiler.coning import check_coning
from isofill.profiler.profile import IsoProfile, profile, profile_loops, worst_status
from isofill.rings import make_ring
from isofill.solver import Budget


@flow(name="profile", task_runner=ConcurrentTaskRunner())
def profile_flow(
    complex_path: str,
    dim: int,
    lmax: int,
    ring: str,
    out: str,
    exhaustive_to: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    rectangles: Optional[int] = None,
    jobs: int = 1,
    config_file: Optional[str] = None,
    budget_nodes: Optional[int] = None,
    budget_ms: Optional[int] = None,
) -> Dict:
    """
    Write the empirical isoperimetric profile of a complex.

    :param rectangles: profile rectangle loops up to this side instead of all cycles
    :param jobs: number of concurrent filling batches; does not change the output
    """
    logger = get_run_logger()
    settings = load_settings(config_file, budget_nodes, budget_ms)
    complex = load_complex(complex_path)
    coefficients = make_ring(ring)
    fill = batched_filler(complex, settings, jobs)
    try:
        if rectangles:
            loops = [r.loop for r in rectangle_loops(complex, rectangles)]
            p: IsoProfile = profile_loops(complex, loops, coefficients, fill=fill, logger=logger)
        else:
            p = profile(
                complex,
                dim,
                lmax,
                coefficients,
                l_exhaustive=exhaustive_to,
                samples=samples,
                seed=seed,
                settings=settings.profiler,
                fill=fill,
                logger=logger,
            )
    except Exception as e:
        logger.error(f"profile failed: {e}")
        raise
    echo = {"budget_nodes": settings.solver.budget_nodes, "budget_ms": settings.solver.budget_ms}
    write_profile(p, out, echo=echo)
    return {
        "complex": p.complex_id,
        "entries": len(p.entries),
        "max_f_hat": str(p.entries[-1].f_hat) if p.entries else "0",
        "worst_status": worst_status(e.worst_status for e in p.entries).value,
        "seed": p.seed,
    }


@flow(name="coning", task_runner=ConcurrentTaskRunner())
def coning_flow(
    complex_path: str,
    basepoint: int,
    radii: List[int],
    dim: int = 1,
    ring: str = "Z:abs",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
    config_file: Optional[str] = None,
    budget_nodes: Optional[int] = None,
    budget_ms: Optional[int] = None,
) -> Dict:
    logger = get_run_logger()
    settings = load_settings(config_file, budget_nodes, budget_ms)
    complex = load_complex(complex_path)
    report = check_coning(
        complex,
        basepoint,
        radii,
        dim,
        make_ring(ring),
        samples=samples,
        seed=seed,
        settings=settings.profiler,
        fill=batched_filler(complex, settings, jobs),
        logger=logger,
    )
    return report.as_dict()


@flow(name="axioms", task_runner=ConcurrentTaskRunner())
def axioms_flow(
    complex_path: str,
    ring: str = "Z:abs",
    triples: int = 200,
    max_side: int = 3,
    seed: int = 0,
    all_placements: bool = True,
    config_file: Optional[str] = None,
    budget_nodes: Optional[int] = None,
    budget_ms: Optional[int] = None,
) -> Dict:
    """Theta inequality on seeded path triples and the rectangle inequality on every rectangle."""
    logger = get_run_logger()
    settings = load_settings(config_file, budget_nodes, budget_ms)
    complex = load_complex(complex_path)
    coefficients = make_ring(ring)
    budget = Budget.from_settings(settings.solver)

    theta = {"checked": 0, "violations": 0, "inconclusive": 0}
    for a1, a2, a3 in sample_theta_triples(complex, triples, seed):
        report = check_theta(complex, a1, a2, a3, coefficients, budget, settings.solver, logger)
        theta["checked"] += 1
        if report.holds is None:
            theta["inconclusive"] += 1
        elif not report.holds:
            theta["violations"] += 1

    rectangle = {"checked": 0, "violations": 0, "inconclusive": 0, "K": None}
    for r in rectangle_loops(complex, max_side, all_placements=all_placements):
        report = check_rectangle(complex, r.sides, coefficients, budget, settings.solver, logger)
        rectangle["checked"] += 1
        rectangle["K"] = str(report.K)
        if report.holds is None:
            rectangle["inconclusive"] += 1
        elif not report.holds:
            rectangle["violations"] += 1
            logger.error(f"rectangle {r.n}x{r.m} at {r.sides[0][0]}: {report.as_dict()}")
    logger.info(f"theta: {theta}, rectangle: {rectangle}")
    return {"theta": theta, "rectangle": rectangle, "seed": seed}
