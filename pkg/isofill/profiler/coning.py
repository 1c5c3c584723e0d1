"""Empirical coning inequality: cycles in B_r(x) have fillings of mass <= c·r·|R|."""
from dataclasses import dataclass, field
from fractions import Fraction
import logging
import time
from typing import Dict, List, Optional, Sequence

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from isofill.chains import Chain, Complex, boundary
from isofill.config import ProfilerSettings, SolverSettings
from isofill.errors import ContractError
from isofill.profiler.profile import Filler, fill_cycles, sequential_filler, worst_status
from isofill.profiler.sampling import coherent_patch, patch_cycles, random_walk_cycles
from isofill.rings import NormedRing
from isofill.solver import Budget, Status

logger = logging.getLogger("isofill.profiler")


def path_constant(complex: Complex) -> Optional[Fraction]:
    """Least c with skeleton path length <= c·d(x, x') for all x ≠ x'; None if disconnected."""
    if complex.metric is None:
        raise ContractError("path constant needs the complex's metric")
    if complex.n_vertices < 2:
        return Fraction(1)
    graph = complex.skeleton_graph()
    adjacency = sparse.csr_matrix(nx.to_scipy_sparse_array(graph, nodelist=range(complex.n_vertices)))
    hops = shortest_path(adjacency, method="D", directed=False, unweighted=True)
    if np.isinf(hops).any():
        return None
    metric = complex.metric
    scaled = metric.scaled.astype(float)
    np.fill_diagonal(scaled, 1.0)
    ratio = hops * metric.scale / scaled
    u, v = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return Fraction(int(hops[u, v]) * metric.scale, int(metric.scaled[u, v]))


@dataclass(frozen=True)
class RadiusReport:
    r: int
    c_hat: Optional[Fraction]
    cycles: int
    worst_status: Status

    def as_dict(self) -> Dict:
        return {
            "r": self.r,
            "c_hat": None if self.c_hat is None else str(self.c_hat),
            "cycles": self.cycles,
            "worst_status": self.worst_status.value,
        }


@dataclass
class ConingReport:
    basepoint: int
    n: int
    radii: List[RadiusReport] = field(default_factory=list)
    path_constant: Optional[Fraction] = None

    @property
    def constant(self) -> Optional[Fraction]:
        values = [r.c_hat for r in self.radii if r.c_hat is not None]
        return max(values) if values else None

    @property
    def spread(self) -> Optional[Fraction]:
        """max c_hat / min c_hat across radii."""
        values = [r.c_hat for r in self.radii if r.c_hat]
        return max(values) / min(values) if values else None

    def as_dict(self) -> Dict:
        return {
            "basepoint": self.basepoint,
            "n": self.n,
            "radii": [r.as_dict() for r in self.radii],
            "constant": None if self.constant is None else str(self.constant),
            "spread": None if self.spread is None else str(self.spread),
            "path_constant": None if self.path_constant is None else str(self.path_constant),
        }


def ball_cycles(
    complex: Complex, ball: Sequence[int], k: int, ring: NormedRing, samples: int, seed: int, max_walk: int
) -> List[Chain]:
    """k-cycles supported in ``ball``: the boundary of the whole ball, random patches, random walks."""
    inside = set(ball)
    cells = [c for c in range(complex.count(k + 1)) if set(complex.simplex(k + 1, c)) <= inside]
    cycles = []
    if cells:
        cycles.append(boundary(coherent_patch(complex, k + 1, cells, ring)))
        cycles += patch_cycles(complex, k, samples, len(cells), ring, seed, within=inside)
    if k == 1 and max_walk >= 3:
        cycles += random_walk_cycles(complex, samples, list(range(3, max_walk + 1)), ring, seed, within=inside)
    unique = {}
    for z in cycles:
        if not z.is_zero():
            unique.setdefault(z.key(), z)
    return [unique[key] for key in sorted(unique)]


def check_coning(
    complex: Complex,
    basepoint: int,
    radii: Sequence[int],
    n: int,
    ring: NormedRing,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[ProfilerSettings] = None,
    budget: Optional[Budget] = None,
    solver_settings: Optional[SolverSettings] = None,
    fill: Optional[Filler] = None,
    logger=logger,
) -> ConingReport:
    """c_hat(r) = max ‖fill z‖ / (r·|z|) over k-cycles z in B_r(basepoint), k <= n."""
    settings = settings or ProfilerSettings()
    samples = settings.samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    if complex.metric is None:
        raise ContractError("coning check needs the complex's metric")
    if not 1 <= n < complex.dimension:
        raise ContractError(f"coning needs 1 <= n < dim = {complex.dimension}, got n = {n}")
    if not 0 <= basepoint < complex.n_vertices:
        raise ContractError(f"basepoint {basepoint} is not a vertex")
    reach = int(complex.metric.scaled[basepoint].max()) // complex.metric.scale
    fill = fill or sequential_filler(complex, budget, solver_settings, logger)
    report = ConingReport(basepoint, n, path_constant=path_constant(complex))
    for r in radii:
        if not 1 <= r <= reach:
            raise ContractError(f"radius {r} outside 1..{reach}")
        start = time.time()
        ball = complex.metric.within(basepoint, r)
        cycles = []
        for k in range(1, n + 1):
            cycles += ball_cycles(complex, ball, k, ring, samples, seed, max_walk=4 * r + 2)
        values = fill_cycles(complex, cycles, fill, compose=False)
        ratios = [
            Fraction(v.norm) / (r * Fraction(v.length))
            for v in values
            if v.norm is not None and v.status != Status.NO_FILLING
        ]
        flagged = [v for v in values if v.status == Status.INFEASIBLE_WITHIN_BUDGET]
        if flagged:
            logger.warning(f"r = {r}: {len(flagged)} fillings ran out of budget")
        report.radii.append(
            RadiusReport(r, max(ratios) if ratios else None, len(cycles), worst_status(v.status for v in values))
        )
        logger.info(
            f"r = {r}: {len(cycles)} cycles, c_hat {report.radii[-1].c_hat}, took {time.time() - start:.2f} seconds"
        )
    return report
