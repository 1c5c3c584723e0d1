"""Finite metric spaces, Gromov products and the four-point δ estimate."""
from dataclasses import dataclass
from fractions import Fraction
import logging
from math import lcm
import time
from typing import List, Optional, Sequence

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from isofill.config import HyperbolicitySettings
from isofill.errors import ConfigurationError, ContractError

logger = logging.getLogger("isofill.builders")


@dataclass(frozen=True)
class Truncation:
    """Where a finite ball was cut out of an infinite space.

    ``convex`` marks truncations whose geodesics between ball points stay
    in the ball (free groups, trees), so distances are never distorted.
    """

    center: int
    radius: int
    convex: bool = False


class FiniteMetric:
    """Exact metric on points ``0 .. size - 1``.

    Distances are held as an integer matrix ``scaled`` with ``distance =
    scaled / scale``. Graph metrics fill the matrix lazily by breadth-first
    search.
    """

    def __init__(
        self,
        size: int,
        graph: Optional[nx.Graph] = None,
        scaled: Optional[np.ndarray] = None,
        scale: int = 1,
        epsilon: Fraction = Fraction(1),
        truncation: Optional[Truncation] = None,
    ):
        if graph is None and scaled is None:
            raise ContractError("a metric needs either a graph or a distance matrix")
        self.size = size
        self.graph = graph
        self.scale = scale
        self.epsilon = Fraction(epsilon)
        self.truncation = truncation
        self._scaled = scaled

    @classmethod
    def from_graph(cls, graph: nx.Graph, epsilon=1, truncation: Optional[Truncation] = None) -> "FiniteMetric":
        return cls(graph.number_of_nodes(), graph=graph, epsilon=Fraction(epsilon), truncation=truncation)

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence], epsilon=1) -> "FiniteMetric":
        """Explicit rational distance matrix; the metric axioms are checked."""
        values = [[Fraction(x) for x in row] for row in rows]
        size = len(values)
        if any(len(row) != size for row in values):
            raise ContractError("distance matrix is not square")
        scale = lcm(1, *(x.denominator for row in values for x in row))
        scaled = np.array([[int(x * scale) for x in row] for row in values], dtype=np.int64).reshape(size, size)
        if size:
            if np.any(np.diag(scaled) != 0):
                raise ContractError("distance matrix has a nonzero diagonal")
            if not np.array_equal(scaled, scaled.T):
                raise ContractError("distance matrix is not symmetric")
            off_diagonal = scaled + np.eye(size, dtype=np.int64)
            if np.any(off_diagonal <= 0):
                raise ContractError("distinct points must have positive distance")
            for j in range(size):
                if np.any(scaled > scaled[:, j, None] + scaled[None, j, :]):
                    raise ContractError(f"triangle inequality fails through point {j}")
        return cls(size, scaled=scaled, scale=scale, epsilon=Fraction(epsilon))

    @property
    def scaled(self) -> np.ndarray:
        if self._scaled is None:
            start = time.time()
            adjacency = sparse.csr_matrix(nx.to_scipy_sparse_array(self.graph, nodelist=range(self.size)))
            dist = shortest_path(adjacency, method="D", directed=False, unweighted=True)
            if np.isinf(dist).any():
                raise ContractError("metric graph is disconnected")
            self._scaled = dist.astype(np.int64)
            logger.debug(f"BFS distance matrix on {self.size} points took {time.time() - start:.2f} seconds")
        return self._scaled

    def distance(self, u: int, v: int) -> Fraction:
        return Fraction(int(self.scaled[u, v]), self.scale)

    def geodesic(self, u: int, v: int) -> List[int]:
        if self.graph is None:
            raise ContractError("geodesics need a graph metric")
        return nx.shortest_path(self.graph, u, v)

    def within(self, center: int, r) -> List[int]:
        """Points at distance <= r from ``center``, ascending."""
        bound = Fraction(r) * self.scale
        return [int(v) for v in np.flatnonzero(self.scaled[center] <= bound)]

    def set_distance(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        if not len(a) or not len(b):
            raise ContractError("distance between empty point sets")
        return Fraction(int(self.scaled[np.ix_(list(a), list(b))].min()), self.scale)


@dataclass(frozen=True)
class HyperbolicityEstimate:
    delta: Fraction
    mode: str
    quadruples: int
    seed: Optional[int] = None
    certificate: str = "exhaustive"


def gromov_product(m: FiniteMetric, u: int, v: int, base: int) -> Fraction:
    d = m.scaled
    return Fraction(int(d[u, base] + d[v, base] - d[u, v]), 2 * m.scale)


def _basepoint_defect(d: np.ndarray, base: int) -> int:
    """max over u, v, w of min(G[u,v], G[v,w]) - G[u,w] with G twice the Gromov products at ``base``."""
    g = d[:, base][:, None] + d[base, :][None, :] - d
    worst = 0
    for u in range(len(d)):
        reach = np.minimum(g[u][:, None], g).max(axis=0)
        worst = max(worst, int((reach - g[u]).max()))
    return worst


def estimate_delta(
    m: FiniteMetric,
    mode: str = "exact",
    count: Optional[int] = None,
    seed: Optional[int] = None,
    cap: Optional[int] = None,
    settings: Optional[HyperbolicitySettings] = None,
    logger=logger,
) -> HyperbolicityEstimate:
    """Four-point δ of ``m``.

    Exact mode first evaluates one basepoint: since δ <= 2·δ_b, a zero defect
    there settles δ = 0 for any number of points. Otherwise every basepoint is
    evaluated, which requires at most ``cap`` points. Sampled mode draws
    ``count`` seeded quadruples and reports a lower bound. Arguments left as
    None come from ``settings``.
    """
    settings = settings or HyperbolicitySettings()
    n = m.size
    if n <= 1:
        return HyperbolicityEstimate(Fraction(0), mode, 0, seed, "trivial")
    d = m.scaled
    start = time.time()
    if mode == "exact":
        cap = settings.exact_cap if cap is None else cap
        pivot = _basepoint_defect(d, 0)
        if pivot == 0:
            logger.info(f"δ = 0 certified from basepoint 0 over {n} points in {time.time() - start:.2f} seconds")
            return HyperbolicityEstimate(Fraction(0), "exact", n**3, None, "pivot")
        if n > cap:
            raise ConfigurationError(
                f"exact δ over {n} points exceeds the cap of {cap}; use sampled mode"
            )
        worst = max([pivot] + [_basepoint_defect(d, b) for b in range(1, n)])
        logger.info(f"exact δ over {n**4} quadruples took {time.time() - start:.2f} seconds")
        return HyperbolicityEstimate(Fraction(worst, 2 * m.scale), "exact", n**4, None, "exhaustive")
    if mode == "sampled":
        count = settings.samples if count is None else count
        seed = settings.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        u, v, w, b = rng.integers(0, n, size=(4, count))
        g_uv = d[u, b] + d[v, b] - d[u, v]
        g_vw = d[v, b] + d[w, b] - d[v, w]
        g_uw = d[u, b] + d[w, b] - d[u, w]
        worst = max(0, int((np.minimum(g_uv, g_vw) - g_uw).max())) if count else 0
        return HyperbolicityEstimate(Fraction(worst, 2 * m.scale), "sampled", count, seed, "lower_bound")
    raise ConfigurationError(f"unknown δ mode {mode!r}; expected exact or sampled")
