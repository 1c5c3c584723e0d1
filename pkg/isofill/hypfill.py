"""Linear fillings of 1-cycles in Rips complexes of hyperbolic spaces.

Repeatedly take the supported vertex v farthest from the basepoint and
push the cycle towards the basepoint with 2-cells around v. With the Rips
scale d > 4δ + 2ε every configuration falls into one of three cases and
the filling uses at most N·|z| cells, N = max{k+1, (k-1)(k+1)} + 1.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from math import floor
from typing import Dict, List, Optional, Sequence, Tuple

from isofill.builders.metrics import FiniteMetric
from isofill.chains import Chain, Complex, boundary, chain_from_simplex, is_cycle, l1_norm
from isofill.config import HypfillSettings
from isofill.errors import CertificationError, ConfigurationError, ContractError, MarginError
from isofill.profiler.sampling import random_walk_cycles
from isofill.rings import Coefficient
from isofill.solver import FillingResult, Status

logger = logging.getLogger("isofill.hypfill")


@dataclass(frozen=True)
class HyperbolicContext:
    complex: Complex
    metric: FiniteMetric
    d: Fraction
    delta: Fraction
    epsilon: Fraction
    basepoint: int
    k: int
    # None when the truncation cannot distort distances near the cycle
    margin: Optional[Fraction] = None

    @property
    def N(self) -> int:
        return linear_bound(self)


@dataclass(frozen=True)
class TraceStep:
    case: int
    vertex: int
    involved: Tuple[int, ...]
    applied: Chain
    norm_before: Coefficient
    norm_after: Coefficient

    def as_dict(self) -> Dict:
        return {
            "case": self.case,
            "vertex": self.vertex,
            "involved": list(self.involved),
            "applied": [[cid, str(v)] for cid, v in self.applied.items()],
            "norm_before": str(self.norm_before),
            "norm_after": str(self.norm_after),
        }


@dataclass
class ReductionTrace:
    steps: List[TraceStep] = field(default_factory=list)
    certified: bool = False

    @property
    def cells_used(self) -> int:
        return sum(len(step.applied) for step in self.steps)


def make_context(
    complex: Complex,
    delta,
    epsilon=None,
    basepoint: int = 0,
    settings: Optional[HypfillSettings] = None,
) -> HyperbolicContext:
    """Validate the filler's hypotheses on a Rips complex and fix its constants."""
    settings = settings or HypfillSettings()
    if "rips_scale" not in complex.metadata or complex.metric is None:
        raise ConfigurationError("linear filling needs a Rips complex with its metric")
    metric = complex.metric
    if metric.graph is None:
        raise ConfigurationError("linear filling needs a graph metric for geodesics")
    d = Fraction(complex.metadata["rips_scale"])
    delta = Fraction(delta)
    epsilon = metric.epsilon if epsilon is None else Fraction(epsilon)
    if d <= 4 * delta + 2 * epsilon:
        raise ConfigurationError(
            f"precondition d > 4δ + 2ε violated: d = {d}, 4δ + 2ε = {4 * delta + 2 * epsilon}"
        )
    if not 0 <= basepoint < complex.n_vertices:
        raise ContractError(f"basepoint {basepoint} is not a vertex")
    truncation = metric.truncation
    if settings.margin is not None:
        margin = Fraction(settings.margin)
    elif truncation is None or (truncation.convex and settings.waive_convex):
        margin = None
    else:
        margin = 2 * d + 4 * delta
    return HyperbolicContext(complex, metric, d, delta, epsilon, basepoint, complex.max_degree(), margin)


def linear_bound(ctx: HyperbolicContext) -> int:
    k = ctx.k
    return max(k + 1, (k - 1) * (k + 1)) + 1


def _half_up(x: Fraction) -> int:
    return floor(x + Fraction(1, 2))


class _Reducer:
    def __init__(self, ctx: HyperbolicContext, z: Chain, logger):
        self.ctx = ctx
        self.complex = ctx.complex
        self.ring = z.ring
        self.logger = logger
        self.dist = ctx.metric.scaled
        self.scale = ctx.metric.scale
        self.d = ctx.d * self.scale
        self.two_delta = 2 * ctx.delta * self.scale
        self.base_row = self.dist[ctx.basepoint]

    def adjacent(self, u: int, v: int) -> bool:
        return u != v and self.dist[u, v] <= self.d

    def oriented(self, z: Chain, u: int, v: int) -> Coefficient:
        """Coefficient of the oriented edge (u, v) in z."""
        cid = self.complex.find((min(u, v), max(u, v)))
        value = z.coefficient(cid) if cid is not None else self.ring.zero
        return value if u < v else self.ring.neg(value)

    def neighbours(self, z: Chain, v: int) -> List[int]:
        out = []
        for cid in z.support:
            a, b = self.complex.simplex(1, cid)
            if v in (a, b):
                out.append(b if a == v else a)
        return sorted(out)

    def triangle(self, u: int, v: int, w: int, r: Coefficient, trace: ReductionTrace) -> Chain:
        if self.complex.find(tuple(sorted((u, v, w)))) is None:
            raise CertificationError(f"2-cell ({u}, {v}, {w}) is missing from the Rips complex", trace)
        return chain_from_simplex(self.complex, (u, v, w), self.ring, r)

    def pick_u_prime(self, z: Chain, v: int, u1: int, others: Sequence[int], trace: ReductionTrace) -> int:
        metric = self.ctx.metric
        path = metric.geodesic(v, self.ctx.basepoint)
        y = path[min(_half_up(self.ctx.d / 2), len(path) - 1)]
        around = [w for w in metric.within(y, self.ctx.epsilon + 1) if w != y]
        u1_neighbours = [x for x in self.neighbours(z, u1) if self.dist[x, u1] <= self.d + self.two_delta]
        for candidate in [y] + around:
            if candidate in (v, u1) or not self.adjacent(candidate, u1):
                continue
            if all(x == candidate or self.adjacent(x, candidate) for x in u1_neighbours) and all(
                self.adjacent(u, candidate) for u in others
            ):
                return candidate
        raise CertificationError(
            f"no vertex near the geodesic from {v} to {self.ctx.basepoint} satisfies the neighbour claim",
            trace,
        )


def linear_fill(ctx: HyperbolicContext, z: Chain, logger=logger) -> Tuple[FillingResult, ReductionTrace]:
    """Fill the 1-cycle ``z`` with at most N·|z| cells (discrete norm)."""
    if z.complex is not ctx.complex:
        raise ContractError("cycle does not belong to the context's complex")
    if z.dim != 1 or not is_cycle(z):
        raise ContractError("linear_fill needs a 1-cycle")
    ring = z.ring
    trace = ReductionTrace()
    if z.is_zero():
        trace.certified = True
        return FillingResult(z, Chain.zero(ctx.complex, 2, ring), ring.zero, Status.OPTIMAL, 0, 0, 0), trace
    if not ring.is_discrete:
        logger.warning(f"the linear bound is certified for discrete norms only; {ring.spec} run is uncertified")
    truncation = ctx.metric.truncation
    if ctx.margin is not None and truncation is not None:
        row = ctx.metric.scaled[truncation.center]
        closest = min(Fraction(truncation.radius) - Fraction(int(row[v]), ctx.metric.scale) for v in z.vertices())
        if closest < ctx.margin:
            raise MarginError(
                f"cycle support lies {closest} from the truncation boundary, margin {ctx.margin} required"
            )

    reducer = _Reducer(ctx, z, logger)
    N = linear_bound(ctx)
    size = len(z)
    allowance = N * size
    current = z
    filling = Chain.zero(ctx.complex, 2, ring)
    used = 0
    while not current.is_zero():
        v = max(current.vertices(), key=lambda x: (reducer.base_row[x], -x))
        nbrs = reducer.neighbours(current, v)
        pair = next(
            ((a, b) for i, a in enumerate(nbrs) for b in nbrs[i + 1:] if reducer.adjacent(a, b)),
            None,
        )
        if pair is not None:
            u1, u2 = pair
            case = 1 if len(nbrs) == 2 else 2
            r1 = reducer.oriented(current, u1, v)
            applied = reducer.triangle(u1, v, u2, r1, trace)
            involved = (u1, u2)
        else:
            case = 3
            floor_distance = reducer.base_row[v] - reducer.two_delta
            u1 = next((u for u in nbrs if reducer.base_row[u] >= floor_distance), None)
            if u1 is None:
                raise CertificationError(
                    f"no neighbour of {v} stays within 2δ of its distance to the basepoint", trace
                )
            others = [u for u in nbrs if u != u1]
            u_prime = reducer.pick_u_prime(current, v, u1, others, trace)
            applied = Chain.zero(ctx.complex, 2, ring)
            for x in reducer.neighbours(current, u1):
                if x != u_prime:
                    applied = applied + reducer.triangle(u1, x, u_prime, reducer.oriented(current, u1, x), trace)
            involved = (u1, u_prime)

        before = l1_norm(current)
        current = current - boundary(applied)
        filling = filling + applied
        used += len(applied)
        after = l1_norm(current)
        trace.steps.append(TraceStep(case, v, involved, applied, before, after))
        logger.debug(f"case {case} at vertex {v}: |z| {before} -> {after}")

        if case == 3 and not ring.is_zero(reducer.oriented(current, involved[0], involved[1])):
            raise CertificationError(f"edge ({involved[0]}, {involved[1]}) kept a nonzero coefficient", trace)
        if not is_cycle(current):
            raise CertificationError("an intermediate chain is not a cycle", trace)
        if ring.is_discrete and (after > before or (case == 1 and after > before - 1)):
            raise CertificationError(f"case {case} step at vertex {v} did not reduce |z|", trace)
        if used > allowance:
            raise CertificationError(
                f"used {used} cells, more than N·|z| = {allowance}; δ or d is probably mis-estimated", trace
            )

    if boundary(filling) != z:
        raise CertificationError("filling boundary differs from the cycle", trace)
    norm = l1_norm(filling)
    trace.certified = ring.is_discrete and norm <= allowance
    logger.info(f"linear filling: |z| = {size}, |c| = {norm}, N = {N}, {len(trace.steps)} steps")
    return FillingResult(z, filling, norm, Status.UPPER_BOUND, 0, len(filling), len(trace.steps)), trace


def linear_fill_many(
    ctx: HyperbolicContext, cycles: Sequence[Chain], logger=logger
) -> List[Tuple[FillingResult, ReductionTrace]]:
    return [linear_fill(ctx, z, logger=logger) for z in cycles]


def random_cycles(complex: Complex, count: int, lengths: Sequence[int], ring, seed: int) -> List[Chain]:
    """Seeded closed-walk 1-cycles in the 1-skeleton, one per requested length in turn."""
    return random_walk_cycles(complex, count, lengths, ring, seed)
