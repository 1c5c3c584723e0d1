"""Empirical isoperimetric profiles and their growth.

A profile records f_hat(l), the largest filling norm among examined
boundaries of norm at most l. Entries up to ``l_exhaustive`` come from
complete enumeration, later ones from seeded sampling and are only
lower bounds.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import hashlib
import logging
from math import log
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from isofill.chains import Chain, Complex, expand_neighborhood, hull, l1_norm, split_connected_support, support_refs
from isofill.config import ProfilerSettings, SolverSettings
from isofill.errors import ContractError, InsufficientDataError
from isofill.profiler.sampling import enumerate_cycles, patch_cycles, random_walk_cycles
from isofill.rings import Coefficient, NormedRing
from isofill.solver import Budget, FillingResult, Status, exact_filling, path_chain

logger = logging.getLogger("isofill.profiler")

# later entries are worse
STATUS_ORDER = {
    Status.OPTIMAL: 0,
    Status.UPPER_BOUND: 1,
    Status.NO_FILLING: 2,
    Status.INFEASIBLE_WITHIN_BUDGET: 3,
}

Filler = Callable[[Sequence[Chain]], List[FillingResult]]


def worst_status(statuses) -> Status:
    return max(statuses, key=STATUS_ORDER.__getitem__, default=Status.OPTIMAL)


def complex_fingerprint(complex: Complex) -> str:
    """Short content hash of the cell lists, used as the profile's complex id."""
    digest = hashlib.sha256()
    digest.update(str(complex.n_vertices).encode())
    for k in range(1, complex.dimension + 1):
        for cell in complex.cells(k):
            digest.update((",".join(map(str, cell)) + ";").encode())
    return digest.hexdigest()[:16]


@dataclass(frozen=True)
class ProfileEntry:
    l: int
    f_hat: Coefficient
    mode: str
    samples: int
    worst_status: Status


@dataclass
class IsoProfile:
    complex_id: str
    n: int
    ring: str
    entries: List[ProfileEntry]
    l_exhaustive: int = 0
    seed: Optional[int] = None
    metadata: Dict = field(default_factory=dict)

    def pairs(self) -> List[Tuple[int, Coefficient]]:
        return [(e.l, e.f_hat) for e in self.entries]

    def value_at(self, x) -> Coefficient:
        """Step-function value: f_hat at the largest recorded l <= x."""
        value = 0
        for e in self.entries:
            if e.l > x:
                break
            value = e.f_hat
        return value

    @property
    def max_l(self) -> int:
        return self.entries[-1].l if self.entries else 0

    def envelope(self) -> List[Tuple[int, Coefficient]]:
        """Points where f_hat strictly increases."""
        out = []
        last = 0
        for l, f in self.pairs():
            if f > last:
                out.append((l, f))
                last = f
        return out


@dataclass(frozen=True)
class _Value:
    length: Coefficient
    norm: Optional[Coefficient]
    status: Status


def _merge(values: Sequence[_Value], ls: Sequence[int], l_exhaustive: int) -> List[ProfileEntry]:
    """Cumulative max-fold; the order of ``values`` does not matter."""
    entries = []
    best: Coefficient = 0
    worst = Status.OPTIMAL
    for l in ls:
        for v in values:
            if l - 1 < v.length <= l:
                if v.norm is not None and v.norm > best:
                    best = v.norm
                worst = worst_status([worst, v.status])
        count = sum(1 for v in values if l - 1 < v.length <= l)
        mode = "exhaustive" if l <= l_exhaustive else "sampled"
        entries.append(ProfileEntry(l, best, mode, count, worst))
    return entries


def sequential_filler(
    complex: Complex, budget: Optional[Budget] = None, settings: Optional[SolverSettings] = None, logger=logger
) -> Filler:
    def fill(cycles: Sequence[Chain]) -> List[FillingResult]:
        return [exact_filling(complex, z, budget=budget, settings=settings, logger=logger) for z in cycles]

    return fill


def _separated(complex: Complex, parts: Sequence[Chain], results: Sequence[FillingResult]) -> bool:
    seen = set()
    for part, result in zip(parts, results):
        if result.filling is None:
            return False
        region = expand_neighborhood(complex, expand_neighborhood(complex, hull(complex, support_refs(part))))
        vertices = set(region.ids(0)) | set(result.filling.vertices())
        if seen & vertices:
            return False
        seen |= vertices
    return True


def fill_cycles(complex: Complex, cycles: Sequence[Chain], fill: Filler, compose: bool = True) -> List[_Value]:
    """Filling norms for ``cycles``, in order.

    With ``compose`` a disconnected cycle gets the sum of its parts' norms
    when the parts' second neighbourhoods and optimal fillings are pairwise
    vertex-disjoint. Everything else is filled directly.
    """
    plans = [split_connected_support(z) if compose else [z] for z in cycles]
    parts = {}
    for plan in plans:
        for part in plan:
            parts.setdefault(part.key(), part)
    keys = sorted(parts)
    results = dict(zip(keys, fill([parts[k] for k in keys])))

    found = []
    direct = {}
    for z, plan in zip(cycles, plans):
        pieces = [results[p.key()] for p in plan]
        if len(plan) > 1 and not (all(r.certified for r in pieces) and _separated(complex, plan, pieces)):
            direct.setdefault(z.key(), z)
            pieces = None
        found.append(pieces)
    if direct:
        keys = sorted(direct)
        results.update(zip(keys, fill([direct[k] for k in keys])))

    values = []
    for z, pieces in zip(cycles, found):
        pieces = pieces or [results[z.key()]]
        status = worst_status(r.status for r in pieces)
        if any(r.norm is None for r in pieces):
            norm = None
        else:
            norm = sum((r.norm for r in pieces), z.ring.zero)
        values.append(_Value(l1_norm(z), norm, status))
    return values


def _boundaries(values: Sequence[_Value]) -> List[_Value]:
    return [v for v in values if v.status != Status.NO_FILLING]


def profile(
    complex: Complex,
    n: int,
    l_max: int,
    ring: NormedRing,
    l_exhaustive: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[ProfilerSettings] = None,
    budget: Optional[Budget] = None,
    solver_settings: Optional[SolverSettings] = None,
    fill: Optional[Filler] = None,
    logger=logger,
) -> IsoProfile:
    """Empirical n-isoperimetric function of ``complex`` for l = 1..l_max."""
    settings = settings or ProfilerSettings()
    if n < 1 or n > complex.dimension:
        raise ContractError(f"cannot profile {n}-cycles in a {complex.dimension}-dimensional complex")
    if l_max < 1:
        raise ContractError("l_max must be >= 1")
    l_exhaustive = l_max if l_exhaustive is None else min(l_exhaustive, l_max)
    samples = settings.samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    fill = fill or sequential_filler(complex, budget, solver_settings, logger)
    start = time.time()

    values: List[_Value] = []
    if n + 1 <= complex.dimension:
        exhaustive = enumerate_cycles(complex, n, l_exhaustive, ring, settings.coefficient_bound)
        logger.info(f"{len(exhaustive)} {n}-cycles with |z| <= {l_exhaustive}")
        values += _boundaries(fill_cycles(complex, exhaustive, fill))
        if l_max > l_exhaustive and samples > 0:
            sampled = _sample(complex, n, l_exhaustive, l_max, ring, samples, seed)
            logger.info(f"{len(sampled)} sampled {n}-cycles with {l_exhaustive} < |z| <= {l_max}, seed {seed}")
            values += _boundaries(fill_cycles(complex, sampled, fill))
    else:
        logger.info(f"no {n + 1}-cells: every boundary of dimension {n} is zero")

    entries = _merge(values, list(range(1, l_max + 1)), l_exhaustive)
    flagged = [e.l for e in entries if e.worst_status == Status.INFEASIBLE_WITHIN_BUDGET]
    if flagged:
        logger.warning(f"profile entries from l = {flagged[0]} include fillings that ran out of budget")
    logger.info(f"profile up to l = {l_max} took {time.time() - start:.2f} seconds")
    return IsoProfile(
        complex_fingerprint(complex),
        n,
        ring.spec,
        entries,
        l_exhaustive=l_exhaustive,
        seed=seed if l_max > l_exhaustive else None,
        metadata={"samples": samples, "examined": len(values)},
    )


def _sample(
    complex: Complex, n: int, low: int, high: int, ring: NormedRing, count: int, seed: int
) -> List[Chain]:
    if n == 1:
        cycles = random_walk_cycles(complex, count, list(range(low + 1, high + 1)), ring, seed)
    else:
        cycles = patch_cycles(complex, n, count, high, ring, seed)
    seen = {}
    for z in cycles:
        if low < l1_norm(z) <= high:
            seen.setdefault(z.key(), z)
    return [seen[k] for k in sorted(seen)]


def profile_loops(
    complex: Complex,
    loops: Sequence[Sequence[int]],
    ring: NormedRing,
    budget: Optional[Budget] = None,
    solver_settings: Optional[SolverSettings] = None,
    fill: Optional[Filler] = None,
    logger=logger,
) -> IsoProfile:
    """Area profile l ↦ max{A(γ) : length(γ) <= l} over the given loops.

    Entries sit at the observed loop lengths (number of edges).
    """
    if not loops:
        raise ContractError("profile_loops needs at least one loop")
    fill = fill or sequential_filler(complex, budget, solver_settings, logger)
    chains = [path_chain(complex, loop, ring) for loop in loops]
    results = fill(chains)
    values = [_Value(len(loop) - 1, r.norm, r.status) for loop, r in zip(loops, results)]
    ls = sorted({len(loop) - 1 for loop in loops})
    entries = []
    best: Coefficient = 0
    worst = Status.OPTIMAL
    for l in ls:
        for v in values:
            if v.length == l:
                if v.norm is not None and v.norm > best:
                    best = v.norm
                worst = worst_status([worst, v.status])
        entries.append(ProfileEntry(l, best, "loops", sum(1 for v in values if v.length == l), worst))
    return IsoProfile(
        complex_fingerprint(complex), 1, ring.spec, entries, l_exhaustive=ls[-1], metadata={"loops": len(loops)}
    )


@dataclass(frozen=True)
class GrowthClass:
    label: str
    alpha: float
    band: Tuple[float, float]
    intercept: float
    residuals: Tuple[float, ...]
    n: int
    sub_euclidean: bool
    points: int

    def as_dict(self) -> Dict:
        return {
            "label": self.label,
            "alpha": round(self.alpha, 6),
            "band": [round(self.band[0], 6), round(self.band[1], 6)],
            "n": self.n,
            "sub_euclidean": self.sub_euclidean,
            "points": self.points,
        }


def _envelope_or_raise(p: IsoProfile, settings: ProfilerSettings, what: str) -> List[Tuple[int, Coefficient]]:
    points = p.envelope()
    if len(points) < settings.min_points:
        raise InsufficientDataError(
            f"{what} needs at least {settings.min_points} distinct l with f_hat(l) > 0, got {len(points)}"
        )
    return points


def growth_label(alpha: float, settings: ProfilerSettings) -> str:
    bands = settings.bands
    if alpha < bands.linear:
        return "linear"
    if alpha < bands.subquadratic:
        return "subquadratic"
    if alpha <= bands.quadratic:
        return "quadratic"
    return "superquadratic"


def classify_growth(p: IsoProfile, settings: Optional[ProfilerSettings] = None) -> GrowthClass:
    """Least-squares fit of log f_hat against log l over the profile's upper envelope."""
    settings = settings or ProfilerSettings()
    points = _envelope_or_raise(p, settings, "classify_growth")
    x = np.log([float(l) for l, _ in points])
    y = np.log([float(f) for _, f in points])
    fit = stats.linregress(x, y)
    alpha = float(fit.slope)
    spread = float(stats.t.ppf(0.975, len(points) - 2) * fit.stderr) if len(points) > 2 else 0.0
    residuals = tuple(float(r) for r in y - (fit.intercept + fit.slope * x))
    exponent = Fraction(p.n + 1, p.n)
    return GrowthClass(
        label=growth_label(alpha, settings),
        alpha=alpha,
        band=(alpha - spread, alpha + spread),
        intercept=float(fit.intercept),
        residuals=residuals,
        n=p.n,
        sub_euclidean=alpha <= float(exponent) + settings.subeuclidean_tolerance,
        points=len(points),
    )


@dataclass(frozen=True)
class SubEuclideanReport:
    n: int
    exponent: Fraction
    constant: float
    trend: float
    passed: bool

    def as_dict(self) -> Dict:
        return {
            "n": self.n,
            "exponent": str(self.exponent),
            "constant": round(self.constant, 6),
            "trend": round(self.trend, 6),
            "passed": self.passed,
        }


def check_subeuclidean(p: IsoProfile, n: int, settings: Optional[ProfilerSettings] = None) -> SubEuclideanReport:
    """Is f_hat(l) <= C·l^((n+1)/n) with C flat over the top half of the range?"""
    settings = settings or ProfilerSettings()
    if p.n != n:
        raise ContractError(f"profile has dimension {p.n}, not {n}")
    points = _envelope_or_raise(p, settings, "check_subeuclidean")
    exponent = Fraction(n + 1, n)
    ratios = [(l, float(f) / float(l) ** float(exponent)) for l, f in points]
    top = ratios[len(ratios) // 2:]
    trend = float(stats.linregress([log(l) for l, _ in top], [log(c) for _, c in top]).slope)
    return SubEuclideanReport(n, exponent, max(c for _, c in ratios), trend, trend <= settings.trend_tolerance)


def compare_growth(f: IsoProfile, g: IsoProfile, C: int = 0, k_max: int = 64) -> Optional[int]:
    """Least K <= k_max with f(x) <= K·g(Kx + C) + Kx + C wherever g is sampled."""
    domain = [l for l, _ in f.pairs()]
    for K in range(1, k_max + 1):
        checked = 0
        holds = True
        for x in domain:
            y = K * x + C
            if y > g.max_l:
                continue
            checked += 1
            if f.value_at(x) > K * g.value_at(y) + y:
                holds = False
                break
        if holds and checked:
            return K
    return None


def equivalent(f: IsoProfile, g: IsoProfile, C: int = 0, k_max: int = 64) -> bool:
    return compare_growth(f, g, C, k_max) is not None and compare_growth(g, f, C, k_max) is not None
