"""Area axioms for loops: theta-curve triangle inequality and the rectangle inequality."""
from dataclasses import dataclass
from fractions import Fraction
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from isofill.builders.complexes import grid_vertex
from isofill.builders.groups import trace_word
from isofill.chains import Complex
from isofill.config import SolverSettings
from isofill.errors import ContractError
from isofill.rings import Coefficient, NormedRing
from isofill.solver import Budget, FillingResult, area

logger = logging.getLogger("isofill.profiler")

Path = List[int]


def _area(complex, loop, ring, budget, settings, logger) -> FillingResult:
    return area(complex, loop, ring, budget=budget, settings=settings, logger=logger)


@dataclass(frozen=True)
class ThetaReport:
    areas: Tuple[Optional[Coefficient], Optional[Coefficient], Optional[Coefficient]]
    certified: bool
    holds: Optional[bool]

    @property
    def conclusive(self) -> bool:
        return self.holds is not None

    def as_dict(self) -> Dict:
        return {
            "areas": [None if a is None else str(a) for a in self.areas],
            "certified": self.certified,
            "holds": self.holds,
        }


def check_theta(
    complex: Complex,
    a1: Sequence[int],
    a2: Sequence[int],
    a3: Sequence[int],
    ring: NormedRing,
    budget: Optional[Budget] = None,
    settings: Optional[SolverSettings] = None,
    logger=logger,
) -> ThetaReport:
    """A(α₃⁻¹α₁) <= A(α₂⁻¹α₁) + A(α₃⁻¹α₂) for three paths with common endpoints.

    ``holds`` is None when some area is not certified optimal.
    """
    paths = [list(a1), list(a2), list(a3)]
    if any(not p for p in paths):
        raise ContractError("theta paths must be nonempty")
    if len({p[0] for p in paths}) != 1 or len({p[-1] for p in paths}) != 1:
        raise ContractError("theta paths must share both endpoints")

    def loop(first: Path, second: Path) -> Path:
        return first + list(reversed(second))[1:]

    results = [
        _area(complex, loop(paths[0], paths[2]), ring, budget, settings, logger),
        _area(complex, loop(paths[0], paths[1]), ring, budget, settings, logger),
        _area(complex, loop(paths[1], paths[2]), ring, budget, settings, logger),
    ]
    areas = tuple(r.norm for r in results)
    certified = all(r.certified for r in results)
    holds = None
    if certified:
        holds = areas[0] <= areas[1] + areas[2]
        if not holds:
            logger.error(f"theta inequality violated: {areas[0]} > {areas[1]} + {areas[2]}")
    return ThetaReport(areas, certified, holds)


def sample_theta_triples(complex: Complex, count: int, seed: int) -> List[Tuple[Path, Path, Path]]:
    """Seeded triples of paths p → q, each routed through a random waypoint."""
    rng = np.random.default_rng(seed)
    graph = complex.skeleton_graph()
    n = complex.n_vertices
    triples = []
    while len(triples) < count:
        p, q = (int(x) for x in rng.integers(n, size=2))
        if p == q:
            continue
        paths = []
        for _ in range(3):
            w = int(rng.integers(n))
            paths.append(nx.shortest_path(graph, p, w) + nx.shortest_path(graph, w, q)[1:])
        triples.append(tuple(paths))
    return triples


@dataclass(frozen=True)
class Rectangle:
    n: int
    m: int
    sides: Tuple[Path, Path, Path, Path]

    @property
    def loop(self) -> Path:
        return concatenate(self.sides)


def concatenate(sides: Sequence[Sequence[int]]) -> Path:
    loop = list(sides[0])
    for side in sides[1:]:
        if not side or side[0] != loop[-1]:
            raise ContractError("rectangle sides do not join end to end")
        loop += list(side)[1:]
    if loop[0] != loop[-1]:
        raise ContractError("rectangle sides do not close up")
    return loop


def rectangle_loops(complex: Complex, max_side: int, all_placements: bool = False) -> List[Rectangle]:
    """n×m rectangles for 1 <= n, m <= max_side.

    Grid presets place them at the origin, or at every fitting corner with
    ``all_placements``; Z²-type Cayley balls trace aⁿbᵐAⁿBᵐ from the centre.
    """
    out = []
    if "grid" in complex.metadata:
        w, h = complex.metadata["grid"]
        for n in range(1, min(max_side, w) + 1):
            for m in range(1, min(max_side, h) + 1):
                corners = [(x, y) for y in range(h - m + 1) for x in range(w - n + 1)] if all_placements else [(0, 0)]
                for x, y in corners:
                    out.append(Rectangle(n, m, _grid_sides(w, x, y, n, m)))
        return out
    presentation = complex.metadata.get("presentation")
    if presentation and {"a", "b"} <= set(presentation["generators"]):
        start = complex.metadata.get("center", 0)
        for n in range(1, max_side + 1):
            for m in range(1, max_side + 1):
                a = trace_word(complex, start, "a" * n)
                b = trace_word(complex, a[-1], "b" * m)
                a_back = trace_word(complex, b[-1], "A" * n)
                b_back = trace_word(complex, a_back[-1], "B" * m)
                if b_back[-1] != start:
                    raise ContractError("aⁿbᵐAⁿBᵐ does not close up; the group is not abelian in a, b")
                out.append(Rectangle(n, m, (a, b, a_back, b_back)))
        return out
    raise ContractError("rectangles need a grid preset or a Cayley ball over generators a, b")


def _grid_sides(w: int, x: int, y: int, n: int, m: int) -> Tuple[Path, Path, Path, Path]:
    return (
        [grid_vertex(w, x + i, y) for i in range(n + 1)],
        [grid_vertex(w, x + n, y + j) for j in range(m + 1)],
        [grid_vertex(w, x + n - i, y + m) for i in range(n + 1)],
        [grid_vertex(w, x, y + m - j) for j in range(m + 1)],
    )


@dataclass(frozen=True)
class RectangleReport:
    area: Optional[Coefficient]
    d1: Fraction
    d2: Fraction
    K: Fraction
    certified: bool
    holds: Optional[bool]

    @property
    def conclusive(self) -> bool:
        return self.holds is not None

    def as_dict(self) -> Dict:
        return {
            "area": None if self.area is None else str(self.area),
            "d1": str(self.d1),
            "d2": str(self.d2),
            "K": str(self.K),
            "certified": self.certified,
            "holds": self.holds,
        }


def rectangle_constant(complex: Complex) -> Fraction:
    return Fraction(1, complex.metadata.get("attaching_edges") or 3)


def check_rectangle(
    complex: Complex,
    sides: Sequence[Sequence[int]],
    ring: NormedRing,
    budget: Optional[Budget] = None,
    settings: Optional[SolverSettings] = None,
    logger=logger,
) -> RectangleReport:
    """A(γ) >= K·d₁·d₂ for γ = α₁α₂α₃α₄, d₁ = d(α₁, α₃), d₂ = d(α₂, α₄)."""
    if len(sides) != 4:
        raise ContractError("a rectangle has four sides")
    if complex.metric is None:
        raise ContractError("rectangle check needs the complex's metric")
    loop = concatenate(sides)
    metric = complex.metric
    d1 = metric.set_distance(sides[0], sides[2])
    d2 = metric.set_distance(sides[1], sides[3])
    K = rectangle_constant(complex)
    bound = K * d1 * d2
    if bound == 0:
        return RectangleReport(ring.zero, d1, d2, K, True, True)
    result = _area(complex, loop, ring, budget, settings, logger)
    holds = None
    if result.norm is not None and result.certified:
        holds = result.norm >= bound
    elif result.norm is not None and result.norm < bound:
        # an upper bound below K·d₁·d₂ proves the violation
        holds = False
    if holds is False:
        logger.error(f"rectangle inequality violated: A = {result.norm} < {bound}")
    return RectangleReport(result.norm, d1, d2, K, result.certified, holds)
