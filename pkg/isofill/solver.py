"""Exact minimal fillings.

Given an n-cycle z, find an (n+1)-chain c with ∂c = z of least ℓ¹-norm.
The search runs branch and bound with unit propagation inside a region that
starts at hull(supp z) and grows by expand_neighborhood until the optimum is
certified.

All arithmetic inside the search is on integers: rational targets are
scaled by the lcm of their denominators, residues mod m are reduced after
every update. Incidences are ±1 so every row forces its last free variable.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
from math import ceil, lcm
import time
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from isofill.chains import Chain, Complex, Subcomplex, expand_neighborhood, hull, is_cycle, support_refs
from isofill.config import SolverSettings
from isofill.errors import ContractError
from isofill.rings import Coefficient, NormedRing, RingKind

logger = logging.getLogger("isofill.solver")


class Status(str, Enum):
    OPTIMAL = "optimal"
    UPPER_BOUND = "upper_bound"
    INFEASIBLE_WITHIN_BUDGET = "infeasible_within_budget"
    # complete search of the whole complex (or an expansion fixed point) found nothing
    NO_FILLING = "no_filling"


@dataclass(frozen=True)
class Budget:
    nodes: Optional[int] = None
    ms: Optional[int] = None

    @classmethod
    def from_settings(cls, settings: SolverSettings) -> "Budget":
        return cls(settings.budget_nodes, settings.budget_ms)


@dataclass(frozen=True)
class FillingResult:
    target: Chain
    filling: Optional[Chain]
    norm: Optional[Coefficient]
    status: Status
    region_depth: int
    region_cells: int
    nodes: int

    @property
    def certified(self) -> bool:
        return self.status == Status.OPTIMAL

    def summary(self) -> Dict:
        return {
            "norm": None if self.norm is None else str(self.norm),
            "status": self.status.value,
            "nodes": self.nodes,
            "region_depth": self.region_depth,
            "region_cells": self.region_cells,
            "ring": self.target.ring.spec,
        }


class _BudgetExhausted(Exception):
    pass


class _Counter:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.nodes = 0
        self.deadline = None if budget.ms is None else time.monotonic() + budget.ms / 1000

    def tick(self):
        self.nodes += 1
        if self.budget.nodes is not None and self.nodes > self.budget.nodes:
            raise _BudgetExhausted()
        if self.deadline is not None and not self.nodes % 256 and time.monotonic() > self.deadline:
            raise _BudgetExhausted()


@dataclass
class _Problem:
    cols: List[int]
    rows: List[int]
    col_rows: List[List[Tuple[int, int]]]
    row_cols: List[List[Tuple[int, int]]]
    target: List[int]
    faces: int


def _build_problem(complex: Complex, region: Subcomplex, n: int, target: Dict[int, int]) -> _Problem:
    cols = sorted(region.ids(n + 1))
    rows = sorted(region.ids(n))
    row_index = {r: i for i, r in enumerate(rows)}
    matrix = complex.boundary_matrix(n + 1)
    col_rows = []
    row_cols: List[List[Tuple[int, int]]] = [[] for _ in rows]
    for j, c in enumerate(cols):
        entries = [
            (row_index[int(matrix.indices[p])], int(matrix.data[p]))
            for p in range(matrix.indptr[c], matrix.indptr[c + 1])
        ]
        col_rows.append(entries)
        for i, sign in entries:
            row_cols[i].append((j, sign))
    return _Problem(cols, rows, col_rows, row_cols, [target.get(r, 0) for r in rows], n + 2)


def _feasible(problem: _Problem, modulus: Optional[int]) -> Optional[bool]:
    """Exact rank test for the existence of any solution, or None when no field applies."""
    if modulus is None:
        domain = QQ
    elif isprime(modulus):
        domain = GF(modulus)
    else:
        return None
    if not problem.cols:
        return not any(problem.target)
    shape = (len(problem.rows), len(problem.cols))
    entries = {}
    for j, col in enumerate(problem.col_rows):
        for i, sign in col:
            entries.setdefault(i, {})[j] = domain(sign)
    a = DomainMatrix(entries, shape, domain)
    b = DomainMatrix({i: {0: domain(v)} for i, v in enumerate(problem.target) if v}, (shape[0], 1), domain)
    return a.rank() == a.hstack(b).rank()


class _Search:
    """Depth-first branch and bound with unit propagation on one region."""

    def __init__(
        self,
        problem: _Problem,
        order: Sequence[int],
        modulus: Optional[int],
        discrete: bool,
        value_bound: int,
        limit: int,
        floor: int,
        counter: _Counter,
        canonical: bool = False,
    ):
        self.p = problem
        self.order = list(order)
        self.modulus = modulus
        self.discrete = discrete
        self.value_bound = value_bound
        self.limit = limit
        self.floor = floor
        self.counter = counter
        self.canonical = canonical
        self.residual = list(problem.target)
        self.free = [len(r) for r in problem.row_cols]
        self.value: List[Optional[int]] = [None] * len(problem.cols)
        self.cost = 0
        self.weight_sum = sum(self._weight(r) for r in self.residual)
        self.trail: List[int] = []
        self.queue: List[int] = []
        self.best: Optional[Dict[int, int]] = None
        self.best_cost: Optional[int] = None

    def _weight(self, x: int) -> int:
        if self.discrete:
            return 1 if x else 0
        return abs(x)

    def _reduce(self, x: int) -> int:
        return x % self.modulus if self.modulus else x

    def _assign(self, col: int, val: int) -> bool:
        self.value[col] = val
        self.trail.append(col)
        self.cost += self._weight(val)
        ok = True
        for row, sign in self.p.col_rows[col]:
            old = self.residual[row]
            new = self._reduce(old - sign * val)
            self.residual[row] = new
            self.weight_sum += self._weight(new) - self._weight(old)
            self.free[row] -= 1
            if self.free[row] == 0:
                if new:
                    ok = False
            elif self.free[row] == 1:
                self.queue.append(row)
        return ok

    def _undo(self, mark: int):
        self.queue.clear()
        while len(self.trail) > mark:
            col = self.trail.pop()
            val = self.value[col]
            self.value[col] = None
            self.cost -= self._weight(val)
            for row, sign in self.p.col_rows[col]:
                old = self.residual[row]
                new = self._reduce(old + sign * val)
                self.residual[row] = new
                self.weight_sum += self._weight(new) - self._weight(old)
                self.free[row] += 1

    def _propagate(self) -> bool:
        while self.queue:
            row = self.queue.pop()
            if self.free[row] != 1:
                continue
            col, sign = next((c, s) for c, s in self.p.row_cols[row] if self.value[c] is None)
            val = self._reduce(sign * self.residual[row])
            if self.cost + self._weight(val) > self.limit:
                return False
            if not self._assign(col, val):
                return False
        return True

    def _bound_ok(self) -> bool:
        return self.cost + ceil(self.weight_sum / self.p.faces) <= self.limit

    def _values(self) -> List[int]:
        room = self.limit - self.cost
        if room <= 0:
            return [0]
        if self.modulus:
            return list(range(self.modulus))
        bound = min(room, self.value_bound) if self.discrete else room
        if self.canonical:
            return list(range(-bound, bound + 1))
        values = [0]
        for mag in range(1, bound + 1):
            values += [mag, -mag]
        return values

    def _next(self, pos: int) -> Optional[int]:
        while pos < len(self.order) and self.value[self.order[pos]] is not None:
            pos += 1
        return pos if pos < len(self.order) else None

    def _record(self):
        self.best = {self.p.cols[c]: v for c, v in enumerate(self.value) if v}
        self.best_cost = self.cost
        self.limit = self.cost - 1

    def _done(self) -> bool:
        return self.best_cost is not None and (self.canonical or self.best_cost <= self.floor)

    def run(self):
        for row, free in enumerate(self.free):
            if free == 0 and self.residual[row]:
                return
            if free == 1:
                self.queue.append(row)
        if not (self._propagate() and self._bound_ok()):
            self._undo(0)
            return
        pos = self._next(0)
        if pos is None:
            self._record()
            self._undo(0)
            return
        stack = [[pos, iter(self._values()), len(self.trail)]]
        while stack:
            frame = stack[-1]
            self._undo(frame[2])
            descended = False
            for val in frame[1]:
                self.counter.tick()
                if self._assign(self.order[frame[0]], val) and self._propagate() and self._bound_ok():
                    nxt = self._next(frame[0] + 1)
                    if nxt is None:
                        self._record()
                        if self._done():
                            self._undo(0)
                            return
                    else:
                        stack.append([nxt, iter(self._values()), len(self.trail)])
                        descended = True
                        break
                self._undo(frame[2])
            if not descended:
                stack.pop()
        self._undo(0)


def _scaled_target(z: Chain) -> Tuple[Dict[int, int], int]:
    if z.ring.ring_kind != RingKind.RATIONALS:
        return dict(z.coefficients), 1
    scale = lcm(1, *(v.denominator for v in z.coefficients.values()))
    return {c: int(v * scale) for c, v in z.coefficients.items()}, scale


def _vertex_distances(complex: Complex, sources: Sequence[int]) -> Dict[int, int]:
    return nx.multi_source_dijkstra_path_length(complex.skeleton_graph(), set(sources))


def lower_bound(z: Chain) -> Coefficient:
    """⌈Σ|z_e| / (n+2)⌉ and max |z_e|: every (n+1)-cell has n+2 faces."""
    target, scale = _scaled_target(z)
    ring = z.ring
    if ring.is_discrete:
        return ceil(len(target) / (z.dim + 2))
    weights = [abs(v) for v in target.values()]
    return Fraction(max(ceil(sum(weights) / (z.dim + 2)), max(weights, default=0)), scale)


class _RegionSolver:
    def __init__(self, complex: Complex, z: Chain, budget: Budget, settings: SolverSettings):
        self.complex = complex
        self.n = z.dim
        self.ring = z.ring
        self.target, self.scale = _scaled_target(z)
        self.modulus = z.ring.m if z.ring.ring_kind == RingKind.INTEGERS_MOD else None
        self.discrete = z.ring.is_discrete
        self.settings = settings
        self.counter = _Counter(budget)
        bound = settings.discrete_value_bound
        self.value_bound = bound if bound is not None else max(1, max(abs(v) for v in self.target.values()))
        floor = lower_bound(z)
        self.floor = int(floor) if self.discrete else int(floor * self.scale)
        self.distances = _vertex_distances(complex, z.vertices())

    def order(self, problem: _Problem) -> List[int]:
        far = len(self.distances) + 1

        def key(j: int):
            cell = self.complex.simplex(self.n + 1, problem.cols[j])
            return min(self.distances.get(v, far) for v in cell), problem.cols[j]

        return sorted(range(len(problem.cols)), key=key)

    def search(self, problem: _Problem, limit: int, canonical: bool = False, counter=None) -> _Search:
        search = _Search(
            problem, self.order(problem), self.modulus, self.discrete, self.value_bound, limit, self.floor,
            counter or self.counter, canonical,
        )
        search.run()
        return search

    def tie_break(self, problem: _Problem, cost: int, budget: Budget, logger) -> Tuple[Optional[Dict[int, int]], int]:
        """Lexicographically least filling of norm ``cost`` in the search order, values ascending.

        Runs on a node budget only, so the chosen representative never depends on timing.
        """
        counter = _Counter(Budget(nodes=budget.nodes))
        try:
            return self.search(problem, cost, canonical=True, counter=counter).best, counter.nodes
        except _BudgetExhausted:
            logger.info("canonical tie-break ran out of budget; keeping the first optimum found")
            return None, counter.nodes

    def first_solution(self, problem: _Problem) -> Tuple[Optional[_Search], bool]:
        """Optimal solution in the region by iterative deepening, and whether absence is proven."""
        if self.settings.feasibility_check:
            feasible = _feasible(problem, self.modulus)
            if feasible is False:
                return None, True
        # the discrete norm of a solution is at most the number of variables
        max_cap = len(problem.cols) if self.discrete else None
        cap = max(self.floor, 1)
        while True:
            if max_cap is not None:
                cap = min(cap, max_cap)
            search = self.search(problem, cap)
            if search.best_cost is not None:
                return search, False
            if max_cap is not None and cap >= max_cap:
                # only residues enumerate every value, so only there is exhaustion a proof
                return None, self.modulus is not None
            cap *= 2


def _stabilized(history: List[Optional[int]]) -> bool:
    return len(history) >= 3 and history[-1] is not None and history[-1] == history[-2] == history[-3]


def exact_filling(
    complex: Complex,
    z: Chain,
    budget: Optional[Budget] = None,
    settings: Optional[SolverSettings] = None,
    logger=logger,
) -> FillingResult:
    """Least-norm (n+1)-chain with boundary ``z``.

    The status is ``optimal`` when the incumbent meets the global lower
    bound, the region is the whole complex or an expansion fixed point, or
    the optimum stabilized and a full-complex search confirmed it.
    """
    settings = settings or SolverSettings()
    budget = budget or Budget.from_settings(settings)
    if z.complex is not complex:
        raise ContractError("cycle does not belong to this complex")
    n = z.dim
    if z.is_zero():
        return FillingResult(z, Chain.zero(complex, n + 1, z.ring), z.ring.zero, Status.OPTIMAL, 0, 0, 0)
    if not 0 <= n < complex.dimension:
        raise ContractError(f"cannot fill a {n}-cycle in a {complex.dimension}-dimensional complex")
    if n >= 1 and not is_cycle(z):
        raise ContractError("exact_filling needs a cycle")

    start = time.time()
    solver = _RegionSolver(complex, z, budget, settings)
    region = hull(complex, support_refs(z))
    depth = 0
    best: Optional[Dict[int, int]] = None
    best_cost: Optional[int] = None
    best_region = region
    best_depth = 0
    # last region whose search ran to completion; ties are broken there
    searched = region
    history: List[Optional[int]] = []
    proven_empty = False
    status = None
    try:
        while status is None:
            problem = _build_problem(complex, region, n, solver.target)
            if best_cost is None:
                search, proven_empty = solver.first_solution(problem)
                if search is not None:
                    best, best_cost, best_region, best_depth = search.best, search.best_cost, region, depth
            elif best_cost > solver.floor:
                search = solver.search(problem, best_cost - 1)
                if search.best_cost is not None:
                    best, best_cost, best_region, best_depth = search.best, search.best_cost, region, depth
            searched = region
            history.append(best_cost)
            logger.debug(f"region depth {depth}: {region.size} cells, incumbent {best_cost}")

            if best_cost is not None and best_cost <= solver.floor:
                status = Status.OPTIMAL
                break
            grown = expand_neighborhood(complex, region)
            if region.is_full() or grown == region:
                status = Status.OPTIMAL if best_cost is not None else (
                    Status.NO_FILLING if proven_empty else Status.INFEASIBLE_WITHIN_BUDGET
                )
                break
            if depth >= 2 and _stabilized(history):
                full = complex.full()
                if full.size <= settings.certify_max_cells:
                    problem = _build_problem(complex, full, n, solver.target)
                    search = solver.search(problem, best_cost - 1)
                    if search.best_cost is not None:
                        best, best_cost, best_region = search.best, search.best_cost, full
                        best_depth = depth + 1
                    searched = full
                    status = Status.OPTIMAL
                else:
                    status = Status.UPPER_BOUND
                break
            region = grown
            depth += 1
    except _BudgetExhausted:
        status = Status.UPPER_BOUND if best_cost is not None else Status.INFEASIBLE_WITHIN_BUDGET
        logger.warning(f"filling search exhausted its budget after {solver.counter.nodes} nodes")

    nodes = solver.counter.nodes
    if best_cost is not None and settings.canonical_ties:
        canonical, tie_nodes = solver.tie_break(
            _build_problem(complex, searched, n, solver.target), best_cost, budget, logger
        )
        if canonical is not None:
            best = canonical
        nodes += tie_nodes

    filling = None
    norm = None
    if best is not None:
        ring = z.ring
        if ring.ring_kind == RingKind.RATIONALS:
            filling = Chain(complex, n + 1, ring, {c: Fraction(v, solver.scale) for c, v in best.items()})
        else:
            filling = Chain(complex, n + 1, ring, best)
        rational = ring.ring_kind == RingKind.RATIONALS and not ring.is_discrete
        norm = Fraction(best_cost, solver.scale) if rational else best_cost
    logger.info(
        f"filled {n}-cycle of support {len(z)}: norm {norm}, {status.value}, depth {best_depth}, "
        f"{nodes} nodes, took {time.time() - start:.2f} seconds"
    )
    return FillingResult(z, filling, norm, status, best_depth, best_region.size, nodes)


def path_chain(complex: Complex, path: Sequence[int], ring: NormedRing) -> Chain:
    """Unit-coefficient 1-chain of a closed edge path; backtracks cancel."""
    if not path or path[0] != path[-1]:
        raise ContractError("loop is not a closed edge path")
    total: Dict[int, Coefficient] = {}
    for u, v in zip(path, path[1:]):
        if u == v:
            raise ContractError(f"loop stalls at vertex {u}")
        cid = complex.find((min(u, v), max(u, v)))
        if cid is None:
            raise ContractError(f"({u}, {v}) is not an edge of the complex")
        step = ring.one if u < v else ring.neg(ring.one)
        total[cid] = ring.add(total.get(cid, ring.zero), step)
    return Chain(complex, 1, ring, total)


def area(
    complex: Complex,
    loop: Sequence[int],
    ring: NormedRing,
    budget: Optional[Budget] = None,
    settings: Optional[SolverSettings] = None,
    logger=logger,
) -> FillingResult:
    return exact_filling(complex, path_chain(complex, loop, ring), budget=budget, settings=settings, logger=logger)
