from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from sympy import Matrix

from isofill.builders.complexes import grid_vertex
from isofill.chains import Chain, Complex, boundary, chain_from_simplex, l1_norm
from isofill.config import SolverSettings
from isofill.errors import ContractError
from isofill.profiler.sampling import enumerate_cycles
from isofill.rings import make_ring
from isofill.solver import Budget, Status, area, exact_filling, lower_bound, path_chain

Z_ABS = make_ring("Z:abs")
Z_DISC = make_ring("Z:disc")

# the boundary of the 2x2 square at the corner of the 3x3 grid
SQUARE_2X2 = [0, 1, 2, 6, 10, 9, 8, 4, 0]


def unique_filling(complex: Complex, z: Chain):
    """Solve ∂c = z exactly; on a triangulated disk the solution is unique."""
    matrix = Matrix(complex.boundary_matrix(2).toarray().tolist())
    rhs = Matrix([z.coefficient(e) for e in range(complex.count(1))])
    solution, free = matrix.gauss_jordan_solve(rhs)
    assert free.shape[0] == 0
    return solution


def brute_force_norms(complex: Complex, values, discrete: bool, modulus=None):
    """Least norm of every boundary reachable with 2-chain coefficients in ``values``."""
    b = complex.boundary_matrix(2).toarray().astype(np.int64)
    chains = np.array(list(product(values, repeat=complex.count(2))), dtype=np.int64).T
    boundaries = b @ chains
    if modulus:
        boundaries %= modulus
    norms = (chains != 0).sum(axis=0) if discrete else np.abs(chains).sum(axis=0)
    best = {}
    for j in range(chains.shape[1]):
        key = tuple(int(x) for x in boundaries[:, j])
        if key not in best or norms[j] < best[key]:
            best[key] = int(norms[j])
    return best


def test_triangle_and_square(grid3):
    triangle = boundary(chain_from_simplex(grid3, (0, 1, 5), Z_ABS))
    result = exact_filling(grid3, triangle)
    assert result.norm == 1
    assert result.status == Status.OPTIMAL
    for spec in ["Z:abs", "Z:disc", "Zmod2:disc", "Q:disc"]:
        square = area(grid3, [0, 1, 5, 4, 0], make_ring(spec))
        assert square.norm == 2
        assert square.certified
        assert boundary(square.filling) == square.target


def test_rational_scaling(grid3):
    q = make_ring("Q:abs")
    z = boundary(chain_from_simplex(grid3, (0, 1, 5), q, Fraction(1, 2)))
    assert lower_bound(z) == Fraction(1, 2)
    result = exact_filling(grid3, z)
    assert result.norm == Fraction(1, 2)
    assert result.status == Status.OPTIMAL
    assert result.filling.coefficient(grid3.cell_id((0, 1, 5))) == Fraction(1, 2)


@pytest.mark.parametrize("spec", ["Z:abs", "Z:disc"])
def test_matches_unique_filling(grid3, spec):
    ring = make_ring(spec)
    for loop in [SQUARE_2X2, [0, 1, 2, 3, 7, 11, 15, 14, 13, 12, 8, 4, 0]]:
        z = path_chain(grid3, loop, ring)
        oracle = unique_filling(grid3, z)
        expected = sum(1 if ring.is_discrete else abs(int(x)) for x in oracle if x != 0)
        result = exact_filling(grid3, z)
        assert result.status == Status.OPTIMAL
        assert result.norm == expected
        assert boundary(result.filling) == z


@pytest.mark.slow
def test_every_short_grid_cycle(grid3):
    """All unit-coefficient 1-cycles of support at most 6 against the exact solution of ∂c = z."""
    matrix = Matrix(grid3.boundary_matrix(2).toarray().tolist())
    left_inverse = (matrix.T * matrix).inv() * matrix.T
    cycles = enumerate_cycles(grid3, 1, 6, Z_DISC)
    assert len(cycles) > 100
    for z in cycles:
        solution = left_inverse * Matrix([z.coefficient(e) for e in range(grid3.count(1))])
        assert matrix * solution == Matrix([z.coefficient(e) for e in range(grid3.count(1))])
        for ring in (Z_ABS, Z_DISC):
            expected = sum(1 if ring.is_discrete else abs(int(x)) for x in solution if x != 0)
            result = exact_filling(grid3, Chain(grid3, 1, ring, dict(z.items())))
            assert result.status == Status.OPTIMAL
            assert result.norm == expected, z.items()


def test_rectangle_areas(grid3):
    for n, m in [(1, 1), (1, 2), (2, 1), (2, 3), (3, 3)]:
        loop = (
            [grid_vertex(3, i, 0) for i in range(n + 1)]
            + [grid_vertex(3, n, j) for j in range(1, m + 1)]
            + [grid_vertex(3, n - i, m) for i in range(1, n + 1)]
            + [grid_vertex(3, 0, m - j) for j in range(1, m + 1)]
        )
        assert area(grid3, loop, Z_ABS).norm == 2 * n * m


@pytest.mark.parametrize("spec, values", [("Z:abs", range(-2, 3)), ("Z:disc", range(-1, 2))])
def test_sphere_against_brute_force(spec, values):
    """The 2-sphere has two fillings per cycle; the search must find the lighter one."""
    ring = make_ring(spec)
    sphere = Complex(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    best = brute_force_norms(sphere, values, ring.is_discrete)
    checked = 0
    for key, expected in best.items():
        if not any(key) or max(abs(x) for x in key) > 1:
            continue
        z = Chain(sphere, 1, ring, dict(enumerate(key)))
        result = exact_filling(sphere, z)
        assert result.status == Status.OPTIMAL
        assert result.norm == expected, key
        checked += 1
    assert checked > 10


def test_k5_mod_two_against_brute_force():
    ring = make_ring("Zmod2:disc")
    k5 = Complex(5, [t for t in product(range(5), repeat=3) if t[0] < t[1] < t[2]])
    best = brute_force_norms(k5, range(2), True, modulus=2)
    rng = np.random.default_rng(5)
    keys = sorted(k for k in best if any(k))
    for i in rng.choice(len(keys), size=40, replace=False):
        key = keys[int(i)]
        result = exact_filling(k5, Chain(k5, 1, ring, dict(enumerate(key))))
        assert result.status == Status.OPTIMAL
        assert result.norm == best[key], key


def test_deterministic_ties():
    sphere = Complex(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    z = path_chain(sphere, [0, 1, 2, 3, 0], Z_ABS)
    first = exact_filling(sphere, z)
    second = exact_filling(sphere, z)
    assert first.filling == second.filling
    assert l1_norm(first.filling) == first.norm == 2
    # (0,1,2)+(0,2,3) and (0,1,3)+(1,2,3) tie; the least in cell order with values ascending wins
    assert {sphere.simplex(2, j): v for j, v in first.filling.items()} == {(0, 1, 3): 1, (1, 2, 3): 1}


def test_zero_cycle(grid3):
    result = exact_filling(grid3, Chain.zero(grid3, 1, Z_ABS))
    assert result.norm == 0
    assert result.status == Status.OPTIMAL
    assert result.filling.is_zero()


def test_contract_errors(grid3, star_rips):
    with pytest.raises(ContractError):
        exact_filling(grid3, Chain(grid3, 1, Z_ABS, {0: 1}))
    with pytest.raises(ContractError):
        exact_filling(grid3, Chain(grid3, 2, Z_ABS, {0: 1}))
    with pytest.raises(ContractError):
        exact_filling(star_rips, path_chain(grid3, [0, 1, 5, 0], Z_ABS))


def test_path_chain(grid3):
    assert path_chain(grid3, [0, 1, 0], Z_ABS).is_zero()
    assert l1_norm(path_chain(grid3, [0, 1, 5, 0], Z_DISC)) == 3
    with pytest.raises(ContractError):
        path_chain(grid3, [0, 1, 5], Z_ABS)
    with pytest.raises(ContractError):
        path_chain(grid3, [0, 2, 0], Z_ABS)
    with pytest.raises(ContractError):
        path_chain(grid3, [0, 0], Z_ABS)


def test_budget_from_settings():
    budget = Budget.from_settings(SolverSettings(budget_nodes=10, budget_ms=None))
    assert budget == Budget(nodes=10, ms=None)


def test_summary(grid3):
    result = area(grid3, [0, 1, 5, 4, 0], Z_DISC)
    summary = result.summary()
    assert summary["norm"] == "2"
    assert summary["status"] == "optimal"
    assert summary["ring"] == "Z:disc"
