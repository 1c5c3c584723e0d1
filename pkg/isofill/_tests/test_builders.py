from fractions import Fraction
from itertools import product

import networkx as nx
import pytest

from isofill.builders.complexes import grid_complex, grid_vertex, parse_preset, rips_complex, tree_complex
from isofill.builders.groups import PRESETS, Presentation, cayley_ball, free_reduce, invert, trace_word
from isofill.builders.metrics import FiniteMetric, estimate_delta, gromov_product
from isofill.chains import check_boundary_squared
from isofill.config import HyperbolicitySettings
from isofill.errors import ConfigurationError, ContractError

LINE = [[abs(i - j) for j in range(4)] for i in range(4)]


def square_metric() -> FiniteMetric:
    return FiniteMetric.from_graph(nx.cycle_graph(4))


def test_grid_counts(grid3):
    assert grid3.n_vertices == 16
    assert [grid3.count(k) for k in range(3)] == [16, 33, 18]
    assert check_boundary_squared(grid3)
    assert grid3.metric.distance(0, grid_vertex(3, 3, 3)) == 3
    assert grid3.metadata["grid"] == [3, 3]


def test_tree_is_zero_hyperbolic():
    complex, metric = tree_complex(3, 2)
    assert complex.n_vertices == 10
    assert complex.dimension == 1
    estimate = estimate_delta(metric)
    assert estimate.delta == 0
    assert estimate.certificate == "pivot"


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets_have_nilpotent_boundary(preset):
    complex, _ = parse_preset(preset, 2)
    assert check_boundary_squared(complex)
    assert complex.metadata["radius"] == 2


def test_free_ball():
    complex, metric = cayley_ball(PRESETS["f2"][0], 2)
    assert complex.n_vertices == 17
    assert complex.dimension == 1
    assert metric.truncation.convex
    assert estimate_delta(metric).delta == 0


def test_free_ball_radius_three_is_zero_hyperbolic():
    _, metric = parse_preset("f2", 3)
    assert metric.size == 53
    assert estimate_delta(metric).delta == 0


def test_abelian_ball():
    complex, _ = parse_preset("z2", 2)
    assert complex.n_vertices == 13
    assert complex.count(2) == 8
    assert complex.metadata["attaching_edges"] == 4
    assert not complex.metadata["convex"]
    assert trace_word(complex, 0, "abAB")[-1] == 0
    with pytest.raises(ContractError):
        trace_word(complex, 0, "aaa")


def test_words():
    assert free_reduce("abBA") == ""
    assert free_reduce("aAb") == "b"
    assert invert("ab") == "BA"


@pytest.mark.parametrize(
    "generators, relators",
    [(("a", "a"), ()), (("A",), ()), (("a", "b"), ("abAc",)), (("a",), ("aA",))],
)
def test_bad_presentations(generators, relators):
    with pytest.raises(ConfigurationError):
        Presentation(generators, relators)


def test_preset_errors():
    with pytest.raises(ConfigurationError):
        parse_preset("z2")
    with pytest.raises(ConfigurationError):
        parse_preset("heisenberg", 2)
    with pytest.raises(ContractError):
        grid_complex(0, 3)


def test_rips_of_a_line():
    metric = FiniteMetric.from_matrix(LINE)
    thin = rips_complex(metric, 1, 2)
    assert thin.dimension == 1
    assert thin.count(1) == 3
    thick = rips_complex(metric, 2, 2)
    assert thick.count(1) == 5
    assert thick.cells(2) == ((0, 1, 2), (1, 2, 3))
    assert thick.metadata["rips_scale"] == "2"
    with pytest.raises(ContractError):
        rips_complex(metric, 0, 2)


def test_rational_matrix():
    metric = FiniteMetric.from_matrix([[0, "1/2"], ["1/2", 0]])
    assert metric.scale == 2
    assert metric.distance(0, 1) == Fraction(1, 2)


@pytest.mark.parametrize(
    "rows",
    [
        [[0, 1], [2, 0]],
        [[1, 1], [1, 0]],
        [[0, 0], [0, 0]],
        [[0, 1, 5], [1, 0, 1], [5, 1, 0]],
    ],
)
def test_metric_axioms(rows):
    with pytest.raises(ContractError):
        FiniteMetric.from_matrix(rows)


def test_square_delta():
    metric = square_metric()
    assert gromov_product(metric, 1, 3, 0) == 0
    assert gromov_product(metric, 1, 2, 0) == 1
    exact = estimate_delta(metric)
    assert exact.delta == 1
    assert exact.certificate == "exhaustive"
    sampled = estimate_delta(metric, mode="sampled", count=2000, seed=3)
    assert sampled.certificate == "lower_bound"
    assert sampled.delta <= exact.delta
    assert estimate_delta(metric, mode="sampled", count=2000, seed=3) == sampled


def test_exact_delta_cap():
    with pytest.raises(ConfigurationError):
        estimate_delta(square_metric(), cap=3)
    with pytest.raises(ConfigurationError):
        estimate_delta(square_metric(), mode="guess")


def test_delta_reads_settings():
    settings = HyperbolicitySettings(exact_cap=3, samples=50, seed=7)
    with pytest.raises(ConfigurationError):
        estimate_delta(square_metric(), settings=settings)
    sampled = estimate_delta(square_metric(), mode="sampled", settings=settings)
    assert sampled.quadruples == 50
    assert sampled.seed == 7
    assert estimate_delta(square_metric(), mode="sampled", seed=8, settings=settings).seed == 8


def test_hexagon_delta_matches_all_quadruples():
    metric = FiniteMetric.from_graph(nx.cycle_graph(6))
    d = metric.distance

    def product_at(u, v, b):
        return (d(u, b) + d(v, b) - d(u, v)) / 2

    expected = max(
        min(product_at(u, v, b), product_at(v, w, b)) - product_at(u, w, b)
        for u, v, w, b in product(range(6), repeat=4)
    )
    estimate = estimate_delta(metric)
    assert estimate.delta == max(expected, 0)
    assert estimate.delta > 0
    assert estimate.certificate == "exhaustive"


def test_small_presets_at_full_radius():
    grid, _ = parse_preset("grid:6x6")
    assert [grid.count(k) for k in range(3)] == [49, 120, 72]
    assert check_boundary_squared(grid)
    plane, _ = parse_preset("z2", 4)
    assert plane.n_vertices == 41
    assert plane.count(2) == 48
    assert check_boundary_squared(plane)


@pytest.mark.slow
def test_large_presets_at_full_radius():
    free, metric = parse_preset("f2", 6)
    assert free.n_vertices == 1457
    assert free.count(1) == 1456
    assert check_boundary_squared(free)
    surface, _ = parse_preset("genus2", 3)
    assert surface.n_vertices == 457
    assert check_boundary_squared(surface)
    rips = rips_complex(metric, 3, 2)
    assert rips.n_vertices == 1457
    assert rips.dimension == 2
    assert check_boundary_squared(rips)
