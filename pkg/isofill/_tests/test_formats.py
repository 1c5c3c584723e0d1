from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from isofill.builders.complexes import parse_preset, rips_complex
from isofill.builders.metrics import FiniteMetric
from isofill.chains import boundary, chain_from_simplex
from isofill.errors import ConfigurationError, ContractError
from isofill.formats import (
    load_chain,
    load_complex,
    load_loop,
    load_metric,
    load_presentation,
    read_profile,
    save_chain,
    save_complex,
    write_plotdata,
    write_profile,
)
from isofill.profiler import IsoProfile, ProfileEntry, classify_growth
from isofill.rings import make_ring
from isofill.solver import Status


def test_complex_file(tmp_path: Path, grid3):
    path = tmp_path / "grid.cx"
    save_complex(grid3, path)
    loaded = load_complex(path)
    assert [loaded.count(k) for k in range(3)] == [16, 33, 18]
    assert loaded.cells(2) == grid3.cells(2)
    assert loaded.metadata["grid"] == [3, 3]
    assert np.array_equal(loaded.metric.scaled, grid3.metric.scaled)
    # canonical order: saving again gives the same bytes
    again = tmp_path / "again.cx"
    save_complex(loaded, again)
    assert again.read_text() == path.read_text()


def test_matrix_metric_file(tmp_path: Path):
    metric = FiniteMetric.from_matrix([[0, "1/2", 1], ["1/2", 0, "1/2"], [1, "1/2", 0]], epsilon="1/2")
    complex = rips_complex(metric, "1/2", 2)
    path = tmp_path / "rips.cx"
    save_complex(complex, path)
    loaded = load_complex(path)
    assert loaded.metric.graph is None
    assert loaded.metric.distance(0, 2) == 1
    assert loaded.metric.epsilon == Fraction(1, 2)
    assert loaded.metadata["rips_scale"] == "1/2"
    assert loaded.count(1) == 2


def test_truncation_survives(tmp_path: Path):
    complex, _ = parse_preset("f2", 2)
    path = tmp_path / "f2.cx"
    save_complex(complex, path)
    truncation = load_complex(path).metric.truncation
    assert (truncation.center, truncation.radius, truncation.convex) == (0, 2, True)


def test_chain_file(tmp_path: Path, grid3):
    q = make_ring("Q:abs")
    z = boundary(chain_from_simplex(grid3, (0, 1, 5), q, Fraction(-3, 4)))
    path = tmp_path / "z.chain"
    save_chain(z, path, extra={"norm": Fraction(9, 4)})
    assert load_chain(path, grid3) == z
    assert "norm: 9/4" in path.read_text()
    # an explicit ring overrides the file's ring
    assert load_chain(path, grid3, make_ring("Q:disc")).ring.spec == "Q:disc"


def test_wrong_format(tmp_path: Path, grid3):
    path = tmp_path / "grid.cx"
    save_complex(grid3, path)
    with pytest.raises(ConfigurationError):
        load_chain(path, grid3)


def test_chain_cells_must_match_dimension(tmp_path: Path, grid3):
    path = tmp_path / "bad.chain"
    path.write_text("format: isofill-chain/1\nring: Z:abs\ndim: 1\ncells:\n- [[0, 1, 5], '1']\n")
    with pytest.raises(ContractError):
        load_chain(path, grid3)


def test_text_inputs(tmp_path: Path):
    metric_path = tmp_path / "m.csv"
    metric_path.write_text("# two points\n0, 1/2\n1/2, 0\n")
    assert load_metric(metric_path).distance(0, 1) == Fraction(1, 2)
    loop_path = tmp_path / "loop.txt"
    loop_path.write_text("0, 1, 5\n4 0\n")
    assert load_loop(loop_path) == [0, 1, 5, 4, 0]
    presentation_path = tmp_path / "z2.yml"
    presentation_path.write_text("generators: [a, b]\nrelators: [abAB]\n")
    presentation = load_presentation(presentation_path)
    assert presentation.generators == ("a", "b")
    assert presentation.relators == ("abAB",)


def test_profile_file(tmp_path: Path):
    entries = [ProfileEntry(l, l * l, "sampled", 3, Status.OPTIMAL) for l in range(1, 8)]
    entries[2] = ProfileEntry(3, Fraction(19, 2), "sampled", 3, Status.UPPER_BOUND)
    p = IsoProfile("abc", 1, "Q:abs", entries, l_exhaustive=0, seed=11)
    path = tmp_path / "p.csv"
    write_profile(p, path, echo={"budget_nodes": 100})
    text = path.read_text()
    assert text.startswith("# complex: abc\n")
    assert "# budget_nodes: 100\n" in text
    loaded = read_profile(path)
    assert loaded.entries == entries
    assert loaded.seed == 11
    assert loaded.ring == "Q:abs"


def test_plotdata_file(tmp_path: Path):
    entries = [ProfileEntry(l, l * l, "exhaustive", 1, Status.OPTIMAL) for l in range(1, 8)]
    p = IsoProfile("abc", 1, "Z:abs", entries, l_exhaustive=7)
    path = tmp_path / "plot.csv"
    write_plotdata(p, classify_growth(p), path)
    lines = path.read_text().splitlines()
    assert "# alpha: 2.000000" in lines
    assert "# label: quadratic" in lines
    assert lines[6] == "l,f_hat,fit"
    assert lines[7] == "1,1,1.000000"
