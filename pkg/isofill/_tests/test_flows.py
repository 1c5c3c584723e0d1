from pathlib import Path

import pytest
import yaml

from isofill.builders.complexes import grid_complex, grid_vertex, rips_complex, tree_complex
from isofill.chains import boundary, chain_from_simplex
from isofill.errors import CertificationError
from isofill.flows.filling import (
    area_flow,
    chunk,
    delta_flow,
    fill_flow,
    hypfill_batch_flow,
    hypfill_flow,
    load_settings,
)
from isofill.flows.profiling import axioms_flow, coning_flow, profile_flow
from isofill.formats import load_chain, load_complex, read_profile, save_chain, save_complex
from isofill.rings import make_ring
from isofill.solver import path_chain


def test_chunk():
    assert chunk(list(range(5)), 2) == [[0, 1, 2], [3, 4]]
    assert chunk(list(range(2)), 4) == [[0], [1]]
    assert chunk([], 3) == []


def test_load_settings():
    settings = load_settings(budget_nodes=7)
    assert settings.solver.budget_nodes == 7


def test_fill_flow(tmp_path: Path, grid3, grid3_file):
    z = boundary(chain_from_simplex(grid3, (0, 1, 5), make_ring("Z:abs")))
    cycle = tmp_path / "z.chain"
    save_chain(z, cycle)
    out = tmp_path / "c.chain"
    summary = fill_flow(str(grid3_file), str(cycle), "Z:disc", out=str(out))
    assert summary["norm"] == "1"
    assert summary["status"] == "optimal"
    assert summary["ring"] == "Z:disc"
    document = yaml.safe_load(out.read_text())
    assert document["status"] == "optimal"
    assert document["cells"] == [[[0, 1, 5], "1"]]


def test_area_flow(tmp_path: Path, grid3_file):
    loop = tmp_path / "loop.txt"
    loop.write_text("0 1 5 4 0\n")
    summary = area_flow(str(grid3_file), str(loop), "Z:abs")
    assert summary["norm"] == "2"
    assert summary["length"] == 4
    assert summary["target_norm"] == "4"


def test_profile_flow_ignores_jobs(tmp_path: Path, grid3_file):
    outputs = []
    for jobs in (1, 3):
        out = tmp_path / f"profile_{jobs}.csv"
        summary = profile_flow(str(grid3_file), 1, 4, "Z:abs", str(out), jobs=jobs)
        assert summary["worst_status"] == "optimal"
        assert summary["max_f_hat"] == "2"
        outputs.append(out.read_text())
    assert outputs[0] == outputs[1]
    assert [f for _, f in read_profile(tmp_path / "profile_1.csv").pairs()] == [0, 0, 1, 2]


def test_rectangle_profile_flow(tmp_path: Path, grid3_file):
    out = tmp_path / "rectangles.csv"
    summary = profile_flow(str(grid3_file), 1, 12, "Z:abs", str(out), rectangles=2)
    assert summary["max_f_hat"] == "8"
    assert read_profile(out).entries[0].mode == "loops"


def test_delta_flow(tmp_path: Path):
    tree, _ = tree_complex(3, 2)
    path = tmp_path / "tree.cx"
    save_complex(tree, path)
    summary = delta_flow(str(path))
    assert summary["delta"] == "0"
    assert summary["certificate"] == "pivot"


def test_axioms_flow(grid3_file):
    summary = axioms_flow(str(grid3_file), triples=4, max_side=2, seed=1)
    assert summary["theta"] == {"checked": 4, "violations": 0, "inconclusive": 0}
    assert summary["rectangle"]["checked"] == 25
    assert summary["rectangle"]["violations"] == 0
    assert summary["rectangle"]["K"] == "1/3"


def test_coning_flow(tmp_path: Path):
    grid, _ = grid_complex(4, 4)
    path = tmp_path / "grid4.cx"
    save_complex(grid, path)
    summary = coning_flow(str(path), grid_vertex(4, 2, 2), [1, 2], samples=3, seed=0, jobs=2)
    assert [r["r"] for r in summary["radii"]] == [1, 2]
    assert summary["constant"] is not None


@pytest.fixture
def star_files(tmp_path: Path, star_rips):
    complex_path = tmp_path / "star.cx"
    save_complex(star_rips, complex_path)
    cycle_path = tmp_path / "triangle.chain"
    save_chain(path_chain(star_rips, [1, 2, 3, 1], make_ring("Z:disc")), cycle_path)
    return complex_path, cycle_path


def test_hypfill_flow(tmp_path: Path, star_files):
    complex_path, cycle_path = star_files
    out = tmp_path / "filling.chain"
    trace = tmp_path / "trace.yml"
    summary = hypfill_flow(str(complex_path), str(cycle_path), out=str(out), trace_out=str(trace))
    assert summary["norm"] == "1"
    assert summary["delta"] == "0"
    assert summary["N"] == 9
    assert summary["certified"]
    assert yaml.safe_load(trace.read_text())["steps"][0]["case"] == 1


def test_hypfill_flow_writes_partial_trace(tmp_path: Path):
    _, metric = tree_complex(3, 1)
    skeleton = rips_complex(metric, 3, 1)
    complex_path = tmp_path / "skeleton.cx"
    save_complex(skeleton, complex_path)
    cycle_path = tmp_path / "triangle.chain"
    save_chain(path_chain(skeleton, [1, 2, 3, 1], make_ring("Z:disc")), cycle_path)
    trace = tmp_path / "trace.yml"
    with pytest.raises(CertificationError):
        hypfill_flow(str(complex_path), str(cycle_path), delta="0", trace_out=str(trace))
    document = yaml.safe_load(trace.read_text())
    assert document["certified"] is False
    assert "missing" in document["error"]


def test_hypfill_batch_flow(star_files):
    complex_path, _ = star_files
    summary = hypfill_batch_flow(str(complex_path), count=6, max_length=4, seed=0, compare=3, jobs=2)
    assert summary["all_certified"]
    assert len(summary["cycles"]) == 6
    compared = [row for row in summary["cycles"] if "exact" in row]
    assert len(compared) == 3
    assert all(int(row["norm"]) >= int(row["exact"]) for row in compared)


def test_repeated_runs_write_identical_files(tmp_path: Path, grid3, grid3_file, star_files):
    star_path, triangle_path = star_files
    cycle = tmp_path / "z.chain"
    save_chain(path_chain(grid3, [0, 1, 2, 6, 10, 9, 8, 4, 0], make_ring("Z:abs")), cycle)
    outputs = {}
    for jobs in (1, 4):
        run = tmp_path / f"jobs_{jobs}"
        run.mkdir()
        fill_flow(str(grid3_file), str(cycle), "Z:abs", out=str(run / "fill.chain"))
        hypfill_flow(
            str(star_path), str(triangle_path), out=str(run / "hyp.chain"), trace_out=str(run / "trace.yml")
        )
        batch = hypfill_batch_flow(str(star_path), count=6, max_length=4, seed=3, compare=3, jobs=jobs)
        (run / "batch.yml").write_text(yaml.safe_dump(batch))
        profile_flow(
            str(grid3_file), 1, 5, "Z:abs", str(run / "profile.csv"), exhaustive_to=3, samples=4, seed=2, jobs=jobs
        )
        outputs[jobs] = {p.name: p.read_bytes() for p in sorted(run.iterdir())}
    assert sorted(outputs[1]) == ["batch.yml", "fill.chain", "hyp.chain", "profile.csv", "trace.yml"]
    assert outputs[1] == outputs[4]


def test_loaded_chain_round_trip(tmp_path: Path, star_files):
    complex_path, cycle_path = star_files
    complex = load_complex(complex_path)
    assert len(load_chain(cycle_path, complex)) == 3
