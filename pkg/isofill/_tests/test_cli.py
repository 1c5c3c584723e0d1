import json
from pathlib import Path

from freezegun import freeze_time
import pytest

from isofill.cli import _budget_check, _warnings, dispatch, emit_plotdata
from isofill.errors import BudgetExhaustedError, ContractError
from isofill.formats import load_complex, save_chain, save_complex, write_profile
from isofill.profiler import IsoProfile, ProfileEntry
from isofill.rings import make_ring
from isofill.solver import Status, path_chain


def write_power_profile(path: Path, values):
    entries = [ProfileEntry(l, f, "exhaustive", 1, Status.OPTIMAL) for l, f in enumerate(values, start=1)]
    write_profile(IsoProfile("synthetic", 1, "Z:abs", entries, l_exhaustive=len(entries)), path)


def test_build(tmp_path: Path, capsys):
    out = tmp_path / "grid.cx"
    assert dispatch(["build", "--preset", "grid:3x3", "--out", str(out)]) == 0
    assert load_complex(out).n_vertices == 16
    summary = json.loads(capsys.readouterr().out)
    assert summary["vertices"] == 16
    assert summary["cells"] == {"0": 16, "1": 33, "2": 18}


@freeze_time("2026-01-02 03:04:05")
def test_run_report(tmp_path: Path):
    report = tmp_path / "report.json"
    out = tmp_path / "tree.cx"
    assert dispatch(["--report", str(report), "build", "--preset", "tree:3,2", "--out", str(out)]) == 0
    document = json.loads(report.read_text())
    assert document["started"] == "2026-01-02T03:04:05+00:00"
    assert document["wall_time"] == 0.0
    assert document["version"] == "1.0"
    assert document["command"]["command"] == "build"
    assert document["command"]["inputs"]["preset"] == "tree:3,2"
    assert document["command"]["outputs"] == {"complex": str(out)}
    assert document["summary"]["vertices"] == 10
    assert document["warnings"] == []


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["build"],
        ["frobnicate"],
        ["profile", "--lmax", "0", "--complex", "x.cx", "--out", "p.csv"],
    ],
)
def test_usage_errors(args):
    assert dispatch(args) == 1


def test_contract_errors(tmp_path: Path, grid3_file):
    out = str(tmp_path / "x.cx")
    assert dispatch(["build", "--preset", "klein", "--radius", "2", "--out", out]) == 2
    assert dispatch(["build", "--preset", "z2", "--presentation", "p.yml", "--out", out]) == 2
    assert dispatch(["area", "--complex", str(grid3_file), "--loop", "loop.txt", "--ring", "Zmod4:abs"]) == 2
    assert dispatch(["coning", "--complex", str(grid3_file), "--base", "0", "--radii", "1,x"]) == 2


def test_hypfill_needs_one_source(grid3_file):
    assert dispatch(["hypfill", "--complex", str(grid3_file)]) == 2


def test_rips_and_delta(tmp_path: Path, capsys):
    metric = tmp_path / "line.csv"
    metric.write_text("0,1,2\n1,0,1\n2,1,0\n")
    out = tmp_path / "line.cx"
    assert dispatch(["rips", "--metric", str(metric), "--scale", "2", "--out", str(out)]) == 0
    assert load_complex(out).count(2) == 1
    capsys.readouterr()
    assert dispatch(["delta", "--complex", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["delta"] == "0"


def test_area(tmp_path: Path, grid3_file, capsys):
    loop = tmp_path / "loop.txt"
    loop.write_text("0 1 5 4 0")
    assert dispatch(["area", "--complex", str(grid3_file), "--loop", str(loop)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["norm"] == "2"
    assert summary["status"] == "optimal"


def test_profile_and_classify(tmp_path: Path, grid3_file, capsys):
    out = tmp_path / "rectangles.csv"
    args = ["--jobs", "2", "profile", "--complex", str(grid3_file), "--lmax", "12", "--out", str(out)]
    assert dispatch(args + ["--rectangles", "3"]) == 0
    capsys.readouterr()
    assert dispatch(["classify", "--profile", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["label"] == "quadratic"
    assert summary["subeuclidean"]["n"] == 1


def test_classify_needs_points(tmp_path: Path):
    path = tmp_path / "short.csv"
    write_power_profile(path, [0, 0, 1, 4])
    assert dispatch(["classify", "--profile", str(path)]) == 2


def test_plotdata(tmp_path: Path, capsys):
    path = tmp_path / "cubic.csv"
    write_power_profile(path, [l**3 for l in range(1, 11)])
    out = tmp_path / "plot.csv"
    assert dispatch(["plotdata", "--profile", str(path), "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["label"] == "superquadratic"
    assert out.read_text().count("\n") == 6 + 1 + 10


def test_empty_plotdata(tmp_path: Path):
    with pytest.raises(ContractError):
        emit_plotdata(IsoProfile("empty", 1, "Z:abs", []), tmp_path / "plot.csv")


def test_budget_exhaustion():
    _budget_check({"status": "upper_bound"})
    with pytest.raises(BudgetExhaustedError) as excinfo:
        _budget_check({"status": "infeasible_within_budget"})
    assert excinfo.value.exit_code == 3


def test_warnings():
    summary = {
        "status": "optimal",
        "radii": [{"worst_status": "upper_bound"}],
        "rows": [{"exact_status": "no_filling"}],
    }
    assert _warnings(summary) == ["radii.0.worst_status: upper_bound", "rows.0.exact_status: no_filling"]


def test_budget_exit_code(tmp_path: Path, grid3_file, mocker):
    flow = mocker.patch("isofill.cli.fill_flow", return_value={"status": "infeasible_within_budget", "norm": None})
    cycle = tmp_path / "z.chain"
    args = ["--budget-nodes", "5", "fill", "--complex", str(grid3_file), "--cycle", str(cycle), "--ring", "Z:abs"]
    assert dispatch(args) == 3
    assert flow.call_args.kwargs["budget_nodes"] == 5


def test_command_budgets_override_global_ones(tmp_path: Path, grid3_file, mocker):
    done = {"status": "optimal", "norm": "2"}
    fill = mocker.patch("isofill.cli.fill_flow", return_value=done)
    area = mocker.patch("isofill.cli.area_flow", return_value=done)
    report = tmp_path / "report.json"
    cycle = str(tmp_path / "z.chain")
    args = ["--budget-nodes", "5", "--report", str(report), "fill", "--complex", str(grid3_file), "--cycle", cycle]
    assert dispatch(args + ["--ring", "Z:abs", "--budget-nodes", "50", "--budget-ms", "700"]) == 0
    assert fill.call_args.kwargs["budget_nodes"] == 50
    assert fill.call_args.kwargs["budget_ms"] == 700
    assert json.loads(report.read_text())["command"]["budget_nodes"] == 50
    loop = str(tmp_path / "loop.txt")
    args = ["--budget-ms", "9", "area", "--complex", str(grid3_file), "--loop", loop, "--budget-nodes", "8"]
    assert dispatch(args) == 0
    assert area.call_args.kwargs["budget_nodes"] == 8
    assert area.call_args.kwargs["budget_ms"] == 9
    args = ["fill", "--complex", str(grid3_file), "--cycle", cycle, "--ring", "Z:abs", "--budget-nodes", "0"]
    assert dispatch(args) == 1


def test_hypfill_basepoint(tmp_path: Path, star_rips, capsys, mocker):
    complex_path = tmp_path / "star.cx"
    save_complex(star_rips, complex_path)
    cycle = tmp_path / "triangle.chain"
    save_chain(path_chain(star_rips, [1, 2, 3, 1], make_ring("Z:disc")), cycle)
    args = ["hypfill", "--complex", str(complex_path), "--cycle", str(cycle), "--basepoint", "1"]
    assert dispatch(args) == 0
    assert json.loads(capsys.readouterr().out)["norm"] == "1"
    assert dispatch(args[:-1] + ["4"]) == 2
    flow = mocker.patch("isofill.cli.hypfill_flow", return_value={"norm": "1", "certified": True})
    assert dispatch(args) == 0
    assert flow.call_args.args[5] == 1
