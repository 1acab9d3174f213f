"""Command line interface: output files, formats, exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from levelcross.cli import main
from levelcross.eigensolve import SolverError
from levelcross.model import load_scenario, save_scenario
from levelcross.presets import preset

GOLDEN = Path(__file__).resolve().parent / "golden"


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return header, data


def test_sweep_writes_the_advertised_files(tmp_path):
    out = tmp_path / "run"
    assert main(["sweep", "--preset", "fig3", "--svg", "--out", str(out)]) == 0
    for name in (
        "trajectories.csv",
        "crossings.json",
        "energies.svg",
        "widths.svg",
        "manifest.json",
    ):
        assert (out / name).exists(), name

    header, data = read_csv(out / "trajectories.csv")
    assert header == ["a", "E_1", "E_2", "Gamma_half_1", "Gamma_half_2", "A_1", "A_2"]
    assert data.shape == (2001, 7)
    assert data[0, 0] == 0.0 and data[-1, 0] == 1.5

    crossings = json.loads((out / "crossings.json").read_text())
    assert crossings["scenario"] == "fig3"
    kinds = [e["kind"] for e in crossings["events"]]
    assert kinds == ["true_energy"]
    assert crossings["events"][0]["branches"] == [1, 2]

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "fig3"
    assert manifest["grid"] == {"a_min": 0.0, "a_max": 1.5, "steps": 2001}
    assert manifest["command"][:3] == ["sweep", "--preset", "fig3"]
    assert set(manifest["outputs"]) == {
        "trajectories.csv",
        "crossings.json",
        "energies.svg",
        "widths.svg",
        "manifest.json",
    }
    assert manifest["duration_seconds"] > 0
    assert "root_rtol" in manifest["solver"]


def test_sweep_csv_is_byte_identical_between_runs(tmp_path):
    args = ["sweep", "--preset", "fig1", "--grid", "0:1.5:101"]
    assert main(args + ["--out", str(tmp_path / "one")]) == 0
    assert main(args + ["--out", str(tmp_path / "two")]) == 0
    one = (tmp_path / "one" / "trajectories.csv").read_bytes()
    two = (tmp_path / "two" / "trajectories.csv").read_bytes()
    assert one == two


def test_sweep_threads_do_not_change_bytes(tmp_path):
    base = ["sweep", "--preset", "fig4", "--grid", "0:1.5:151"]
    assert main(base + ["--threads", "1", "--out", str(tmp_path / "s")]) == 0
    assert main(base + ["--threads", "3", "--out", str(tmp_path / "p")]) == 0
    assert (tmp_path / "s" / "trajectories.csv").read_bytes() == (
        tmp_path / "p" / "trajectories.csv"
    ).read_bytes()


def test_grid_override(tmp_path):
    out = tmp_path / "g"
    assert main(["sweep", "--preset", "fig1", "--grid", "0:1:11", "--out", str(out)]) == 0
    header, data = read_csv(out / "trajectories.csv")
    assert data.shape[0] == 11
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["grid"] == {"a_min": 0.0, "a_max": 1.0, "steps": 11}


def test_bad_grid_is_usage_error(tmp_path, capsys):
    assert main(["sweep", "--preset", "fig1", "--grid", "0:1", "--out", str(tmp_path)]) == 1
    assert main(["sweep", "--preset", "fig1", "--grid", "0:1:1", "--out", str(tmp_path)]) == 1
    assert "--grid" in capsys.readouterr().err


def test_missing_scenario_file_names_the_path(tmp_path, capsys):
    path = tmp_path / "nope.json"
    assert main(["sweep", "--scenario", str(path), "--out", str(tmp_path / "o")]) == 1
    assert str(path) in capsys.readouterr().err


def test_scenario_file_drives_a_sweep(tmp_path):
    path = tmp_path / "custom.json"
    save_scenario(preset("fig2"), path)
    out = tmp_path / "o"
    assert main(["sweep", "--scenario", str(path), "--grid", "0:1.5:51", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "fig2"
    assert manifest["command"][1:3] == ["--scenario", str(path)]


def test_profile_override_is_restricted(tmp_path, capsys):
    ok = ["sweep", "--preset", "fig1", "--profile", "constant", "--grid", "0:1:21"]
    assert main(ok + ["--out", str(tmp_path / "a")]) == 0
    bad = ["sweep", "--preset", "fig4", "--profile", "constant"]
    assert main(bad + ["--out", str(tmp_path / "b")]) == 1
    assert "fig1" in capsys.readouterr().err


def test_unknown_preset_is_usage_error(tmp_path, capsys):
    assert main(["sweep", "--preset", "fig10", "--out", str(tmp_path)]) == 1
    assert "fig10" in capsys.readouterr().err


def test_no_subcommand_is_usage_error():
    assert main([]) == 1


def test_solver_failure_exits_2(tmp_path, monkeypatch, capsys):
    def boom(scenario, workers=1):
        raise SolverError("eigensolver failed at grid point a=0.5: no convergence")

    monkeypatch.setattr("levelcross.cli.run_sweep", boom)
    assert main(["sweep", "--preset", "fig1", "--out", str(tmp_path)]) == 2
    assert "grid point a=0.5" in capsys.readouterr().err


def test_ep_prints_location_and_gap(tmp_path, capsys):
    out = tmp_path / "ep"
    code = main(
        [
            "ep", "--preset", "fig1", "--profile", "constant",
            "--tune", "gamma_half:2", "--box", "0.3:1.0,0.4:0.8",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "(0.666667, 0.600000)"
    assert lines[1].startswith("gap = ")
    report = json.loads((out / "ep.json").read_text())
    assert report["converged"] is True
    assert report["pair"] == [1, 2]
    assert report["tunable"] == {"kind": "gamma_half", "level": 2}
    assert abs(report["location"]["a"] - 2.0 / 3.0) < 1e-4
    assert abs(report["location"]["value"] - 0.6) < 1e-4
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["search"]["scan_points"] == 51


def test_ep_not_converged_exits_3_but_reports(tmp_path, capsys):
    out = tmp_path / "ep"
    code = main(
        [
            "ep", "--preset", "fig1",
            "--tune", "gamma_half:2", "--box", "0.0:0.3,0.4:0.8",
            "--out", str(out),
        ]
    )
    assert code == 3
    report = json.loads((out / "ep.json").read_text())
    assert report["converged"] is False
    assert report["gap"] > 1e-8


def test_ep_empty_box_is_usage_error(tmp_path, capsys):
    base = ["ep", "--preset", "fig1", "--tune", "gamma_half:2", "--out", str(tmp_path)]
    assert main(base + ["--box", "0.5:0.5,0.4:0.8"]) == 1
    assert "empty" in capsys.readouterr().err
    assert main(base + ["--box", "0.3:1.0"]) == 1
    assert main(base + ["--box", "0.3:inf,0.4:0.8"]) == 1


def test_ep_bad_tune_is_usage_error(tmp_path, capsys):
    base = ["ep", "--preset", "fig1", "--box", "0.3:1.0,0.4:0.8", "--out", str(tmp_path)]
    assert main(base + ["--tune", "gamma:2"]) == 1
    assert main(base + ["--tune", "gamma_half:0"]) == 1
    assert main(base + ["--tune", "gamma_half"]) == 1
    err = capsys.readouterr().err
    assert "tune" in err or "tunable" in err


def test_svg_has_one_polyline_per_branch_plus_dashed_bare(tmp_path):
    out = tmp_path / "svg"
    assert main(["sweep", "--preset", "fig4", "--grid", "0:1.5:101", "--svg", "--out", str(out)]) == 0
    for name in ("energies.svg", "widths.svg"):
        text = (out / name).read_text()
        assert text.count("<polyline") == 8
        assert text.count("stroke-dasharray") == 5  # 4 bare lines + legend swatch
        assert "http" not in text.replace("http://www.w3.org/2000/svg", "")


def test_reproduce_requires_all(capsys):
    assert main(["reproduce"]) == 1
    assert "--all" in capsys.readouterr().err


def test_reproduce_builds_the_figure_tree(tmp_path):
    out = tmp_path / "tree"
    assert main(["reproduce", "--all", "--threads", "2", "--out", str(out)]) == 0
    dirs = sorted(p.name for p in out.iterdir())
    assert dirs == [f"fig{k}" for k in range(1, 10)]
    for sub in dirs:
        names = sorted(p.name for p in (out / sub).iterdir())
        assert names == [
            "crossings.json",
            "energies.svg",
            "manifest.json",
            "trajectories.csv",
            "widths.svg",
        ]


def test_golden_csv_regression(tmp_path):
    # small-grid sweeps pinned as repository data; parsed-value
    # comparison keeps the check meaningful across platforms
    for pid in ("fig1", "fig4"):
        out = tmp_path / pid
        assert main(["sweep", "--preset", pid, "--grid", "0:1.5:101", "--out", str(out)]) == 0
        got_header, got = read_csv(out / "trajectories.csv")
        want_header, want = read_csv(GOLDEN / f"{pid}_101.csv")
        assert got_header == want_header
        assert got.shape == want.shape
        np.testing.assert_allclose(got, want, rtol=0.0, atol=1e-12)
