import csv
import json
import shutil
import subprocess

import numpy as np
import pytest

from corrugate import cli, cone, mesh


def grid_values(nx, ny):
    x = np.arange(nx) / nx
    y = np.linspace(-0.1, 0.1, ny + 1)
    return cone.cone_map(x[None, :], y[:, None]) + np.array([0.0, 0.0, 1.0])


def test_grid_mesh_counts_and_seam():
    m = mesh.grid_mesh(grid_values(4, 3))
    assert m.vertices.shape == (16, 3)
    assert m.triangles.shape == (24, 3)
    assert m.triangles.min() == 0 and m.triangles.max() == 15
    # every quad edge across the seam connects column 3 to column 0
    cols = m.triangles % 4
    assert np.any((cols == 3).any(axis=1) & (cols == 0).any(axis=1))
    # each undirected interior edge is shared by exactly two triangles
    edges = np.sort(np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]]), axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    assert set(counts) <= {1, 2}
    assert np.count_nonzero(counts == 1) == 2 * 4


def test_triangles_consistently_oriented():
    m = mesh.grid_mesh(grid_values(8, 2))
    directed = np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]])
    _, counts = np.unique(directed, axis=0, return_counts=True)
    assert counts.max() == 1


def test_obj_round_trip(tmp_path):
    m = mesh.grid_mesh(grid_values(5, 2))
    path = tmp_path / "m.obj"
    mesh.write_mesh(m, path, "obj")
    back = mesh.read_obj(path)
    np.testing.assert_allclose(back.vertices, m.vertices, rtol=1e-9, atol=1e-12)
    np.testing.assert_array_equal(back.triangles, m.triangles)
    text = path.read_bytes()
    assert b"\r" not in text
    assert text.count(b"\nf ") == len(m.triangles)


def test_ply_header(tmp_path):
    m = mesh.grid_mesh(grid_values(4, 3))
    path = tmp_path / "m.ply"
    mesh.write_mesh(m, path, "ply")
    lines = path.read_text().splitlines()
    assert lines[:2] == ["ply", "format ascii 1.0"]
    assert "element vertex 16" in lines
    assert "element face 24" in lines
    body = lines[lines.index("end_header") + 1:]
    assert len(body) == 16 + 24
    assert all(line.startswith("3 ") for line in body[16:])
    with pytest.raises(ValueError):
        mesh.write_mesh(m, tmp_path / "m.stl", "stl")


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cone_command_writes_outputs(tmp_path, capsys):
    out, rep = tmp_path / "c.obj", tmp_path / "r.json"
    code, stdout, _ = run(["cone", "--N", "3", "--grid", "24x4", "--out", str(out), "--report", str(rep)], capsys)
    assert code == 0
    report = cone.DefectReport.from_json(rep.read_text())
    assert json.loads(stdout) == json.loads(rep.read_text())
    assert report.N == 3 and report.grid == [24, 4]
    m = mesh.read_obj(out)
    assert m.vertices.shape == (24 * 5, 3)


def test_ply_format_flag(tmp_path, capsys):
    out = tmp_path / "c.ply"
    code, _, _ = run(["cone", "--N", "2", "--grid", "16x2", "--format", "ply", "--out", str(out)], capsys)
    assert code == 0
    assert out.read_text().startswith("ply\n")


@pytest.mark.parametrize("argv", [
    ["cone"],
    ["cone", "--N", "0"],
    ["cone", "--N", "abc"],
    ["cone", "--N", "3", "--eta", "0.6"],
    ["cone", "--N", "3", "--eta", "0.3", "--eps", "0.2"],
    ["cone", "--N", "3", "--grid", "10x4"],
    ["cone", "--N", "3", "--grid", "24"],
    ["cone", "--N", "3", "--format", "stl"],
    ["sweep", "--N", ""],
    ["sweep", "--N", ","],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "error" in err


def test_out_of_subsolution_exit_3(capsys):
    code, _, err = run(["cone", "--N", "3", "--y-range=-0.3,0.1"], capsys)
    assert code == 3
    assert "sqrt(2) pi" in err


def test_io_error_exit_4(tmp_path, capsys):
    missing = tmp_path / "no" / "such" / "dir" / "c.obj"
    code, _, err = run(["cone", "--N", "2", "--grid", "16x2", "--out", str(missing)], capsys)
    assert code == 4
    assert "I/O error" in err


def test_option_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# defaults\neta = 0.3\ngrid = 24x2\n")
    code, out, _ = run(["cone", "--N", "3", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["eta"] == 0.3
    monkeypatch.setenv("CORRUGATE_ETA", "0.25")
    code, out, _ = run(["cone", "--N", "3", "--config", str(cfg)], capsys)
    assert json.loads(out)["eta"] == 0.25
    code, out, _ = run(["cone", "--N", "3", "--config", str(cfg), "--eta", "0.1"], capsys)
    assert json.loads(out)["eta"] == 0.1
    assert json.loads(out)["grid"] == [24, 2]


def test_bad_config_line_exit_2(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("eta 0.3\n")
    code, _, _ = run(["cone", "--N", "3", "--config", str(cfg)], capsys)
    assert code == 2


def test_sweep_single_and_multiple(tmp_path, capsys):
    code, _, _ = run(["sweep", "--N", "2", "--grid", "16x2", "--out", str(tmp_path / "one")], capsys)
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "one" / "sweep.csv")))
    assert len(rows) == 1 and rows[0]["N"] == "2"

    code, _, _ = run(["sweep", "--N", "2,4", "--grid", "32x2", "--out", str(tmp_path / "two")], capsys)
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "two" / "sweep.csv")))
    assert [r["N"] for r in rows] == ["2", "4"]
    assert list(rows[0]) == ["N", "c0_distance", "max_e11", "max_e12", "max_e22", "min_immersion_margin"]
    for N in (2, 4):
        assert (tmp_path / "two" / f"cone_N{N}.obj").exists()
        rep = cone.DefectReport.from_json((tmp_path / "two" / f"report_N{N}.json").read_text())
        assert float(rows[[2, 4].index(N)]["c0_distance"]) == rep.c0_distance


def test_outputs_identical_across_thread_counts(tmp_path, capsys):
    for t in ("1", "3"):
        code, _, _ = run(["cone", "--N", "4", "--grid", "64x10", "--threads", t, "--out", str(tmp_path / f"{t}.obj"),
                          "--report", str(tmp_path / f"{t}.json")], capsys)
        assert code == 0
    assert (tmp_path / "1.obj").read_bytes() == (tmp_path / "3.obj").read_bytes()
    assert (tmp_path / "1.json").read_bytes() == (tmp_path / "3.json").read_bytes()


def test_verify_passes_and_is_deterministic(tmp_path, capsys):
    code, out1, _ = run(["verify", "--seed", "3", "--report", str(tmp_path / "v.json")], capsys)
    assert code == 0
    summary = json.loads(out1)
    assert summary["passed"] and summary["seed"] == 3
    assert {c["name"] for c in summary["checks"]} == {"loop_average", "containment", "rates", "oracle_equivalence"}
    code, out2, _ = run(["verify", "--seed", "3"], capsys)
    assert out1 == out2
    assert (tmp_path / "v.json").read_text() == out1


def test_verify_detects_injected_fault(capsys):
    code, out, _ = run(["verify", "--inject-fault", "rmin-sign"], capsys)
    assert code == 1
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert not checks["containment"]["passed"]
    assert checks["containment"]["outside_annulus"] > 0


@pytest.mark.skipif(shutil.which("corrugate") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["corrugate", "cone", "--N", "2", "--grid", "16x2"], capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0
    assert json.loads(res.stdout)["N"] == 2
    res = subprocess.run(["corrugate", "cone"], capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 2
