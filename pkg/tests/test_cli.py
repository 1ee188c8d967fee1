"""Command-line interface: subcommands, exit codes, output determinism."""

import json

import numpy as np
import pytest

from relumesh import read_obj
from relumesh.cli import run

from conftest import fixture_path


def fp(name):
    return str(fixture_path(name))


def test_info_octahedron(capsys):
    code = run(["info", "--net", fp("octahedron")])
    out = capsys.readouterr().out
    assert code == 0
    assert out.strip() == "input_dim 3, layers [8→1], params 41"


def test_extract_no_surface_warns(tmp_path, capsys):
    out = tmp_path / "m.obj"
    code = run(["extract", "--net", fp("const_pos"), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "no surface in domain" in captured.err
    mesh = read_obj(out)
    assert mesh.is_empty()


def test_mc_bad_resolution(tmp_path, capsys):
    code = run(["mc", "--net", fp("octahedron"), "--res", "0",
                "--out", str(tmp_path / "m.obj")])
    assert code == 1
    assert "usage error" in capsys.readouterr().err


def test_missing_network_file(tmp_path, capsys):
    code = run(["extract", "--net", str(tmp_path / "nope.json"),
                "--out", str(tmp_path / "m.obj")])
    assert code == 2
    assert capsys.readouterr().err


def test_unknown_flag():
    assert run(["extract", "--nets", "x"]) == 1


def test_extract_obj_round_trip(tmp_path):
    out = tmp_path / "octa.obj"
    assert run(["extract", "--net", fp("octahedron"), "--out", str(out)]) == 0
    mesh = read_obj(out)
    assert mesh.n_faces == 8
    expect = 0.5
    assert np.abs(np.abs(mesh.vertices).max() - expect) <= 1e-12


def test_extract_deterministic_bytes(tmp_path):
    a = tmp_path / "a.obj"
    b = tmp_path / "b.obj"
    for out in (a, b):
        assert run(["extract", "--net", fp("box"), "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_extract_stats_json(tmp_path):
    out = tmp_path / "m.obj"
    stats = tmp_path / "s.json"
    assert run(["extract", "--net", fp("octahedron"), "--out", str(out),
                "--stats", str(stats)]) == 0
    doc = json.loads(stats.read_text())
    for key in ("cells_created", "cells_pruned", "cells_split",
                "cells_emitted", "peak_live_cells", "wall_time"):
        assert key in doc
    assert doc["cells_emitted"] == 8


def test_extract_with_strategy(tmp_path):
    out = tmp_path / "m.obj"
    assert run(["extract", "--net", fp("box"), "--strategy", "centroid",
                "--out", str(out)]) == 0
    mesh = read_obj(out)
    assert all(len(f) == 3 for f in mesh.faces)


def test_mc_and_metrics(tmp_path, capsys):
    obj = tmp_path / "mc.obj"
    assert run(["mc", "--net", fp("octahedron"), "--res", "16",
                "--out", str(obj)]) == 0
    report = tmp_path / "r.json"
    code = run(["metrics", "--net", fp("octahedron"), "--mesh", str(obj),
                "--ref-source", "mc:32", "--samples", "4096",
                "--ref-samples", "256", "--out", str(report)])
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["soft_precision"] > 0
    assert doc["soft_recall"] is not None
    assert doc["tri_quality"]  # MC output is all triangles
    out = capsys.readouterr().out
    assert "SP(x1e6)" in out


def test_metrics_bad_ref_source(tmp_path, capsys):
    obj = tmp_path / "m.obj"
    run(["extract", "--net", fp("octahedron"), "--out", str(obj)])
    capsys.readouterr()
    code = run(["metrics", "--net", fp("octahedron"), "--mesh", str(obj),
                "--ref-source", "grid:9"])
    assert code == 1


def test_tessellate_cli(tmp_path):
    src = tmp_path / "m.obj"
    run(["extract", "--net", fp("box"), "--out", str(src)])
    out = tmp_path / "t.obj"
    assert run(["tessellate", "--in", str(src), "--strategy", "fan0",
                "--out", str(out)]) == 0
    mesh = read_obj(out)
    assert all(len(f) == 3 for f in mesh.faces)


def test_extract_2d_polyline(tmp_path):
    out = tmp_path / "c.obj"
    assert run(["extract", "--net", fp("circle2d_d2_w16"),
                "--out", str(out)]) == 0
    mesh = read_obj(out)
    assert mesh.dim == 2
    assert mesh.is_watertight()
