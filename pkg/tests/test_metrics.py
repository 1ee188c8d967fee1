"""Soft-Precision, Soft-Recall, and triangle-quality statistics."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relumesh import (
    AllPointsDivergedError,
    DegenerateTriangleError,
    GridSpec,
    Layer,
    MetricReport,
    TriMesh,
    make_network,
    marching_cubes,
    point_triangle_distance,
    points_to_mesh_distance,
    project_to_zero_set,
    sample_surface,
    soft_precision,
    soft_recall,
    triangle_quality,
)
from relumesh.tessellation import tessellate

from conftest import get_extraction, get_net


def planar_net():
    return make_network([Layer(np.array([[0.0, 0.0, 1.0]]), np.zeros(1),
                               "linear")],
                        domain=([-1.0] * 3, [1.0] * 3))


def z0_square():
    verts = np.array([[-1.0, -1, 0], [1, -1, 0], [1, 1, 0], [-1, 1, 0]])
    return TriMesh(verts, np.array([[0, 1, 2], [0, 2, 3]]))


def test_soft_precision_zero_on_exact_mesh():
    assert soft_precision(planar_net(), z0_square(), n_samples=4096) == 0.0


def test_soft_precision_octahedron_analytic():
    net = get_net("octahedron")
    _, _, mesh, _ = get_extraction("octahedron")
    assert soft_precision(net, mesh, n_samples=2 ** 14) <= 1e-7


def test_soft_precision_mc_worse_than_analytic():
    net = get_net("octahedron")
    _, _, mesh, _ = get_extraction("octahedron")
    sp_analytic = soft_precision(net, mesh, n_samples=2 ** 14)
    mc = marching_cubes(net, GridSpec.for_network(net, 64))
    sp_mc = soft_precision(net, mc, n_samples=2 ** 14)
    assert sp_mc > sp_analytic


def test_soft_precision_reseed_stability():
    net = get_net("sphere_d2_w16")
    mesh = marching_cubes(net, GridSpec.for_network(net, 32))
    a = soft_precision(net, mesh, n_samples=2 ** 20, seed=0)
    b = soft_precision(net, mesh, n_samples=2 ** 20, seed=99)
    assert abs(a - b) <= 0.02 * max(a, b)


def test_sample_surface_2d_on_segments():
    _, _, mesh, _ = get_extraction("circle2d_d2_w16")
    pts = sample_surface(mesh, 2048, seed=3)
    assert pts.shape == (2048, 2)
    # all samples lie on the polyline: evaluate the net there
    vals = np.abs(np.linalg.norm(pts, axis=1))
    assert vals.min() > 0.2  # near the circle radius, not at the origin


def test_project_to_zero_set():
    net = get_net("sphere_d2_w16")
    rng = np.random.default_rng(15)
    pts = rng.uniform(-0.8, 0.8, size=(256, 3))
    proj, diverged = project_to_zero_set(net, pts)
    from relumesh import eval_batch
    ok = ~diverged
    assert ok.sum() > 200
    assert np.abs(eval_batch(net, proj[ok])).max() <= 1e-6


def test_soft_recall_zero_for_on_mesh_points():
    net = planar_net()
    mesh = z0_square()
    ref = sample_surface(mesh, 512, seed=1)
    assert soft_recall(net, mesh, ref) <= 1e-12


def test_soft_recall_analytic_vs_mc_reference():
    net = get_net("octahedron")
    _, _, mesh, _ = get_extraction("octahedron")
    tm = tessellate(mesh, "fan0")
    ref_mesh = marching_cubes(net, GridSpec.for_network(net, 128))
    ref = sample_surface(ref_mesh, 1024, seed=2)
    assert soft_recall(net, tm, ref) <= 1e-4


def test_soft_recall_detects_missing_face():
    net = get_net("octahedron")
    _, _, mesh, _ = get_extraction("octahedron")
    tm = tessellate(mesh, "fan0")
    holed = TriMesh(tm.vertices, tm.triangles[1:])  # delete one octant face
    deleted = tm.vertices[tm.triangles[0]]
    octant = np.sign(deleted.mean(axis=0))
    ref_mesh = marching_cubes(net, GridSpec.for_network(net, 64))
    ref = sample_surface(ref_mesh, 8192, seed=3)
    # keep reference points facing the hole so the omission dominates the mean
    ref = ref[np.all(np.sign(ref) == octant, axis=1)]
    assert len(ref) > 100
    sr = soft_recall(net, holed, ref)
    face_size = np.sqrt(tm.triangle_areas()[0])
    assert sr > face_size / 10


def test_soft_recall_all_diverged():
    net = get_net("const_pos")  # gradient is zero, |f| cannot shrink
    mesh = z0_square()
    with pytest.raises(AllPointsDivergedError):
        soft_recall(net, mesh, np.zeros((8, 3)))


def test_triangle_quality_equilateral():
    verts = np.array([[0.0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0]])
    q = triangle_quality(TriMesh(verts, np.array([[0, 1, 2]])))
    assert q.theta_min[0] == pytest.approx(60.0, abs=1e-9)
    assert q.theta_max[0] == pytest.approx(60.0, abs=1e-9)
    assert q.equiangle_skew[0] == pytest.approx(0.0, abs=1e-9)
    assert q.edge_ratio[0] == pytest.approx(1.0, abs=1e-12)


def test_triangle_quality_right_isoceles():
    verts = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    q = triangle_quality(TriMesh(verts, np.array([[0, 1, 2]])))
    # max((90-60)/120, (60-45)/60) = 0.25, L_r = sqrt(2)
    assert q.equiangle_skew[0] == pytest.approx(0.25, abs=1e-12)
    assert q.edge_ratio[0] == pytest.approx(np.sqrt(2.0), abs=1e-12)


@given(st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_triangle_quality_ranges(seed):
    rng = np.random.default_rng(seed)
    verts = rng.normal(size=(3, 3))
    tm = TriMesh(verts, np.array([[0, 1, 2]]))
    if tm.triangle_areas()[0] <= 1e-12:
        return
    q = triangle_quality(tm)
    assert 0.0 <= q.equiangle_skew[0] <= 1.0
    assert q.edge_ratio[0] >= 1.0
    # skew 0 only for (near) equilateral triangles
    if q.equiangle_skew[0] <= 1e-9:
        assert abs(q.theta_min[0] - 60) <= 1e-6


def test_degenerate_triangle_error_names_index():
    verts = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 0, 0]])
    tm = TriMesh(verts, np.array([[0, 1, 2], [0, 1, 3]]))  # second is flat
    with pytest.raises(DegenerateTriangleError, match="triangle 1"):
        triangle_quality(tm)


def test_point_triangle_distance_oracle():
    rng = np.random.default_rng(16)
    for _ in range(50):
        tri = rng.normal(size=(3, 3))
        pts = rng.normal(size=(20, 3))
        got = point_triangle_distance(pts, tri)
        # dense barycentric sampling gives an upper bound on the true distance
        u = np.linspace(0, 1, 60)
        uu, vv = np.meshgrid(u, u)
        keep = uu + vv <= 1
        bary = (tri[0][None]
                + uu[keep][:, None] * (tri[1] - tri[0])[None]
                + vv[keep][:, None] * (tri[2] - tri[0])[None])
        for p, d in zip(pts, got):
            sampled = np.linalg.norm(bary - p, axis=1).min()
            assert d <= sampled + 1e-12
            assert d >= sampled - 0.05  # sampling resolution slack


def test_points_to_mesh_distance_matches_bruteforce():
    _, _, mesh, _ = get_extraction("octahedron")
    tm = tessellate(mesh, "fan0")
    rng = np.random.default_rng(17)
    pts = rng.uniform(-1, 1, size=(64, 3))
    fast = points_to_mesh_distance(pts, tm)
    tris = tm.vertices[tm.triangles]
    brute = np.stack([point_triangle_distance(pts, t) for t in tris],
                     axis=1).min(axis=1)
    assert np.abs(fast - brute).max() <= 1e-12


def test_metric_report_serialization():
    rep = MetricReport(soft_precision=2.5e-7, soft_recall=None,
                       tri_quality={}, triangle_count=1234, runtime_s=0.5)
    doc = json.loads(rep.to_json())
    assert doc["soft_precision_x1e6"] == pytest.approx(0.25)
    assert doc["soft_recall"] is None
    table = rep.format_table("octa")
    assert "SP(x1e6)" in table and "octa" in table
