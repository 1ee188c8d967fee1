"""Evaluation metrics: soft precision, soft recall, and triangle quality."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import AllPointsDivergedError, DegenerateTriangleError, EmptyMeshError
from .mesh import Mesh, TriMesh
from .network import Network, eval_batch

FD_STEP = 1e-5  # central-difference step; exact inside linear regions


def sample_surface(mesh, n_samples: int, seed: int = 0) -> np.ndarray:
    """Uniform area-weighted samples on a mesh surface.

    Accepts a TriMesh, a polygon Mesh (faces fan-triangulated internally),
    or a 2D polyline Mesh (length-weighted samples along segments).
    """
    rng = np.random.default_rng(seed)
    if isinstance(mesh, Mesh) and mesh.dim == 2:
        if mesh.is_empty():
            raise EmptyMeshError("cannot sample an empty mesh")
        v = mesh.vertices
        a = np.array([f[0] for f in mesh.faces])
        b = np.array([f[1] for f in mesh.faces])
        lengths = np.linalg.norm(v[b] - v[a], axis=1)
        idx = rng.choice(len(a), size=n_samples, p=lengths / lengths.sum())
        t = rng.random(n_samples)[:, None]
        return v[a[idx]] + t * (v[b[idx]] - v[a[idx]])
    tm = _as_trimesh(mesh)
    if tm.n_triangles == 0:
        raise EmptyMeshError("cannot sample an empty mesh")
    areas = tm.triangle_areas()
    total = areas.sum()
    if total <= 0:
        raise EmptyMeshError("mesh has zero surface area")
    idx = rng.choice(tm.n_triangles, size=n_samples, p=areas / total)
    r1 = rng.random(n_samples)
    r2 = rng.random(n_samples)
    flip = r1 + r2 > 1
    r1[flip] = 1 - r1[flip]
    r2[flip] = 1 - r2[flip]
    t = tm.triangles[idx]
    v = tm.vertices
    return (v[t[:, 0]]
            + r1[:, None] * (v[t[:, 1]] - v[t[:, 0]])
            + r2[:, None] * (v[t[:, 2]] - v[t[:, 0]]))


def _as_trimesh(mesh) -> TriMesh:
    if isinstance(mesh, TriMesh):
        return mesh
    tris = []
    for f in mesh.faces:
        for j in range(1, len(f) - 1):
            tris.append((f[0], f[j], f[j + 1]))
    return TriMesh(mesh.vertices,
                   np.array(tris, dtype=np.int64).reshape(-1, 3))


def soft_precision(net: Network, mesh, n_samples: int = 2 ** 20,
                   seed: int = 0) -> float:
    """Mean |f| over points sampled uniformly on the reconstructed surface."""
    pts = sample_surface(mesh, n_samples, seed)
    return float(np.abs(eval_batch(net, pts)).mean())


def gradient_fd(net: Network, pts: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central finite-difference gradient; exact away from cell boundaries
    since the field is piecewise linear."""
    n, d = pts.shape
    shifted = np.repeat(pts[None, :, :], 2 * d, axis=0)
    for j in range(d):
        shifted[2 * j, :, j] += h
        shifted[2 * j + 1, :, j] -= h
    vals = eval_batch(net, shifted.reshape(-1, d)).reshape(2 * d, n)
    return np.stack([(vals[2 * j] - vals[2 * j + 1]) / (2 * h)
                     for j in range(d)], axis=1)


def project_to_zero_set(net: Network, points, step: float = 1.0,
                        iters: int = 50, f_tol: float = 1e-6):
    """Move points onto the zero set with normalized-Newton descent:
    x <- x - step * f(x) * grad/|grad|^2.

    Returns (projected_points, diverged_mask): points whose |f| did not
    shrink below the starting value are flagged diverged.
    """
    x = np.array(points, dtype=np.float64)
    f0 = np.abs(eval_batch(net, x))
    f = eval_batch(net, x)
    active = np.abs(f) > f_tol
    for _ in range(iters):
        if not active.any():
            break
        g = gradient_fd(net, x[active])
        gg = (g * g).sum(axis=1)
        gg[gg == 0] = np.inf
        x[active] -= step * (f[active] / gg)[:, None] * g
        f = eval_batch(net, x)
        active = np.abs(f) > f_tol
    final = np.abs(f)
    diverged = (final > f_tol) & (final >= f0)
    return x, diverged


def point_triangle_distance(points: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Exact distances from points (n,3) to one triangle (3,3)."""
    return _pt_tri_batch(points, tri[None, :, :])[:, 0]


def _pt_tri_batch(points, tris):
    """(n,3) points x (m,3,3) triangles -> (n,m) distances (Ericson)."""
    p = points[:, None, :]
    a, b, c = tris[None, :, 0], tris[None, :, 1], tris[None, :, 2]
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = (ab * ap).sum(-1)
    d2 = (ac * ap).sum(-1)
    bp = p - b
    d3 = (ab * bp).sum(-1)
    d4 = (ac * bp).sum(-1)
    cp = p - c
    d5 = (ab * cp).sum(-1)
    d6 = (ac * cp).sum(-1)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        v = np.where(denom != 0, vb / denom, 0.0)
        w = np.where(denom != 0, vc / denom, 0.0)
        closest = a + v[..., None] * ab + w[..., None] * ac

        t_ab = np.clip(np.where(d1 - d3 != 0, d1 / (d1 - d3), 0.0), 0, 1)
        on_ab = a + t_ab[..., None] * ab
        t_ac = np.clip(np.where(d2 - d6 != 0, d2 / (d2 - d6), 0.0), 0, 1)
        on_ac = a + t_ac[..., None] * ac
        den_bc = (d4 - d3) + (d5 - d6)
        t_bc = np.clip(np.where(den_bc != 0, (d4 - d3) / den_bc, 0.0), 0, 1)
        on_bc = b + t_bc[..., None] * (c - b)

    # Ericson's region cascade applied in reverse priority: later writes win
    sel_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
    sel_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    sel_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    closest = np.where(sel_bc[..., None], on_bc, closest)
    closest = np.where(sel_ac[..., None], on_ac, closest)
    closest = np.where(sel_ab[..., None], on_ab, closest)
    closest = np.where(((d6 >= 0) & (d5 <= d6))[..., None], c, closest)
    closest = np.where(((d3 >= 0) & (d4 <= d3))[..., None], b, closest)
    closest = np.where(((d1 <= 0) & (d2 <= 0))[..., None], a, closest)
    return np.linalg.norm(p - closest, axis=-1)


def points_to_mesh_distance(points, mesh) -> np.ndarray:
    """Exact point-to-triangle distances with a centroid KD-tree prefilter."""
    tm = _as_trimesh(mesh) if not isinstance(mesh, TriMesh) else mesh
    if tm.n_triangles == 0:
        raise EmptyMeshError("cannot measure distance to an empty mesh")
    pts = np.asarray(points, dtype=np.float64)
    tri_pts = tm.vertices[tm.triangles]
    centroids = tri_pts.mean(axis=1)
    radii = np.linalg.norm(tri_pts - centroids[:, None, :], axis=2).max(axis=1)
    r_max = radii.max()
    tree = cKDTree(centroids)
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        d_c, j = tree.query(p)
        ub = _pt_tri_batch(p[None], tri_pts[j][None])[0, 0]
        cand = tree.query_ball_point(p, ub + r_max + 1e-12)
        out[i] = _pt_tri_batch(p[None], tri_pts[cand]).min()
    return out


def soft_recall(net: Network, mesh, reference_points, step: float = 1.0,
                iters: int = 50) -> float:
    """Project reference points to the zero set, then return their mean
    distance to the reconstructed mesh. Diverged points are dropped with a
    warning."""
    ref = np.asarray(reference_points, dtype=np.float64)
    if ref.size == 0:
        raise ValueError("reference_points must be nonempty")
    projected, diverged = project_to_zero_set(net, ref, step=step, iters=iters)
    if diverged.all():
        raise AllPointsDivergedError(
            f"all {len(ref)} reference points failed to reach the zero set")
    if diverged.any():
        warnings.warn(f"{int(diverged.sum())} of {len(ref)} reference points "
                      "diverged and were dropped")
    d = points_to_mesh_distance(projected[~diverged], mesh)
    return float(d.mean())


# ---------------------------------------------------------------------------
# Triangle quality


@dataclass
class TriangleQuality:
    theta_min: np.ndarray  # per-triangle minimum angle, degrees
    theta_max: np.ndarray
    equiangle_skew: np.ndarray
    edge_ratio: np.ndarray
    histograms: dict = field(default_factory=dict)

    @property
    def theta_min_mean(self) -> float:
        return float(self.theta_min.mean())

    @property
    def theta_max_mean(self) -> float:
        return float(self.theta_max.mean())

    @property
    def equiangle_skew_mean(self) -> float:
        return float(self.equiangle_skew.mean())

    @property
    def edge_ratio_mean(self) -> float:
        return float(self.edge_ratio.mean())

    def summary(self) -> dict:
        return {
            "theta_min_mean": self.theta_min_mean,
            "theta_max_mean": self.theta_max_mean,
            "equiangle_skew_mean": self.equiangle_skew_mean,
            "edge_ratio_mean": self.edge_ratio_mean,
        }


def triangle_quality(mesh, area_floor: float = 1e-30) -> TriangleQuality:
    """Per-triangle angle extrema, equiangle skew
    max((theta_M-60)/120, (60-theta_m)/60), and longest/shortest edge ratio."""
    tm = _as_trimesh(mesh) if not isinstance(mesh, TriMesh) else mesh
    if tm.n_triangles == 0:
        raise EmptyMeshError("no triangles to rate")
    v = tm.vertices
    t = tm.triangles
    areas = tm.triangle_areas()
    bad = np.nonzero(areas <= area_floor)[0]
    if bad.size:
        raise DegenerateTriangleError(f"triangle {bad[0]} is degenerate")
    e0 = np.linalg.norm(v[t[:, 2]] - v[t[:, 1]], axis=1)
    e1 = np.linalg.norm(v[t[:, 0]] - v[t[:, 2]], axis=1)
    e2 = np.linalg.norm(v[t[:, 1]] - v[t[:, 0]], axis=1)
    edges = np.stack([e0, e1, e2], axis=1)

    def angle(opp, s1, s2):
        cosv = np.clip((s1 ** 2 + s2 ** 2 - opp ** 2) / (2 * s1 * s2), -1, 1)
        return np.degrees(np.arccos(cosv))

    angles = np.stack([angle(e0, e1, e2), angle(e1, e2, e0),
                       angle(e2, e0, e1)], axis=1)
    theta_min = angles.min(axis=1)
    theta_max = angles.max(axis=1)
    skew = np.maximum((theta_max - 60.0) / 120.0, (60.0 - theta_min) / 60.0)
    ratio = edges.max(axis=1) / edges.min(axis=1)
    hists = {
        "theta_min": np.histogram(theta_min, bins=18, range=(0, 60)),
        "theta_max": np.histogram(theta_max, bins=24, range=(60, 180)),
        "equiangle_skew": np.histogram(skew, bins=20, range=(0, 1)),
        "edge_ratio": np.histogram(np.minimum(ratio, 20.0), bins=20,
                                   range=(1, 20)),
    }
    return TriangleQuality(theta_min, theta_max, skew, ratio, hists)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class MetricReport:
    soft_precision: float
    soft_recall: float | None
    tri_quality: dict
    triangle_count: int
    runtime_s: float

    def as_dict(self) -> dict:
        return {
            "soft_precision": self.soft_precision,
            "soft_precision_x1e6": self.soft_precision * 1e6,
            "soft_recall": self.soft_recall,
            "soft_recall_x1e6": (None if self.soft_recall is None
                                 else self.soft_recall * 1e6),
            "tri_quality": self.tri_quality,
            "triangle_count": self.triangle_count,
            "runtime_s": self.runtime_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def format_table(self, label: str = "mesh") -> str:
        """Aligned text table; SP/SR are scaled by 1e6, triangles by 1e-3."""
        sr = ("--" if self.soft_recall is None
              else f"{self.soft_recall * 1e6:12.2f}")
        header = (f"{'':20s} {'SP(x1e6)':>12s} {'SR(x1e6)':>12s} "
                  f"{'Runtime':>9s} {'Tri(x1e3)':>10s}")
        row = (f"{label:20s} {self.soft_precision * 1e6:12.2f} {sr:>12s} "
               f"{self.runtime_s:9.2f} {self.triangle_count / 1e3:10.2f}")
        return header + "\n" + row
