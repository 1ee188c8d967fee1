"""Tessellate the k-gon faces of an analytic mesh into triangles."""

from __future__ import annotations

import numpy as np

from .errors import NonPlanarFaceError
from .mesh import Mesh, TriMesh

STRATEGIES = ("fan0", "centroid", "strip")

PLANARITY_TOL = 1e-8


def _check_planar(pts, face_index, tol):
    if len(pts) <= 3:
        return
    ctr = pts.mean(axis=0)
    q = pts - ctr
    # smallest principal direction = face normal
    _, _, vt = np.linalg.svd(q, full_matrices=False)
    dev = np.abs(q @ vt[-1])
    scale = 1.0 + np.abs(pts).max()
    if dev.max() > tol * scale:
        raise NonPlanarFaceError(
            f"face {face_index} deviates {dev.max():.3e} from its plane")


def _fan0(face):
    k = len(face)
    return [(face[0], face[j], face[j + 1]) for j in range(1, k - 1)]


def _strip(face):
    """Alternating-end strip: i0, i1, i_{k-1}, i2, i_{k-2}, ..."""
    k = len(face)
    order = [face[0], face[1]]
    lo, hi = 2, k - 1
    take_hi = True
    while lo <= hi:
        if take_hi:
            order.append(face[hi])
            hi -= 1
        else:
            order.append(face[lo])
            lo += 1
        take_hi = not take_hi
    tris = []
    for j in range(k - 2):
        a, b, c = order[j], order[j + 1], order[j + 2]
        # every other strip triangle flips winding; restore orientation
        tris.append((a, b, c) if j % 2 == 0 else (b, a, c))
    return tris


def tessellate(mesh: Mesh, strategy: str = "fan0",
               planarity_tol: float = PLANARITY_TOL) -> TriMesh:
    """Convert convex planar polygon faces to triangles.

    ``fan0`` and ``strip`` emit k-2 triangles per k-gon; ``centroid`` adds
    the face centroid as a vertex and emits k triangles. Orientation and
    total area are preserved.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; one of {STRATEGIES}")
    verts = [mesh.vertices]
    n = mesh.n_vertices
    tris = []
    for fi, face in enumerate(mesh.faces):
        if len(face) < 3:
            raise ValueError(f"face {fi} has fewer than 3 vertices")
        pts = mesh.vertices[list(face)]
        _check_planar(pts, fi, planarity_tol)
        if strategy == "fan0":
            tris.extend(_fan0(face))
        elif strategy == "strip":
            tris.extend(_strip(face))
        else:
            c = pts.mean(axis=0)
            verts.append(c[None, :])
            ci = n
            n += 1
            k = len(face)
            tris.extend((ci, face[j], face[(j + 1) % k]) for j in range(k))
    all_verts = np.vstack(verts) if len(verts) > 1 else mesh.vertices
    return TriMesh(all_verts, np.array(tris, dtype=np.int64).reshape(-1, 3))
