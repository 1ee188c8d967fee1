"""Indexed meshes, vertex welding, and OBJ serialization.

A Mesh stores polygon faces of arbitrary arity. In 2D the "faces" are
2-index segments and a closed mesh is a closed polyline. TriMesh is the
triangle-only variant produced by tessellation and Marching Cubes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import EPS_WELD


@dataclass
class Mesh:
    """Welded indexed polygon mesh (or polyline in 2D)."""

    vertices: np.ndarray  # (n, d)
    faces: list  # list of index tuples, len >= 3 (3D) or == 2 (2D)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] if self.vertices.size else 3

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def is_empty(self) -> bool:
        return not self.faces

    def edges(self) -> dict:
        """Undirected edge -> incidence count."""
        counts = {}
        for f in self.faces:
            if len(f) == 2:
                pairs = [(f[0], f[1])]
            else:
                pairs = list(zip(f, f[1:] + f[:1]))
            for a, b in pairs:
                key = (a, b) if a < b else (b, a)
                counts[key] = counts.get(key, 0) + 1
        return counts

    def is_watertight(self) -> bool:
        """Every edge shared by exactly 2 faces; in 2D every vertex is the
        endpoint of exactly 2 segments."""
        if self.is_empty():
            return False
        if self.dim == 2:
            deg = {}
            for a, b in self.faces:
                deg[a] = deg.get(a, 0) + 1
                deg[b] = deg.get(b, 0) + 1
            return all(c == 2 for c in deg.values())
        return all(c == 2 for c in self.edges().values())

    def connected_components(self) -> list:
        """Partition faces into components linked by shared vertices."""
        parent = list(range(self.n_vertices))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for f in self.faces:
            r = find(f[0])
            for i in f[1:]:
                ri = find(i)
                parent[ri] = r
        groups = {}
        for fi, f in enumerate(self.faces):
            groups.setdefault(find(f[0]), []).append(fi)
        return list(groups.values())

    def face_areas(self) -> np.ndarray:
        """Polygon areas (3D) or segment lengths (2D)."""
        out = np.empty(self.n_faces)
        v = self.vertices
        for i, f in enumerate(self.faces):
            if len(f) == 2:
                out[i] = np.linalg.norm(v[f[1]] - v[f[0]])
            else:
                pts = v[list(f)]
                n = np.zeros(3)
                for a, b in zip(range(1, len(f) - 1), range(2, len(f))):
                    n += np.cross(pts[a] - pts[0], pts[b] - pts[0])
                out[i] = 0.5 * np.linalg.norm(n)
        return out

    def total_area(self) -> float:
        return float(self.face_areas().sum())


@dataclass
class TriMesh:
    vertices: np.ndarray  # (n, 3)
    triangles: np.ndarray  # (t, 3) int

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.triangles.size and (self.triangles.max() >= len(self.vertices)
                                    or self.triangles.min() < 0):
            raise ValueError("triangle index out of range")

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        return 0.5 * np.linalg.norm(n, axis=1)

    def total_area(self) -> float:
        return float(self.triangle_areas().sum())

    def as_mesh(self) -> Mesh:
        return Mesh(self.vertices.copy(), [tuple(t) for t in self.triangles])


def weld_points(points, eps=EPS_WELD):
    """Merge points within eps; returns (unique_points, index_map).

    Deterministic: union-find over KD-tree pairs, representatives are the
    lowest input index of each group, unique points ordered by first
    occurrence.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    if n == 0:
        return pts.reshape(0, pts.shape[1] if pts.ndim == 2 else 3), np.empty(0, int)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    tree = cKDTree(pts)
    for i, j in sorted(tree.query_pairs(eps)):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    index_map = np.empty(n, dtype=np.int64)
    unique_idx = []
    seen = {}
    for i in range(n):
        r = find(i)
        if r not in seen:
            seen[r] = len(unique_idx)
            unique_idx.append(r)
        index_map[i] = seen[r]
    return pts[unique_idx], index_map


def weld_patches(patches, eps=EPS_WELD) -> Mesh:
    """Weld surface patches into an indexed mesh.

    Deterministic given input order (callers sort patches by cell id first).
    Degenerate faces (fewer than 2 distinct indices, or fewer than 3 in 3D)
    and exact duplicates are dropped.
    """
    if not patches:
        return Mesh(np.empty((0, 3)), [])
    all_pts = np.vstack([p.polygon for p in patches])
    unique, index_map = weld_points(all_pts, eps)
    faces = []
    seen = set()
    offset = 0
    for p in patches:
        k = len(p.polygon)
        idx = tuple(index_map[offset:offset + k])
        offset += k
        # drop repeated indices while preserving order
        dedup = tuple(dict.fromkeys(idx))
        min_arity = 2 if unique.shape[1] == 2 else 3
        if len(dedup) < min_arity:
            continue
        key = frozenset(dedup)
        if key in seen:
            continue
        seen.add(key)
        faces.append(dedup)
    return Mesh(unique, faces)


# ---------------------------------------------------------------------------
# OBJ I/O (v/f records, 1-based indices, n-gon faces; 'l' records for 2D)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_obj(mesh, path):
    """Write a Mesh or TriMesh as OBJ, 17 significant digits."""
    if isinstance(mesh, TriMesh):
        verts = mesh.vertices
        faces = [tuple(t) for t in mesh.triangles]
        dim = 3
    else:
        verts = mesh.vertices
        faces = mesh.faces
        dim = mesh.dim
    with open(path, "w") as fh:
        for v in verts:
            if dim == 2:
                fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} 0\n")
            else:
                fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
        for f in faces:
            rec = "l" if len(f) == 2 else "f"
            fh.write(rec + "".join(f" {i + 1}" for i in f) + "\n")


def read_obj(path) -> Mesh:
    """Read v/f/l records; negative indices and texture/normal slots are not
    supported (the writer never emits them)."""
    verts, faces = [], []
    any_line = False
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] in ("f", "l"):
                if parts[0] == "l":
                    any_line = True
                faces.append(tuple(int(t.split("/")[0]) - 1 for t in parts[1:]))
    v = np.array(verts, dtype=np.float64).reshape(-1, 3)
    if any_line and (v.size == 0 or np.all(v[:, 2] == 0)):
        v = v[:, :2]
    return Mesh(v, faces)


def mesh_to_trimesh(mesh: Mesh) -> TriMesh:
    """View an all-triangle Mesh as a TriMesh."""
    if any(len(f) != 3 for f in mesh.faces):
        raise ValueError("mesh contains non-triangle faces; tessellate first")
    tris = np.array(mesh.faces, dtype=np.int64).reshape(-1, 3)
    return TriMesh(mesh.vertices, tris)
