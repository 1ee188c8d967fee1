"""Convex cell geometry: 2D polygons, 3D polyhedra, and exact clipping by a
half-space boundary (Sutherland-Hodgman and its polyhedral extension).

All splitting runs in 64-bit. Vertex classification uses a signed value with
a dead zone: vertices within eps_on * scale of the cut plane belong to both
sides, which avoids sliver faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TopologyError

EPS_ON = 1e-12
EPS_WELD = 1e-10
EPS_AREA = 1e-18
EPS_VOL = 1e-24
EPS_GEOM = 1e-9


@dataclass(frozen=True)
class GeomTolerances:
    eps_on: float = EPS_ON
    eps_weld: float = EPS_WELD
    eps_area: float = EPS_AREA
    eps_vol: float = EPS_VOL
    eps_geom: float = EPS_GEOM


DEFAULT_TOL = GeomTolerances()


@dataclass(frozen=True)
class HalfSpaceCut:
    """Oriented cut {x : normal . x + offset = 0}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        if not np.any(n != 0):
            raise ValueError("cut normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def signed(self, points) -> np.ndarray:
        return np.asarray(points) @ self.normal + self.offset


class Polygon2:
    """Convex polygon, vertices counterclockwise, shape (m, 2)."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        self.vertices = np.asarray(vertices, dtype=np.float64)

    @property
    def dim(self):
        return 2

    def area(self) -> float:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def aabb(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def is_convex_ccw(self, tol=EPS_GEOM) -> bool:
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        scale = np.linalg.norm(e, axis=1).max() ** 2 + 1.0
        return bool(np.all(cross >= -tol * scale))


class Polyhedron3:
    """Convex polyhedron as a boundary representation.

    ``vertices`` has shape (n, 3); ``faces`` is a list of cyclic index loops,
    each oriented with outward normal.
    """

    __slots__ = ("vertices", "faces")

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=np.float64)
        self.faces = [list(map(int, f)) for f in faces]

    @property
    def dim(self):
        return 3

    def aabb(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def volume(self) -> float:
        # divergence theorem over fan-triangulated faces
        i0, i1, i2 = [], [], []
        for loop in self.faces:
            a0 = loop[0]
            i0.extend([a0] * (len(loop) - 2))
            i1.extend(loop[1:-1])
            i2.extend(loop[2:])
        v = self.vertices
        p0, p1, p2 = v[i0], v[i1], v[i2]
        cr = np.cross(p1, p2)
        return float(np.einsum("ij,ij->", p0, cr)) / 6.0

    def edge_face_counts(self):
        counts = {}
        for loop in self.faces:
            for a, b in zip(loop, loop[1:] + loop[:1]):
                key = (a, b) if a < b else (b, a)
                counts[key] = counts.get(key, 0) + 1
        return counts

    def euler_characteristic(self) -> int:
        used = {i for loop in self.faces for i in loop}
        return len(used) - len(self.edge_face_counts()) + len(self.faces)

    def is_closed(self) -> bool:
        return all(c == 2 for c in self.edge_face_counts().values())

    def is_convex(self, tol=EPS_GEOM) -> bool:
        v = self.vertices
        for loop in self.faces:
            n = _newell_normal(v[loop])
            nn = np.linalg.norm(n)
            if nn == 0:
                return False
            n = n / nn
            d = (v - v[loop[0]]) @ n
            if d.max() > tol * (1.0 + np.abs(v).max()):
                return False
        return True


def aabb(cell):
    """Componentwise min/max of a cell's vertices."""
    return cell.aabb()


def box_polygon(lo, hi) -> Polygon2:
    (x0, y0), (x1, y1) = np.asarray(lo, float), np.asarray(hi, float)
    return Polygon2([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])


_BOX_FACES = [  # outward-oriented quads of an axis-aligned box
    [0, 1, 3, 2],  # -x
    [4, 6, 7, 5],  # +x
    [0, 4, 5, 1],  # -y
    [2, 3, 7, 6],  # +y
    [0, 2, 6, 4],  # -z
    [1, 5, 7, 3],  # +z
]


def box_polyhedron(lo, hi) -> Polyhedron3:
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    corners = np.array([
        [lo[0] + (hi[0] - lo[0]) * ((i >> 2) & 1),
         lo[1] + (hi[1] - lo[1]) * ((i >> 1) & 1),
         lo[2] + (hi[2] - lo[2]) * (i & 1)]
        for i in range(8)
    ])
    return Polyhedron3(corners, _BOX_FACES)


def _newell_normal(pts) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    n = np.array([
        np.sum((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])),
        np.sum((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])),
        np.sum((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])),
    ])
    return n


def _classify(values, normal, points, eps_on):
    """-1 / 0 / +1 per vertex with a scaled dead zone."""
    scale = np.linalg.norm(normal) * (1.0 + np.linalg.norm(points, axis=-1))
    labels = np.zeros(values.shape, dtype=np.int8)
    labels[values > eps_on * scale] = 1
    labels[values < -eps_on * scale] = -1
    return labels


def clip_polygon(poly: Polygon2, cut: HalfSpaceCut, tol: GeomTolerances = DEFAULT_TOL):
    """Split a convex polygon by a line.

    Returns ``(neg, pos, segment)``: sub-polygons on the w.x+b <= 0 / >= 0
    sides (absent when empty or below the area floor) and the shared cut
    chord as a (2, 2) array when both sides exist.
    """
    v = poly.vertices
    s = cut.signed(v)
    labels = _classify(s, cut.normal, v, tol.eps_on)

    if not np.any(labels < 0):
        return None, poly, None
    if not np.any(labels > 0):
        return poly, None, None

    m = len(v)
    neg_pts, pos_pts, cut_pts = [], [], []
    for j in range(m):
        a, la, sa = v[j], labels[j], s[j]
        k = (j + 1) % m
        b, lb, sb = v[k], labels[k], s[k]
        if la <= 0:
            neg_pts.append(a)
        if la >= 0:
            pos_pts.append(a)
        if la == 0:
            cut_pts.append(a)
        if la * lb < 0:
            t = sa / (sa - sb)
            p = a + t * (b - a)
            neg_pts.append(p)
            pos_pts.append(p)
            cut_pts.append(p)

    neg = _finish_polygon(neg_pts, tol)
    pos = _finish_polygon(pos_pts, tol)
    segment = None
    if neg is not None and pos is not None:
        pts = _dedupe_points(cut_pts, tol.eps_weld)
        if len(pts) == 2:
            segment = np.array(pts)
    if neg is None and pos is None:
        # both sides collapsed below the area floor; keep the larger
        return (poly, None, None) if np.median(s) <= 0 else (None, poly, None)
    return neg, pos, segment


def _dedupe_points(pts, eps):
    out = []
    for p in pts:
        if not any(np.linalg.norm(p - q) <= eps for q in out):
            out.append(p)
    return out


def _finish_polygon(pts, tol):
    if len(pts) < 3:
        return None
    arr = np.array(pts)
    keep = np.ones(len(arr), dtype=bool)
    for i in range(len(arr)):
        j = (i + 1) % len(arr)
        if keep[i] and np.linalg.norm(arr[i] - arr[j]) <= tol.eps_weld:
            keep[j] = False
    arr = arr[keep]
    if len(arr) < 3:
        return None
    p = Polygon2(arr)
    if abs(p.area()) < tol.eps_area:
        return None
    return p


def clip_polyhedron(poly: Polyhedron3, cut: HalfSpaceCut,
                    tol: GeomTolerances = DEFAULT_TOL):
    """Split a convex polyhedron by a plane.

    Returns ``(neg, pos, cap)`` where the cap is the shared planar cut
    polygon (ordered, outward for the negative side) when both sides exist.
    Raises TopologyError if the intersection edges fail to close into one
    loop, which signals numerical breakdown in the caller's cell.
    """
    v = poly.vertices
    s = cut.signed(v)
    labels = _classify(s, cut.normal, v, tol.eps_on)

    if not np.any(labels < 0):
        return None, poly, None
    if not np.any(labels > 0):
        return poly, None, None

    verts = [v[i] for i in range(len(v))]
    edge_cut = {}  # sorted index pair -> new vertex index

    def cut_index(i, j):
        key = (i, j) if i < j else (j, i)
        idx = edge_cut.get(key)
        if idx is None:
            t = s[i] / (s[i] - s[j])
            verts.append(v[i] + t * (v[j] - v[i]))
            idx = len(verts) - 1
            edge_cut[key] = idx
        return idx

    neg_faces, pos_faces = [], []
    chords = []  # per clipped face: pair of cut-vertex indices
    for loop in poly.faces:
        neg_loop, pos_loop, face_cuts = [], [], []
        for pos_in_loop, i in enumerate(loop):
            j = loop[(pos_in_loop + 1) % len(loop)]
            li, lj = labels[i], labels[j]
            if li <= 0:
                neg_loop.append(i)
            if li >= 0:
                pos_loop.append(i)
            if li == 0:
                face_cuts.append(i)
            if li * lj < 0:
                idx = cut_index(i, j)
                neg_loop.append(idx)
                pos_loop.append(idx)
                face_cuts.append(idx)
        if len(neg_loop) >= 3 and len(set(neg_loop)) >= 3:
            neg_faces.append(neg_loop)
        if len(pos_loop) >= 3 and len(set(pos_loop)) >= 3:
            pos_faces.append(pos_loop)
        # any face meeting the plane in 2 distinct points bounds the cap;
        # this includes faces touching it along one of their own edges, in
        # which case the two adjacent faces yield the same (deduped) chord
        uniq = list(dict.fromkeys(face_cuts))
        if len(uniq) == 2 and uniq not in chords and uniq[::-1] not in chords:
            chords.append(uniq)

    cap_loop = _assemble_cap(chords)
    cap_pts = np.array([verts[i] for i in cap_loop])
    if np.dot(_newell_normal(cap_pts), cut.normal) < 0:
        cap_loop = cap_loop[::-1]
        cap_pts = cap_pts[::-1]

    neg = _finish_polyhedron(verts, neg_faces + [cap_loop], tol)
    pos = _finish_polyhedron(verts, pos_faces + [cap_loop[::-1]], tol)
    if neg is None:
        return None, poly, None
    if pos is None:
        return poly, None, None
    return neg, pos, cap_pts


def _assemble_cap(chords):
    """Order intersection chords into one closed loop via face adjacency."""
    if len(chords) < 3:
        raise TopologyError(f"cap has {len(chords)} chords; cannot close a loop")
    adj = {}
    for a, b in chords:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(nb) != 2 for nb in adj.values()):
        raise TopologyError("cap chords do not form a single cycle")
    start = next(iter(adj))
    loop = [start]
    prev, cur = None, start
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == start:
            break
        loop.append(nxt)
        prev, cur = cur, nxt
        if len(loop) > len(chords):
            raise TopologyError("cap walk exceeded chord count")
    if len(loop) != len(chords):
        raise TopologyError("cap chords form more than one loop")
    return loop


def _finish_polyhedron(verts, faces, tol):
    used = sorted({i for loop in faces for i in loop})
    if len(used) < 4:
        return None
    remap = {old: new for new, old in enumerate(used)}
    p = Polyhedron3(np.array([verts[i] for i in used]),
                    [[remap[i] for i in loop] for loop in faces])
    if p.volume() < tol.eps_vol:
        return None
    return p
