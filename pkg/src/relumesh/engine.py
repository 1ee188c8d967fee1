"""Depth-first network traversal: cells with collapsed affine maps are
pruned by range analysis, split at critical neurons, collapsed layer by
layer, and finally intersected with the zero plane to emit exact surface
patches.

Determinism contract: cell ids are binary path strings (root "", children
append 0/1 per split); emitted patches are sorted by id before welding, so
the result is independent of batch size and scheduling.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .affine import bound_over_box
from .errors import MemoryBudgetError
from .geometry import (
    DEFAULT_TOL,
    GeomTolerances,
    HalfSpaceCut,
    Polygon2,
    Polyhedron3,
    box_polygon,
    box_polyhedron,
    clip_polygon,
    clip_polyhedron,
)
from .mesh import Mesh, weld_patches
from .network import Network


@dataclass
class EngineConfig:
    batch_size: int = 4096
    memory_budget_bytes: int = 2 << 30
    disable_pruning: bool = False
    prune_mid_layer: bool = True
    tau_surf: float = 1e-7
    tol: GeomTolerances = field(default_factory=lambda: DEFAULT_TOL)


@dataclass
class TraversalStats:
    cells_created: int = 0
    cells_pruned: int = 0
    cells_split: int = 0
    cells_emitted: int = 0
    peak_live_cells: int = 0
    wall_time: dict = field(default_factory=dict)

    def add_time(self, phase: str, dt: float):
        self.wall_time[phase] = self.wall_time.get(phase, 0.0) + dt

    def as_dict(self) -> dict:
        return {
            "cells_created": self.cells_created,
            "cells_pruned": self.cells_pruned,
            "cells_split": self.cells_split,
            "cells_emitted": self.cells_emitted,
            "peak_live_cells": self.peak_live_cells,
            "wall_time": dict(self.wall_time),
        }


@dataclass
class SurfacePatch:
    """Exact per-cell level-set polygon (3D) or 2-point segment (2D)."""

    polygon: np.ndarray  # (k, d), coplanar, oriented so the normal is +map_W
    normal: np.ndarray  # unit gradient direction of the final affine map
    cell_id: str


@dataclass
class Cell:
    """Convex region with the collapsed affine map of the layers folded so
    far. ``map_w @ x + map_b`` equals the pre-activations of layer ``layer``
    (layer 0 meaning the raw coordinates)."""

    geometry: object  # Polygon2 | Polyhedron3
    layer: int
    map_w: np.ndarray  # (n_layer, d) float64
    map_b: np.ndarray  # (n_layer,) float64
    mask: np.ndarray  # int8, -1 unknown / 0 inactive / 1 active
    id: str
    needs_prune: bool = True

    def nbytes(self) -> int:
        return (self.geometry.vertices.nbytes + self.map_w.nbytes
                + self.map_b.nbytes + self.mask.nbytes + 256)


def root_cell(net: Network, tol: GeomTolerances = DEFAULT_TOL) -> Cell:
    d = net.input_dim
    if d == 2:
        geom = box_polygon(net.domain_lo, net.domain_hi)
    elif d == 3:
        geom = box_polyhedron(net.domain_lo, net.domain_hi)
    else:
        raise ValueError(f"extraction requires input_dim 2 or 3, got {d}")
    return Cell(
        geometry=geom,
        layer=0,
        map_w=np.eye(d),
        map_b=np.zeros(d),
        mask=np.ones(d, dtype=np.int8),  # layer 0 is treated as fully active
        id="",
    )


def prune(cell: Cell, net: Network) -> bool:
    """True iff the cell may still contain the zero level set (Eq. 6 test on
    sound affine bounds over the cell's AABB)."""
    lo, hi = cell.geometry.aabb()
    rng = bound_over_box(net, cell.layer, cell.map_w, cell.map_b, lo, hi)
    return not rng.excludes_zero()


def _vertex_values(cell: Cell):
    """Pre-activation values at the cell vertices, with the on-plane dead
    zone snapped to exact zero. Shape (n_neurons, n_vertices)."""
    v = cell.geometry.vertices
    vals = cell.map_w @ v.T + cell.map_b[:, None]
    wnorm = np.linalg.norm(cell.map_w, axis=1)
    scale = wnorm[:, None] * (1.0 + np.linalg.norm(v, axis=1))[None, :]
    vals[np.abs(vals) <= DEFAULT_TOL.eps_on * scale] = 0.0
    return vals


def find_critical(cell: Cell) -> list:
    """Neuron indices whose pre-activation changes sign strictly over the
    cell vertices. Already-resolved neurons are never critical."""
    if cell.layer == 0:
        return []
    vals = _vertex_values(cell)
    crit = (vals.min(axis=1) < 0) & (vals.max(axis=1) > 0)
    crit &= cell.mask < 0
    return list(np.nonzero(crit)[0])


def split_cell(cell: Cell, neuron: int, tol: GeomTolerances = DEFAULT_TOL):
    """Split along the neuron's zero plane. Returns (neg, pos); a side is
    None when its geometry is degenerate, in which case the surviving side
    carries the resolved mask."""
    cut = HalfSpaceCut(cell.map_w[neuron], cell.map_b[neuron])
    if cell.geometry.dim == 2:
        neg_g, pos_g, _ = clip_polygon(cell.geometry, cut, tol)
    else:
        neg_g, pos_g, _ = clip_polyhedron(cell.geometry, cut, tol)

    def child(geom, bit):
        mask = cell.mask.copy()
        mask[neuron] = bit
        return Cell(geometry=geom, layer=cell.layer,
                    map_w=cell.map_w, map_b=cell.map_b,
                    mask=mask, id=cell.id + str(bit), needs_prune=False)

    neg = child(neg_g, 0) if neg_g is not None else None
    pos = child(pos_g, 1) if pos_g is not None else None
    return neg, pos


def resolve_mask(cell: Cell) -> np.ndarray:
    """Fill unknown mask bits from vertex signs: a neuron is active iff the
    maximal-magnitude vertex value is nonnegative (ties toward active)."""
    mask = cell.mask.copy()
    unknown = np.nonzero(mask < 0)[0]
    if unknown.size:
        vals = _vertex_values(cell)[unknown]
        pick = np.abs(vals).argmax(axis=1)
        mask[unknown] = (vals[np.arange(len(unknown)), pick] >= 0).astype(np.int8)
    return mask


def collapse(cell: Cell, net: Network) -> Cell:
    """Fold the next layer into the cell's affine map:
    W := W_next diag(mask) W,  b := W_next (mask * b) + b_next."""
    mask = resolve_mask(cell).astype(np.float64)
    layer = net.layers[cell.layer]
    map_w = layer.weights @ (mask[:, None] * cell.map_w)
    map_b = layer.weights @ (mask * cell.map_b) + layer.bias
    return Cell(geometry=cell.geometry, layer=cell.layer + 1,
                map_w=map_w, map_b=map_b,
                mask=np.full(layer.n_out, -1, dtype=np.int8),
                id=cell.id, needs_prune=True)


def extract_patch(cell: Cell, tol: GeomTolerances = DEFAULT_TOL):
    """Intersect a final-layer cell with its zero plane. None when the plane
    misses the cell (pruning is conservative, so this can happen)."""
    w = cell.map_w[0]
    b = float(cell.map_b[0])
    wnorm = np.linalg.norm(w)
    if wnorm == 0.0:
        return None
    cut = HalfSpaceCut(w, b)
    if cell.geometry.dim == 2:
        _, _, segment = clip_polygon(cell.geometry, cut, tol)
        if segment is None:
            return None
        normal = w / wnorm
        tangent = np.array([-normal[1], normal[0]])
        if (segment[1] - segment[0]) @ tangent < 0:
            segment = segment[::-1]
        return SurfacePatch(polygon=segment, normal=normal, cell_id=cell.id)
    _, _, cap = clip_polyhedron(cell.geometry, cut, tol)
    if cap is None:
        return None
    return SurfacePatch(polygon=cap, normal=w / wnorm, cell_id=cell.id)


def extract(net: Network, cfg: EngineConfig = None):
    """Extract the exact zero level set of ``net`` over its domain.

    Returns ``(patches, stats)`` with patches sorted by canonical cell id.
    """
    if cfg is None:
        cfg = EngineConfig()
    stats = TraversalStats()
    root = root_cell(net, cfg.tol)
    stack = [root]
    live_bytes = root.nbytes()
    stats.cells_created = 1
    stats.peak_live_cells = 1
    patches = []
    n_layers = net.n_layers

    while stack:
        take = min(cfg.batch_size, len(stack))
        batch = stack[-take:]
        del stack[-take:]
        for cell in batch:
            live_bytes -= cell.nbytes()
        out = []
        for cell in batch:
            if cell.needs_prune and not cfg.disable_pruning:
                t0 = time.perf_counter()
                keep = prune(cell, net)
                stats.add_time("prune", time.perf_counter() - t0)
                if not keep:
                    stats.cells_pruned += 1
                    continue
                cell.needs_prune = False
            if cell.layer == n_layers:
                t0 = time.perf_counter()
                patch = extract_patch(cell, cfg.tol)
                stats.add_time("extract", time.perf_counter() - t0)
                if patch is not None:
                    patches.append(patch)
                    stats.cells_emitted += 1
                continue
            t0 = time.perf_counter()
            crit = find_critical(cell)
            if crit:
                neg, pos = split_cell(cell, crit[0], cfg.tol)
                stats.add_time("split", time.perf_counter() - t0)
                stats.cells_split += 1
                for child in (neg, pos):
                    if child is not None:
                        if cfg.prune_mid_layer:
                            child.needs_prune = True
                        out.append(child)
                        stats.cells_created += 1
            else:
                out.append(collapse(cell, net))
                stats.add_time("collapse", time.perf_counter() - t0)
        stack.extend(out)
        for cell in out:
            live_bytes += cell.nbytes()
        stats.peak_live_cells = max(stats.peak_live_cells, len(stack))
        if live_bytes > cfg.memory_budget_bytes:
            deepest = max(c.layer for c in stack)
            raise MemoryBudgetError(
                f"live cell state {live_bytes} bytes exceeds budget "
                f"{cfg.memory_budget_bytes} at layer {deepest}",
                layer_reached=deepest,
            )

    patches.sort(key=lambda p: p.cell_id)
    return patches, stats


def weld(patches, eps=None) -> Mesh:
    """Weld patches from one extract call into an indexed mesh."""
    if eps is None:
        eps = DEFAULT_TOL.eps_weld
    return weld_patches(patches, eps)


def extract_mesh(net: Network, cfg: EngineConfig = None):
    """Convenience: extract + weld. Returns (mesh, stats)."""
    patches, stats = extract(net, cfg)
    return weld(patches, (cfg or EngineConfig()).tol.eps_weld), stats
