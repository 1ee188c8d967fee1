"""Marching Cubes baseline: sample the network on a regular grid and run the
classic table-driven algorithm with linear interpolation along edges."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from skimage import measure

from .mesh import TriMesh
from .network import Network, eval_batch


@dataclass(frozen=True)
class GridSpec:
    """Regular sampling grid: ``resolution`` cells per axis over ``domain``
    (res+1 samples per axis, placed at cell corners)."""

    resolution: int
    domain_lo: np.ndarray
    domain_hi: np.ndarray

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("grid resolution must be >= 2")
        object.__setattr__(self, "domain_lo",
                           np.asarray(self.domain_lo, dtype=np.float64))
        object.__setattr__(self, "domain_hi",
                           np.asarray(self.domain_hi, dtype=np.float64))

    @classmethod
    def for_network(cls, net: Network, resolution: int) -> "GridSpec":
        return cls(resolution, net.domain_lo, net.domain_hi)


def sample_grid(net: Network, grid: GridSpec) -> np.ndarray:
    """Evaluate the network at all grid corners; shape (r+1, r+1, r+1)."""
    r = grid.resolution
    axes = [np.linspace(grid.domain_lo[d], grid.domain_hi[d], r + 1)
            for d in range(3)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    return eval_batch(net, pts).reshape(r + 1, r + 1, r + 1)


def marching_cubes(net: Network, grid: GridSpec) -> TriMesh:
    """Triangle mesh of the sampled zero level set.

    Faces are oriented so normals point along the field gradient (toward
    positive values). Empty mesh when no sign change occurs.
    """
    if net.input_dim != 3:
        raise ValueError("marching cubes baseline requires a 3D network")
    vol = sample_grid(net, grid)
    if vol.min() > 0 or vol.max() < 0:
        return TriMesh(np.empty((0, 3)), np.empty((0, 3), dtype=np.int64))
    spacing = tuple((grid.domain_hi - grid.domain_lo) / grid.resolution)
    verts, faces, _, _ = measure.marching_cubes(
        vol, 0.0, spacing=spacing, method="lorensen",
        gradient_direction="descent")
    verts = verts + grid.domain_lo
    return TriMesh(verts, faces)
