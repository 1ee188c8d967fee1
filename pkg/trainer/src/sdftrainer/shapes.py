"""Closed-form signed distance functions used as training labels and
verification oracles."""

from __future__ import annotations

import numpy as np


def halfspace_z(pts):
    return np.asarray(pts)[:, 2]


def octahedron(pts, r=0.5):
    """L1-ball boundary: |x|+|y|+|z| - r (not a true SDF off-axis, but its
    zero set is the octahedron)."""
    return np.abs(np.asarray(pts)).sum(axis=1) - r


def box(pts, h=0.4):
    """Linf-ball boundary: max(|x|,|y|,|z|) - h."""
    return np.abs(np.asarray(pts)).max(axis=1) - h


def sphere(pts, r=0.5, center=(0.0, 0.0, 0.0)):
    return np.linalg.norm(np.asarray(pts) - np.asarray(center), axis=1) - r


def two_spheres(pts, r=0.28, offset=0.45):
    a = sphere(pts, r, center=(-offset, 0.0, 0.0))
    b = sphere(pts, r, center=(offset, 0.0, 0.0))
    return np.minimum(a, b)


def circle2d(pts, r=0.5):
    return np.linalg.norm(np.asarray(pts), axis=1) - r


SHAPES_3D = {
    "halfspace": halfspace_z,
    "octahedron": octahedron,
    "box": box,
    "sphere": sphere,
    "two_spheres": two_spheres,
}

SHAPES_2D = {
    "circle2d": circle2d,
}
