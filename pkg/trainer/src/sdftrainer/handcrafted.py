"""Exact ReLU encodings of simple shapes, written in the shared JSON network
format. Every file is verified against its closed form before writing."""

from __future__ import annotations

import json

import numpy as np

from . import shapes

DOMAIN_HALF_WIDTH = 0.95


def _layer(w, b, act):
    return {"weights": np.asarray(w, float).tolist(),
            "bias": np.asarray(b, float).tolist(),
            "activation": act}


def _doc(input_dim, layers, meta):
    h = DOMAIN_HALF_WIDTH
    return {
        "input_dim": input_dim,
        "domain": {"lo": [-h] * input_dim, "hi": [h] * input_dim},
        "layers": layers,
        "metadata": meta,
    }


def _eval(doc, pts):
    a = np.asarray(pts, float)
    for layer in doc["layers"]:
        a = a @ np.asarray(layer["weights"]).T + np.asarray(layer["bias"])
        if layer["activation"] == "relu":
            np.maximum(a, 0.0, out=a)
    return a[:, 0]


def octahedron_doc(r=0.5):
    # |t| = ReLU(t) + ReLU(-t), one pair per axis, padded to width 8 with
    # two inert zero neurons
    w1 = np.vstack([np.eye(3), -np.eye(3), np.zeros((2, 3))])
    layers = [_layer(w1, np.zeros(8), "relu"),
              _layer(np.ones((1, 8)), [-r], "linear")]
    return _doc(3, layers, {"generator": "handcrafted", "shape": "octahedron",
                            "r": r})


def halfspace_doc():
    layers = [_layer([[0.0, 0.0, 1.0]], [0.0], "linear")]
    return _doc(3, layers, {"generator": "handcrafted", "shape": "halfspace"})


def const_pos_doc():
    layers = [_layer([[0.0, 0.0, 0.0]], [1.0], "linear")]
    return _doc(3, layers, {"generator": "handcrafted", "shape": "const_pos"})


def box_doc(h=0.4):
    # max(a, b) = a + ReLU(b - a), chained over |x|, |y|, |z|
    w1 = np.vstack([np.eye(3), -np.eye(3)])  # -> ReLU(+-x_i), 6 units
    ax = [1, 0, 0, 1, 0, 0]  # |x| = u0 + u3
    ay = [0, 1, 0, 0, 1, 0]
    az = [0, 0, 1, 0, 0, 1]
    # layer 2: [ |x|, ReLU(|y|-|x|), |z| ]  (|x|, |z| >= 0 pass through ReLU)
    w2 = np.array([ax, list(np.subtract(ay, ax)), az], float)
    # layer 3: [ m1, ReLU(|z|-m1) ] with m1 = max(|x|,|y|) = u0+u1
    w3 = np.array([[1, 1, 0], [-1, -1, 1]], float)
    layers = [_layer(w1, np.zeros(6), "relu"),
              _layer(w2, np.zeros(3), "relu"),
              _layer(w3, np.zeros(2), "relu"),
              _layer([[1.0, 1.0]], [-h], "linear")]
    return _doc(3, layers, {"generator": "handcrafted", "shape": "box", "h": h})


def halfplane2d_doc():
    layers = [_layer([[1.0, 0.0]], [0.0], "linear")]
    return _doc(2, layers, {"generator": "handcrafted", "shape": "halfplane2d"})


_BUILDERS = {
    "octahedron": (octahedron_doc, shapes.octahedron),
    "halfspace": (halfspace_doc, shapes.halfspace_z),
    "box": (box_doc, shapes.box),
    "const_pos": (const_pos_doc, lambda pts: np.ones(len(pts))),
    "halfplane2d": (halfplane2d_doc, lambda pts: np.asarray(pts)[:, 0]),
}


def make_handcrafted(shape: str, path, n_check: int = 10_000, seed: int = 0):
    """Build an exact fixture and write it after verifying 0 error against
    the closed form at random points."""
    if shape not in _BUILDERS:
        raise ValueError(f"unknown handcrafted shape {shape!r}; "
                         f"one of {sorted(_BUILDERS)}")
    build, oracle = _BUILDERS[shape]
    doc = build()
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-DOMAIN_HALF_WIDTH, DOMAIN_HALF_WIDTH,
                      size=(n_check, doc["input_dim"]))
    err = np.abs(_eval(doc, pts) - oracle(pts)).max()
    # float addition order differs between the net and the closed form, so
    # "exact" means agreement to a few ulp, not bitwise zero
    if err > 8 * np.finfo(np.float64).eps:
        raise AssertionError(f"{shape}: handcrafted net deviates {err} from "
                             "its closed form")
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    return doc
