"""Seeded gradient-descent training of small ReLU MLP SDFs, exported in the
shared JSON network format with their generator config recorded as metadata."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import shapes

DOMAIN_HALF_WIDTH = 0.95


class ConvergenceError(RuntimeError):
    def __init__(self, msg, final_loss):
        super().__init__(f"{msg} (final loss {final_loss:.3e})")
        self.final_loss = final_loss


@dataclass
class TrainingConfig:
    points: int = 100_000
    iters: int = 6000
    lr: float = 1e-3
    batch: int = 1024
    seed: int = 0


@dataclass
class FixtureSpec:
    shape: str
    depth: int = 2
    width: int = 16
    shape_params: dict = field(default_factory=dict)
    pe_freqs: list = field(default_factory=list)  # angular frequencies
    training: TrainingConfig = field(default_factory=TrainingConfig)
    surface_tol: float = 5e-3

    @property
    def arch_name(self) -> str:
        return f"d{self.depth}_w{self.width}"


def _sdf(spec: FixtureSpec):
    fn = {**shapes.SHAPES_3D, **shapes.SHAPES_2D}[spec.shape]
    params = spec.shape_params
    return (lambda pts: fn(pts, **params)) if params else fn


def _input_dim(spec: FixtureSpec) -> int:
    return 2 if spec.shape in shapes.SHAPES_2D else 3


def _surface_points(spec: FixtureSpec, n, rng):
    """Exact on-surface samples for the analytic shapes."""
    if spec.shape == "sphere":
        r = spec.shape_params.get("r", 0.5)
        v = rng.normal(size=(n, 3))
        return r * v / np.linalg.norm(v, axis=1, keepdims=True)
    if spec.shape == "two_spheres":
        r = spec.shape_params.get("r", 0.28)
        off = spec.shape_params.get("offset", 0.45)
        v = rng.normal(size=(n, 3))
        p = r * v / np.linalg.norm(v, axis=1, keepdims=True)
        sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        p[:, 0] += sign * off
        return p
    if spec.shape == "circle2d":
        r = spec.shape_params.get("r", 0.5)
        t = rng.random(n) * 2 * np.pi
        return r * np.stack([np.cos(t), np.sin(t)], axis=1)
    raise ValueError(f"no surface sampler for shape {spec.shape!r}")


def _training_set(spec: FixtureSpec, rng):
    """Paper-style mix at toy scale: a uniform slice plus on-surface and
    Gaussian-perturbed near-surface points, all labeled by the closed form."""
    d = _input_dim(spec)
    n = spec.training.points
    n_uniform = max(n // 16, 1)
    n_surf = (n - n_uniform) // 2
    n_near = n - n_uniform - n_surf
    h = DOMAIN_HALF_WIDTH
    uniform = rng.uniform(-h, h, size=(n_uniform, d))
    surf = _surface_points(spec, n_surf, rng)
    near = _surface_points(spec, n_near, rng) + rng.normal(
        scale=0.05, size=(n_near, d))
    pts = np.vstack([uniform, surf, near])
    labels = _sdf(spec)(pts)
    return pts, labels


def _encode(pts, freqs):
    """[x_i, sin(w x_i), cos(w x_i), ...] per input dimension."""
    cols = []
    for i in range(pts.shape[1]):
        cols.append(pts[:, i])
        for w in freqs:
            cols.append(np.sin(w * pts[:, i]))
            cols.append(np.cos(w * pts[:, i]))
    return np.stack(cols, axis=1)


def _init_params(dims, rng):
    params = []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        w = rng.normal(scale=np.sqrt(2.0 / n_in), size=(n_out, n_in))
        params.append([w, np.zeros(n_out)])
    return params


def _forward(params, x):
    acts = [x]
    a = x
    for i, (w, b) in enumerate(params):
        z = a @ w.T + b
        a = np.maximum(z, 0.0) if i < len(params) - 1 else z
        acts.append(a)
    return acts


def _backward(params, acts, residual):
    """Gradients of mean squared error, residual = (pred - label) / n."""
    grads = []
    delta = 2.0 * residual[:, None]
    for i in range(len(params) - 1, -1, -1):
        w, _ = params[i]
        a_prev = acts[i]
        if i < len(params) - 1:
            delta = delta * (acts[i + 1] > 0)
        grads.append([delta.T @ a_prev, delta.sum(axis=0)])
        if i > 0:
            delta = delta @ w
    return grads[::-1]


def train_network(spec: FixtureSpec):
    """Adam-trained MLP; returns (params, final_loss). Deterministic given
    the seed."""
    cfg = spec.training
    rng = np.random.default_rng(cfg.seed)
    pts, labels = _training_set(spec, rng)
    if spec.pe_freqs:
        pts = _encode(pts, spec.pe_freqs)
    dims = [pts.shape[1]] + [spec.width] * spec.depth + [1]
    params = _init_params(dims, rng)

    m = [[np.zeros_like(w), np.zeros_like(b)] for w, b in params]
    v = [[np.zeros_like(w), np.zeros_like(b)] for w, b in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    loss = np.inf
    for it in range(1, cfg.iters + 1):
        idx = rng.integers(0, len(pts), size=cfg.batch)
        x, y = pts[idx], labels[idx]
        acts = _forward(params, x)
        err = acts[-1][:, 0] - y
        loss = float(np.mean(err ** 2))
        grads = _backward(params, acts, err / len(err))
        c1 = 1.0 - beta1 ** it
        c2 = 1.0 - beta2 ** it
        for p, g, mm, vv in zip(params, grads, m, v):
            for k in range(2):
                mm[k] = beta1 * mm[k] + (1 - beta1) * g[k]
                vv[k] = beta2 * vv[k] + (1 - beta2) * g[k] ** 2
                p[k] = p[k] - cfg.lr * (mm[k] / c1) / (np.sqrt(vv[k] / c2) + eps)
    return params, loss


def _check_surface_error(spec: FixtureSpec, params, rng) -> float:
    pts = _surface_points(spec, 4096, rng)
    x = _encode(pts, spec.pe_freqs) if spec.pe_freqs else pts
    pred = _forward(params, x)[-1][:, 0]
    return float(np.abs(pred).mean())


def export_doc(spec: FixtureSpec, params) -> dict:
    d = _input_dim(spec)
    n_chan = 1 + 2 * len(spec.pe_freqs)
    h = DOMAIN_HALF_WIDTH
    layers = []
    for i, (w, b) in enumerate(params):
        layers.append({
            "weights": w.tolist(),
            "bias": b.tolist(),
            "activation": "linear" if i == len(params) - 1 else "relu",
        })
    doc = {
        "input_dim": d * n_chan,
        "layers": layers,
        "metadata": {
            "generator": "sdftrainer",
            "shape": spec.shape,
            "shape_params": spec.shape_params,
            "arch": spec.arch_name,
            "training": {
                "points": spec.training.points,
                "iters": spec.training.iters,
                "lr": spec.training.lr,
                "batch": spec.training.batch,
                "seed": spec.training.seed,
            },
        },
    }
    if spec.pe_freqs:
        # feature-space net: domain omitted, encoding recorded for consumers
        doc["metadata"]["positional_encoding"] = {
            "freqs": list(spec.pe_freqs),
            "spatial_dim": d,
        }
    else:
        doc["domain"] = {"lo": [-h] * d, "hi": [h] * d}
    return doc


def train_fixture(spec: FixtureSpec, path) -> dict:
    """Train, gate on surface accuracy, and export."""
    params, loss = train_network(spec)
    err = _check_surface_error(spec, params, np.random.default_rng(12345))
    if err > spec.surface_tol:
        raise ConvergenceError(
            f"{spec.shape} {spec.arch_name}: surface mean |f| {err:.3e} "
            f"exceeds {spec.surface_tol}", loss)
    doc = export_doc(spec, params)
    doc["metadata"]["surface_mean_abs_f"] = err
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    return doc
