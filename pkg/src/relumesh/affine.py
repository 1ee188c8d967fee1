"""Affine-arithmetic range bounds of a network tail over a box.

Used by the engine to discard cells whose bounded output range excludes
zero. Arithmetic runs in 32-bit with outward error padding so the returned
interval is sound despite the reduced precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

F32 = np.float32
_U32 = F32(2.0 ** -24)  # unit roundoff of float32


@dataclass
class AffineForm:
    """Batch of affine forms: value_i = center_i + coeffs_i . eps + [-err_i, err_i]
    with noise symbols eps in [-1, 1]^d.

    ``center`` has shape (n,), ``coeffs`` (n, d), ``err`` (n,), all float32,
    ``err`` nonnegative.
    """

    center: np.ndarray
    coeffs: np.ndarray
    err: np.ndarray

    def __post_init__(self):
        self.center = np.atleast_1d(np.asarray(self.center, dtype=F32))
        self.coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=F32))
        self.err = np.atleast_1d(np.asarray(self.err, dtype=F32))
        assert np.all(self.err >= 0)

    @property
    def radius(self) -> np.ndarray:
        # outward-rounded: the f32 sum may under-round, pad by a few ulp
        r = np.abs(self.coeffs).sum(axis=1, dtype=F32) + self.err
        return r + F32(4) * np.spacing(r)

    def interval(self):
        r = self.radius
        lo = self.center - r
        hi = self.center + r
        return lo - np.spacing(np.abs(lo)), hi + np.spacing(np.abs(hi))


@dataclass(frozen=True)
class RangeResult:
    lo: float
    hi: float

    def excludes_zero(self) -> bool:
        return self.lo > 0.0 or self.hi < 0.0


def box_form(lo, hi) -> AffineForm:
    """Affine forms for the coordinates of an axis-aligned box, one noise
    symbol per dimension."""
    lo = np.asarray(lo, dtype=F32)
    hi = np.asarray(hi, dtype=F32)
    d = lo.size
    center = (lo + hi) * F32(0.5)
    half = (hi - lo) * F32(0.5)
    # pad for the rounding of center/half and for lo/hi themselves being
    # f32 casts of f64 inputs
    err = F32(4) * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))
    return AffineForm(center, np.diag(half).astype(F32), err)


def affine_map(a: AffineForm, weights, bias) -> AffineForm:
    """Apply y = W x + b to a batch of affine forms, with outward padding for
    f32 rounding and for casting f64 parameters down to f32."""
    w = np.asarray(weights, dtype=F32)
    b = np.asarray(bias, dtype=F32)
    center = w @ a.center + b
    coeffs = w @ a.coeffs
    aw = np.abs(w)
    err = aw @ a.err
    mag_in = np.abs(a.center) + np.abs(a.coeffs).sum(axis=1, dtype=F32) + a.err
    gamma = F32(w.shape[1] + 6) * _U32
    err = err + gamma * (aw @ mag_in + np.abs(b))
    return AffineForm(center, coeffs, err)


def relu_affine(a: AffineForm) -> AffineForm:
    """Sound minimal-range affine relaxation of elementwise ReLU.

    Forms entirely >= 0 pass through, forms entirely <= 0 become the zero
    form, mixed forms use the slope lam = u/(u-l) with offset and fresh error
    delta = -lam*l/2 so that ReLU(t) lies in lam*t + delta +- delta on [l, u].
    The fresh noise term is folded into the scalar err.
    """
    lo, hi = a.interval()
    center = a.center.copy()
    coeffs = a.coeffs.copy()
    err = a.err.copy()

    neg = hi <= 0
    center[neg] = 0
    coeffs[neg] = 0
    err[neg] = 0

    mixed = (lo < 0) & (hi > 0)
    if np.any(mixed):
        l = lo[mixed]
        u = hi[mixed]
        lam = u / (u - l)
        delta = -(lam * l) * F32(0.5)
        c = lam * center[mixed] + delta
        center[mixed] = c
        coeffs[mixed] = lam[:, None] * coeffs[mixed]
        mag = np.abs(c) + np.abs(coeffs[mixed]).sum(axis=1, dtype=F32)
        err[mixed] = lam * err[mixed] + delta + F32(8) * _U32 * (mag + delta)
    return AffineForm(center, coeffs, err)


def bound_over_box(net, start_layer, entry_w, entry_b, box_lo, box_hi) -> RangeResult:
    """Sound range of the network tail over a box.

    The entry map gives the pre-activations of layer ``start_layer`` (with
    layer 0 meaning the raw coordinates); the remaining layers
    ``start_layer+1 .. L`` are applied on top, with ReLU after every hidden
    layer. Degenerate (zero-volume) boxes are allowed.
    """
    a = box_form(box_lo, box_hi)
    a = affine_map(a, entry_w, entry_b)
    for idx in range(start_layer, net.n_layers):
        if idx >= 1:
            a = relu_affine(a)
        layer = net.layers[idx]
        a = affine_map(a, layer.weights, layer.bias)
    lo, hi = a.interval()
    return RangeResult(float(lo[0]), float(hi[0]))
