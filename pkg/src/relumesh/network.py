"""ReLU MLP representation, JSON I/O, evaluation, and piecewise-linear
surrogates for periodic positional encodings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateKnotError,
    NetworkFormatError,
    ShapeMismatchError,
    UnsupportedActivationError,
)

DEFAULT_DOMAIN_HALF_WIDTH = 0.95

ACTIVATIONS = ("relu", "linear")


@dataclass(frozen=True)
class Layer:
    """One dense layer: weights (n_out, n_in), bias (n_out,), activation tag."""

    weights: np.ndarray
    bias: np.ndarray
    activation: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1:
            raise NetworkFormatError("layer weights must be 2-D and bias 1-D")
        if w.shape[0] != b.shape[0]:
            raise ShapeMismatchError(
                f"weights have {w.shape[0]} rows but bias has {b.shape[0]} entries"
            )
        if self.activation not in ACTIVATIONS:
            raise UnsupportedActivationError(
                f"unknown activation {self.activation!r}"
            )
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise NetworkFormatError("layer parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class Network:
    """Layered MLP over an axis-aligned box domain.

    Hidden layers are ReLU; only the final layer is linear and it outputs a
    single scalar. ``input_dim`` is 2 or 3 for geometric extraction, but
    wider inputs are accepted so encoded-feature networks can be loaded and
    composed with a surrogate prefix (see :func:`prepend_positional_encoding`).
    """

    input_dim: int
    layers: tuple
    domain_lo: np.ndarray
    domain_hi: np.ndarray

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise NetworkFormatError("network needs at least one layer")
        if layers[0].n_in != self.input_dim:
            raise ShapeMismatchError(
                f"layer 0 expects {layers[0].n_in} inputs, input_dim is {self.input_dim}"
            )
        for i in range(1, len(layers)):
            if layers[i].n_in != layers[i - 1].n_out:
                raise ShapeMismatchError(
                    f"layer {i} expects {layers[i].n_in} inputs but layer "
                    f"{i - 1} outputs {layers[i - 1].n_out}"
                )
        for i, layer in enumerate(layers[:-1]):
            if layer.activation != "relu":
                raise UnsupportedActivationError(
                    f"hidden layer {i} tagged {layer.activation!r}; only the "
                    "final layer may be linear"
                )
        if layers[-1].activation != "linear":
            raise UnsupportedActivationError("final layer must be linear")
        if layers[-1].n_out != 1:
            raise ShapeMismatchError(
                f"final layer outputs {layers[-1].n_out} values, expected 1"
            )
        lo = np.asarray(self.domain_lo, dtype=np.float64)
        hi = np.asarray(self.domain_hi, dtype=np.float64)
        if lo.shape != (self.input_dim,) or hi.shape != (self.input_dim,):
            raise NetworkFormatError("domain bounds must match input_dim")
        if not np.all(lo < hi):
            raise NetworkFormatError("domain must satisfy lo < hi componentwise")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "domain_lo", lo)
        object.__setattr__(self, "domain_hi", hi)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def n_params(self) -> int:
        return sum(l.weights.size + l.bias.size for l in self.layers)

    @property
    def hidden_widths(self) -> list:
        return [l.n_out for l in self.layers[:-1]]

    @property
    def total_neurons(self) -> int:
        return sum(l.n_out for l in self.layers)


def make_network(layers, input_dim=None, domain=None) -> Network:
    """Assemble a Network, defaulting the domain to the standard box."""
    layers = tuple(layers)
    if input_dim is None:
        input_dim = layers[0].n_in
    if domain is None:
        h = DEFAULT_DOMAIN_HALF_WIDTH
        lo = np.full(input_dim, -h)
        hi = np.full(input_dim, h)
    else:
        lo, hi = (np.asarray(a, dtype=np.float64) for a in domain)
    return Network(input_dim=input_dim, layers=layers, domain_lo=lo, domain_hi=hi)


def load_network(path) -> Network:
    """Load a network from the JSON file format.

    Unknown top-level keys (e.g. a generator "metadata" block) are ignored.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"{path}: malformed JSON: {exc}") from exc
    try:
        input_dim = int(raw["input_dim"])
        raw_layers = raw["layers"]
    except (KeyError, TypeError) as exc:
        raise NetworkFormatError(f"{path}: missing required field {exc}") from exc
    layers = []
    for i, entry in enumerate(raw_layers):
        try:
            layers.append(
                Layer(
                    weights=np.array(entry["weights"], dtype=np.float64),
                    bias=np.array(entry["bias"], dtype=np.float64),
                    activation=entry["activation"],
                )
            )
        except (KeyError, ValueError) as exc:
            raise NetworkFormatError(f"{path}: layer {i}: {exc}") from exc
    domain = None
    if raw.get("domain") is not None:
        domain = (raw["domain"]["lo"], raw["domain"]["hi"])
    return make_network(layers, input_dim=input_dim, domain=domain)


def save_network(net: Network, path, metadata=None):
    """Write a network in the JSON file format."""
    doc = {
        "input_dim": net.input_dim,
        "domain": {"lo": net.domain_lo.tolist(), "hi": net.domain_hi.tolist()},
        "layers": [
            {
                "weights": l.weights.tolist(),
                "bias": l.bias.tolist(),
                "activation": l.activation,
            }
            for l in net.layers
        ],
    }
    if metadata is not None:
        doc["metadata"] = metadata
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def eval_batch(net: Network, xs) -> np.ndarray:
    """Evaluate the network on a (n, input_dim) point set, 64-bit throughout."""
    a = np.asarray(xs, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != net.input_dim:
        raise ValueError(f"expected (n, {net.input_dim}) points, got {a.shape}")
    if a.shape[0] == 0:
        return np.empty(0)
    for layer in net.layers:
        a = a @ layer.weights.T + layer.bias
        if layer.activation == "relu":
            np.maximum(a, 0.0, out=a)
    return a[:, 0]


def eval_network(net: Network, x) -> float:
    """Evaluate the network at a single point."""
    return float(eval_batch(net, np.asarray(x, dtype=np.float64)[None, :])[0])


# ---------------------------------------------------------------------------
# Piecewise-linear surrogates for positional encodings


@dataclass(frozen=True)
class PwlSurrogate1D:
    """Continuous piecewise-linear 1-D function given by knots and values,
    with linear extrapolation beyond the first/last knot."""

    knots: np.ndarray
    values: np.ndarray
    slope_left: float = 0.0
    slope_right: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if k.size < 2 or k.size != v.size:
            raise DegenerateKnotError("need at least 2 knots with matching values")
        if not np.all(np.diff(k) > 0):
            raise DegenerateKnotError("knots must be strictly increasing")
        if not (np.isfinite(k).all() and np.isfinite(v).all()):
            raise DegenerateKnotError("knots and values must be finite")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = np.interp(x, self.knots, self.values)
        below = x < self.knots[0]
        above = x > self.knots[-1]
        y = np.where(below, self.values[0] + self.slope_left * (x - self.knots[0]), y)
        y = np.where(above, self.values[-1] + self.slope_right * (x - self.knots[-1]), y)
        return y if y.ndim else float(y)


def sinusoid_surrogate(omega, lo, hi, knots_per_period, phase=0.0) -> PwlSurrogate1D:
    """Interpolating surrogate of sin(omega*x + phase) over [lo, hi].

    Knots are anchored at a peak of the sinusoid so extrema are sampled
    exactly, spaced period/knots_per_period, extended one knot past each end
    of the domain.
    """
    if knots_per_period < 3:
        raise DegenerateKnotError("knots_per_period must be >= 3")
    if not hi > lo:
        raise DegenerateKnotError("domain must satisfy lo < hi")
    period = 2.0 * np.pi / omega
    step = period / knots_per_period
    peak = (np.pi / 2.0 - phase) / omega  # sin(omega*peak + phase) = 1
    j_lo = int(np.floor((lo - peak) / step)) - 1
    j_hi = int(np.ceil((hi - peak) / step)) + 1
    knots = peak + step * np.arange(j_lo, j_hi + 1)
    inside = np.count_nonzero((knots >= lo) & (knots <= hi))
    if inside < 2:
        raise DegenerateKnotError(
            f"domain [{lo}, {hi}] spans {inside} knots; need at least 2"
        )
    values = np.sin(omega * knots + phase)
    s0 = (values[1] - values[0]) / step
    s1 = (values[-1] - values[-2]) / step
    return PwlSurrogate1D(knots, values, slope_left=s0, slope_right=s1)


def identity_surrogate(lo, hi) -> PwlSurrogate1D:
    return PwlSurrogate1D(np.array([lo, hi]), np.array([lo, hi]), 1.0, 1.0)


def _channel_surrogates(freqs, knots_per_period, lo, hi):
    """Per-input-dim channel list: [x, sin(w1 x), cos(w1 x), ...]."""
    chans = [identity_surrogate(lo, hi)]
    for omega in freqs:
        chans.append(sinusoid_surrogate(omega, lo, hi, knots_per_period))
        chans.append(sinusoid_surrogate(omega, lo, hi, knots_per_period,
                                        phase=np.pi / 2.0))
    return chans


def pe_to_relu_layers(freqs, knots_per_period, input_dim, domain=None):
    """Build ReLU layers computing a piecewise-linear positional encoding.

    Returns ``(layers, offsets)``: two ReLU layers whose output is
    ``channel_c(x_i) + offsets[c]`` for every input dimension ``i`` and
    channel ``c`` in the order ``[x_i, sin(w1 x_i), cos(w1 x_i), ...]``.
    The constant offsets keep every unit nonnegative over the domain so the
    second ReLU passes values through unchanged; they must be subtracted from
    the bias of whatever layer consumes the encoding (see
    :func:`prepend_positional_encoding`).

    Each periodic channel interpolates its sinusoid exactly at the knots.
    """
    freqs = list(freqs)
    if domain is None:
        h = DEFAULT_DOMAIN_HALF_WIDTH
        lo, hi = -h, h
    else:
        lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise DegenerateKnotError("domain must satisfy lo < hi")
    chans = _channel_surrogates(freqs, knots_per_period, lo, hi)
    n_chan = len(chans)
    span = max(abs(lo), abs(hi))

    # First layer: one ReLU(x_i - k_j) unit per dim and per channel knot,
    # dropping knots at or beyond the upper domain end (their unit is
    # identically zero on the domain).
    unit_knots = []  # (dim, knot) in emission order
    chan_units = []  # per channel: list of (unit index offset within dim, coeff)
    per_dim_units = 0
    for chan in chans:
        k = chan.knots
        v = chan.values
        slopes = np.diff(v) / np.diff(k)
        coeffs = np.concatenate([[slopes[0]], np.diff(slopes)])
        keep = k < hi
        chan_units.append(
            [(per_dim_units + j, coeffs[jj])
             for j, jj in enumerate(np.nonzero(keep)[0])]
        )
        for kk in k[keep]:
            unit_knots.append(kk)
        per_dim_units += int(keep.sum())

    n_hidden = per_dim_units * input_dim
    w1 = np.zeros((n_hidden, input_dim))
    b1 = np.zeros(n_hidden)
    for d in range(input_dim):
        for j, kk in enumerate(unit_knots):
            w1[d * per_dim_units + j, d] = 1.0
            b1[d * per_dim_units + j] = -kk

    # Second layer reconstructs channel values (shifted nonnegative).
    offsets = np.empty(n_chan * input_dim)
    w2 = np.zeros((n_chan * input_dim, n_hidden))
    b2 = np.zeros(n_chan * input_dim)
    for d in range(input_dim):
        for c, chan in enumerate(chans):
            row = d * n_chan + c
            m = 2.0 + span  # bound on |channel| over the domain, plus slack
            offsets[row] = m
            b2[row] = chan.values[0] + m
            for unit, coeff in chan_units[c]:
                w2[row, d * per_dim_units + unit] = coeff
    layers = [Layer(w1, b1, "relu"), Layer(w2, b2, "relu")]
    return layers, offsets


def prepend_positional_encoding(net: Network, freqs, knots_per_period,
                                input_dim=None, domain=None) -> Network:
    """Compose a feature-space network with a piecewise-linear positional
    encoding so the result maps raw coordinates to the scalar field.

    ``net`` must expect ``input_dim * (1 + 2*len(freqs))`` inputs ordered as
    ``[x_i, sin(w x_i), cos(w x_i), ...]`` per dimension.
    """
    freqs = list(freqs)
    if input_dim is None:
        n_chan = 1 + 2 * len(freqs)
        if net.input_dim % n_chan:
            raise ShapeMismatchError(
                f"network input {net.input_dim} is not a multiple of the "
                f"{n_chan} encoding channels"
            )
        input_dim = net.input_dim // n_chan
    if domain is None:
        dom_lo = np.full(input_dim, -DEFAULT_DOMAIN_HALF_WIDTH)
        dom_hi = np.full(input_dim, DEFAULT_DOMAIN_HALF_WIDTH)
    else:
        dom_lo, dom_hi = (np.asarray(a, dtype=np.float64) for a in domain)
    scalar_dom = (float(dom_lo.min()), float(dom_hi.max()))
    pe_layers, offsets = pe_to_relu_layers(freqs, knots_per_period, input_dim,
                                           domain=scalar_dom)
    first = net.layers[0]
    if first.n_in != offsets.size:
        raise ShapeMismatchError(
            f"network expects {first.n_in} inputs but the encoding produces "
            f"{offsets.size} channels"
        )
    corrected = Layer(first.weights, first.bias - first.weights @ offsets,
                      first.activation)
    layers = list(pe_layers) + [corrected] + list(net.layers[1:])
    return Network(input_dim=input_dim, layers=tuple(layers),
                   domain_lo=dom_lo, domain_hi=dom_hi)
