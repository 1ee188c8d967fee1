"""Shared fixtures: network loading and cached extractions.

The larger trained networks take tens of seconds to extract, so extraction
results are cached per (fixture, batch size, pruning) for the whole session.
"""

import time
from pathlib import Path

import pytest

from relumesh import EngineConfig, extract, load_network, weld

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

FIXTURE_NAMES = [
    "octahedron",
    "halfspace",
    "box",
    "const_pos",
    "halfplane2d",
    "sphere_d2_w16",
    "sphere_d3_w32",
    "two_spheres_d3_w32",
    "circle2d_d2_w16",
]

# circle2d_pe_d2_w4 is a feature-space net (6 inputs); it is loadable and
# range-boundable but not directly extractable without the encoding prefix
ALL_FIXTURE_FILES = FIXTURE_NAMES + ["circle2d_pe_d2_w4"]

_nets = {}
_extractions = {}


def fixture_path(name) -> Path:
    return FIXTURE_DIR / f"{name}.json"


def get_net(name):
    if name not in _nets:
        _nets[name] = load_network(fixture_path(name))
    return _nets[name]


def get_extraction(name, batch_size=4096, pruning=True):
    """(patches, stats, mesh, wall_seconds), cached."""
    key = (name, batch_size, pruning)
    if key not in _extractions:
        net = get_net(name)
        cfg = EngineConfig(batch_size=batch_size, disable_pruning=not pruning)
        t0 = time.perf_counter()
        patches, stats = extract(net, cfg)
        elapsed = time.perf_counter() - t0
        mesh = weld(patches)
        _extractions[key] = (patches, stats, mesh, elapsed)
    return _extractions[key]


@pytest.fixture(scope="session")
def octahedron_net():
    return get_net("octahedron")


@pytest.fixture(scope="session")
def sphere_net():
    return get_net("sphere_d2_w16")
