"""Marching Cubes baseline over network fields."""

import numpy as np
import pytest

from relumesh import GridSpec, Layer, eval_batch, make_network, marching_cubes
from relumesh.mc import sample_grid

from conftest import get_net


def planar_net():
    # f(x) = z over [-1, 1]^3
    return make_network([Layer(np.array([[0.0, 0.0, 1.0]]), np.zeros(1),
                               "linear")],
                        domain=([-1.0] * 3, [1.0] * 3))


def test_linear_field_exact():
    net = planar_net()
    mesh = marching_cubes(net, GridSpec.for_network(net, 8))
    assert mesh.n_triangles > 0
    vals = eval_batch(net, mesh.vertices)
    assert np.abs(vals).max() <= 1e-12
    # spans the whole domain cross-section
    assert mesh.vertices[:, 0].min() == pytest.approx(-1.0)
    assert mesh.vertices[:, 0].max() == pytest.approx(1.0)


def test_linear_field_orientation():
    # normals must point along +grad f = +z
    net = planar_net()
    mesh = marching_cubes(net, GridSpec.for_network(net, 8))
    v = mesh.vertices
    t = mesh.triangles
    n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    assert np.all(n[:, 2] > 0)


def test_octahedron_mc_has_error():
    net = get_net("octahedron")
    mesh = marching_cubes(net, GridSpec.for_network(net, 64))
    vals = np.abs(eval_batch(net, mesh.vertices))
    assert vals.mean() > 0


def test_resolution_doubling_reduces_error():
    net = get_net("sphere_d2_w16")
    means = []
    for res in (32, 64):
        mesh = marching_cubes(net, GridSpec.for_network(net, res))
        means.append(np.abs(eval_batch(net, mesh.vertices)).mean())
    assert means[1] < means[0]


def test_empty_when_no_sign_change():
    net = get_net("const_pos")
    mesh = marching_cubes(net, GridSpec.for_network(net, 8))
    assert mesh.n_triangles == 0


def test_resolution_validation():
    net = get_net("octahedron")
    with pytest.raises(ValueError):
        GridSpec.for_network(net, 1)


def test_requires_3d():
    net = get_net("circle2d_d2_w16")
    with pytest.raises(ValueError):
        marching_cubes(net, GridSpec(8, net.domain_lo, net.domain_hi))


def test_sample_grid_shape():
    net = get_net("octahedron")
    vol = sample_grid(net, GridSpec.for_network(net, 4))
    assert vol.shape == (5, 5, 5)
    # center of the domain is inside the shape
    assert vol[2, 2, 2] < 0


def test_watertight_closed_surface():
    net = get_net("sphere_d2_w16")
    mesh = marching_cubes(net, GridSpec.for_network(net, 32))
    assert mesh.as_mesh().is_watertight()
