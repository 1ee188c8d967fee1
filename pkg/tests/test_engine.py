"""Traversal engine: pruning, splitting, collapsing, extraction."""

import numpy as np
import pytest

from relumesh import (
    EngineConfig,
    Layer,
    MemoryBudgetError,
    collapse,
    eval_batch,
    extract,
    extract_mesh,
    find_critical,
    make_network,
    prune,
    split_cell,
    weld,
)
from relumesh.engine import Cell, root_cell
from relumesh.geometry import box_polygon
from relumesh.metrics import points_to_mesh_distance
from relumesh.tessellation import tessellate

from conftest import get_extraction, get_net


def preactivations(net, x, layer):
    """Reference pre-activation vector z^(layer) by direct forward pass.
    layer = 0 returns the raw coordinates."""
    a = np.asarray(x, dtype=np.float64)
    if layer == 0:
        return a
    for i in range(layer):
        z = net.layers[i].weights @ a + net.layers[i].bias
        a = np.maximum(z, 0.0) if net.layers[i].activation == "relu" else z
    return z


def sample_inside(cell, rng, n=100):
    """Rejection-sample points strictly inside the cell geometry."""
    lo, hi = cell.geometry.aabb()
    v = cell.geometry.vertices
    ctr = v.mean(axis=0)
    out = []
    while len(out) < n:
        pts = rng.uniform(lo, hi, size=(4 * n, len(lo)))
        # shrink toward the centroid to stay clear of the boundary
        pts = ctr + 0.99 * (pts - ctr)
        for p in pts:
            if _inside(cell.geometry, p):
                out.append(p)
                if len(out) == n:
                    break
    return np.array(out)


def _inside(geom, p):
    v = geom.vertices
    if geom.dim == 2:
        m = len(v)
        for i in range(m):
            e = v[(i + 1) % m] - v[i]
            d = p - v[i]
            if e[0] * d[1] - e[1] * d[0] < -1e-12:
                return False
        return True
    for loop in geom.faces:
        a = v[loop[0]]
        n = np.cross(v[loop[1]] - a, v[loop[2]] - a)
        if np.dot(p - a, n) > 1e-12 * (1 + np.linalg.norm(n)):
            return False
    return True


# ---------------------------------------------------------------------------
# extract examples


def test_identity_scalar_2d():
    net = make_network([Layer(np.array([[1.0, 0.0]]), np.zeros(1), "linear")],
                       domain=([-1.0, -1.0], [1.0, 1.0]))
    patches, stats = extract(net)
    assert len(patches) == 1
    assert np.allclose(patches[0].polygon, [[0.0, -1.0], [0.0, 1.0]], atol=1e-12)
    assert np.allclose(patches[0].normal, [1.0, 0.0])


def test_octahedron_patches():
    patches, stats, mesh, _ = get_extraction("octahedron")
    assert len(patches) == 8
    expect = np.array([[0.5, 0, 0], [-0.5, 0, 0], [0, 0.5, 0],
                       [0, -0.5, 0], [0, 0, 0.5], [0, 0, -0.5]])
    assert mesh.n_vertices == 6
    assert mesh.n_faces == 8
    for v in mesh.vertices:
        assert np.linalg.norm(expect - v, axis=1).min() <= 1e-9
    edges = mesh.edges()
    assert len(edges) == 12
    assert all(c == 2 for c in edges.values())


def test_constant_positive_prunes_root():
    patches, stats, mesh, _ = get_extraction("const_pos")
    assert patches == []
    assert stats.cells_pruned == 1
    assert stats.cells_created == 1
    assert mesh.is_empty()


def test_extract_rejects_wide_inputs():
    net = get_net("circle2d_pe_d2_w4")  # 6 feature inputs
    with pytest.raises(ValueError):
        extract(net)


# ---------------------------------------------------------------------------
# prune


def test_prune_root_examples():
    assert prune(root_cell(get_net("const_pos")), get_net("const_pos")) is False
    assert prune(root_cell(get_net("octahedron")), get_net("octahedron")) is True


def test_prune_soundness_on_subboxes():
    """prune == False must imply no sign change anywhere in the box."""
    net = get_net("octahedron")
    rng = np.random.default_rng(11)
    from relumesh.geometry import box_polyhedron
    pruned = 0
    for _ in range(500):
        c = rng.uniform(-0.9, 0.9, size=3)
        half = rng.uniform(0.02, 0.3, size=3)
        lo, hi = c - half, c + half
        cell = root_cell(net)
        cell = Cell(geometry=box_polyhedron(lo, hi), layer=0,
                    map_w=np.eye(3), map_b=np.zeros(3),
                    mask=np.ones(3, dtype=np.int8), id="")
        if not prune(cell, net):
            pruned += 1
            pts = rng.uniform(lo, hi, size=(2000, 3))
            vals = eval_batch(net, pts)
            assert vals.min() > 0 or vals.max() < 0
    assert pruned > 0  # the sampler must actually exercise the branch


# ---------------------------------------------------------------------------
# find_critical / split_cell


def square_cell(w, b):
    """Single-neuron layer-1 cell over the unit square."""
    return Cell(geometry=box_polygon(np.zeros(2), np.ones(2)), layer=1,
                map_w=np.array(w, dtype=np.float64),
                map_b=np.array(b, dtype=np.float64),
                mask=np.full(len(b), -1, dtype=np.int8), id="")


def test_find_critical_examples():
    all_pos = square_cell([[1.0, 0.0]], [0.5])
    assert find_critical(all_pos) == []

    crossing = square_cell([[1.0, 0.0]], [-0.5])
    assert find_critical(crossing) == [0]


def test_find_critical_skips_resolved():
    cell = square_cell([[1.0, 0.0]], [-0.5])
    cell.mask[0] = 1
    assert find_critical(cell) == []


def test_split_cell_square():
    cell = square_cell([[1.0, 0.0]], [-0.5])
    neg, pos = split_cell(cell, 0)
    assert neg.geometry.area() == pytest.approx(0.5)
    assert pos.geometry.area() == pytest.approx(0.5)
    assert neg.mask[0] == 0 and pos.mask[0] == 1
    assert neg.id == "0" and pos.id == "1"
    # the split neuron is resolved in both children
    assert find_critical(neg) == []
    assert find_critical(pos) == []


def test_split_conserves_area():
    rng = np.random.default_rng(12)
    for _ in range(50):
        w = rng.normal(size=(1, 2))
        b = rng.uniform(-0.5, 0.5, size=1) - w.sum() / 2
        cell = square_cell(w, b)
        if find_critical(cell) != [0]:
            continue
        neg, pos = split_cell(cell, 0)
        total = sum(c.geometry.area() for c in (neg, pos) if c is not None)
        assert total == pytest.approx(1.0, rel=1e-10)


def test_critical_neurons_split_nonempty():
    """Cross-module consistency: every reported critical neuron really cuts
    the cell into two nonempty sides."""
    net = get_net("sphere_d2_w16")
    cell = collapse(root_cell(net), net)
    for neuron in find_critical(cell):
        neg, pos = split_cell(cell, neuron)
        assert neg is not None and pos is not None


# ---------------------------------------------------------------------------
# collapse: the direct-evaluation oracle


def test_collapse_identity_mask():
    net = get_net("octahedron")
    cell = root_cell(net)
    out = collapse(cell, net)
    assert np.allclose(out.map_w, net.layers[0].weights)
    assert np.allclose(out.map_b, net.layers[0].bias)
    assert out.layer == 1


def test_collapse_all_zero_mask():
    net = get_net("octahedron")
    cell = collapse(root_cell(net), net)
    cell.mask[:] = 0
    out = collapse(cell, net)
    assert np.all(out.map_w == 0)
    assert np.allclose(out.map_b, net.layers[1].bias)


def test_collapse_matches_direct_evaluation():
    """Walk part of the traversal; after every collapse, the cell map must
    equal the true pre-activations at interior points (within 1e-10)."""
    rng = np.random.default_rng(13)
    for name in ["octahedron", "box", "sphere_d2_w16", "circle2d_d2_w16"]:
        net = get_net(name)
        stack = [root_cell(net)]
        checked = 0
        while stack and checked < 60:
            cell = stack.pop()
            if cell.layer == net.n_layers:
                continue
            crit = find_critical(cell)
            if crit:
                neg, pos = split_cell(cell, crit[0])
                stack.extend(c for c in (neg, pos) if c is not None)
                continue
            new = collapse(cell, net)
            pts = sample_inside(new, rng, n=20)
            for p in pts:
                want = preactivations(net, p, new.layer)
                got = new.map_w @ p + new.map_b
                assert np.abs(got - want).max() <= 1e-10
            checked += 1
            stack.append(new)
        assert checked > 0


# ---------------------------------------------------------------------------
# whole-mesh invariants


@pytest.mark.parametrize("name", ["octahedron", "box", "sphere_d2_w16",
                                  "circle2d_d2_w16", "halfspace"])
def test_exactness_vertices_and_midpoints(name):
    net = get_net(name)
    _, _, mesh, _ = get_extraction(name)
    pts = [mesh.vertices]
    for (a, b) in mesh.edges():
        pts.append(((mesh.vertices[a] + mesh.vertices[b]) / 2.0)[None])
    vals = eval_batch(net, np.vstack(pts))
    assert np.abs(vals).max() <= 1e-7


def test_completeness_bisection_oracle():
    """Roots found by an independent sign-change bisection lie on the mesh."""
    net = get_net("sphere_d2_w16")
    _, _, mesh, _ = get_extraction("sphere_d2_w16")
    tm = tessellate(mesh, "fan0")
    rng = np.random.default_rng(14)
    roots = []
    while len(roots) < 500:
        a = rng.uniform(net.domain_lo, net.domain_hi, size=(3,))
        b = rng.uniform(net.domain_lo, net.domain_hi, size=(3,))
        fa, fb = eval_batch(net, np.stack([a, b]))
        if fa * fb >= 0:
            continue
        for _ in range(80):
            m = (a + b) / 2
            fm = eval_batch(net, m[None])[0]
            if fa * fm <= 0:
                b, fb = m, fm
            else:
                a, fa = m, fm
        roots.append((a + b) / 2)
    d = points_to_mesh_distance(np.array(roots), tm)
    assert d.max() <= 1e-6


def test_schedule_independence_small():
    meshes = []
    for batch in (1, 64, 4096):
        _, _, mesh, _ = get_extraction("octahedron", batch_size=batch)
        meshes.append(mesh)
    for m in meshes[1:]:
        assert np.array_equal(m.vertices, meshes[0].vertices)
        assert m.faces == meshes[0].faces


def test_memory_contract():
    for name in ["octahedron", "box", "sphere_d2_w16", "circle2d_d2_w16"]:
        net = get_net(name)
        _, stats, _, _ = get_extraction(name)
        assert stats.peak_live_cells <= 4096 * net.total_neurons


def test_memory_budget_error():
    net = get_net("sphere_d2_w16")
    with pytest.raises(MemoryBudgetError) as exc:
        extract(net, EngineConfig(memory_budget_bytes=10_000))
    assert exc.value.layer_reached >= 0


def test_patch_invariants():
    patches, _, _, _ = get_extraction("sphere_d2_w16")
    for p in patches[:200]:
        assert np.linalg.norm(p.normal) == pytest.approx(1.0, abs=1e-12)
        pts = p.polygon
        # planarity within 1e-10 against the best-fit plane
        q = pts - pts.mean(axis=0)
        dev = np.abs(q @ p.normal)
        assert dev.max() <= 1e-10
    ids = [p.cell_id for p in patches]
    assert ids == sorted(ids)
    assert len(set(ids)) == len(ids)


def test_stats_counters_consistent():
    _, stats, _, _ = get_extraction("sphere_d2_w16")
    d = stats.as_dict()
    assert d["cells_emitted"] <= d["cells_created"]
    assert all(v >= 0 for k, v in d.items() if k != "wall_time")
    assert set(d["wall_time"]) <= {"prune", "split", "collapse", "extract"}


def test_extract_mesh_convenience():
    mesh, stats = extract_mesh(get_net("octahedron"))
    assert mesh.n_faces == 8
    assert stats.cells_emitted == 8


def test_weld_examples():
    patches, _, _, _ = get_extraction("octahedron")
    single = weld(patches[:1])
    assert single.n_faces == 1
    empty = weld([])
    assert empty.is_empty()
