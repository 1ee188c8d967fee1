"""Triangulate the polygon faces of an analytic mesh three different ways
and compare triangle quality.

fan0 and strip keep the original vertex set and emit k-2 triangles per
k-gon; centroid adds one vertex per face and emits k triangles, trading
triangle count for slightly more even angles.
"""

from pathlib import Path

from relumesh import extract, load_network, tessellate, triangle_quality, weld

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

net = load_network(FIXTURES / "sphere_d2_w16.json")
patches, _ = extract(net)
mesh = weld(patches)

ks = [len(f) for f in mesh.faces]
print(f"polygon faces: {len(ks)} (vertex counts 3..{max(ks)})")
print(f"{'strategy':10s} {'tris':>6s} {'theta_min':>10s} {'theta_max':>10s} "
      f"{'skew':>7s} {'edge ratio':>11s}")
for strategy in ("fan0", "strip", "centroid"):
    tm = tessellate(mesh, strategy)
    q = triangle_quality(tm)
    print(f"{strategy:10s} {tm.n_triangles:6d} {q.theta_min_mean:10.2f} "
          f"{q.theta_max_mean:10.2f} {q.equiangle_skew_mean:7.3f} "
          f"{q.edge_ratio_mean:11.2f}")
