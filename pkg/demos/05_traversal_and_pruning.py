"""Show what range-analysis pruning buys during the cell traversal.

The engine walks the network depth first, splitting cells at critical
neurons. Pruning discards cells whose bounded output range excludes zero, so
only regions near the surface are refined; disabling it forces the full
linear-region subdivision of the domain.
"""

import time
from pathlib import Path

from relumesh import EngineConfig, extract, load_network, weld

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

net = load_network(FIXTURES / "two_spheres_d3_w32.json")

for label, cfg in (("pruned", EngineConfig()),
                   ("no pruning", EngineConfig(disable_pruning=True))):
    t0 = time.perf_counter()
    patches, stats = extract(net, cfg)
    dt = time.perf_counter() - t0
    mesh = weld(patches)
    comps = mesh.connected_components()
    print(f"{label:12s} {dt:6.1f}s  cells {stats.cells_created:7d}  "
          f"pruned {stats.cells_pruned:6d}  patches {len(patches):5d}  "
          f"components {len(comps)}")
    for phase, t in sorted(stats.wall_time.items()):
        print(f"{'':12s}   {phase:<9s} {t:6.1f}s")
