"""Fixture generation entry point: writes the golden network files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .handcrafted import make_handcrafted
from .train import FixtureSpec, TrainingConfig, train_fixture

HANDCRAFTED = ["octahedron", "halfspace", "box", "const_pos", "halfplane2d"]


def trained_specs():
    return {
        "sphere_d2_w16": FixtureSpec(
            shape="sphere", depth=2, width=16,
            training=TrainingConfig(seed=1)),
        "sphere_d3_w32": FixtureSpec(
            shape="sphere", depth=3, width=32,
            training=TrainingConfig(seed=5, iters=9000)),
        "two_spheres_d3_w32": FixtureSpec(
            shape="two_spheres", depth=3, width=32,
            training=TrainingConfig(seed=2, iters=9000)),
        "circle2d_d2_w16": FixtureSpec(
            shape="circle2d", depth=2, width=16,
            training=TrainingConfig(seed=3)),
        "circle2d_pe_d2_w4": FixtureSpec(
            shape="circle2d", depth=2, width=4, pe_freqs=[float(np.pi)],
            training=TrainingConfig(seed=4, iters=9000),
            surface_tol=1e-2),
    }


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="sdftrainer", description=__doc__)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--only", nargs="*", default=None,
                   help="subset of fixture names to (re)generate")
    args = p.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    specs = trained_specs()
    names = args.only if args.only else HANDCRAFTED + list(specs)
    for name in names:
        path = out / f"{name}.json"
        if name in HANDCRAFTED:
            make_handcrafted(name, path)
            print(f"wrote {path} (handcrafted)")
        elif name in specs:
            doc = train_fixture(specs[name], path)
            print(f"wrote {path} (trained, surface mean |f| "
                  f"{doc['metadata']['surface_mean_abs_f']:.2e})")
        else:
            print(f"unknown fixture {name!r}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
