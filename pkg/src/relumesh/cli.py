"""Command-line front end: extract, mc, metrics, tessellate, info."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import mc as mc_mod
from .engine import EngineConfig, extract, weld
from .errors import RelumeshError
from .mesh import mesh_to_trimesh, read_obj, write_obj
from .metrics import (
    MetricReport,
    sample_surface,
    soft_precision,
    soft_recall,
    triangle_quality,
)
from .network import load_network
from .tessellation import STRATEGIES, tessellate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relumesh",
                                description=__doc__.strip())
    sub = p.add_subparsers(dest="command", required=True)

    ext = sub.add_parser("extract", help="analytic level-set extraction")
    ext.add_argument("--net", required=True)
    ext.add_argument("--out", required=True)
    ext.add_argument("--strategy", choices=STRATEGIES, default=None,
                     help="tessellate polygon faces before writing")
    ext.add_argument("--no-prune", action="store_true")
    ext.add_argument("--batch", type=int, default=4096)
    ext.add_argument("--stats", default=None, help="write stats JSON here")

    mcp = sub.add_parser("mc", help="marching cubes baseline")
    mcp.add_argument("--net", required=True)
    mcp.add_argument("--res", type=int, required=True)
    mcp.add_argument("--out", required=True)

    met = sub.add_parser("metrics", help="soft precision/recall + quality")
    met.add_argument("--net", required=True)
    met.add_argument("--mesh", required=True)
    met.add_argument("--ref-source", default=None,
                     help="'mc:R' (project a res-R MC mesh sampling) or "
                          "'fixture' (sample the mesh under test)")
    met.add_argument("--samples", type=int, default=2 ** 20)
    met.add_argument("--ref-samples", type=int, default=2 ** 12)
    met.add_argument("--seed", type=int, default=0)
    met.add_argument("--out", default=None)

    tes = sub.add_parser("tessellate", help="triangulate polygon faces")
    tes.add_argument("--in", dest="infile", required=True)
    tes.add_argument("--strategy", choices=STRATEGIES, required=True)
    tes.add_argument("--out", required=True)

    inf = sub.add_parser("info", help="print network shape summary")
    inf.add_argument("--net", required=True)
    return p


def _cmd_extract(args) -> int:
    net = load_network(args.net)
    if args.batch < 1:
        raise argparse.ArgumentTypeError("--batch must be >= 1")
    cfg = EngineConfig(batch_size=args.batch, disable_pruning=args.no_prune)
    t0 = time.perf_counter()
    patches, stats = extract(net, cfg)
    mesh = weld(patches)
    elapsed = time.perf_counter() - t0
    if not patches:
        print("warning: no surface in domain", file=sys.stderr)
    if args.strategy:
        write_obj(tessellate(mesh, args.strategy), args.out)
    else:
        write_obj(mesh, args.out)
    if args.stats:
        doc = stats.as_dict()
        doc["total_wall_time"] = elapsed
        with open(args.stats, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    print(f"extracted {mesh.n_faces} faces, {mesh.n_vertices} vertices "
          f"in {elapsed:.2f}s ({stats.cells_created} cells, "
          f"{stats.cells_pruned} pruned)")
    return EXIT_OK


def _cmd_mc(args) -> int:
    net = load_network(args.net)
    if args.res < 2:
        raise argparse.ArgumentTypeError("--res must be >= 2")
    grid = mc_mod.GridSpec.for_network(net, args.res)
    mesh = mc_mod.marching_cubes(net, grid)
    write_obj(mesh, args.out)
    print(f"marching cubes res {args.res}: {mesh.n_triangles} triangles")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    net = load_network(args.net)
    mesh = read_obj(args.mesh)
    t0 = time.perf_counter()
    sp = soft_precision(net, mesh, n_samples=args.samples, seed=args.seed)
    sr = None
    tq = {}
    tri_count = sum(max(len(f) - 2, 1) for f in mesh.faces)
    if mesh.dim == 3 and mesh.faces:
        if args.ref_source:
            if args.ref_source.startswith("mc:"):
                res = int(args.ref_source.split(":", 1)[1])
                ref_mesh = mc_mod.marching_cubes(
                    net, mc_mod.GridSpec.for_network(net, res))
                ref = sample_surface(ref_mesh, args.ref_samples,
                                     seed=args.seed + 1)
            elif args.ref_source == "fixture":
                ref = sample_surface(mesh, args.ref_samples,
                                     seed=args.seed + 1)
            else:
                raise argparse.ArgumentTypeError(
                    f"bad --ref-source {args.ref_source!r}")
            sr = soft_recall(net, mesh, ref)
        if all(len(f) == 3 for f in mesh.faces):
            tq = triangle_quality(mesh_to_trimesh(mesh)).summary()
    report = MetricReport(soft_precision=sp, soft_recall=sr, tri_quality=tq,
                          triangle_count=tri_count,
                          runtime_s=time.perf_counter() - t0)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    print(report.format_table(label=args.mesh.rsplit("/", 1)[-1]))
    return EXIT_OK


def _cmd_tessellate(args) -> int:
    mesh = read_obj(args.infile)
    write_obj(tessellate(mesh, args.strategy), args.out)
    return EXIT_OK


def _cmd_info(args) -> int:
    net = load_network(args.net)
    widths = [l.n_out for l in net.layers]
    shape = "→".join(str(w) for w in widths)
    print(f"input_dim {net.input_dim}, layers [{shape}], "
          f"params {net.n_params}")
    return EXIT_OK


_COMMANDS = {
    "extract": _cmd_extract,
    "mc": _cmd_mc,
    "metrics": _cmd_metrics,
    "tessellate": _cmd_tessellate,
    "info": _cmd_info,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RelumeshError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
