"""Analytic zero level-set extraction from ReLU neural implicit functions,
with a Marching Cubes baseline and evaluation metrics."""

from .affine import AffineForm, RangeResult, bound_over_box, relu_affine
from .engine import (
    Cell,
    EngineConfig,
    SurfacePatch,
    TraversalStats,
    collapse,
    extract,
    extract_mesh,
    extract_patch,
    find_critical,
    prune,
    split_cell,
    weld,
)
from .errors import (
    AllPointsDivergedError,
    DegenerateKnotError,
    DegenerateTriangleError,
    EmptyMeshError,
    MemoryBudgetError,
    NetworkFormatError,
    NonPlanarFaceError,
    RelumeshError,
    ShapeMismatchError,
    TopologyError,
    UnsupportedActivationError,
)
from .geometry import (
    GeomTolerances,
    HalfSpaceCut,
    Polygon2,
    Polyhedron3,
    aabb,
    box_polygon,
    box_polyhedron,
    clip_polygon,
    clip_polyhedron,
)
from .mc import GridSpec, marching_cubes
from .mesh import Mesh, TriMesh, read_obj, weld_patches, write_obj
from .metrics import (
    MetricReport,
    TriangleQuality,
    point_triangle_distance,
    points_to_mesh_distance,
    project_to_zero_set,
    sample_surface,
    soft_precision,
    soft_recall,
    triangle_quality,
)
from .network import (
    Layer,
    Network,
    PwlSurrogate1D,
    eval_batch,
    eval_network,
    load_network,
    make_network,
    pe_to_relu_layers,
    prepend_positional_encoding,
    save_network,
    sinusoid_surrogate,
)
from .tessellation import tessellate

__version__ = "0.1.0"
