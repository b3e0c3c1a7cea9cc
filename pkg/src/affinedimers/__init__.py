"""Exact geometry of affine dimers: oriented line arrangements on the
2-torus, admissibility checking, and constructions for convex lattice
polygons.  All arithmetic is integer or rational; nothing here floats."""

from .arrangement import (
    FACE_CCW,
    FACE_CW,
    FACE_X,
    AdmissibilityReport,
    Arrangement,
    CountSummary,
    GeneralPositionReport,
    Matching,
    Subdivision,
    TorusLine,
    build_subdivision,
    check_admissible,
    check_general_position,
    counts,
    normal_covector,
    pair_intersections,
    perfect_matching,
    surface_type,
)
from .constructions import (
    BASE_TRIANGLE_CLASSES,
    BASE_TRIANGLE_OFFSETS,
    OFFSET_DENOMINATOR,
    SublatticeSpec,
    add_parallel_pair,
    apply_linear_to_dimer,
    double_everything,
    lift_sublattice,
    triangle_dimer,
)
from .lattice import (
    LatticePolygon,
    Mat2,
    PolygonMetrics,
    angle_sort,
    canonical_classes,
    canonical_polygon,
    classes_from_polygon,
    enumerate_polygons,
    equivalent,
    polygon_from_classes,
    polygon_metrics,
    validate_classes,
)
from .moduli import (
    ClassificationRecord,
    ClassificationReport,
    DegeneracyLocus,
    ModuliPoint,
    ParallelConstraint,
    SearchOutcome,
    TripleConstraint,
    VolumeEstimate,
    build_degeneracy_locus,
    classify_genus,
    estimate_admissible_volume,
    is_degenerate,
    mesh_search,
    parallelogram_volume_exact,
    random_search,
    realize,
    triangle_volume_exact,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "Arrangement",
    "BASE_TRIANGLE_CLASSES",
    "BASE_TRIANGLE_OFFSETS",
    "ClassificationRecord",
    "ClassificationReport",
    "CountSummary",
    "DegeneracyLocus",
    "FACE_CCW",
    "FACE_CW",
    "FACE_X",
    "GeneralPositionReport",
    "LatticePolygon",
    "Mat2",
    "Matching",
    "ModuliPoint",
    "OFFSET_DENOMINATOR",
    "ParallelConstraint",
    "PolygonMetrics",
    "SearchOutcome",
    "SublatticeSpec",
    "Subdivision",
    "TorusLine",
    "TripleConstraint",
    "VolumeEstimate",
    "add_parallel_pair",
    "angle_sort",
    "apply_linear_to_dimer",
    "build_degeneracy_locus",
    "build_subdivision",
    "canonical_classes",
    "canonical_polygon",
    "check_admissible",
    "check_general_position",
    "classes_from_polygon",
    "classify_genus",
    "counts",
    "double_everything",
    "enumerate_polygons",
    "equivalent",
    "estimate_admissible_volume",
    "is_degenerate",
    "lift_sublattice",
    "mesh_search",
    "normal_covector",
    "pair_intersections",
    "parallelogram_volume_exact",
    "perfect_matching",
    "polygon_from_classes",
    "polygon_metrics",
    "random_search",
    "realize",
    "surface_type",
    "triangle_dimer",
    "triangle_volume_exact",
    "validate_classes",
]
