"""Exact-arithmetic toolkit for Voronoi parallelohedra of lattices.

Builds the Voronoi cell of Z^d under any positive definite rational Gram
matrix and verifies, in exact rational arithmetic, the structure theory of
free segments: belt conditions, Minkowski extensions and their Voronoi
metrics, metric dilatations, crosses, and direct-sum reducibility."""

from .exactgeom import (
    EmptyRegion, Face, GeometryError, Mat, NotFreeDirection, Polytope, Rat,
    Subspace, TheoremViolation, UnboundedRegion, Vec, VenkovViolation,
    affine_dim, dd_facets, dd_hull, hnf, inner, integer_kernel,
    is_positive_definite, lattice_points_within, orthogonal_complement,
    primitive_vector, project_along, saturate,
)
from .voronoi import (
    Belt, Cap, Cell, LatticeForm, VenkovReport, belts, cap,
    check_minkowski_venkov, faces, relevant_vectors, standard_vector,
    voronoi_cell,
)
from .delaunay import (
    DualCell, DualCellType, classify_dual_cell, closest_lattice_points,
    covering_radius_sq, dual_cell, fan_type,
)
from .freespace import (
    ABCSets, PerfectPlaneReport, PerfectSpace, ab_sets, check_lemma32,
    check_lemma33, check_lemma34, check_lemma35, check_lemma51,
    choose_layer_vector, is_free_segment, perfect_free_spaces,
    perfect_lines_in_plane,
)
from .extend import (
    ExtendedCell, MetricRecovery, ProjectedCell, SegmentSpec,
    is_parallelohedron, minkowski_extend, project_cell_along,
    recover_voronoi_metric, theorem41_check, theorem42_split,
)
from .structure import (
    Cross, Decomposition, DilationVector, GoodBadReport, PlaneAnalysis,
    TwofoldDilatation, check_corollary73, check_lemma72,
    check_theorem_cross, check_theorem_cross_reduction, decompose, dilate,
    find_cross, fn_set, good_bad_facets, lemma93_analyze,
    six_belt_components, twofold_dilatation,
)
from .campaign import CampaignConfig, CampaignReport, run_suite, sample_gram

__version__ = "0.1.0"
