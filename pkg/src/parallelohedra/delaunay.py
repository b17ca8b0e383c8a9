"""Lattice Delaunay machinery: exact closest-vector enumeration, dual cells
of Voronoi faces, classification of low-dimensional dual cells, and the
covering radius.

The dual cell D(F) of a face F collects the lattice points whose translated
cells contain F; it is computed as the set of G-nearest lattice points to the
barycenter of F, which is guaranteed to be a relative-interior point."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .exactgeom import (
    GeometryError, Mat, Polytope, Subspace, Vec, affine_dim, inner,
    lattice_points_within, saturate, vsum, zero_vec,
)
from .voronoi import Cell, Face, LatticeForm, face_centroid, faces


class DualCellType(enum.Enum):
    SEGMENT = "segment"
    RECTANGLE = "rectangle"
    TRIANGLE = "triangle"
    TETRAHEDRON = "tetrahedron"
    OCTAHEDRON = "octahedron"
    PYRAMID4 = "pyramid4"
    PRISM3 = "prism3"
    PARALLELEPIPED = "parallelepiped"


@dataclass(frozen=True)
class DualCell:
    """Lattice points equidistant from a center, with no lattice point
    strictly closer (the empty-sphere property)."""

    points: tuple[Vec, ...]
    circumcenter: Vec
    circumradius_sq: Fraction
    dim: int


def closest_lattice_points(form: LatticeForm, x) -> tuple[Fraction, tuple[Vec, ...]]:
    """(min squared distance, all G-nearest lattice points to x), exact."""
    x = Vec(x)
    z0 = Vec(round(c) for c in x)
    bound = inner(form.gram, z0 - x, z0 - x)
    pts = lattice_points_within(form.gram, x, bound)
    best = min(q for q, _ in pts)
    return best, tuple(sorted(p for q, p in pts if q == best))


def dual_cell(cell: Cell, face: Face) -> DualCell:
    """D(face): the lattice points whose cells contain the face, obtained at
    the exact barycenter of the face.  dim D = d - dim(face)."""
    center = face_centroid(cell, face)
    dist_sq, pts = closest_lattice_points(cell.form, center)
    dc = DualCell(pts, center, dist_sq, affine_dim(pts))
    if dc.dim != cell.dim - face.dim:
        raise GeometryError("dual cell dimension mismatch")
    return dc


def _hull_facet_count(points) -> int:
    """Facet count of the hull of a full-rank-in-its-span point set, computed
    in exact coordinates on the span."""
    pts = [Vec(p) for p in points]
    base = pts[0]
    diffs = [p - base for p in pts[1:]]
    basis = saturate(diffs, len(base))
    if not basis:
        raise GeometryError("degenerate dual cell")
    U = Mat(basis).transpose()
    coords = []
    for p in pts:
        c = U.solve(p - base)
        if c is None:
            raise GeometryError("point outside dual cell span")
        coords.append(c)
    return Polytope.from_points(coords).nfacets


def classify_dual_cell(dc: DualCell) -> DualCellType:
    """Combinatorial type of a 1-, 2- or 3-dimensional dual cell.

    Dimension 3 distinguishes the octahedron from the triangular prism by
    hull facet count (8 vs 5); both have six vertices."""
    n = len(dc.points)
    if dc.dim == 1:
        if n == 2:
            return DualCellType.SEGMENT
    elif dc.dim == 2:
        if n == 3:
            return DualCellType.TRIANGLE
        if n == 4:
            return DualCellType.RECTANGLE
    elif dc.dim == 3:
        if n == 4:
            return DualCellType.TETRAHEDRON
        if n == 5:
            return DualCellType.PYRAMID4
        if n == 8:
            return DualCellType.PARALLELEPIPED
        if n == 6:
            fc = _hull_facet_count(dc.points)
            if fc == 8:
                return DualCellType.OCTAHEDRON
            if fc == 5:
                return DualCellType.PRISM3
            raise GeometryError(f"6-point 3-cell with {fc} hull facets")
    else:
        raise GeometryError(f"unsupported dual cell dimension {dc.dim}")
    raise GeometryError(
        f"dual {dc.dim}-cell with {n} points matches no known type")


def fan_type(cell: Cell, face: Face) -> DualCellType:
    """Type of the tiling fan around a (d-2)- or (d-3)-face, read off from
    the dual cell.  For a (d-2)-face: rectangle iff four-belt iff standard."""
    if face.dim not in (cell.dim - 2, cell.dim - 3):
        raise GeometryError("fan classification needs a (d-2)- or (d-3)-face")
    return classify_dual_cell(dual_cell(cell, face))


def covering_radius_sq(form: LatticeForm) -> Fraction:
    """Squared radius of the largest empty sphere: attained at a vertex of
    the Voronoi cell."""
    from .voronoi import voronoi_cell
    cell = voronoi_cell(form)
    return max(inner(form.gram, v, v) for v in cell.polytope.vertices)


def delaunay_cells_at_origin(form: LatticeForm):
    """The full-dimensional dual cells around the origin's Voronoi cell: one
    per vertex of the cell, deduplicated over lattice translation.

    Returns a list of DualCell with points translated so the lexicographic
    minimum is at the origin."""
    from .voronoi import voronoi_cell
    cell = voronoi_cell(form)
    seen = {}
    for face in faces(cell, 0):
        dc = dual_cell(cell, face)
        t = min(dc.points)
        key = tuple(sorted(p - t for p in dc.points))
        if key not in seen:
            seen[key] = DualCell(tuple(sorted(p - t for p in dc.points)),
                                 dc.circumcenter - t, dc.circumradius_sq,
                                 dc.dim)
    return sorted(seen.values(), key=lambda d: d.points)
