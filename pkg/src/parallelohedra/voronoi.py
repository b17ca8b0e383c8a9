"""Voronoi parallelohedra of lattices under arbitrary positive definite
quadratic forms.

Every lattice is canonicalized to Z^d; the geometry lives entirely in the
Gram matrix G, so an external basis B with an ambient form only enters when a
`LatticeForm` is built.  The cell of Z^d under G is

    P = {x : s^T G x <= s^T G s / 2 for every relevant vector s},

where the relevant (facet) vectors are found by the classical coset-minimum
characterization: s is relevant iff +-s are the unique minima of the coset
s + 2Z^d under G.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .exactgeom import (
    Face, Fraction as Rat, GeometryError, Mat, Polytope, Subspace, Vec,
    VenkovViolation, affine_dim, inner, is_positive_definite,
    halfspace_intersection_vertices, integer_kernel, lattice_points_within,
    primitive_vector, unit_vec, vsum, zero_vec,
)


@dataclass(frozen=True)
class LatticeForm:
    """The lattice Z^d together with a positive definite Gram matrix."""

    dim: int
    gram: Mat

    def __post_init__(self):
        if self.gram.nrows != self.dim or self.gram.ncols != self.dim:
            raise GeometryError("Gram matrix size differs from dim")
        if not is_positive_definite(self.gram):
            raise GeometryError("Gram matrix is not positive definite")

    @staticmethod
    def from_rows(rows) -> "LatticeForm":
        g = Mat(rows)
        return LatticeForm(g.nrows, g)

    @staticmethod
    def from_basis(basis_rows, ambient_form: Mat) -> "LatticeForm":
        """Canonicalize a lattice given by basis vectors (rows) under an
        ambient quadratic form: G[i][j] = b_i^T . Omega . b_j."""
        B = Mat(basis_rows)
        G = B @ ambient_form @ B.transpose()
        return LatticeForm(B.nrows, G)

    def norm_sq(self, v) -> Rat:
        return inner(self.gram, v, v)


def canonical_rep(v: Vec) -> Vec:
    """Canonical representative of the +-v facet vector class."""
    return primitive_vector(v) if not Vec(v).is_zero() else Vec(v)


@functools.lru_cache(maxsize=None)
def relevant_vectors(form: LatticeForm) -> tuple[Vec, ...]:
    """One canonical representative per +-class of facet vectors.

    A nonzero s is returned iff +-s are the unique G-minimal vectors of the
    coset s + 2Z^d.  Sorted by (norm, coordinates)."""
    d, G = form.dim, form.gram
    reps = []
    for bits in range(1, 1 << d):
        parity = tuple((bits >> i) & 1 for i in range(d))
        seed = Vec(parity)
        bound = inner(G, seed, seed)
        pts = lattice_points_within(G, zero_vec(d), bound, parity=parity)
        best = min(q for q, _ in pts)
        minima = [p for q, p in pts if q == best]
        if len(minima) == 2:
            reps.append((best, canonical_rep(minima[0])))
    reps.sort()
    return tuple(v for _, v in reps)


class Cell:
    """A Voronoi parallelohedron: the polytope plus the facet vector attached
    to each facet.  Facets come in opposite pairs: facet 2k is the class
    representative s_k, facet 2k+1 is -s_k."""

    __slots__ = ("form", "polytope", "facet_vectors", "_belts", "_cap_cache")

    def __init__(self, form: LatticeForm, polytope: Polytope,
                 facet_vectors: tuple[Vec, ...]):
        self.form = form
        self.polytope = polytope
        self.facet_vectors = facet_vectors
        self._belts = None
        self._cap_cache = {}

    @property
    def dim(self) -> int:
        return self.form.dim

    @property
    def gram(self) -> Mat:
        return self.form.gram

    @property
    def nfacets(self) -> int:
        return len(self.facet_vectors)

    def opposite(self, i: int) -> int:
        return i ^ 1

    def class_reps(self) -> tuple[Vec, ...]:
        return tuple(self.facet_vectors[i]
                     for i in range(0, self.nfacets, 2))

    def facet_class(self, i: int) -> Vec:
        return canonical_rep(self.facet_vectors[i])

    def facet_normal(self, i: int) -> Vec:
        """Outward normal n(F) = G s(F), scaled primitive."""
        return primitive_vector(self.gram.matvec(self.facet_vectors[i]))

    def facet_direction(self, i: int) -> Subspace:
        """Direction space of the facet hyperplane {x : s^T G x = const}."""
        n = self.gram.matvec(self.facet_vectors[i])
        return Subspace.span(Mat([n]).nullspace(), self.dim)

    def facet_parallel_to(self, i: int, v) -> bool:
        return self.gram.matvec(self.facet_vectors[i]).dot(v) == 0

    def indices_of_class(self, rep: Vec) -> tuple[int, int]:
        i = self.facet_vectors.index(rep)
        return i, self.opposite(i)

    def __repr__(self):
        return (f"Cell(d={self.dim}, facets={self.nfacets}, "
                f"vertices={self.polytope.nvertices})")


@functools.lru_cache(maxsize=None)
def voronoi_cell(form: LatticeForm) -> Cell:
    """Construct the Voronoi cell of Z^d under the Gram matrix, with exact
    facet/vertex data.  Every relevant-vector halfspace is a facet."""
    G = form.gram
    reps = relevant_vectors(form)
    halfspaces = []
    vectors = []
    for s in reps:
        b = inner(G, s, s) / 2
        n = G.matvec(s)
        halfspaces.append((n, b))
        vectors.append(s)
        halfspaces.append((-n, b))
        vectors.append(-s)
    poly = Polytope.from_halfspaces(halfspaces)
    if poly.nfacets != len(halfspaces):
        raise GeometryError("redundant relevant vector; enumeration is wrong")
    # from_halfspaces canonicalizes but preserves order, so vectors align
    return Cell(form, poly, tuple(vectors))


def faces(cell: Cell, k: int) -> tuple[Face, ...]:
    """All k-faces of the cell (0 <= k <= d-1)."""
    return cell.polytope.faces(k)


def face_affine_hull(cell: Cell, face: Face) -> tuple[Vec, Subspace]:
    """(point, direction space) of a face's affine hull."""
    pts = cell.polytope.face_vertices(face)
    base = pts[0]
    return base, Subspace.span([p - base for p in pts[1:]], cell.dim)


def face_centroid(cell: Cell, face: Face) -> Vec:
    pts = cell.polytope.face_vertices(face)
    return vsum(pts, cell.dim) * Fraction(1, len(pts))


@dataclass(frozen=True)
class Belt:
    """All facets parallel to a common (d-2)-face, in cyclic order around
    the quotient plane.  Venkov/Minkowski: the size is 4 or 6."""

    direction: Subspace
    facet_indices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.facet_indices)


def _belt_classes(poly: Polytope):
    """Groups of facet indices by parallelism class of the (d-2)-faces.

    Works for any bounded full-dimensional polytope.  Returns a list of
    (direction Subspace, sorted facet index tuple)."""
    d = poly.dim
    if d < 2:
        return []
    classes = {}
    for face in poly.faces(d - 2):
        pts = [poly.vertices[i] for i in face.vertex_ids()]
        base = pts[0]
        direction = Subspace.span([p - base for p in pts[1:]], d)
        if direction in classes:
            continue
        members = []
        for i, (n, b) in enumerate(poly.halfspaces):
            if all(n.dot(bvec) == 0 for bvec in direction.basis):
                members.append(i)
        classes[direction] = tuple(members)
    return sorted(classes.items(),
                  key=lambda kv: kv[0].basis)


def _order_belt(poly: Polytope, direction: Subspace, members) -> tuple[int, ...]:
    """Cyclic order of the belt facets, by angle of their normals in the
    2-dimensional annihilator of the belt direction."""
    if direction.rank:
        ann = integer_kernel(Mat(direction.basis))
    else:
        ann = tuple(unit_vec(poly.dim, i) for i in range(poly.dim))
    U = Mat(ann).transpose()
    import functools as _ft

    flat = []
    for i in members:
        n = poly.halfspaces[i][0]
        coeff = U.solve(n)
        if coeff is None:
            raise GeometryError("belt normal outside annihilator plane")
        flat.append((coeff[0], coeff[1], i))

    def half(t):
        return 0 if (t[1] > 0 or (t[1] == 0 and t[0] > 0)) else 1

    def cmp(a, b):
        ha, hb = half(a), half(b)
        if ha != hb:
            return ha - hb
        cr = a[0] * b[1] - a[1] * b[0]
        return -1 if cr > 0 else (1 if cr < 0 else 0)

    flat.sort(key=_ft.cmp_to_key(cmp))
    return tuple(t[2] for t in flat)


def belts(cell: Cell) -> tuple[Belt, ...]:
    """One belt per parallelism class of (d-2)-faces.  Raises
    VenkovViolation if some belt has a size other than 4 or 6."""
    if cell._belts is not None:
        return cell._belts
    out = []
    for direction, members in _belt_classes(cell.polytope):
        if len(members) not in (4, 6):
            raise VenkovViolation(
                f"belt of size {len(members)}; not a parallelohedron")
        out.append(Belt(direction, _order_belt(cell.polytope, direction,
                                               members)))
    cell._belts = tuple(out)
    return cell._belts


def six_belts(cell: Cell) -> tuple[Belt, ...]:
    return tuple(b for b in belts(cell) if b.size == 6)


@dataclass(frozen=True)
class VenkovReport:
    """Outcome of the Minkowski-Venkov conditions on a convex body."""

    body_centrally_symmetric: bool
    facets_centrally_symmetric: bool
    belts_ok: bool
    belt_sizes: tuple[int, ...]
    bad_facets: tuple[int, ...]

    @property
    def passes(self) -> bool:
        return (self.body_centrally_symmetric
                and self.facets_centrally_symmetric and self.belts_ok)


def check_minkowski_venkov(poly: Polytope) -> VenkovReport:
    """Central symmetry of the body, central symmetry of each facet, and all
    belts of size 4 or 6.  By Venkov's theorem the three conditions together
    certify that the body tiles space by translations."""
    body = poly.is_centrally_symmetric()
    bad = []
    for i, mask in enumerate(poly.facet_masks):
        pts = [poly.vertices[j] for j in _face_ids(mask)]
        c2 = vsum(pts, poly.dim) * Fraction(2, len(pts))
        sset = set(pts)
        if not all((c2 - p) in sset for p in pts):
            bad.append(i)
    sizes = tuple(len(members) for _, members in _belt_classes(poly))
    belts_ok = all(s in (4, 6) for s in sizes)
    return VenkovReport(body, not bad, belts_ok, sizes, tuple(bad))


def _face_ids(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def standard_vector(cell: Cell, face: Face) -> Vec | None:
    """The lattice vector t with face = P & (P + t), if the face is standard.

    The candidate is forced: t/2 must be the face's center of symmetry, so
    t = 2 * centroid(face).  The equality of P & (P+t) with the face is then
    checked exactly via a halfspace intersection."""
    d = cell.dim
    if face.dim == d - 1:
        fid = next(iter(face.facet_ids))
        return cell.facet_vectors[fid]
    c = face_centroid(cell, face)
    t = c * 2
    if not t.is_integer():
        return None
    shifted = [(n, b + n.dot(t)) for n, b in cell.polytope.halfspaces]
    pts = halfspace_intersection_vertices(
        list(cell.polytope.halfspaces) + shifted)
    want = sorted(cell.polytope.face_vertices(face))
    return t if sorted(pts) == want else None


@dataclass(frozen=True)
class Cap:
    """Facets whose outward normal points against a direction: the facets F
    with e . n(F) < 0, n(F) = G s(F)."""

    direction: Vec
    facet_indices: frozenset


def cap(cell: Cell, e) -> Cap:
    e = Vec(e)
    if e.is_zero():
        raise GeometryError("cap direction must be nonzero")
    ids = frozenset(
        i for i in range(cell.nfacets)
        if e.dot(cell.gram.matvec(cell.facet_vectors[i])) < 0)
    return Cap(e, ids)


def cell_volume(cell: Cell) -> Rat:
    return cell.polytope.volume()


def facet_vectors_generate_lattice(cell: Cell) -> bool:
    """The facet vectors of a parallelohedron generate its lattice."""
    from .exactgeom import hnf
    basis = hnf(cell.class_reps())
    if len(basis) != cell.dim:
        return False
    return abs(Mat(basis).det()) == 1
