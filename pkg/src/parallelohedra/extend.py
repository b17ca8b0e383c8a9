"""Minkowski extension of a Voronoi cell by a free segment, verification
that the result tiles, and exact recovery of a metric that makes the
extended body a Voronoi cell again.

The extension P + I is built on vertices (every vertex of P shifted both
ways along the segment); its tiling lattice is Z(A u B) + Z(t + e) where t
is the layer vector and e the full segment translation.  Each facet of P + I
is tracked back to its origin in P: a cap facet translated by +-e/1, a
parallel facet widened in place, or a semi-shaded (d-2)-face extruded to a
full facet."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .exactgeom import (
    GeometryError, Mat, NotFreeDirection, Polytope, Subspace, TheoremViolation,
    Vec, hnf, inner, is_positive_definite, primitive_ray, primitive_vector,
    saturate, unit_vec, zero_vec,
)
from .voronoi import (
    Cell, LatticeForm, check_minkowski_venkov, faces, relevant_vectors,
    voronoi_cell,
)
from .freespace import ABCSets, ab_sets, choose_layer_vector, is_free_segment


@dataclass(frozen=True)
class SegmentSpec:
    """A centered segment [-h u, +h u] with u a primitive integer direction.
    Lengths are coordinate lengths; no metric is involved."""

    direction: Vec
    half_length: Fraction

    def __post_init__(self):
        direction = Vec(self.direction)
        half = Fraction(self.half_length)
        if half <= 0:
            raise GeometryError("half_length must be positive")
        prim = primitive_vector(direction)
        k = next(i for i, c in enumerate(prim) if c)
        scale = abs(direction[k] / prim[k])
        object.__setattr__(self, "direction", prim)
        object.__setattr__(self, "half_length", half * scale)

    @staticmethod
    def of(direction, half_length) -> "SegmentSpec":
        return SegmentSpec(Vec(direction), Fraction(half_length))

    @property
    def endpoint(self) -> Vec:
        return self.direction * self.half_length

    @property
    def translation(self) -> Vec:
        """e = 2x: the lattice shift contributed by the full segment."""
        return self.direction * (2 * self.half_length)


@dataclass(frozen=True)
class FacetProvenance:
    kind: str                  # "translated" | "parallel" | "semi_shaded"
    source_vector: Vec         # facet vector (or standard vector) in P
    shift_sign: int            # +1 / -1 for translated facets, else 0
    facet_vector: Vec          # facet vector in the extended tiling


@dataclass(frozen=True)
class ExtendedCell:
    cell: Cell
    segment: SegmentSpec
    polytope: Polytope
    lattice_rows: tuple[Vec, ...]
    provenance: tuple[FacetProvenance, ...]   # aligned with polytope facets
    abc: ABCSets
    layer_vector: Vec

    def lattice_matrix(self) -> Mat:
        return Mat(self.lattice_rows)

    def covolume(self) -> Fraction:
        return abs(self.lattice_matrix().det())

    def provenance_counts(self) -> dict:
        out = {"translated": 0, "parallel": 0, "semi_shaded": 0}
        for p in self.provenance:
            out[p.kind] += 1
        return out


def in_lattice(lattice_rows, v) -> bool:
    """Exact membership of v in the lattice generated by the rows."""
    L = Mat(lattice_rows)
    coeff = L.transpose().solve(Vec(v))
    return coeff is not None and coeff.is_integer()


def minkowski_extend(cell: Cell, seg: SegmentSpec) -> ExtendedCell:
    """P + I for a free segment I, with lattice and facet provenance.

    The provenance is cross-validated against the A/B/cap partition computed
    on P; any mismatch means one of the two routes is wrong and raises."""
    u = seg.direction
    if not is_free_segment(cell, u):
        raise NotFreeDirection(f"direction {tuple(u)} is not free")
    ab = ab_sets(cell, u)
    t = choose_layer_vector(cell, u, ab)
    x = seg.endpoint
    e = seg.translation
    G = cell.gram
    Gu = G.matvec(u)

    pts = [v + x for v in cell.polytope.vertices]
    pts += [v - x for v in cell.polytope.vertices]
    poly = Polytope.from_points(pts)

    where: dict[Vec, list] = {}
    for i, v in enumerate(cell.polytope.vertices):
        where.setdefault(v + x, []).append((i, +1))
        where.setdefault(v - x, []).append((i, -1))

    facet_by_normal = {primitive_ray(n): i
                       for i, (n, b) in enumerate(cell.polytope.halfspaces)}
    ridge_by_vertset = {frozenset(f.vertex_ids()): f
                        for f in faces(cell, cell.dim - 2)}

    prov = []
    for fidx, (n2, b2) in enumerate(poly.halfspaces):
        key = primitive_ray(n2)
        fid = facet_by_normal.get(key)
        if fid is not None:
            s = cell.facet_vectors[fid]
            sign = Gu.dot(s)
            if sign == 0:
                prov.append(FacetProvenance("parallel", s, 0, s))
            elif sign > 0:
                prov.append(FacetProvenance("translated", s, +1, s + e))
            else:
                prov.append(FacetProvenance("translated", s, -1, s - e))
            continue
        # new facet: a semi-shaded (d-2)-face extruded to a prism, so every
        # vertex of the source face appears shifted both ways
        plus, minus = set(), set()
        for vid in _mask_ids(poly.facet_masks[fidx]):
            for orig, sign in where[poly.vertices[vid]]:
                (plus if sign > 0 else minus).add(orig)
        if plus != minus:
            raise GeometryError("new facet is not a prism over a (d-2)-face")
        face = ridge_by_vertset.get(frozenset(plus))
        if face is None:
            raise GeometryError("extended facet is neither a facet nor "
                                "a (d-2)-face of P")
        from .voronoi import face_centroid
        s = face_centroid(cell, face) * 2
        if s not in ab.A:
            raise GeometryError("extruded face is not semi-shaded")
        prov.append(FacetProvenance("semi_shaded", Vec(s), 0, Vec(s)))

    semi = {p.source_vector for p in prov if p.kind == "semi_shaded"}
    par = {p.source_vector for p in prov if p.kind == "parallel"}
    trans = {p.source_vector for p in prov if p.kind == "translated"}
    if semi != set(ab.A) or par != set(ab.B) or trans != set(
            ab.C) | {-c for c in ab.C}:
        raise GeometryError("facet census of P+I disagrees with A/B/C")

    rows = list(hnf(list(ab.A) + list(ab.B))) + [t + e]
    for p in prov:
        if not in_lattice(rows, p.facet_vector):
            raise GeometryError("extended facet vector outside the lattice")
    vol = poly.volume()
    covol = abs(Mat(rows).det())
    if vol != covol:
        raise GeometryError(f"volume {vol} differs from covolume {covol}")
    return ExtendedCell(cell, seg, poly, tuple(rows), tuple(prov), ab, t)


def _mask_ids(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def is_parallelohedron(poly: Polytope, lattice_rows) -> bool:
    """Minkowski-Venkov conditions plus exact volume = covolume; by Venkov's
    theorem this certifies a face-to-face lattice tiling."""
    L = Mat(list(lattice_rows))
    if L.nrows != poly.dim or L.det() == 0:
        return False
    if poly.volume() != abs(L.det()):
        return False
    return check_minkowski_venkov(poly).passes


@dataclass(frozen=True)
class MetricRecovery:
    status: str                       # "found" | "infeasible"
    gram: Mat | None                  # metric X, canonically scaled
    multipliers: tuple | None         # lambda_f > 0 per facet
    nullity: int                      # dimension of the constraint kernel

    @property
    def found(self) -> bool:
        return self.status == "found"


def _symmetric_basis(d: int):
    out = []
    for i in range(d):
        for j in range(i, d):
            rows = [[Fraction(0)] * d for _ in range(d)]
            rows[i][j] = Fraction(1)
            rows[j][i] = Fraction(1)
            out.append(Mat(rows))
    return out


def facet_vectors_from_lattice(poly: Polytope, lattice_rows):
    """Facet vector of each facet read off the geometry: twice the facet
    centroid, which must be a lattice vector."""
    out = []
    for mask in poly.facet_masks:
        ids = _mask_ids(mask)
        c = sum((poly.vertices[i] for i in ids[1:]),
                start=poly.vertices[ids[0]]) * Fraction(2, len(ids))
        if not in_lattice(lattice_rows, c):
            raise GeometryError(
                "facet center times two is not a lattice vector")
        out.append(Vec(c))
    return tuple(out)


def _candidate_coefficients(r: int, max_depth: int):
    """Deterministic rational grid over the coefficient space, coarse to
    fine.  Scaling duplicates are skipped; both signs are kept because X and
    -X cannot both be positive definite."""
    seen = set()
    for depth in range(max_depth + 1):
        n = 1 << depth
        rng = [Fraction(i, n) for i in range(-n, n + 1)]
        for combo in product(rng, repeat=r):
            if all(c == 0 for c in combo):
                continue
            den = 1
            for c in combo:
                den = den * c.denominator // _gcd(den, c.denominator)
            ints = tuple(int(c * den) for c in combo)
            g = 0
            for c in ints:
                g = _gcd(g, abs(c))
            key = tuple(c // g for c in ints)
            if key in seen:
                continue
            seen.add(key)
            yield key
        if r == 1 and depth == 0:
            return


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def recover_voronoi_metric(poly: Polytope, lattice_rows,
                           facet_vectors=None, max_depth: int = 6
                           ) -> MetricRecovery:
    """Search for a positive definite X making `poly` the Voronoi cell of
    the lattice.

    Constraints: X s_f must be positively parallel to the outward facet
    normal n_f for every facet.  The homogeneous system is solved exactly;
    positive definite points of its kernel are searched on a rational grid
    (exhaustive in sign sectors up to the refinement depth), and every hit is
    verified by recomputing the Voronoi cell and comparing vertex sets
    exactly.  An infeasible outcome is reported, never fabricated."""
    d = poly.dim
    rows_l = [Vec(r) for r in lattice_rows]
    if facet_vectors is None:
        facet_vectors = facet_vectors_from_lattice(poly, rows_l)
    basis = _symmetric_basis(d)
    eqs = []
    seen_classes = set()
    for idx, (n, b) in enumerate(poly.halfspaces):
        s = facet_vectors[idx]
        if n.dot(s) != 2 * b:
            raise GeometryError("facet vector midpoint misses the facet "
                                "hyperplane; wrong pairing")
        key = primitive_vector(s)
        if key in seen_classes:
            continue
        seen_classes.add(key)
        for i in range(d):
            for j in range(i + 1, d):
                eqs.append(Vec([ (E.matvec(s))[i] * n[j]
                                 - (E.matvec(s))[j] * n[i]
                                 for E in basis]))
    kernel = Mat(eqs).nullspace()
    r = len(kernel)
    if r == 0:
        return MetricRecovery("infeasible", None, None, 0)
    kernel_mats = []
    for k in kernel:
        M = basis[0].scaled(0)
        for c, E in zip(k, basis):
            M = M + E.scaled(c)
        kernel_mats.append(M)

    L = Mat(rows_l)
    target = set(poly.vertices)
    for combo in _candidate_coefficients(r, max_depth):
        X = kernel_mats[0].scaled(combo[0])
        for c, M in zip(combo[1:], kernel_mats[1:]):
            X = X + M.scaled(c)
        if not is_positive_definite(X):
            continue
        Gp = L @ X @ L.transpose()
        cell2 = voronoi_cell(LatticeForm(d, Gp))
        mapped = {L.vecmat(v) for v in cell2.polytope.vertices}
        if mapped != target:
            continue
        mults = []
        for idx, (n, b) in enumerate(poly.halfspaces):
            xs = X.matvec(facet_vectors[idx])
            k = next(i for i, c in enumerate(n) if c)
            mults.append(xs[k] / n[k])
        Xc = _canonical_scale(X)
        return MetricRecovery("found", Xc, tuple(mults), r)
    return MetricRecovery("infeasible", None, None, r)


def _canonical_scale(X: Mat) -> Mat:
    import math as _m
    den = _m.lcm(*[c.denominator for r in X for c in r])
    ints = [[int(c * den) for c in r] for r in X]
    g = _m.gcd(*[abs(c) for r in ints for c in r])
    return Mat([[Fraction(c, g) for c in r] for r in ints])


def theorem41_check(cell: Cell, u) -> bool:
    """For an irreducible Voronoi cell and a free direction u: u must be
    G-orthogonal to every vector of A(u).  Agrees with metric recovery
    succeeding on the extension."""
    from .structure import decompose
    if len(decompose(cell).factors) > 1:
        raise GeometryError("cell is reducible; split the segment first")
    u = Vec(u)
    ab = ab_sets(cell, u)
    return all(inner(cell.gram, u, s) == 0 for s in ab.A)


@dataclass(frozen=True)
class SplitSegments:
    """Projections of a segment onto the factors of a reducible cell."""

    spec1: SegmentSpec | None
    spec2: SegmentSpec | None
    factor1: "FactorFrame"
    factor2: "FactorFrame"


@dataclass(frozen=True)
class FactorFrame:
    basis_rows: tuple[Vec, ...]       # integer basis of the factor lattice
    form: LatticeForm                 # restricted Gram matrix

    def to_factor_coords(self, v) -> Vec | None:
        return Mat(self.basis_rows).transpose().solve(Vec(v))


def _factor_frame(cell: Cell, subspace: Subspace) -> FactorFrame:
    rows = saturate(list(subspace.basis), cell.dim)
    W = Mat(rows)
    G = W @ cell.gram @ W.transpose()
    return FactorFrame(tuple(rows), LatticeForm(W.nrows, G))


def theorem42_split(cell: Cell, seg: SegmentSpec) -> SplitSegments:
    """Split a segment across a direct-sum decomposition: each factor gets
    the projection of the segment along the other factor.  Both projections
    must be free for their factors; a violation raises."""
    from .structure import decompose
    if not is_free_segment(cell, seg.direction):
        raise NotFreeDirection("segment is not free for the cell")
    dec = decompose(cell)
    if len(dec.factors) < 2:
        raise GeometryError("cell is irreducible; nothing to split")
    q1 = dec.factors[0].subspace
    q2 = dec.factors[1].subspace
    for f in dec.factors[2:]:
        q2 = q2.plus(f.subspace)
    from .exactgeom import project_along
    u = seg.direction * seg.half_length
    u1 = project_along(q2, q1, u)
    u2 = project_along(q1, q2, u)
    frame1 = _factor_frame(cell, q1)
    frame2 = _factor_frame(cell, q2)
    out = []
    for ui, frame in ((u1, frame1), (u2, frame2)):
        if ui.is_zero():
            out.append(None)
            continue
        coords = frame.to_factor_coords(ui)
        if coords is None:
            raise GeometryError("projection left the factor subspace")
        spec = SegmentSpec.of(coords, 1)
        fc = voronoi_cell(frame.form)
        if not is_free_segment(fc, spec.direction):
            raise TheoremViolation(
                "projected segment is not free for its factor",
                {"direction": [str(c) for c in spec.direction]})
        out.append(spec)
    return SplitSegments(out[0], out[1], frame1, frame2)


@dataclass(frozen=True)
class ProjectedCell:
    """Image of a cell under projection along a free direction, in exact
    coordinates on the hyperplane <A u B>, whose lattice is Z^(d-1)."""

    polytope: Polytope
    basis_rows: tuple[Vec, ...]       # hyperplane basis (the Z(A u B) basis)
    lattice_rows: tuple[Vec, ...]     # identity: lattice is Z^(d-1)

    def to_ambient(self, c) -> Vec:
        return Mat(self.basis_rows).vecmat(Vec(c))


def project_cell_along(cell: Cell, u, check_voronoi_metric: bool = False
                       ) -> ProjectedCell:
    """Q = the cell projected along a free direction onto <A u B>, together
    with its tiling lattice Z(A u B) = Z^(d-1) in basis coordinates.  The
    tiling property is always verified; with `check_voronoi_metric` the
    projection is also checked to admit a Voronoi metric."""
    u = Vec(u)
    ab = ab_sets(cell, u)
    from .freespace import span_normal, _projection_along
    m = span_normal(ab, cell.dim)
    proj = _projection_along(u, m)
    basis = hnf(list(ab.A) + list(ab.B))
    U = Mat(basis).transpose()
    coords = []
    for v in cell.polytope.vertices:
        c = U.solve(proj(v))
        if c is None:
            raise GeometryError("projected vertex left the hyperplane")
        coords.append(c)
    Q = Polytope.from_points(coords)
    d1 = cell.dim - 1
    identity = tuple(unit_vec(d1, i) for i in range(d1))
    if not is_parallelohedron(Q, identity):
        raise TheoremViolation(
            "projection along a free direction does not tile",
            {"direction": [str(c) for c in u]})
    pc = ProjectedCell(Q, tuple(basis), identity)
    if check_voronoi_metric:
        rec = recover_voronoi_metric(Q, identity)
        if not rec.found:
            raise TheoremViolation(
                "projected cell admits no Voronoi metric",
                {"direction": [str(c) for c in u]})
    return pc


def check_lemma44(cell: Cell, seg: SegmentSpec) -> bool:
    """If both the cell and its extension are Voronoi, the projection along
    the segment admits a Voronoi metric."""
    ext = minkowski_extend(cell, seg)
    rec = recover_voronoi_metric(ext.polytope, ext.lattice_rows,
                                 tuple(p.facet_vector for p in ext.provenance))
    if not rec.found:
        return False
    project_cell_along(cell, seg.direction, check_voronoi_metric=True)
    return True
