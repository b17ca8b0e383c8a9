"""Structural operations on Voronoi parallelohedra: the rank-one metric
dilatation and its cross preservation, the twofold dilatation that
manufactures a free plane from a cross, direct-sum decomposition along
six-belt components, exhaustive cross search, and the good/bad facet
analysis that turns a perfect free plane into a cross of the projection.

A cross is a pair of hyperplanes jointly containing all facet vectors;
its existence forces reducibility, and each irreducible factor ends up
parallel to one of the two hyperplanes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactgeom import (
    GeometryError, Mat, Polytope, Subspace, TheoremViolation, Vec,
    halfspace_intersection_vertices, hnf, inner, integer_kernel,
    is_positive_definite, lattice_points_within, primitive_vector, saturate,
    unit_vec, zero_vec,
)
from .voronoi import (
    Cell, LatticeForm, canonical_rep, relevant_vectors, voronoi_cell,
)
from .freespace import six_belts


# ---------------------------------------------------------------------------
# dilatation
# ---------------------------------------------------------------------------

def dilate(G: Mat, n) -> Mat:
    """Rank-one inflation of the metric along n: G + (G n)(G n)^T.
    Always positive definite for positive definite G."""
    n = Vec(n)
    if n.is_zero():
        raise GeometryError("dilatation direction must be nonzero")
    v = G.matvec(n)
    rows = [[G[i][j] + v[i] * v[j] for j in range(G.ncols)]
            for i in range(G.nrows)]
    return Mat(rows)


def dilate_scaled(G: Mat, direction, scale_sq) -> Mat:
    """Dilatation by sqrt(scale_sq) * direction, which only needs the square
    of the scale: G + scale_sq (G u)(G u)^T."""
    u = Vec(direction)
    v = G.matvec(u)
    s = Fraction(scale_sq)
    rows = [[G[i][j] + s * v[i] * v[j] for j in range(G.ncols)]
            for i in range(G.nrows)]
    return Mat(rows)


def fn_set(form: LatticeForm, n) -> frozenset:
    """Facet vector classes not orthogonal to n in the form's metric."""
    n = Vec(n)
    if n.is_zero():
        raise GeometryError("direction must be nonzero")
    Gn = form.gram.matvec(n)
    return frozenset(s for s in relevant_vectors(form) if Gn.dot(s) != 0)


def check_lemma72(form: LatticeForm, n) -> bool:
    """Dilatation along n never enlarges the span of the facet vectors that
    are non-orthogonal to n."""
    n = Vec(n)
    before = Subspace.span(fn_set(form, n), form.dim)
    dilated = LatticeForm(form.dim, dilate(form.gram, n))
    after = fn_set(dilated, n)
    return all(before.contains(s) for s in after)


# ---------------------------------------------------------------------------
# crosses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cross:
    """Two hyperplanes jointly containing every facet vector."""

    pi1: Subspace
    pi2: Subspace
    assignment: tuple    # (facet class rep, "1" | "2" | "both") pairs

    def hyperplanes(self):
        return self.pi1, self.pi2


def cross_is_valid(form: LatticeForm, pi1: Subspace, pi2: Subspace) -> bool:
    d = form.dim
    if pi1.rank != d - 1 or pi2.rank != d - 1:
        return False
    return all(pi1.contains(s) or pi2.contains(s)
               for s in relevant_vectors(form))


def _assignment(form: LatticeForm, pi1: Subspace, pi2: Subspace):
    out = []
    for s in relevant_vectors(form):
        a = pi1.contains(s)
        b = pi2.contains(s)
        out.append((s, "both" if a and b else ("1" if a else "2")))
    return tuple(out)


def _complete_to_hyperplane(vectors, d: int) -> Subspace:
    sp = Subspace.span(vectors, d)
    for i in range(d):
        if sp.rank == d - 1:
            break
        cand = sp.plus(Subspace.span([unit_vec(d, i)], d))
        if cand.rank <= d - 1:
            sp = cand
    if sp.rank != d - 1:
        raise GeometryError("could not complete to a hyperplane")
    return sp


def find_cross(cell: Cell) -> Cross | None:
    """Exhaustive pruned search for a cross: assign each facet vector class
    to one of two buckets, keeping both bucket spans of rank <= d-1, then
    complete the spans to hyperplanes with lattice vectors."""
    form = cell.form
    d = cell.dim
    reps = list(relevant_vectors(form))
    m = len(reps)

    best: list[Cross | None] = [None]

    def rank_of(vs):
        return Subspace.span(vs, d).rank if vs else 0

    def dfs(i, b1, b2):
        if best[0] is not None:
            return
        if i == m:
            pi1 = _complete_to_hyperplane(b1, d)
            pi2 = _complete_to_hyperplane(b2, d)
            if cross_is_valid(form, pi1, pi2):
                best[0] = Cross(pi1, pi2, _assignment(form, pi1, pi2))
            return
        s = reps[i]
        for bucket, other in ((b1, b2), (b2, b1)):
            if i == 0 and bucket is b2:
                continue  # swapping buckets gives the mirrored cross
            bucket.append(s)
            if rank_of(bucket) <= d - 1:
                dfs(i + 1, b1, b2)
            bucket.pop()
            if best[0] is not None:
                return

    dfs(0, [], [])
    return best[0]


def check_corollary73(form: LatticeForm, cross: Cross) -> bool:
    """Dilating along the metric normal of one cross hyperplane preserves
    the cross."""
    if not cross_is_valid(form, cross.pi1, cross.pi2):
        raise GeometryError("input cross is not valid for the form")
    n = _metric_normal(form.gram, cross.pi1)
    dilated = LatticeForm(form.dim, dilate(form.gram, n))
    return cross_is_valid(dilated, cross.pi1, cross.pi2)


def _metric_normal(G: Mat, hyperplane: Subspace) -> Vec:
    """Direction n with n^T G x = 0 on the hyperplane: n = G^{-1} m for the
    primitive coordinate normal m."""
    m = _coordinate_normal(hyperplane)
    return G.inverse().matvec(m)


def _coordinate_normal(hyperplane: Subspace) -> Vec:
    ns = Mat(list(hyperplane.basis)).nullspace()
    if len(ns) != 1:
        raise GeometryError("subspace is not a hyperplane")
    return primitive_vector(ns[0])


# ---------------------------------------------------------------------------
# twofold dilatation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DilationVector:
    """A normal scaled by a possibly irrational factor: the vector is
    sqrt(scale_sq) * direction.  Only the square enters any metric, so the
    representation stays exact."""

    direction: Vec
    scale_sq: Fraction

    def as_qvec(self) -> Vec:
        """Exact rational form, when sqrt(scale_sq) is rational."""
        num = self.scale_sq.numerator
        den = self.scale_sq.denominator
        rn = _exact_isqrt(num)
        rd = _exact_isqrt(den)
        if rn is None or rd is None:
            raise GeometryError("scale is irrational; use scale_sq")
        return self.direction * Fraction(rn, rd)


def _exact_isqrt(n: int) -> int | None:
    import math as _m
    r = _m.isqrt(n)
    return r if r * r == n else None


@dataclass(frozen=True)
class TwofoldDilatation:
    n1: DilationVector
    n2: DilationVector
    gram2: Mat
    free_plane: Subspace
    rho_sq: Fraction


def twofold_dilatation(form: LatticeForm, pi1: Subspace, pi2: Subspace
                       ) -> TwofoldDilatation:
    """Two successive dilatations along the metric normals of a cross,
    scaled to the covering radius of the rank-(d-2) lattice in the cross
    intersection.  The span of the two normals is verified to be a free
    plane of the resulting cell."""
    d = form.dim
    if d < 3:
        raise GeometryError("twofold dilatation needs dimension >= 3")
    cell = voronoi_cell(form)
    if not cross_is_valid(form, pi1, pi2):
        raise GeometryError("input hyperplanes are not a cross")
    for pi in (pi1, pi2):
        if len(saturate(list(pi.basis), d)) != d - 1:
            raise GeometryError("cross hyperplane lattice has wrong rank")
    inter = pi1.intersect(pi2)
    w_rows = saturate(list(inter.basis), d)
    if len(w_rows) != d - 2:
        raise GeometryError("cross intersection lattice has wrong rank")
    W = Mat(w_rows)
    G = form.gram
    G_restr = W @ G @ W.transpose()
    from .delaunay import covering_radius_sq
    rho_sq = covering_radius_sq(LatticeForm(d - 2, G_restr))

    # first dilatation: normal to pi1 in G; the layer functional m1 . x is
    # surjective onto Z, so the layer spacing is 1 functional unit
    m1 = _coordinate_normal(pi1)
    dir1 = primitive_vector(G.inverse().matvec(m1))
    alpha_sq = _layer_scale_sq(G, dir1, m1)
    n1 = DilationVector(dir1, rho_sq / alpha_sq)
    G1 = dilate_scaled(G, dir1, n1.scale_sq)

    m2 = _coordinate_normal(pi2)
    dir2 = primitive_vector(G1.inverse().matvec(m2))
    beta_sq = _layer_scale_sq(G1, dir2, m2)
    n2 = DilationVector(dir2, rho_sq / beta_sq)
    G2 = dilate_scaled(G1, dir2, n2.scale_sq)

    if not is_positive_definite(G2):
        raise GeometryError("twofold dilatation lost positive definiteness")
    plane = Subspace.span([dir1, dir2], d)
    if plane.rank != 2:
        raise TheoremViolation("dilatation normals are dependent",
                               _dump_form(form))
    for w in w_rows:
        if inner(G2, dir1, w) != 0 or inner(G2, dir2, w) != 0:
            raise TheoremViolation(
                "dilatation normals not orthogonal to the cross core",
                _dump_form(form))
    cell2 = voronoi_cell(LatticeForm(d, G2))
    for belt in six_belts(cell2):
        if not any(all(cell2.facet_parallel_to(i, b) for b in plane.basis)
                   for i in belt.facet_indices):
            raise TheoremViolation(
                "twofold dilatation did not free the normal plane",
                _dump_form(form))
    return TwofoldDilatation(n1, n2, G2, plane, rho_sq)


def _layer_scale_sq(G: Mat, direction: Vec, m: Vec) -> Fraction:
    """Square of the layer spacing of the functional x -> n^T G x along the
    primitive direction n = direction: (m . direction)^2 normalized by the
    surjectivity of m onto Z."""
    Gdir = G.matvec(direction)
    # G * direction is parallel to m with m primitive, so the functional
    # n^T G x takes values (Gdir . x) in (Gdir scale) * Z
    k = next(i for i, c in enumerate(m) if c)
    factor = Gdir[k] / m[k]
    return factor * factor


def _dump_form(form: LatticeForm) -> dict:
    return {"dim": form.dim,
            "gram": [[str(c) for c in row] for row in form.gram]}


# ---------------------------------------------------------------------------
# reducibility
# ---------------------------------------------------------------------------

def six_belt_components(cell: Cell) -> tuple[frozenset, ...]:
    """Partition of the facet vector classes into connected components of
    the co-six-belt graph."""
    reps = list(cell.class_reps())
    parent = {s: s for s in reps}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for belt in six_belts(cell):
        classes = sorted({canonical_rep(cell.facet_vectors[i])
                          for i in belt.facet_indices})
        for other in classes[1:]:
            union(classes[0], other)
    groups: dict[Vec, set] = {}
    for s in reps:
        groups.setdefault(find(s), set()).add(s)
    return tuple(sorted(frozenset(g) for g in groups.values()))


@dataclass(frozen=True)
class Factor:
    subspace: Subspace
    classes: frozenset
    basis_rows: tuple[Vec, ...]     # integer basis of the factor lattice
    polytope: Polytope              # in basis coordinates
    form: LatticeForm               # restricted Gram matrix

    @property
    def dim(self) -> int:
        return len(self.basis_rows)


@dataclass(frozen=True)
class Decomposition:
    factors: tuple[Factor, ...]

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def irreducible(self) -> bool:
        return self.k == 1


def _restrict_polytope(cell: Cell, rows) -> Polytope:
    """The slice of the cell by the subspace spanned by the rows, in row
    basis coordinates."""
    W = Mat(rows)
    hs = []
    for n, b in cell.polytope.halfspaces:
        a = Vec(w.dot(n) for w in rows)
        if a.is_zero():
            if b < 0:
                raise GeometryError("subspace misses the cell")
            continue
        hs.append((a, b))
    pts = halfspace_intersection_vertices(hs)
    return Polytope.from_points(pts)


def decompose(cell: Cell) -> Decomposition:
    """Direct-sum factorization along six-belt components.  The component
    spans must be independent and sum to the whole space (they always are
    for a genuine parallelohedron); the factor polytopes are slices of the
    cell, and their direct sum is verified to reproduce the cell exactly."""
    d = cell.dim
    comps = six_belt_components(cell)
    spans = [Subspace.span(sorted(c), d) for c in comps]
    merged = True
    while merged and len(spans) > 1:
        merged = False
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                if spans[i].intersect(spans[j]).rank > 0:
                    spans[i] = spans[i].plus(spans[j])
                    comps = list(comps)
                    comps[i] = comps[i] | comps[j]
                    del comps[j], spans[j]
                    merged = True
                    break
            if merged:
                break
    total = sum(sp.rank for sp in spans)
    if total != d:
        raise GeometryError("component spans do not decompose the space")
    factors = []
    for comp, span in sorted(zip(comps, spans),
                             key=lambda cs: sorted(cs[0])):
        rows = saturate(list(span.basis), d)
        W = Mat(rows)
        poly = _restrict_polytope(cell, rows)
        fform = LatticeForm(len(rows), W @ cell.gram @ W.transpose())
        factors.append(Factor(span, comp, tuple(rows), poly, fform))
    dec = Decomposition(tuple(factors))
    if len(factors) > 1:
        _verify_reconstruction(cell, dec)
    return dec


def _verify_reconstruction(cell: Cell, dec: Decomposition):
    """Exact check that the Minkowski sum of the factors is the cell."""
    d = cell.dim
    points = [zero_vec(d)]
    for f in dec.factors:
        W = Mat(f.basis_rows)
        fverts = [W.vecmat(v) for v in f.polytope.vertices]
        points = [p + fv for p in points for fv in fverts]
    hull = Polytope.from_points(points)
    if hull.vertices != cell.polytope.vertices:
        raise TheoremViolation("factor sum does not reproduce the cell",
                               _dump_form(cell.form))


def check_theorem_cross(cell: Cell) -> bool:
    """A cell with a cross must be reducible."""
    cross = find_cross(cell)
    if cross is None:
        return True
    return decompose(cell).k >= 2


def check_theorem_cross_reduction(cell: Cell) -> bool:
    """With a cross present, every irreducible factor is parallel to one of
    the cross hyperplanes."""
    cross = find_cross(cell)
    if cross is None:
        return True
    dec = decompose(cell)
    for f in dec.factors:
        if not (cross.pi1.contains_subspace(f.subspace)
                or cross.pi2.contains_subspace(f.subspace)):
            return False
    return True


# ---------------------------------------------------------------------------
# good and bad facets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoodBadReport:
    v: Vec
    good: frozenset          # facet class representatives
    bad: frozenset
    v_prime: Vec


def _centered_facet_membership(cell: Cell, class_rep: Vec):
    """Membership test for the centered copy F - s/2 of the facet with
    vector s, via exact coordinates on its hyperplane."""
    i = cell.facet_vectors.index(class_rep)
    mask = cell.polytope.facet_masks[i]
    ids = [j for j in range(cell.polytope.nvertices) if mask >> j & 1]
    half = class_rep * Fraction(1, 2)
    pts = [cell.polytope.vertices[j] - half for j in ids]
    base_dim = cell.dim
    rows = saturate([p - pts[0] for p in pts[1:]], base_dim)
    U = Mat(rows).transpose()
    coords = [U.solve(p) for p in pts]
    if any(c is None for c in coords):
        raise GeometryError("centered facet is not linear over its span")
    poly = Polytope.from_points(coords)
    span = Subspace.span(rows, base_dim)

    def contains(x: Vec) -> bool:
        if not span.contains(x):
            return False
        c = U.solve(x)
        return c is not None and poly.contains(c)

    return contains


def good_bad_facets(form: LatticeForm, v) -> GoodBadReport:
    """Classify facets as good or bad for the shift v: a facet F with vector
    s is bad when v + s/2 lands on some tile facet parallel to F, which is
    equivalent to (Z^d + v) meeting the centered facet F - s/2.  The
    representative v' of (Z^d + v) inside the cell is checked to be parallel
    to every bad facet."""
    v = Vec(v)
    cell = voronoi_cell(form)
    reps = cell.class_reps()
    if v.is_integer():
        return GoodBadReport(v, frozenset(), frozenset(reps),
                             zero_vec(form.dim))
    from .delaunay import closest_lattice_points, covering_radius_sq
    rho_sq = covering_radius_sq(form)
    candidates = [v - t for _, t in
                  lattice_points_within(form.gram, v, rho_sq)]
    good, bad = set(), set()
    for s in reps:
        member = _centered_facet_membership(cell, s)
        if any(member(c) for c in candidates):
            bad.add(s)
        else:
            good.add(s)
    _, nearest = closest_lattice_points(form, v)
    v_prime = v - nearest[0]
    for s in bad:
        if inner(form.gram, v_prime, s) != 0:
            raise TheoremViolation(
                "representative not parallel to a bad facet",
                {"v": [str(c) for c in v], "facet": [str(c) for c in s],
                 **_dump_form(form)})
    return GoodBadReport(v, frozenset(good), frozenset(bad), v_prime)


# ---------------------------------------------------------------------------
# free plane -> prism or cross of the projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneAnalysis:
    kind: str                        # "prism" | "cross"
    projection: Polytope | None      # the (d-2)-dimensional projection R
    projection_form: LatticeForm | None
    cross: Cross | None
    open_findings: tuple[str, ...] = ()


def lemma93_analyze(cell: Cell, plane: Subspace) -> PlaneAnalysis:
    """Either the cell is a prism over its projection along the perfect
    plane, or the projection (a (d-2)-dimensional Voronoi cell) carries a
    cross built from the good/bad analysis of two layer shifts."""
    from .freespace import perfect_lines_in_plane, ab_sets, verify_perfect_plane
    d = cell.dim
    verify_perfect_plane(cell, plane)
    report = perfect_lines_in_plane(cell, plane)
    y1 = report.line1.basis[0]
    y2 = report.line2.basis[0]
    u = primitive_vector(y1 + y2)
    G = cell.gram

    ab = ab_sets(cell, u)
    # facets orthogonal to the plane (equivalently parallel to it)
    b_p = [s for s in cell.facet_vectors
           if all(inner(G, s, b) == 0 for b in plane.basis)]
    span_p = Subspace.span(b_p, d)
    if span_p.rank != d - 2:
        raise GeometryError("plane-parallel facet vectors have wrong rank")
    rows = saturate(list(span_p.basis), d)
    W = Mat(rows)
    U = W.transpose()

    # projection along the plane onto <B_p>: subtract the plane component
    plane_basis = list(plane.basis)
    full = Mat(rows + tuple(plane_basis)).transpose()

    def project(x: Vec) -> Vec:
        coeff = full.solve(x)
        return Vec(coeff[:d - 2])

    r_verts = [project(v) for v in cell.polytope.vertices]
    R = Polytope.from_points(r_verts)
    if R.volume() != 1:
        raise TheoremViolation("projection along perfect plane has "
                               "covolume != 1", _dump_form(cell.form))
    G_R = W @ G @ W.transpose()
    form_R = LatticeForm(d - 2, G_R)
    cell_R = voronoi_cell(form_R)
    if cell_R.polytope.vertices != R.vertices:
        raise TheoremViolation(
            "projection is not the Voronoi cell of the restricted metric",
            _dump_form(cell.form))

    findings = []
    vs = []
    for yj in (y1, y2):
        cj = sorted(s for s in ab.C
                    if G.matvec(s).dot(yj) == 0)
        if not cj:
            raise TheoremViolation("empty cap class for a perfect line",
                                   _dump_form(cell.form))
        w_j = cj[0]
        v_j = -project(w_j)
        vs.append((v_j, len(cj)))

    for v_j, csize in vs:
        if v_j.is_integer():
            if csize != 1:
                findings.append(
                    f"prism branch with |C^j| = {csize}, expected 1")
            return PlaneAnalysis("prism", R, form_R, None, tuple(findings))

    reports = [good_bad_facets(form_R, v_j) for v_j, _ in vs]
    for s in cell_R.class_reps():
        if s not in reports[0].bad and s not in reports[1].bad:
            raise TheoremViolation(
                "projection facet good for both layer shifts",
                _dump_form(cell.form))
    hyper = []
    for rep in reports:
        n = G_R.matvec(rep.v_prime)
        hyper.append(Subspace.span(Mat([n]).nullspace(), d - 2))
    cross = Cross(hyper[0], hyper[1],
                  _assignment(form_R, hyper[0], hyper[1]))
    if not cross_is_valid(form_R, cross.pi1, cross.pi2):
        raise TheoremViolation("good/bad analysis produced an invalid cross",
                               _dump_form(cell.form))
    return PlaneAnalysis("cross", R, form_R, cross, tuple(findings))
