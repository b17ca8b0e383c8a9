"""Free segments and free spaces of Voronoi parallelohedra.

A segment direction u is free when the cell plus the segment still tiles;
the working criterion is combinatorial: every six-belt must contain a facet
parallel to u.  Around that criterion this module builds the bookkeeping the
extension machinery needs: the vector families

  A(u)  standard vectors of the (d-2)-faces that sprout new facets,
  B(u)  facet vectors of facets parallel to u,
  C(u)  facet vectors of the cap seen from u,

their span (always a hyperplane), the layer-shift vector t with
Z(A u B) + Z t = Z^d, and the structure of two-dimensional perfect free
spaces (each contains exactly two distinguished lines)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactgeom import (
    GeometryError, Mat, NotFreeDirection, Polytope, Subspace, TheoremViolation,
    Vec, halfspace_intersection_vertices, hnf, index_in_saturation, inner,
    lattice_points_within, primitive_vector, solve_functional_one,
)
from .voronoi import (
    Belt, Cell, Face, cap, face_centroid, faces, six_belts,
)


def is_free_segment(cell: Cell, u) -> bool:
    """Grishukhin's criterion: every six-belt of the cell contains a facet
    whose direction space contains u."""
    u = Vec(u)
    if u.is_zero():
        raise GeometryError("direction must be nonzero")
    for belt in six_belts(cell):
        if not any(cell.facet_parallel_to(i, u) for i in belt.facet_indices):
            return False
    return True


@dataclass(frozen=True)
class PerfectSpace:
    """An inclusion-maximal free space realized as the intersection of facet
    direction spaces hitting every six-belt."""

    space: Subspace
    witness_facets: frozenset


def perfect_free_spaces(cell: Cell) -> tuple[PerfectSpace, ...]:
    """All inclusion-maximal subspaces of the form
    lin(F_1) & ... & lin(F_k) where {F_i} meets every six-belt.  With no
    six-belts the whole space qualifies."""
    d = cell.dim
    sbelts = six_belts(cell)
    full = Subspace.full(d)
    if not sbelts:
        return (PerfectSpace(full, frozenset()),)
    # states: span -> witness facet indices (first witness wins; belt and
    # class iteration order is canonical, so the result is deterministic)
    states = {full: frozenset()}
    for belt in sbelts:
        class_ids = sorted({min(i, cell.opposite(i))
                            for i in belt.facet_indices})
        nxt: dict[Subspace, frozenset] = {}
        for sp, wit in states.items():
            for ci in class_ids:
                sp2 = sp.intersect(cell.facet_direction(ci))
                wit2 = wit | {ci, cell.opposite(ci)}
                if sp2 not in nxt:
                    nxt[sp2] = wit2
        # discard states strictly contained in another: anything reachable
        # from them stays dominated
        spans = list(nxt)
        keep = {}
        for sp in spans:
            if not any(o != sp and o.contains_subspace(sp) for o in spans):
                keep[sp] = nxt[sp]
        states = keep
    out = [PerfectSpace(sp, wit) for sp, wit in states.items() if sp.rank > 0]
    out.sort(key=lambda ps: (-ps.space.rank, ps.space.basis))
    return tuple(out)


def max_free_rank(cell: Cell) -> int:
    spaces = perfect_free_spaces(cell)
    return max((ps.space.rank for ps in spaces), default=0)


@dataclass(frozen=True)
class ABCSets:
    """The three vector families attached to a free direction, plus their
    span (a hyperplane when the direction is free)."""

    A: frozenset
    B: frozenset
    C: frozenset
    span_ab: Subspace


def _semi_shaded_faces(cell: Cell, u: Vec):
    """(d-2)-faces that acquire a full facet under extension by u: standard
    (four-belt) faces not parallel to u whose two adjacent facets lie in
    opposite caps."""
    d = cell.dim
    Gu = cell.gram.matvec(u)
    out = []
    for face in faces(cell, d - 2):
        fids = sorted(face.facet_ids)
        if len(fids) != 2:
            raise GeometryError("(d-2)-face not shared by exactly 2 facets")
        direction = _face_direction(cell, face)
        if direction.contains(u):
            continue
        belt = _belt_of_direction(cell, direction)
        if belt.size != 4:
            continue
        s1 = Gu.dot(cell.facet_vectors[fids[0]])
        s2 = Gu.dot(cell.facet_vectors[fids[1]])
        if (s1 > 0 and s2 < 0) or (s1 < 0 and s2 > 0):
            out.append(face)
    return out


def _face_direction(cell: Cell, face: Face) -> Subspace:
    pts = cell.polytope.face_vertices(face)
    base = pts[0]
    return Subspace.span([p - base for p in pts[1:]], cell.dim)


def _all_belts(cell: Cell):
    from .voronoi import belts
    return belts(cell)


def _belt_of_direction(cell: Cell, direction: Subspace) -> Belt:
    for belt in _all_belts(cell):
        if belt.direction == direction:
            return belt
    raise GeometryError("no belt with the given direction")


def ab_sets(cell: Cell, u) -> ABCSets:
    """A, B and C for a free direction u, with the Horvath rank identity
    rank<A u B> = d - 1 enforced."""
    u = Vec(u)
    if not is_free_segment(cell, u):
        raise NotFreeDirection(f"direction {tuple(u)} is not free")
    G = cell.gram
    Gu = G.matvec(u)
    B = frozenset(s for s in cell.facet_vectors if Gu.dot(s) == 0)
    C = frozenset(cell.facet_vectors[i]
                  for i in cap(cell, u).facet_indices)
    A = set()
    for face in _semi_shaded_faces(cell, u):
        t = face_centroid(cell, face) * 2
        if not t.is_integer():
            raise TheoremViolation(
                "semi-shaded face has a non-lattice symmetry center",
                {"face_vertices": [tuple(map(str, p)) for p in
                                   cell.polytope.face_vertices(face)]})
        A.add(t)
    A = frozenset(A)
    span = Subspace.span(list(A) + list(B), cell.dim)
    if span.rank != cell.dim - 1:
        raise TheoremViolation(
            f"rank<A u B> = {span.rank}, expected {cell.dim - 1}",
            {"gram": [[str(x) for x in r] for r in G],
             "direction": [str(c) for c in u]})
    return ABCSets(A, B, C, span)


def check_lemma32(cell: Cell, u) -> bool:
    """The affine-difference span of the cap vectors lies inside <A u B>."""
    ab = ab_sets(cell, u)
    csorted = sorted(ab.C)
    base = csorted[0]
    return all(ab.span_ab.contains(c - base) for c in csorted[1:])


def check_lemma33(cell: Cell, u) -> bool:
    """Z(A u B) is all of Z^d & <A u B>: the sublattice has index 1."""
    ab = ab_sets(cell, u)
    return index_in_saturation(list(ab.A) + list(ab.B)) == 1


def check_lemma34(cell: Cell, u) -> bool:
    """Every facet vector inside <A u B> is the vector of a facet parallel
    to u (i.e. belongs to B)."""
    ab = ab_sets(cell, u)
    for s in cell.facet_vectors:
        if ab.span_ab.contains(s) and s not in ab.B:
            return False
    return True


def span_normal(ab: ABCSets, dim: int) -> Vec:
    """Primitive integer functional vanishing on <A u B>."""
    ns = Mat(list(ab.span_ab.basis)).nullspace()
    if len(ns) != 1:
        raise GeometryError("span <A u B> is not a hyperplane")
    return primitive_vector(ns[0])


def choose_layer_vector(cell: Cell, u, ab: ABCSets | None = None) -> Vec:
    """A vector t with Z(A u B) (+) Z t = Z^d, oriented so that the cap
    vectors C(u) are congruent to -t modulo Z(A u B).

    Existence relies on the index-1 property of Z(A u B); the orientation
    matches the facet bookkeeping of the extended cell, whose cap facets
    carry facet vectors s - e with s in C(u)."""
    u = Vec(u)
    if ab is None:
        ab = ab_sets(cell, u)
    m = span_normal(ab, cell.dim)
    for s in sorted(ab.A | ab.B):
        if m.dot(s) != 0:
            raise GeometryError("normal does not annihilate A u B")
    t0 = solve_functional_one(m)
    c0 = min(ab.C)
    phi_c = m.dot(c0)
    if abs(phi_c) != 1:
        raise TheoremViolation(
            "cap vector does not generate the quotient lattice",
            {"cap_vector": [str(c) for c in c0], "functional_value": str(phi_c)})
    return t0 if phi_c == -1 else -t0


def _projection_along(u: Vec, normal: Vec):
    """x -> x - (normal.x / normal.u) u; the identity on the hyperplane."""
    nu = normal.dot(u)
    if nu == 0:
        raise GeometryError("direction lies inside the hyperplane")

    def proj(x: Vec) -> Vec:
        return x - u * (normal.dot(x) / nu)

    return proj


def convex_hull_contains(points, x) -> bool:
    """Exact membership of x in the convex hull of a finite point set of any
    affine dimension."""
    pts = sorted(set(Vec(p) for p in points))
    x = Vec(x)
    if x in pts:
        return True
    if len(pts) == 1:
        return False
    base = pts[0]
    diffs = [p - base for p in pts[1:]]
    span = Subspace.span(diffs, len(base))
    if not span.contains(x - base):
        return False
    if span.rank == 0:
        return False
    U = Mat(span.basis).transpose()
    coords = [U.solve(p - base) for p in pts]
    xc = U.solve(x - base)
    poly = Polytope.from_points(coords)
    return poly.contains(xc)


def check_lemma35(cell: Cell, u) -> bool:
    """Projection identity for neighbor layers.  With t the layer vector,
    every translate P + v + t (v in Z(A u B)) that meets P satisfies

        proj(P & (P + v + t)) = proj(P) & proj(P + v + t)

    where proj is the projection along u onto <A u B>."""
    u = Vec(u)
    ab = ab_sets(cell, u)
    t = choose_layer_vector(cell, u, ab)
    m = span_normal(ab, cell.dim)
    proj = _projection_along(u, m)
    G = cell.gram
    d = cell.dim

    basis = hnf(list(ab.A) + list(ab.B))
    Bm = Mat(basis)
    Gp = Bm @ G @ Bm.transpose()
    # minimize Q(t + z B) over real z to center the enumeration
    lin = Bm.matvec(G.matvec(t))
    zstar = Gp.inverse().matvec(-lin)
    w0 = t + Bm.vecmat(zstar)
    qmin = inner(G, w0, w0)
    from .delaunay import covering_radius_sq
    bound = 4 * covering_radius_sq(cell.form)
    if qmin > bound:
        return True
    ok = True
    for _, z in lattice_points_within(Gp, zstar, bound - qmin):
        w = t + Bm.vecmat(z)
        if inner(G, w, w) > bound:
            continue
        half = w * Fraction(1, 2)
        if not cell.polytope.contains(half):
            continue
        shifted = [(n, b + n.dot(w)) for n, b in cell.polytope.halfspaces]
        xverts = halfspace_intersection_vertices(
            list(cell.polytope.halfspaces) + shifted)
        if not xverts:
            continue
        lhs_pts = [proj(p) for p in xverts]
        rhs_pts = _project_intersection(cell.polytope, w, proj)
        if not all(convex_hull_contains(lhs_pts, q) for q in rhs_pts):
            ok = False
            break
    return ok


def _project_intersection(poly: Polytope, w: Vec, proj):
    """Vertices of proj(P) & proj(P + w) inside the projection hyperplane."""
    q1 = [proj(p) for p in poly.vertices]
    q2 = [proj(p + w) for p in poly.vertices]
    base = q1[0]
    span = Subspace.span([p - base for p in q1[1:]], len(base))
    U = Mat(span.basis).transpose()
    c1 = [U.solve(p - base) for p in q1]
    c2 = [U.solve(p - base) for p in q2]
    if any(c is None for c in c1 + c2):
        raise GeometryError("projection left the hyperplane")
    poly1 = Polytope.from_points(c1)
    poly2 = Polytope.from_points(c2)
    pts = halfspace_intersection_vertices(
        list(poly1.halfspaces) + list(poly2.halfspaces))
    return [base + Mat(span.basis).vecmat(c) for c in pts]


# ---------------------------------------------------------------------------
# two-dimensional perfect free spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerfectPlaneReport:
    """A perfect free plane and its two distinguished lines: every facet of
    the cell is parallel to at least one of the lines."""

    plane: Subspace
    line1: Subspace
    line2: Subspace


def verify_perfect_plane(cell: Cell, p: Subspace):
    """Check that p is a perfect free plane; returns the witness facet
    classes (the facets parallel to p)."""
    if p.rank != 2 or p.ambient_dim != cell.dim:
        raise GeometryError("need a plane (rank-2 subspace) of the cell space")
    parallel = [i for i in range(0, cell.nfacets, 2)
                if all(cell.facet_parallel_to(i, b) for b in p.basis)]
    if not parallel:
        raise GeometryError("not a perfect free plane: no parallel facets")
    for belt in six_belts(cell):
        classes = {min(i, cell.opposite(i)) for i in belt.facet_indices}
        if not classes & set(parallel):
            raise GeometryError(
                "not a perfect free plane: a six-belt has no parallel facet")
    normals = [cell.gram.matvec(cell.facet_vectors[i]) for i in parallel]
    inter = Subspace.span(Mat(normals).nullspace(), cell.dim)
    if inter != p:
        raise GeometryError(
            "not a perfect free plane: facet intersection differs")
    return parallel


def _plane_traces(cell: Cell, p: Subspace):
    """For each facet class not parallel to p, the line lin(F) & p, as a
    primitive direction in plane coordinates (a, b) -> a b1 + b b2."""
    b1, b2 = p.basis
    traces = {}
    for i in range(0, cell.nfacets, 2):
        n = cell.gram.matvec(cell.facet_vectors[i])
        x, y = n.dot(b1), n.dot(b2)
        if x == 0 and y == 0:
            continue  # parallel facet
        # direction in the plane orthogonal to (x, y): (-y, x)
        dir2 = primitive_vector(Vec([-y, x]))
        traces.setdefault(dir2, []).append(i)
    return traces


def perfect_lines_in_plane(cell: Cell, p: Subspace) -> PerfectPlaneReport:
    """The two lines l in p for which the facets parallel to l span a
    hyperplane.  Raises TheoremViolation if the count differs from two."""
    verify_perfect_plane(cell, p)
    d = cell.dim
    b1, b2 = p.basis
    traces = _plane_traces(cell, p)
    lines = []
    for dir2 in sorted(traces):
        direction = primitive_vector(b1 * dir2[0] + b2 * dir2[1])
        parallel_vecs = [s for s in cell.facet_vectors
                         if cell.gram.matvec(s).dot(direction) == 0]
        if Subspace.span(parallel_vecs, d).rank == d - 1:
            lines.append(direction)
    if len(lines) != 2:
        raise TheoremViolation(
            f"perfect plane contains {len(lines)} perfect lines, expected 2",
            {"plane": [[str(c) for c in b] for b in p.basis]})
    l1 = Subspace.span([lines[0]], d)
    l2 = Subspace.span([lines[1]], d)
    for i in range(0, cell.nfacets, 2):
        if not (cell.facet_parallel_to(i, lines[0])
                or cell.facet_parallel_to(i, lines[1])):
            raise TheoremViolation(
                "facet parallel to neither perfect line",
                {"facet_vector": [str(c) for c in cell.facet_vectors[i]]})
    return PerfectPlaneReport(p, l1, l2)


def check_lemma51(cell: Cell, p: Subspace) -> bool:
    """The hyperplane <A(u) u B(u)>, as u sweeps the plane p, is constant on
    the open sectors cut by the facet traces and jumps exactly at the two
    perfect lines."""
    report = perfect_lines_in_plane(cell, p)
    b1, b2 = p.basis
    traces = sorted(_plane_traces(cell, p))

    def lift(dir2) -> Vec:
        return primitive_vector(b1 * dir2[0] + b2 * dir2[1])

    def span_of(u: Vec) -> Subspace:
        return ab_sets(cell, u).span_ab

    import functools as _ft

    def norm(dir2):
        a, b = dir2
        if b < 0 or (b == 0 and a < 0):
            a, b = -a, -b
        return (a, b)

    def cmp(u, v):
        cr = u[0] * v[1] - u[1] * v[0]
        return -1 if cr > 0 else (1 if cr < 0 else 0)

    dirs = sorted({norm(t) for t in traces}, key=_ft.cmp_to_key(cmp))
    k = len(dirs)
    sector_spans = []
    for i in range(k):
        a = dirs[i]
        b = dirs[(i + 1) % k]
        if i + 1 < k:
            mid = (a[0] + b[0], a[1] + b[1])
        else:
            mid = (a[0] - b[0], a[1] - b[1])  # wrap past the half-turn
        sector_spans.append(span_of(lift(mid)))
    line_dirs = {tuple(report.line1.basis[0]), tuple(report.line2.basis[0])}
    jumps = set()
    for i, dir2 in enumerate(dirs):
        at = span_of(lift(dir2))
        left = sector_spans[i - 1] if k > 1 else sector_spans[0]
        right = sector_spans[i] if k > 1 else sector_spans[0]
        if not (at == left == right):
            jumps.add(tuple(lift(dir2)))
    return jumps == line_dirs
