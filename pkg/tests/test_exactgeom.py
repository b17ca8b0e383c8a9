"""Kernel tests: rational linear algebra, lattice normal forms, and the
double description conversions."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from parallelohedra import (
    EmptyRegion, Mat, Polytope, Subspace, Vec, affine_dim, dd_facets,
    dd_hull, hnf, inner, integer_kernel, is_positive_definite,
    lattice_points_within, orthogonal_complement, primitive_vector,
    project_along, saturate,
)
from parallelohedra.exactgeom import (
    GeometryError, NotFullDimensional, UnboundedRegion,
    halfspace_intersection_vertices, index_in_saturation,
    solve_functional_one,
)
from conftest import A2, brute_lattice_points_in_ball

F = Fraction


class TestPositiveDefinite:
    def test_identity(self):
        assert is_positive_definite(Mat.identity(2))

    def test_a2(self):
        assert is_positive_definite(Mat([[2, 1], [1, 2]]))

    def test_indefinite(self):
        assert not is_positive_definite(Mat([[1, 2], [2, 1]]))

    def test_non_symmetric(self):
        assert not is_positive_definite(Mat([[2, 1], [0, 2]]))


class TestInner:
    def test_entry(self):
        assert inner(Mat([[2, 1], [1, 2]]), (1, 0), (0, 1)) == 1

    def test_identity_form(self):
        assert inner(Mat.identity(3), (1, 2, 3), (1, 2, 3)) == 14

    def test_expansion(self):
        assert inner(Mat([[2, 1], [1, 2]]), (1, -1), (1, -1)) == 2

    def test_symmetry(self):
        G = Mat([[3, 1], [1, 5]])
        assert inner(G, (2, 7), (-3, 4)) == inner(G, (-3, 4), (2, 7))


class TestOrthogonalComplement:
    def test_euclidean(self):
        S = Subspace.span([(1, 0)], 2)
        assert orthogonal_complement(Mat.identity(2), S).basis == \
            (Vec([0, 1]),)

    def test_skew_form(self):
        S = Subspace.span([(1, 0)], 2)
        oc = orthogonal_complement(Mat([[2, 1], [1, 2]]), S)
        assert oc.basis == (Vec([1, -2]),)

    def test_full_space(self):
        S = Subspace.full(3)
        assert orthogonal_complement(Mat.identity(3), S).rank == 0

    def test_involution(self):
        G = Mat([[2, 1, 0], [1, 3, 1], [0, 1, 2]])
        S = Subspace.span([(1, 2, 0), (0, 1, 1)], 3)
        assert orthogonal_complement(G, orthogonal_complement(G, S)) == S


class TestProjectAlong:
    def test_coordinate(self):
        S = Subspace.span([(0, 1)], 2)
        T = Subspace.span([(1, 0)], 2)
        assert project_along(S, T, (3, 5)) == Vec([3, 0])

    def test_skew(self):
        S = Subspace.span([(1, 1)], 2)
        T = Subspace.span([(1, 0)], 2)
        assert project_along(S, T, (2, 1)) == Vec([1, 0])

    def test_identity_on_target(self):
        S = Subspace.span([(1, 1)], 2)
        T = Subspace.span([(1, 0)], 2)
        assert project_along(S, T, (4, 0)) == Vec([4, 0])

    def test_non_complementary(self):
        S = Subspace.span([(1, 0)], 2)
        with pytest.raises(GeometryError):
            project_along(S, S, (1, 1))


class TestDoubleDescription:
    def test_square(self):
        hs = [((1, 0), F(1, 2)), ((-1, 0), F(1, 2)),
              ((0, 1), F(1, 2)), ((0, -1), F(1, 2))]
        p = dd_hull(hs)
        assert set(p.vertices) == {Vec([a, b])
                                   for a in (F(-1, 2), F(1, 2))
                                   for b in (F(-1, 2), F(1, 2))}

    def test_hexagon_round_trip(self):
        from parallelohedra import voronoi_cell
        hexagon = voronoi_cell(A2).polytope
        assert hexagon.nvertices == 6
        back = dd_facets(hexagon.vertices)
        assert set(back.vertices) == set(hexagon.vertices)
        assert set(back.halfspaces) == set(hexagon.halfspaces)

    def test_inconsistent(self):
        with pytest.raises(EmptyRegion):
            dd_hull([((1,), F(-1)), ((-1,), F(-1))])

    def test_unbounded(self):
        with pytest.raises(UnboundedRegion):
            dd_hull([((1, 0), F(1)), ((0, 1), F(1))])

    def test_lower_dimensional_input(self):
        with pytest.raises(NotFullDimensional):
            dd_facets([(0, 0), (1, 0), (2, 0)])

    def test_redundant_halfspace_dropped(self):
        hs = [((1, 0), F(1)), ((-1, 0), F(1)),
              ((0, 1), F(1)), ((0, -1), F(1)),
              ((1, 1), F(10))]
        p = dd_hull(hs)
        assert p.nfacets == 4

    def test_lower_dim_intersection_vertices(self):
        # two unit squares sharing one edge
        sq = [((1, 0), F(1, 2)), ((-1, 0), F(1, 2)),
              ((0, 1), F(1, 2)), ((0, -1), F(1, 2))]
        shifted = [((1, 0), F(3, 2)), ((-1, 0), F(-1, 2)),
                   ((0, 1), F(1, 2)), ((0, -1), F(1, 2))]
        pts = halfspace_intersection_vertices(sq + shifted)
        assert sorted(pts) == [Vec([F(1, 2), F(-1, 2)]),
                               Vec([F(1, 2), F(1, 2)])]


class TestPolytope:
    def test_cube_faces(self):
        hs = []
        for i in range(3):
            for sgn in (1, -1):
                n = [0, 0, 0]
                n[i] = sgn
                hs.append((tuple(n), F(1, 2)))
        cube = dd_hull(hs)
        assert cube.volume() == 1
        assert [len(cube.faces(k)) for k in range(3)] == [8, 12, 6]
        assert cube.is_centrally_symmetric()

    def test_simplex_volume(self):
        simp = dd_facets([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert simp.volume() == F(1, 6)
        assert not simp.is_centrally_symmetric()

    def test_contains(self):
        simp = dd_facets([(0, 0), (1, 0), (0, 1)])
        assert simp.contains((F(1, 4), F(1, 4)))
        assert not simp.contains((1, 1))

    def test_translate(self):
        simp = dd_facets([(0, 0), (1, 0), (0, 1)])
        moved = simp.translate((5, 7))
        assert moved.contains((F(21, 4), F(29, 4)))
        assert moved.volume() == simp.volume()

    def test_determinism(self):
        hs = [((1, 2), F(3)), ((-2, 1), F(2)), ((-1, -2), F(3)),
              ((2, -1), F(2))]
        p1, p2 = dd_hull(hs), dd_hull(list(hs))
        assert p1.vertices == p2.vertices
        assert p1.halfspaces == p2.halfspaces


class TestLatticeTools:
    def test_hnf_canonical(self):
        assert hnf([(2, 4), (1, 1)]) == (Vec([1, 1]), Vec([0, 2]))

    def test_integer_kernel_saturated(self):
        K = integer_kernel(Mat([(2, 4, 6)]))
        assert len(K) == 2
        assert all(Vec(k).dot(Vec((1, 2, 3))) == 0 for k in K)
        # (0, 3, -2) is in the kernel and must be an integer combination
        T = Mat(K).transpose()
        c = T.solve(Vec([0, 3, -2]))
        assert c is not None and c.is_integer()

    def test_saturate(self):
        sat = saturate([(2, 0, 0), (0, 3, 0)], 3)
        assert sat == (Vec([1, 0, 0]), Vec([0, 1, 0]))

    def test_index(self):
        assert index_in_saturation([(2, 0, 0), (0, 3, 0)]) == 6
        assert index_in_saturation([(1, 0), (0, 1)]) == 1
        assert index_in_saturation([(1, 1, 0), (0, 2, 2)]) == 2

    def test_functional_one(self):
        for m in [(3, 5), (7, -2, 9), (1, 0, 0, 0)]:
            t = solve_functional_one(m)
            assert t.dot(Vec(m)) == 1
            assert t.is_integer()

    def test_primitive_vector(self):
        assert primitive_vector((-2, 4)) == Vec([1, -2])
        assert primitive_vector((F(1, 2), F(1, 3))) == Vec([3, 2])


class TestEnumeration:
    def test_square_counts(self):
        pts = lattice_points_within(Mat.identity(2), (0, 0), 2)
        assert len(pts) == 9

    def test_against_brute_force(self):
        center = Vec([F(1, 3), F(-1, 5)])
        got = {p for _, p in lattice_points_within(A2.gram, center, 4)}
        want = set(brute_lattice_points_in_ball(A2, center, 4, 5))
        assert got == want

    def test_parity(self):
        pts = lattice_points_within(Mat([[2, 1], [1, 2]]), (0, 0), 2,
                                    parity=(1, 1))
        assert {p for _, p in pts} == {Vec([1, -1]), Vec([-1, 1])}


# hypothesis strategies: small integer matrices and points
small_int = st.integers(min_value=-3, max_value=3)


@st.composite
def pd_gram(draw, d):
    A = [[draw(small_int) for _ in range(d)] for _ in range(d)]
    rows = [[sum(A[k][i] * A[k][j] for k in range(d)) + (2 if i == j else 0)
             for j in range(d)] for i in range(d)]
    return Mat(rows)


@given(pd_gram(2))
@settings(max_examples=40, deadline=None)
def test_pd_samples_are_pd(G):
    assert is_positive_definite(G)
    assert inner(G, (1, 1), (1, 1)) > 0


@given(pd_gram(3), st.tuples(small_int, small_int, small_int))
@settings(max_examples=30, deadline=None)
def test_pd_form_positivity(G, x):
    if any(x):
        assert inner(G, x, x) > 0


@given(st.lists(st.tuples(small_int, small_int), min_size=3, max_size=8,
                unique=True))
@settings(max_examples=40, deadline=None)
def test_hull_round_trip_2d(pts):
    if affine_dim([Vec(p) for p in pts]) != 2:
        return
    p = dd_facets(pts)
    q = dd_hull(p.halfspaces)
    assert set(q.vertices) == set(p.vertices)


@given(pd_gram(2))
@settings(max_examples=25, deadline=None)
def test_complement_splits_dimension(G):
    S = Subspace.span([(1, 2)], 2)
    oc = orthogonal_complement(G, S)
    assert oc.rank == 1
    assert inner(G, S.basis[0], oc.basis[0]) == 0
