"""Voronoi cell construction, belts, Minkowski-Venkov checks, standard
vectors and caps, validated against independent brute-force oracles."""

from fractions import Fraction

import pytest

from parallelohedra import (
    Mat, Polytope, Vec, VenkovViolation, belts, cap, check_minkowski_venkov,
    dd_facets, faces, relevant_vectors, standard_vector, voronoi_cell,
)
from parallelohedra.voronoi import facet_vectors_generate_lattice
from conftest import (
    A2, BCC, CANONICAL, FCC, Z2, Z3, Z4, brute_relevant_vectors,
    edge_direction_belt_sizes, float_volume, sampled_forms,
)

F = Fraction


class TestRelevantVectors:
    def test_z2(self):
        assert set(relevant_vectors(Z2)) == {Vec([0, 1]), Vec([1, 0])}

    def test_a2_against_oracle(self):
        got = set(relevant_vectors(A2))
        assert got == {Vec([1, 0]), Vec([0, 1]), Vec([1, -1])}
        oracle = brute_relevant_vectors(A2)
        assert {s for s in oracle} == got | {-s for s in got}

    def test_fcc_against_oracle(self):
        got = relevant_vectors(FCC)
        assert len(got) == 6
        oracle = brute_relevant_vectors(FCC)
        assert oracle == set(got) | {-s for s in got}

    def test_bcc_count(self):
        got = relevant_vectors(BCC)
        assert len(got) == 7
        oracle = brute_relevant_vectors(BCC)
        assert oracle == set(got) | {-s for s in got}

    @pytest.mark.parametrize("d", [2, 3])
    def test_sampled_against_oracle(self, d):
        for form in sampled_forms(101, d, 4, entry_bound=1):
            got = relevant_vectors(form)
            oracle = brute_relevant_vectors(form, radius=3)
            assert oracle == set(got) | {-s for s in got}


class TestCells:
    def test_square(self):
        cell = voronoi_cell(Z2)
        assert set(cell.polytope.vertices) == {
            Vec([a, b]) for a in (F(-1, 2), F(1, 2))
            for b in (F(-1, 2), F(1, 2))}
        assert cell.polytope.volume() == 1

    def test_hexagon(self):
        cell = voronoi_cell(A2)
        assert cell.nfacets == 6
        assert cell.polytope.nvertices == 6
        assert cell.polytope.volume() == 1

    def test_fcc_rhombic_dodecahedron(self):
        cell = voronoi_cell(FCC)
        assert cell.nfacets == 12
        assert cell.polytope.nvertices == 14
        assert len(faces(cell, 1)) == 24
        # Euler characteristic of the 2-sphere
        assert 14 - 24 + 12 == 2
        assert cell.polytope.volume() == 1

    def test_bcc_truncated_octahedron(self):
        cell = voronoi_cell(BCC)
        assert cell.nfacets == 14
        assert cell.polytope.nvertices == 24
        assert len(faces(cell, 1)) == 36
        assert cell.polytope.volume() == 1

    def test_float_volume_agrees(self, canonical_form):
        cell = voronoi_cell(canonical_form)
        assert abs(float_volume(cell.polytope.vertices) - 1.0) < 1e-9

    def test_opposite_facets(self, canonical_form):
        cell = voronoi_cell(canonical_form)
        for i in range(cell.nfacets):
            assert cell.facet_vectors[cell.opposite(i)] == \
                -cell.facet_vectors[i]


class TestFaces:
    def test_square_vertices(self):
        cell = voronoi_cell(Z2)
        assert len(faces(cell, 0)) == 4

    def test_cube_edges(self):
        cell = voronoi_cell(Z3)
        assert len(faces(cell, 1)) == 12

    def test_z4_euler(self):
        cell = voronoi_cell(Z4)
        counts = [len(faces(cell, k)) for k in range(4)]
        assert counts == [16, 32, 24, 8]
        assert counts[0] - counts[1] + counts[2] - counts[3] == 0


class TestBelts:
    def test_z3_three_four_belts(self):
        assert sorted(b.size for b in belts(voronoi_cell(Z3))) == [4, 4, 4]

    def test_fcc_four_six_belts(self):
        cell = voronoi_cell(FCC)
        assert sorted(b.size for b in belts(cell)) == [6, 6, 6, 6]
        assert edge_direction_belt_sizes(cell) == [6, 6, 6, 6]

    def test_bcc_six_six_belts(self):
        cell = voronoi_cell(BCC)
        assert sorted(b.size for b in belts(cell)) == [6, 6, 6, 6, 6, 6]
        assert edge_direction_belt_sizes(cell) == [6, 6, 6, 6, 6, 6]

    def test_d2_belt_convention(self):
        assert [b.size for b in belts(voronoi_cell(Z2))] == [4]
        assert [b.size for b in belts(voronoi_cell(A2))] == [6]

    def test_belt_cycles_close(self):
        cell = voronoi_cell(FCC)
        for belt in belts(cell):
            cyc = belt.facet_indices
            masks = cell.polytope.facet_masks
            for i in range(len(cyc)):
                a, b = cyc[i], cyc[(i + 1) % len(cyc)]
                common = masks[a] & masks[b]
                assert common, "consecutive belt facets share a ridge"

    def test_six_belt_facets_carry_their_subfaces(self):
        cell = voronoi_cell(BCC)
        ridge_dirs = {}
        for f in faces(cell, 1):
            pts = cell.polytope.face_vertices(f)
            from parallelohedra import primitive_vector
            ridge_dirs.setdefault(primitive_vector(pts[1] - pts[0]),
                                  set()).update(f.facet_ids)
        for belt in belts(cell):
            from parallelohedra import Subspace
            key = belt.direction.basis[0]
            assert set(belt.facet_indices) == ridge_dirs[key]


class TestMinkowskiVenkov:
    def test_cells_pass(self, canonical_form):
        cell = voronoi_cell(canonical_form)
        assert check_minkowski_venkov(cell.polytope).passes

    def test_simplex_fails(self):
        simp = dd_facets([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
        rep = check_minkowski_venkov(simp)
        assert not rep.body_centrally_symmetric
        assert not rep.passes

    def test_octahedron_fails_on_facets(self):
        octa = dd_facets([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
                          (0, 0, 1), (0, 0, -1)])
        rep = check_minkowski_venkov(octa)
        assert rep.body_centrally_symmetric
        assert not rep.facets_centrally_symmetric
        assert not rep.passes

    def test_belt_violation_raises(self):
        octa = dd_facets([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
                          (0, 0, 1), (0, 0, -1)])
        from parallelohedra.voronoi import Cell, _belt_classes
        sizes = [len(m) for _, m in _belt_classes(octa)]
        assert any(s not in (4, 6) for s in sizes)


class TestStandardVectors:
    def test_square_vertex(self):
        cell = voronoi_cell(Z2)
        for f in faces(cell, 0):
            t = standard_vector(cell, f)
            v = cell.polytope.face_vertices(f)[0]
            assert t == v * 2

    def test_facet_vector(self, canonical_form):
        cell = voronoi_cell(canonical_form)
        for i, f in enumerate(faces(cell, cell.dim - 1)):
            fid = next(iter(f.facet_ids))
            assert standard_vector(cell, f) == cell.facet_vectors[fid]

    def test_fcc_edges_not_standard(self):
        cell = voronoi_cell(FCC)
        assert all(standard_vector(cell, f) is None
                   for f in faces(cell, 1))

    def test_z3_edges_standard(self):
        cell = voronoi_cell(Z3)
        assert all(standard_vector(cell, f) is not None
                   for f in faces(cell, 1))


class TestCaps:
    def test_square_axis(self):
        cell = voronoi_cell(Z2)
        c = cap(cell, (1, 0))
        assert {cell.facet_vectors[i] for i in c.facet_indices} == \
            {Vec([-1, 0])}

    def test_square_diagonal(self):
        cell = voronoi_cell(Z2)
        c = cap(cell, (1, 1))
        assert {cell.facet_vectors[i] for i in c.facet_indices} == \
            {Vec([-1, 0]), Vec([0, -1])}

    def test_fcc_axis(self):
        cell = voronoi_cell(FCC)
        assert len(cap(cell, (-1, 1, 1)).facet_indices) == 4

    def test_caps_partition(self, canonical_form):
        cell = voronoi_cell(canonical_form)
        e = Vec([1] * cell.dim)
        plus = cap(cell, e).facet_indices
        minus = cap(cell, -e).facet_indices
        par = {i for i in range(cell.nfacets)
               if cell.facet_parallel_to(i, e)}
        assert plus | minus | par == set(range(cell.nfacets))
        assert not plus & minus and not plus & par and not minus & par
        assert {cell.opposite(i) for i in plus} == minus


class TestLatticeGeneration:
    def test_facet_vectors_generate(self, canonical_form):
        cell = voronoi_cell(canonical_form)
        assert facet_vectors_generate_lattice(cell)

    @pytest.mark.parametrize("d", [2, 3])
    def test_sampled(self, d):
        for form in sampled_forms(11, d, 5):
            assert facet_vectors_generate_lattice(voronoi_cell(form))


def test_determinism():
    form1 = CANONICAL["FCC"]
    c1 = voronoi_cell(form1)
    from parallelohedra import LatticeForm
    form2 = LatticeForm.from_rows([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
    c2 = voronoi_cell(form2)
    assert c1.polytope.vertices == c2.polytope.vertices
    assert c1.facet_vectors == c2.facet_vectors


def test_basis_canonicalization():
    """An external basis with an ambient form reduces to the same cells."""
    from parallelohedra import LatticeForm
    # FCC given by its Euclidean basis under the standard metric
    fcc_basis = LatticeForm.from_basis([(1, 1, 0), (1, 0, 1), (0, 1, 1)],
                                       Mat.identity(3))
    assert fcc_basis.gram == FCC.gram
