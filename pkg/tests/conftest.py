"""Shared fixtures: the canonical lattice forms and independent oracles.

The oracles deliberately avoid the code paths they validate: relevant
vectors are re-derived from the empty-ball definition by box enumeration,
hull counts and volumes are cross-checked in floating point via scipy, and
closest points by brute-force search."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from parallelohedra import LatticeForm, Mat, Vec, inner

Z1 = LatticeForm.from_rows([[1]])
Z2 = LatticeForm.from_rows([[1, 0], [0, 1]])
Z3 = LatticeForm.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
Z4 = LatticeForm.from_rows([[1, 0, 0, 0], [0, 1, 0, 0],
                            [0, 0, 1, 0], [0, 0, 0, 1]])
A2 = LatticeForm.from_rows([[2, 1], [1, 2]])
FCC = LatticeForm.from_rows([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
BCC = LatticeForm.from_rows([[4, 0, 2], [0, 4, 2], [2, 2, 3]])
A2xZ = LatticeForm.from_rows([[2, 1, 0], [1, 2, 0], [0, 0, 1]])
A2xA2 = LatticeForm.from_rows([[2, 1, 0, 0], [1, 2, 0, 0],
                               [0, 0, 2, 1], [0, 0, 1, 2]])
SQxHEX = LatticeForm.from_rows([[1, 0, 0, 0], [0, 1, 0, 0],
                                [0, 0, 2, 1], [0, 0, 1, 2]])

CANONICAL = {
    "Z2": Z2, "Z3": Z3, "Z4": Z4, "A2": A2, "FCC": FCC, "BCC": BCC,
    "A2xZ": A2xZ, "A2xA2": A2xA2, "SQxHEX": SQxHEX,
}


@pytest.fixture(params=sorted(CANONICAL))
def canonical_form(request):
    return CANONICAL[request.param]


def sampled_forms(seed, d, count, entry_bound=2):
    from parallelohedra.campaign import _instance_seed, sample_gram
    return [LatticeForm(d, sample_gram(_instance_seed(seed, d, i), d,
                                       entry_bound))
            for i in range(count)]


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def brute_lattice_points_in_ball(form, center, bound_sq, radius):
    """All integer points within the exact bound, by box enumeration."""
    d = form.dim
    out = []
    for tup in itertools.product(range(-radius, radius + 1), repeat=d):
        v = Vec(tup)
        diff = v - Vec(center)
        if inner(form.gram, diff, diff) <= bound_sq:
            out.append(v)
    return out


def brute_relevant_vectors(form, radius=3):
    """Facet vectors from the empty-ball definition: s is relevant iff the
    ball around s/2 of squared radius |s/2|^2 contains no lattice point
    other than 0 and s."""
    d = form.dim
    out = set()
    for tup in itertools.product(range(-radius, radius + 1), repeat=d):
        if not any(tup):
            continue
        s = Vec(tup)
        center = s * Fraction(1, 2)
        r_sq = inner(form.gram, center, center)
        pts = brute_lattice_points_in_ball(form, center, r_sq, 2 * radius)
        if sorted(pts) == sorted([Vec([0] * d), s]):
            out.add(s)
    return out


def brute_closest_points(form, x, radius=4):
    d = form.dim
    best = None
    pts = []
    for tup in itertools.product(range(-radius, radius + 1), repeat=d):
        v = Vec(tup)
        diff = v - Vec(x)
        q = inner(form.gram, diff, diff)
        if best is None or q < best:
            best = q
            pts = [v]
        elif q == best:
            pts.append(v)
    return best, sorted(pts)


def float_hull(points):
    return ConvexHull(np.array([[float(c) for c in p] for p in points]))


def float_hull_counts(points):
    hull = float_hull(points)
    return len(hull.vertices), len(set(map(tuple, hull.equations.round(9))))


def float_volume(points):
    return float_hull(points).volume


def edge_direction_belt_sizes(cell):
    """Belt sizes of a 3-dimensional cell, re-derived from edge geometry:
    group edges by direction, count the facets containing an edge of each
    direction."""
    from parallelohedra import faces
    assert cell.dim == 3
    by_dir = {}
    for edge in faces(cell, 1):
        a, b = cell.polytope.face_vertices(edge)
        from parallelohedra import primitive_vector
        key = primitive_vector(b - a)
        by_dir.setdefault(key, set()).update(edge.facet_ids)
    return sorted(len(facets) for facets in by_dir.values())


def lattices_equal(rows1, rows2) -> bool:
    """The two row families generate the same (possibly non-integer)
    lattice."""
    M1, M2 = Mat(list(rows1)), Mat(list(rows2))

    def inside(rows, other):
        T = other.transpose()
        for r in rows:
            c = T.solve(r)
            if c is None or not c.is_integer():
                return False
        return True

    return inside(M1.rows, M2) and inside(M2.rows, M1)
