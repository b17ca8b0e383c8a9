"""Exact rational linear algebra, integer lattice normal forms, and a convex
polytope kernel built on the double description method.

All coordinates are `fractions.Fraction`; geometric predicates never see a
float.  The only use of floating point in this module is inside the lattice
point enumerator, where floats bracket integer search intervals that are then
re-checked exactly, so a rounding error can only widen a search range.

The polytope conversions work on the homogenization cone and handle empty,
lower-dimensional and highly degenerate (non-simple) inputs uniformly, which
is essential because Voronoi cells of lattices are almost never simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

Rat = Fraction


# ---------------------------------------------------------------------------
# errors
# ---------------------------------------------------------------------------

class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DimensionMismatch(GeometryError):
    pass


class UnboundedRegion(GeometryError):
    pass


class EmptyRegion(GeometryError):
    pass


class NotFullDimensional(GeometryError):
    pass


class VenkovViolation(GeometryError):
    """A belt has a size other than 4 or 6, so the body cannot tile."""


class NotFreeDirection(GeometryError):
    """The operation requires a free segment direction."""


class TheoremViolation(RuntimeError):
    """A structural fact that is supposed to hold failed on a concrete
    instance.  Never raised silently: `detail` carries a replayable dump."""

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail or {}


# ---------------------------------------------------------------------------
# vectors and matrices
# ---------------------------------------------------------------------------

class Vec(tuple):
    """Immutable vector of rationals.  Subclasses tuple, so equality and
    hashing are structural; `+`, `-` and scalar `*` are redefined to be
    componentwise."""

    __slots__ = ()

    def __new__(cls, coords):
        return tuple.__new__(cls, [c if type(c) is Fraction else Fraction(c)
                                   for c in coords])

    @property
    def dim(self) -> int:
        return len(self)

    def __add__(self, other):
        if len(other) != len(self):
            raise DimensionMismatch("vector lengths differ")
        return Vec(a + b for a, b in zip(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        if len(other) != len(self):
            raise DimensionMismatch("vector lengths differ")
        return Vec(a - b for a, b in zip(self, other))

    def __neg__(self):
        return Vec(-a for a in self)

    def __mul__(self, k):
        if isinstance(k, (tuple, list)):
            raise TypeError("Vec * Vec is not defined; use dot()")
        return Vec(a * k for a in self)

    __rmul__ = __mul__

    def dot(self, other) -> Fraction:
        if len(other) != len(self):
            raise DimensionMismatch("vector lengths differ")
        return sum(a * b for a, b in zip(self, other))

    def is_zero(self) -> bool:
        return not any(self)

    def is_integer(self) -> bool:
        return all(a.denominator == 1 for a in self)


def zero_vec(d: int) -> Vec:
    return Vec([0] * d)


def unit_vec(d: int, i: int) -> Vec:
    return Vec([1 if j == i else 0 for j in range(d)])


def vsum(vectors, dim: int) -> Vec:
    acc = zero_vec(dim)
    for v in vectors:
        acc = acc + v
    return acc


def primitive_ray(v) -> Vec:
    """Scale a nonzero rational vector by a positive rational to the
    primitive integer vector pointing the same way."""
    v = Vec(v)
    if v.is_zero():
        raise GeometryError("zero vector has no direction")
    den = math.lcm(*(c.denominator for c in v))
    ints = [int(c * den) for c in v]
    g = math.gcd(*ints)
    return Vec(c // g for c in ints)


def primitive_vector(v) -> Vec:
    """Canonical representative of the line through `v`: primitive integer,
    first nonzero coordinate positive."""
    ray = primitive_ray(v)
    lead = next(c for c in ray if c)
    return ray if lead > 0 else -ray


class Mat:
    """Immutable rational matrix, stored as a tuple of row Vecs."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(r if isinstance(r, Vec) else Vec(r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged matrix")
        self.rows = rows

    @staticmethod
    def identity(d: int) -> "Mat":
        return Mat([unit_vec(d, i) for i in range(d)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Mat({[tuple(map(str, r)) for r in self.rows]})"

    def transpose(self) -> "Mat":
        return Mat(zip(*self.rows)) if self.rows else Mat([])

    def matvec(self, v) -> Vec:
        """M applied to a column vector: returns (r_i . v)_i."""
        return Vec(r.dot(v) for r in self.rows)

    def vecmat(self, v) -> Vec:
        """Row vector times M: returns (v . c_j)_j over columns c_j."""
        if len(v) != self.nrows:
            raise DimensionMismatch("vector/matrix size mismatch")
        return Vec(sum(v[i] * self.rows[i][j] for i in range(self.nrows))
                   for j in range(self.ncols))

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise DimensionMismatch("matrix product size mismatch")
        ot = other.transpose()
        return Mat([Vec(r.dot(c) for c in ot.rows) for r in self.rows])

    def scaled(self, k) -> "Mat":
        return Mat([r * k for r in self.rows])

    def __add__(self, other: "Mat") -> "Mat":
        return Mat([a + b for a, b in zip(self.rows, other.rows)])

    def is_symmetric(self) -> bool:
        n = self.nrows
        return (self.ncols == n and
                all(self.rows[i][j] == self.rows[j][i]
                    for i in range(n) for j in range(i + 1, n)))

    def submatrix(self, row_idx, col_idx) -> "Mat":
        return Mat([Vec(self.rows[i][j] for j in col_idx) for i in row_idx])

    def rref(self):
        """Reduced row echelon form.  Returns (Mat, pivot column tuple)."""
        m = [list(r) for r in self.rows]
        nr, nc = len(m), self.ncols
        pivots = []
        r = 0
        for c in range(nc):
            if r == nr:
                break
            pr = next((i for i in range(r, nr) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            pv = m[r][c]
            m[r] = [x / pv for x in m[r]]
            for i in range(nr):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return Mat(m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Fraction:
        if self.nrows != self.ncols:
            raise DimensionMismatch("determinant of non-square matrix")
        m = [list(r) for r in self.rows]
        n = len(m)
        out = Fraction(1)
        for c in range(n):
            pr = next((i for i in range(c, n) if m[i][c] != 0), None)
            if pr is None:
                return Fraction(0)
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                out = -out
            pv = m[c][c]
            out *= pv
            inv = 1 / pv
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return out

    def inverse(self) -> "Mat | None":
        n = self.nrows
        if n != self.ncols:
            raise DimensionMismatch("inverse of non-square matrix")
        aug = Mat([Vec(list(self.rows[i]) + list(unit_vec(n, i)))
                   for i in range(n)])
        red, piv = aug.rref()
        if piv != tuple(range(n)):
            return None
        return Mat([Vec(r[n:]) for r in red.rows])

    def solve(self, b) -> Vec | None:
        """One exact solution x of M x = b (column sense), or None if the
        system is inconsistent.  Free variables are set to zero."""
        if len(b) != self.nrows:
            raise DimensionMismatch("rhs length mismatch")
        aug = Mat([Vec(list(r) + [b[i]]) for i, r in enumerate(self.rows)])
        red, piv = aug.rref()
        if self.ncols in piv:
            return None
        x = [Fraction(0)] * self.ncols
        for row, c in zip(red.rows, piv):
            x[c] = row[-1]
        return Vec(x)

    def nullspace(self) -> list[Vec]:
        """Basis of {x : M x = 0}, each row primitive integer.  Deterministic:
        one basis vector per free column of the RREF."""
        red, piv = self.rref()
        nc = self.ncols
        free = [c for c in range(nc) if c not in piv]
        out = []
        for f in free:
            x = [Fraction(0)] * nc
            x[f] = Fraction(1)
            for row, c in zip(red.rows, piv):
                x[c] = -row[f]
            out.append(primitive_vector(x))
        return out


def leading_principal_minors(M: Mat) -> list[Fraction]:
    n = M.nrows
    return [M.submatrix(range(k), range(k)).det() for k in range(1, n + 1)]


def is_positive_definite(M: Mat) -> bool:
    """Symmetric with all leading principal minors positive."""
    if M.nrows != M.ncols or M.nrows == 0:
        return False
    if not M.is_symmetric():
        return False
    return all(m > 0 for m in leading_principal_minors(M))


def inner(G: Mat, x, y) -> Fraction:
    """The bilinear form x^T G y."""
    if G.nrows != len(x) or G.ncols != len(y):
        raise DimensionMismatch("form/vector size mismatch")
    return Vec(x).dot(G.matvec(Vec(y)))


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Linear subspace of Q^d with a canonical basis (RREF rows scaled to
    primitive integer vectors), so equal spans compare equal."""

    ambient_dim: int
    basis: tuple[Vec, ...]

    @staticmethod
    def span(vectors, ambient_dim: int) -> "Subspace":
        vectors = [Vec(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch("vector outside ambient space")
        if not vectors:
            return Subspace(ambient_dim, ())
        red, piv = Mat(vectors).rref()
        rows = tuple(primitive_vector(red.rows[i]) for i in range(len(piv)))
        return Subspace(ambient_dim, rows)

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, ())

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace.span([unit_vec(ambient_dim, i)
                              for i in range(ambient_dim)], ambient_dim)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        v = Vec(v)
        if v.is_zero():
            return True
        if not self.basis:
            return False
        return Mat(self.basis).rank() == Mat(list(self.basis) + [v]).rank()

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def plus(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(other.basis),
                             self.ambient_dim)

    def annihilator(self) -> "Subspace":
        """{y : y . b = 0 for every basis vector b}."""
        if not self.basis:
            return Subspace.full(self.ambient_dim)
        return Subspace.span(Mat(self.basis).nullspace(), self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        return self.annihilator().plus(other.annihilator()).annihilator()


def orthogonal_complement(G: Mat, S: Subspace) -> Subspace:
    """{x : x^T G s = 0 for all s in S}; rank d - rank(S) for G invertible."""
    d = S.ambient_dim
    if G.nrows != d:
        raise DimensionMismatch("form dimension differs from ambient")
    if not S.basis:
        return Subspace.full(d)
    rows = [G.matvec(s) for s in S.basis]
    return Subspace.span(Mat(rows).nullspace(), d)


def project_along(S: Subspace, target: Subspace, x) -> Vec:
    """The unique y in `target` with x - y in S.  Requires S + target to be a
    direct sum equal to the ambient space."""
    d = S.ambient_dim
    x = Vec(x)
    combined = list(S.basis) + list(target.basis)
    if S.rank + target.rank != d or Mat(combined).rank() != d:
        raise GeometryError("subspaces are not complementary")
    cols = Mat(combined).transpose()
    coeff = cols.solve(x)
    return vsum((target.basis[j] * coeff[S.rank + j]
                 for j in range(target.rank)), d)


# ---------------------------------------------------------------------------
# integer lattice normal forms
# ---------------------------------------------------------------------------

def _int_rows(rows) -> list[list[int]]:
    out = []
    for r in rows:
        r = Vec(r)
        den = math.lcm(*(c.denominator for c in r)) if len(r) else 1
        out.append([int(c * den) for c in r])
    return out


def hnf(rows) -> tuple[Vec, ...]:
    """Row-style Hermite normal form basis of the lattice generated by the
    given integer rows: echelon shape, positive pivots, entries above a pivot
    reduced into [0, pivot)."""
    work = [list(map(int, r)) for r in _int_rows(rows)]
    if not work:
        return ()
    n = len(work[0])
    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, len(work)) if work[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(work[i][c]), i))
            work[r], work[i0] = work[i0], work[r]
            done = True
            for i in range(r + 1, len(work)):
                if work[i][c] != 0:
                    q = work[i][c] // work[r][c]
                    work[i] = [a - q * b for a, b in zip(work[i], work[r])]
                    if work[i][c] != 0:
                        done = False
            if done:
                break
        if r < len(work) and work[r][c] != 0:
            if work[r][c] < 0:
                work[r] = [-a for a in work[r]]
            for i in range(r):
                q = work[i][c] // work[r][c]
                if q:
                    work[i] = [a - q * b for a, b in zip(work[i], work[r])]
            r += 1
            if r == len(work):
                break
    return tuple(Vec(row) for row in work[:r] if any(row))


def hnf_with_transform(rows):
    """(H, U) with U unimodular, U * rows = H in Hermite form (zero rows of H
    trail).  Input rows must be integral."""
    work = [list(map(int, r)) for r in rows]
    m = len(work)
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    if not work:
        return (), ()
    n = len(work[0])

    def rowop(i, q, r):
        work[i] = [a - q * b for a, b in zip(work[i], work[r])]
        U[i] = [a - q * b for a, b in zip(U[i], U[r])]

    def swap(i, j):
        work[i], work[j] = work[j], work[i]
        U[i], U[j] = U[j], U[i]

    r = 0
    for c in range(n):
        while True:
            nz = [i for i in range(r, m) if work[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(work[i][c]), i))
            swap(r, i0)
            done = True
            for i in range(r + 1, m):
                if work[i][c] != 0:
                    rowop(i, work[i][c] // work[r][c], r)
                    if work[i][c] != 0:
                        done = False
            if done:
                break
        if r < m and work[r][c] != 0:
            if work[r][c] < 0:
                work[r] = [-a for a in work[r]]
                U[r] = [-a for a in U[r]]
            for i in range(r):
                q = work[i][c] // work[r][c]
                if q:
                    rowop(i, q, r)
            r += 1
            if r == m:
                break
    return tuple(Vec(row) for row in work), tuple(Vec(row) for row in U)


def integer_kernel(M: Mat) -> tuple[Vec, ...]:
    """Saturated basis of {x in Z^n : M x = 0} for integral M (rational M is
    scaled row-wise first, which does not change the kernel)."""
    rows = _int_rows(M.rows)
    n = M.ncols
    if not rows:
        return tuple(unit_vec(n, i) for i in range(n))
    mt = [[rows[i][j] for i in range(len(rows))] for j in range(n)]
    H, U = hnf_with_transform(mt)
    return tuple(U[i] for i in range(n) if not any(H[i]))


def saturate(rows, ambient_dim: int) -> tuple[Vec, ...]:
    """Basis of Z^d intersected with the rational span of the rows."""
    vs = [Vec(r) for r in rows]
    if not vs:
        return ()
    ann = integer_kernel(Mat(vs))
    if not ann:
        return tuple(hnf([unit_vec(ambient_dim, i)
                          for i in range(ambient_dim)]))
    return tuple(hnf(integer_kernel(Mat(ann))))


def index_in_saturation(rows) -> int:
    """Index of the integer row lattice inside its saturation: the gcd of all
    maximal minors of a basis."""
    basis = hnf(rows)
    if not basis:
        return 1
    r = len(basis)
    M = Mat(basis)
    minors = []
    for cols in combinations(range(M.ncols), r):
        minors.append(int(M.submatrix(range(r), cols).det()))
    g = math.gcd(*minors) if minors else 0
    if g == 0:
        raise GeometryError("rows are not linearly independent")
    return g


def solve_functional_one(m) -> Vec:
    """Integer t with m . t = 1 for a primitive integer vector m."""
    m = [int(c) for c in Vec(m)]
    d = len(m)
    g = m[0]
    coeff = [1] + [0] * (d - 1)
    for i in range(1, d):
        if m[i] == 0:
            continue
        x, y, g2 = _xgcd(g, m[i])
        coeff = [c * x for c in coeff]
        coeff[i] += y
        g = g2
    if abs(g) != 1:
        raise GeometryError("functional is not primitive")
    if g == -1:
        coeff = [-c for c in coeff]
    return Vec(coeff)


def _xgcd(a: int, b: int):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return x, y, g


# ---------------------------------------------------------------------------
# quadratic form tools and lattice point enumeration
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def ldl_decomposition(G: Mat):
    """G = L D L^T with L unit lower triangular, D positive diagonal.
    Exists exactly when G is positive definite."""
    n = G.nrows
    L = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = G[j][j] - sum(L[j][k] * L[j][k] * D[k] for k in range(j))
        if D[j] <= 0:
            raise GeometryError("form is not positive definite")
        L[j][j] = Fraction(1)
        for i in range(j + 1, n):
            L[i][j] = (G[i][j] - sum(L[i][k] * L[j][k] * D[k]
                                     for k in range(j))) / D[j]
    return Mat(L), tuple(D)


def lattice_points_within(G: Mat, center, bound_sq, parity=None):
    """All integer points x with (x - center)^T G (x - center) <= bound_sq,
    optionally restricted to x = parity (mod 2).  Returns a list of
    (value, point) pairs, exact and sorted.

    Floats are used only to bracket each coordinate range; every candidate is
    re-checked in exact arithmetic before recursing, so rounding can only
    cost a few extra loop iterations."""
    center = Vec(center)
    bound_sq = Fraction(bound_sq)
    n = G.nrows
    L, D = ldl_decomposition(G)
    out = []
    x = [0] * n

    def rec(i, remaining):
        if i < 0:
            pt = Vec(x)
            val = bound_sq - remaining
            out.append((val, pt))
            return
        tau = center[i] - sum(L[j][i] * (x[j] - center[j])
                              for j in range(i + 1, n))
        # |x_i - tau| <= sqrt(remaining / D_i)
        rad = math.sqrt(max(float(remaining / D[i]), 0.0)) + 1e-9
        lo = math.ceil(float(tau) - rad) - 1
        hi = math.floor(float(tau) + rad) + 1
        if parity is not None:
            if lo % 2 != parity[i] % 2:
                lo += 1
            step = 2
        else:
            step = 1
        for xi in range(lo, hi + 1, step):
            cost = D[i] * (xi - tau) ** 2
            if cost <= remaining:
                x[i] = xi
                rec(i - 1, remaining - cost)
        x[i] = 0

    rec(n - 1, bound_sq)
    return sorted(out)


# ---------------------------------------------------------------------------
# double description
# ---------------------------------------------------------------------------

def _primitive_int_tuple(row):
    g = math.gcd(*(abs(c) for c in row))
    if g > 1:
        row = tuple(c // g for c in row)
    return tuple(row)


def _scale_halfspace(normal, offset):
    """Canonical integer form of {x : normal . x <= offset}: the combined
    vector (normal, offset) made primitive by a positive rational factor."""
    normal = Vec(normal)
    offset = Fraction(offset)
    if normal.is_zero():
        raise GeometryError("halfspace with zero normal")
    den = math.lcm(offset.denominator, *(c.denominator for c in normal))
    ints = [int(c * den) for c in normal] + [int(offset * den)]
    g = math.gcd(*(abs(c) for c in ints))
    ints = [c // g for c in ints]
    return Vec(ints[:-1]), Fraction(ints[-1])


def _dd_cone(rows):
    """Extreme rays of the cone {y : r . y <= 0 for each row r}.

    Returns (lineality_basis, rays, tight_masks).  Rows must be integer
    tuples.  `tight_masks[i]` has bit j set iff rows[j] . rays[i] == 0.  The
    lineality basis always spans the intersection of the row kernels; ray
    adjacency uses the standard combinatorial test, which is valid because
    rays are kept in the quotient modulo lineality (every ray is tight on all
    constraints that the lineality satisfies)."""
    if not rows:
        raise GeometryError("empty constraint system")
    dim = len(rows[0])
    lineality = [tuple(1 if j == i else 0 for j in range(dim))
                 for i in range(dim)]
    rays: list[tuple] = []
    tight: list[int] = []

    for idx, row in enumerate(rows):
        vals = [sum(a * b for a, b in zip(row, l)) for l in lineality]
        piv = next((k for k, v in enumerate(vals) if v != 0), None)
        if piv is not None:
            pl = lineality.pop(piv)
            v0 = vals.pop(piv)
            if v0 > 0:
                pl = tuple(-c for c in pl)
                v0 = -v0
            new_lin = []
            for l, v in zip(lineality, vals):
                if v:
                    l = tuple(v0 * a - v * b for a, b in zip(l, pl))
                new_lin.append(_primitive_int_tuple(l))
            lineality = new_lin
            new_rays = []
            for r in rays:
                v = sum(a * b for a, b in zip(row, r))
                if v:
                    r = _primitive_int_tuple(
                        tuple(-v0 * a + v * b for a, b in zip(r, pl)))
                new_rays.append(r)
            rays = new_rays
            tight = [m | (1 << idx) for m in tight]
            rays.append(pl)
            tight.append((1 << idx) - 1)
            continue

        vals = [sum(a * b for a, b in zip(row, r)) for r in rays]
        if all(v <= 0 for v in vals):
            tight = [m | (1 << idx) if v == 0 else m
                     for m, v in zip(tight, vals)]
            continue
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        keep_rays = [rays[k] for k in zer + neg]
        keep_tight = [tight[k] | (1 << idx) for k in zer] + \
                     [tight[k] for k in neg]
        others = [(tight[k], k) for k in range(len(rays))]
        for p in pos:
            tp = tight[p]
            for q in neg:
                common = tp & tight[q]
                adjacent = True
                for tm, k in others:
                    if k != p and k != q and (tm & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                combo = tuple(vp * b - vq * a
                              for a, b in zip(rays[p], rays[q]))
                keep_rays.append(_primitive_int_tuple(combo))
                keep_tight.append(common | (1 << idx))
        rays = keep_rays
        tight = keep_tight

    return lineality, rays, tight


def _homogenize(halfspaces):
    if not halfspaces:
        raise GeometryError("empty halfspace list cannot be bounded")
    canon = [_scale_halfspace(n, b) for n, b in halfspaces]
    d = len(canon[0][0])
    rows = [tuple([-1] + [0] * d)]  # t >= 0
    for n, b in canon:
        rows.append(tuple([-int(b)] + [int(c) for c in n]))
    return canon, rows


def halfspace_intersection_vertices(halfspaces):
    """Vertices of the (possibly empty or lower-dimensional) intersection of
    the halfspaces {normal . x <= offset}.  Raises UnboundedRegion if the
    intersection is unbounded."""
    canon, rows = _homogenize(halfspaces)
    lineality, rays, _ = _dd_cone(rows)
    if lineality:
        raise UnboundedRegion("halfspace intersection contains a line")
    verts = []
    for r in rays:
        if r[0] == 0:
            raise UnboundedRegion("halfspace intersection has a recession ray")
        t = r[0]
        verts.append(Vec(Fraction(c, t) for c in r[1:]))
    return sorted(set(verts))


# ---------------------------------------------------------------------------
# polytopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    """Face of a polytope: vertex bitmask plus the full set of facets
    containing it (the canonical, order-free face key)."""

    dim: int
    vertex_mask: int
    facet_ids: frozenset

    def vertex_ids(self):
        m = self.vertex_mask
        out = []
        i = 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return out


class Polytope:
    """Bounded full-dimensional convex polytope with exact H- and V-
    representations and the vertex/facet incidence between them."""

    __slots__ = ("dim", "vertices", "halfspaces", "facet_masks",
                 "_face_levels", "_affdim_cache", "_volume")

    def __init__(self, vertices, halfspaces):
        vertices = sorted(set(Vec(v) for v in vertices))
        if not vertices:
            raise EmptyRegion("polytope with no vertices")
        self.dim = len(vertices[0])
        self.vertices = tuple(vertices)
        hs = []
        seen = set()
        for n, b in halfspaces:
            n, b = _scale_halfspace(n, b)
            if (n, b) not in seen:
                seen.add((n, b))
                hs.append((n, b))
        self.halfspaces = tuple(hs)
        masks = []
        for n, b in self.halfspaces:
            m = 0
            for i, v in enumerate(self.vertices):
                if n.dot(v) == b:
                    m |= 1 << i
            masks.append(m)
        self.facet_masks = tuple(masks)
        self._face_levels = {}
        self._affdim_cache = {}
        self._volume = None

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_halfspaces(halfspaces) -> "Polytope":
        """Exact H-to-V conversion (double description).  The input must be
        bounded and full-dimensional; redundant halfspaces are dropped."""
        verts = halfspace_intersection_vertices(halfspaces)
        if not verts:
            raise EmptyRegion("inconsistent halfspaces")
        d = len(verts[0])
        if _affine_dim(verts) != d:
            raise NotFullDimensional("halfspaces cut a lower-dimensional set")
        poly = Polytope(verts, halfspaces)
        keep = [i for i in range(len(poly.halfspaces))
                if poly._mask_affdim(poly.facet_masks[i]) == d - 1]
        if len(keep) != len(poly.halfspaces):
            poly = Polytope(verts, [poly.halfspaces[i] for i in keep])
        return poly

    @staticmethod
    def from_points(points) -> "Polytope":
        """Exact V-to-H conversion via the polar dual around the centroid."""
        pts = sorted(set(Vec(p) for p in points))
        if not pts:
            raise EmptyRegion("no points")
        d = len(pts[0])
        if _affine_dim(pts) != d:
            raise NotFullDimensional("points do not span the space")
        c = vsum(pts, d) * Fraction(1, len(pts))
        # a point at the centroid is interior, contributes nothing to the dual
        dual_hs = [(p - c, Fraction(1)) for p in pts if p != c]
        dual_verts = halfspace_intersection_vertices(dual_hs)
        halfspaces = [(w, 1 + w.dot(c)) for w in dual_verts]
        extreme = []
        for p in pts:
            tightn = [w for w, b in halfspaces if w.dot(p) == b]
            if tightn and Mat(tightn).rank() == d:
                extreme.append(p)
        return Polytope(extreme, halfspaces)

    # -- basic queries -------------------------------------------------------

    @property
    def nvertices(self) -> int:
        return len(self.vertices)

    @property
    def nfacets(self) -> int:
        return len(self.halfspaces)

    def contains(self, x) -> bool:
        x = Vec(x)
        return all(n.dot(x) <= b for n, b in self.halfspaces)

    def on_boundary(self, x) -> bool:
        x = Vec(x)
        return self.contains(x) and any(n.dot(x) == b
                                        for n, b in self.halfspaces)

    def translate(self, t) -> "Polytope":
        t = Vec(t)
        return Polytope([v + t for v in self.vertices],
                        [(n, b + n.dot(t)) for n, b in self.halfspaces])

    def centroid(self) -> Vec:
        return vsum(self.vertices, self.dim) * Fraction(1, self.nvertices)

    def is_centrally_symmetric(self) -> bool:
        c2 = vsum(self.vertices, self.dim) * Fraction(2, self.nvertices)
        vs = set(self.vertices)
        return all((c2 - v) in vs for v in self.vertices)

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return (f"Polytope(dim={self.dim}, vertices={self.nvertices}, "
                f"facets={self.nfacets})")

    # -- face lattice --------------------------------------------------------

    def _mask_affdim(self, mask: int) -> int:
        cached = self._affdim_cache.get(mask)
        if cached is not None:
            return cached
        pts = [self.vertices[i] for i in _bits(mask)]
        d = _affine_dim(pts)
        self._affdim_cache[mask] = d
        return d

    def _facets_containing(self, mask: int) -> frozenset:
        return frozenset(i for i, fm in enumerate(self.facet_masks)
                         if (fm & mask) == mask)

    def faces(self, k: int) -> tuple[Face, ...]:
        """All k-dimensional faces, each reported once, via the vertex/facet
        incidence closure."""
        if not 0 <= k <= self.dim - 1:
            raise GeometryError("face dimension out of range")
        lv = self._face_levels.get(k)
        if lv is not None:
            return lv

        if k == self.dim - 1:
            faces = tuple(Face(k, m, self._facets_containing(m))
                          for m in self.facet_masks)
            self._face_levels[k] = faces
            return faces

        if k == self.dim - 2:
            found = {}
            for i, j in combinations(range(self.nfacets), 2):
                m = self.facet_masks[i] & self.facet_masks[j]
                if m and m not in found and self._mask_affdim(m) == k:
                    found[m] = Face(k, m, self._facets_containing(m))
            faces = tuple(sorted(found.values(), key=lambda f: f.vertex_mask))
            self._face_levels[k] = faces
            return faces

        upper = self.faces(k + 1)
        found = {}
        for face in upper:
            for i in range(self.nfacets):
                if i in face.facet_ids:
                    continue
                m = face.vertex_mask & self.facet_masks[i]
                if m and m not in found and self._mask_affdim(m) == k:
                    found[m] = Face(k, m, self._facets_containing(m))
        faces = tuple(sorted(found.values(), key=lambda f: f.vertex_mask))
        self._face_levels[k] = faces
        return faces

    def face_vertices(self, face: Face) -> list[Vec]:
        return [self.vertices[i] for i in face.vertex_ids()]

    # -- volume --------------------------------------------------------------

    def volume(self) -> Fraction:
        """Exact Lebesgue volume via a fan triangulation of the boundary."""
        if self._volume is not None:
            return self._volume
        d = self.dim
        if d == 1:
            vol = self.vertices[-1][0] - self.vertices[0][0]
        else:
            apex = self.centroid()
            vol = Fraction(0)
            fact = math.factorial(d)
            for simplex in self._triangulate_boundary():
                pts = [self.vertices[i] for i in simplex]
                rows = [p - apex for p in pts]
                vol += abs(Mat(rows).det()) / fact
        self._volume = vol
        return vol

    def _triangulate_boundary(self):
        """(d-1)-simplices (as vertex index tuples) covering the boundary."""
        d = self.dim
        if d == 2:
            cyc = self._polygon_cycle((1 << self.nvertices) - 1)
            return [(cyc[i], cyc[(i + 1) % len(cyc)])
                    for i in range(len(cyc))]
        out = []
        for fid in range(self.nfacets):
            out.extend(self._triangulate_face(self.facet_masks[fid], d - 1))
        return out

    def _triangulate_face(self, mask: int, k: int):
        if k == 1:
            ids = _bits(mask)
            return [tuple(ids)]
        if k == 2:
            cyc = self._polygon_cycle(mask)
            return [(cyc[0], cyc[i], cyc[i + 1])
                    for i in range(1, len(cyc) - 1)]
        sub = [f for f in self.faces(k - 1)
               if (f.vertex_mask & mask) == f.vertex_mask]
        v0 = min(_bits(mask))
        out = []
        for f in sub:
            if f.vertex_mask & (1 << v0):
                continue
            for s in self._triangulate_face(f.vertex_mask, k - 1):
                out.append(s + (v0,))
        return out

    def _polygon_cycle(self, mask: int):
        """Vertex ids of a 2-face in convex cyclic order."""
        ids = _bits(mask)
        pts = [self.vertices[i] for i in ids]
        base = pts[0]
        e1 = next(p - base for p in pts[1:] if not (p - base).is_zero())
        e2 = None
        for p in pts[1:]:
            w = p - base
            if Mat([e1, w]).rank() == 2:
                e2 = w
                break
        if e2 is None:
            raise GeometryError("2-face is degenerate")
        # chart through two coordinates where [e1;e2] is invertible
        cols = None
        for c1, c2 in combinations(range(self.dim), 2):
            if e1[c1] * e2[c2] - e1[c2] * e2[c1] != 0:
                cols = (c1, c2)
                break
        cx, cy = cols
        n = len(ids)
        gx = sum(p[cx] for p in pts) / n
        gy = sum(p[cy] for p in pts) / n
        flat = [(p[cx] - gx, p[cy] - gy, i) for p, i in zip(pts, ids)]

        def half(t):
            return 0 if (t[1] > 0 or (t[1] == 0 and t[0] > 0)) else 1

        import functools

        def cmp(a, b):
            ha, hb = half(a), half(b)
            if ha != hb:
                return ha - hb
            cr = a[0] * b[1] - a[1] * b[0]
            return -1 if cr > 0 else (1 if cr < 0 else 0)

        flat.sort(key=functools.cmp_to_key(cmp))
        return [t[2] for t in flat]


def _bits(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _affine_dim(points) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return Mat([p - base for p in points[1:]]).rank()


def affine_dim(points) -> int:
    """Dimension of the affine hull of a point set."""
    return _affine_dim([Vec(p) for p in points])


def dd_hull(halfspaces) -> Polytope:
    """H-representation to V-representation, exactly."""
    return Polytope.from_halfspaces(halfspaces)


def dd_facets(points) -> Polytope:
    """V-representation to H-representation, exactly."""
    return Polytope.from_points(points)


def intersect_polytopes(p: Polytope, q: Polytope) -> list[Vec]:
    """Vertex list of the (possibly empty, possibly lower-dimensional)
    intersection of two bounded polytopes."""
    return halfspace_intersection_vertices(
        list(p.halfspaces) + list(q.halfspaces))
