"""Randomized verification campaigns.

Each campaign samples Gram matrices deterministically from a seed, builds
the Voronoi cells, and runs the selected verification suites.  Failures are
never fatal: each one is recorded with a replayable JSON dump of the exact
instance, and the report is assembled by instance index, so identical
configurations produce identical reports (timings aside)."""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .exactgeom import Mat, Subspace, TheoremViolation, Vec, primitive_vector
from .voronoi import (
    LatticeForm, check_minkowski_venkov, voronoi_cell,
)
from . import jsonio

ALL_SUITES = ("venkov", "free", "extend", "recover", "dilate", "cross",
              "decompose", "lemmas")


@dataclass(frozen=True)
class CampaignConfig:
    seed: int
    dims: tuple = (2, 3)
    count: int = 20
    entry_bound: int = 2
    suites: tuple = ALL_SUITES
    directions_per_cell: int = 8

    def __post_init__(self):
        if not set(self.dims) <= {1, 2, 3, 4, 5}:
            raise ValueError("dims must lie in {1,...,5}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        unknown = set(self.suites) - set(ALL_SUITES)
        if unknown:
            raise ValueError(f"unknown suites: {sorted(unknown)}")


@dataclass
class CampaignReport:
    config: CampaignConfig
    attempted: dict = field(default_factory=dict)
    passed: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    suite_seconds: dict = field(default_factory=dict)

    @property
    def total_failures(self) -> int:
        return len(self.failures)

    def to_json(self) -> dict:
        return {
            "config": {
                "seed": self.config.seed,
                "dims": list(self.config.dims),
                "count": self.config.count,
                "entry_bound": self.config.entry_bound,
                "suites": list(self.config.suites),
            },
            "attempted": dict(sorted(self.attempted.items())),
            "passed": dict(sorted(self.passed.items())),
            "failures": self.failures,
            "suite_seconds": {k: round(v, 3)
                              for k, v in sorted(self.suite_seconds.items())},
        }


def _instance_seed(seed: int, d: int, index: int) -> int:
    payload = f"{seed}:{d}:{index}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def sample_gram(seed: int, d: int, entry_bound: int) -> Mat:
    """G = A^T A + I with A a seeded random integer matrix: always positive
    definite, deterministic per seed."""
    if d < 1 or entry_bound < 1:
        raise ValueError("d and entry_bound must be >= 1")
    rng = random.Random(seed)
    A = [[rng.randint(-entry_bound, entry_bound) for _ in range(d)]
         for _ in range(d)]
    rows = [[sum(A[k][i] * A[k][j] for k in range(d)) + (1 if i == j else 0)
             for j in range(d)] for i in range(d)]
    return Mat(rows)


def _sample_directions(rng: random.Random, d: int, count: int):
    out = []
    seen = set()
    while len(out) < count:
        v = tuple(rng.randint(-2, 2) for _ in range(d))
        if not any(v):
            continue
        key = tuple(primitive_vector(Vec(v)))
        if key in seen:
            continue
        seen.add(key)
        out.append(Vec(key))
    return out


def free_directions(cell, limit: int = 6):
    """Deterministic free directions: basis vectors and pair sums from each
    maximal perfect free space."""
    from .freespace import is_free_segment, perfect_free_spaces
    out = []
    seen = set()
    for ps in perfect_free_spaces(cell):
        basis = list(ps.space.basis)
        candidates = list(basis)
        candidates += [basis[i] + basis[j]
                       for i in range(len(basis))
                       for j in range(i + 1, len(basis))]
        for v in candidates:
            key = tuple(primitive_vector(v))
            if key in seen:
                continue
            seen.add(key)
            if is_free_segment(cell, Vec(key)):
                out.append(Vec(key))
            if len(out) >= limit:
                return out
    return out


def _dump(form: LatticeForm, **extra) -> dict:
    out = {"gram": jsonio.mat_to_json(form.gram), "dim": form.dim}
    out.update(extra)
    return out


def _check_venkov(form, cell, report_fail):
    ok = True
    if cell.polytope.volume() != 1:
        report_fail("volume != 1")
        ok = False
    if cell.nfacets > 2 * (2 ** cell.dim - 1):
        report_fail("facet bound exceeded")
        ok = False
    if not check_minkowski_venkov(cell.polytope).passes:
        report_fail("Minkowski-Venkov conditions failed")
        ok = False
    return ok


def _check_free(form, cell, rng, ndirs, report_fail):
    from .exactgeom import Polytope
    from .freespace import is_free_segment, perfect_free_spaces
    from .structure import decompose
    ok = True
    h = Fraction(1, 4)
    for u in _sample_directions(rng, cell.dim, ndirs):
        claimed = is_free_segment(cell, u)
        x = u * h
        pts = [v + x for v in cell.polytope.vertices]
        pts += [v - x for v in cell.polytope.vertices]
        hull = Polytope.from_points(pts)
        actual = check_minkowski_venkov(hull).passes
        if claimed != actual:
            report_fail("belt criterion disagrees with extension tiling",
                        direction=jsonio.vec_to_json(u))
            ok = False
    max_rank = max((ps.space.rank for ps in perfect_free_spaces(cell)),
                   default=0)
    if max_rank >= 2 and decompose(cell).k < 2:
        report_fail("cell with a free plane failed to decompose")
        ok = False
    return ok


def _check_extend(form, cell, report_fail):
    from .extend import SegmentSpec, minkowski_extend, is_parallelohedron
    ok = True
    for u in free_directions(cell, limit=4):
        ext = minkowski_extend(cell, SegmentSpec(u, Fraction(1, 4)))
        if not is_parallelohedron(ext.polytope, ext.lattice_rows):
            report_fail("extension is not a parallelohedron",
                        direction=jsonio.vec_to_json(u))
            ok = False
    return ok


def _check_recover(form, cell, report_fail):
    from .extend import SegmentSpec, minkowski_extend, recover_voronoi_metric
    ok = True
    for u in free_directions(cell, limit=3):
        ext = minkowski_extend(cell, SegmentSpec(u, Fraction(1, 4)))
        rec = recover_voronoi_metric(
            ext.polytope, ext.lattice_rows,
            tuple(p.facet_vector for p in ext.provenance))
        if not rec.found:
            report_fail("metric recovery failed on extension",
                        direction=jsonio.vec_to_json(u))
            ok = False
    return ok


def _check_dilate(form, cell, rng, ndirs, report_fail):
    from .structure import check_lemma72
    ok = True
    for n in _sample_directions(rng, form.dim, ndirs):
        if not check_lemma72(form, n):
            report_fail("dilatation enlarged the non-orthogonal span",
                        direction=jsonio.vec_to_json(n))
            ok = False
    return ok


def _check_cross(form, cell, report_fail):
    from .structure import (
        check_corollary73, decompose, find_cross)
    ok = True
    cross = find_cross(cell)
    if cross is None:
        return ok
    dec = decompose(cell)
    if dec.k < 2:
        report_fail("cell with a cross failed to decompose")
        ok = False
    for f in dec.factors:
        if not (cross.pi1.contains_subspace(f.subspace)
                or cross.pi2.contains_subspace(f.subspace)):
            report_fail("factor parallel to neither cross hyperplane")
            ok = False
    if not check_corollary73(form, cross):
        report_fail("dilatation along a cross normal broke the cross")
        ok = False
    return ok


def _check_decompose(form, cell, report_fail):
    from .structure import decompose
    from .voronoi import voronoi_cell as vc
    ok = True
    dec = decompose(cell)  # reconstruction is verified internally
    for f in dec.factors:
        factor_cell = vc(f.form)
        if factor_cell.polytope.vertices != f.polytope.vertices:
            report_fail("factor slice differs from factor Voronoi cell")
            ok = False
    return ok


def _check_lemmas(form, cell, report_fail):
    from .freespace import (
        check_lemma32, check_lemma33, check_lemma34, check_lemma35)
    ok = True
    for u in free_directions(cell, limit=3):
        for name, fn in (("cap span inside <A u B>", check_lemma32),
                         ("Z(A u B) saturated", check_lemma33),
                         ("facet vectors in span are parallel",
                          check_lemma34)):
            if not fn(cell, u):
                report_fail(f"failed: {name}",
                            direction=jsonio.vec_to_json(u))
                ok = False
        if cell.dim <= 3 and not check_lemma35(cell, u):
            report_fail("failed: layer projection identity",
                        direction=jsonio.vec_to_json(u))
            ok = False
    return ok


def run_suite(config: CampaignConfig) -> CampaignReport:
    """Run the configured suites over the sampled forms.  Theorem-violation
    errors raised inside a check are converted into recorded failures."""
    report = CampaignReport(config)
    for suite in config.suites:
        report.attempted[suite] = 0
        report.passed[suite] = 0
        report.suite_seconds[suite] = 0.0

    for d in config.dims:
        for index in range(config.count):
            iseed = _instance_seed(config.seed, d, index)
            gram = sample_gram(iseed, d, config.entry_bound)
            form = LatticeForm(d, gram)
            cell = voronoi_cell(form)
            for suite in config.suites:
                rng = random.Random(
                    _instance_seed(iseed, d, ALL_SUITES.index(suite)))
                failures_here = []

                def report_fail(reason, **extra):
                    failures_here.append(_dump(form, suite=suite,
                                               index=index, reason=reason,
                                               **extra))

                t0 = time.perf_counter()
                try:
                    if suite == "venkov":
                        _check_venkov(form, cell, report_fail)
                    elif suite == "free":
                        _check_free(form, cell, rng,
                                    config.directions_per_cell, report_fail)
                    elif suite == "extend":
                        _check_extend(form, cell, report_fail)
                    elif suite == "recover":
                        _check_recover(form, cell, report_fail)
                    elif suite == "dilate":
                        _check_dilate(form, cell, rng,
                                      config.directions_per_cell, report_fail)
                    elif suite == "cross":
                        _check_cross(form, cell, report_fail)
                    elif suite == "decompose":
                        _check_decompose(form, cell, report_fail)
                    elif suite == "lemmas":
                        _check_lemmas(form, cell, report_fail)
                except TheoremViolation as exc:
                    report_fail(str(exc), detail=exc.detail)
                report.suite_seconds[suite] += time.perf_counter() - t0
                report.attempted[suite] += 1
                if failures_here:
                    report.failures.extend(failures_here)
                else:
                    report.passed[suite] += 1
    return report


def replay(dump: dict) -> CampaignReport:
    """Re-run the suite of a failure dump on its exact instance."""
    gram = jsonio.mat_from_json(dump["gram"])
    d = gram.nrows
    cfg = CampaignConfig(seed=0, dims=(d,), count=1,
                         suites=(dump["suite"],))
    report = CampaignReport(cfg)
    report.attempted[dump["suite"]] = 1
    report.passed[dump["suite"]] = 0
    report.suite_seconds[dump["suite"]] = 0.0
    form = LatticeForm(d, gram)
    cell = voronoi_cell(form)
    failures_here = []

    def report_fail(reason, **extra):
        failures_here.append(_dump(form, suite=dump["suite"], index=0,
                                   reason=reason, **extra))

    rng = random.Random(0)
    checker = {
        "venkov": lambda: _check_venkov(form, cell, report_fail),
        "free": lambda: _check_free(form, cell, rng, 8, report_fail),
        "extend": lambda: _check_extend(form, cell, report_fail),
        "recover": lambda: _check_recover(form, cell, report_fail),
        "dilate": lambda: _check_dilate(form, cell, rng, 8, report_fail),
        "cross": lambda: _check_cross(form, cell, report_fail),
        "decompose": lambda: _check_decompose(form, cell, report_fail),
        "lemmas": lambda: _check_lemmas(form, cell, report_fail),
    }[dump["suite"]]
    try:
        checker()
    except TheoremViolation as exc:
        report_fail(str(exc), detail=exc.detail)
    report.failures.extend(failures_here)
    if not failures_here:
        report.passed[dump["suite"]] = 1
    return report
