"""Command-line interface.

Every subcommand reads one JSON object from a file argument or standard
input and writes one JSON object to standard output, so the tools compose
in shell pipelines.  Exit codes: 0 success, 1 structural failure (a check
did not pass, or a theorem-violation candidate surfaced), 2 bad input."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import jsonio
from .exactgeom import (
    GeometryError, Mat, Polytope, Subspace, TheoremViolation, Vec,
)
from .jsonio import InputError
from .voronoi import LatticeForm, check_minkowski_venkov, voronoi_cell


def _read_payload(args) -> dict:
    if args.input and args.input != "-":
        with open(args.input) as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("top-level JSON value must be an object")
    return data


def _emit(args, obj) -> None:
    print(jsonio.dumps(obj, pretty=args.pretty))


def _cell_of(data) -> "tuple":
    form = jsonio.form_from_json(data)
    return form, voronoi_cell(form)


def _polytope_of(data) -> Polytope:
    if "vertices" in data:
        return Polytope.from_points(
            [jsonio.vec_from_json(v) for v in data["vertices"]])
    if "halfspaces" in data:
        hs = [(jsonio.vec_from_json(h["normal"]),
               jsonio.str_to_rat(h["offset"])) for h in data["halfspaces"]]
        return Polytope.from_halfspaces(hs)
    raise InputError("need \"vertices\" or \"halfspaces\"")


def cmd_cell(args) -> int:
    _, cell = _cell_of(_read_payload(args))
    _emit(args, jsonio.cell_to_json(cell))
    return 0


def cmd_belts(args) -> int:
    from .voronoi import belts
    _, cell = _cell_of(_read_payload(args))
    _emit(args, {"belts": [{"direction": jsonio.subspace_to_json(b.direction),
                            "facets": list(b.facet_indices),
                            "size": b.size} for b in belts(cell)]})
    return 0


def cmd_venkov(args) -> int:
    data = _read_payload(args)
    if "gram" in data:
        _, cell = _cell_of(data)
        poly = cell.polytope
    else:
        poly = _polytope_of(data)
    rep = check_minkowski_venkov(poly)
    _emit(args, jsonio.venkov_to_json(rep))
    return 0 if rep.passes else 1


def cmd_delaunay(args) -> int:
    from .delaunay import (
        classify_dual_cell, closest_lattice_points, covering_radius_sq,
        dual_cell)
    from .voronoi import faces
    data = _read_payload(args)
    form, cell = _cell_of(data)
    if "point" in data:
        x = jsonio.vec_from_json(data["point"])
        dist_sq, pts = closest_lattice_points(form, x)
        _emit(args, {"point": jsonio.vec_to_json(x),
                     "dist_sq": jsonio.rat_to_str(dist_sq),
                     "closest": [jsonio.vec_to_json(p) for p in pts]})
        return 0
    summary = {"covering_radius_sq":
               jsonio.rat_to_str(covering_radius_sq(form))}
    for k in (cell.dim - 2, cell.dim - 3):
        if k < 0:
            continue
        counts: dict = {}
        for face in faces(cell, k):
            tag = classify_dual_cell(dual_cell(cell, face)).value
            counts[tag] = counts.get(tag, 0) + 1
        summary[f"dual_types_dim_{cell.dim - k}"] = dict(sorted(counts.items()))
    _emit(args, summary)
    return 0


def cmd_free(args) -> int:
    from .freespace import ab_sets, is_free_segment, perfect_free_spaces
    data = _read_payload(args)
    form, cell = _cell_of(data)
    if "direction" not in data:
        raise InputError("missing \"direction\"")
    u = jsonio.vec_from_json(data["direction"])
    free = is_free_segment(cell, u)
    ab = ab_sets(cell, u) if free else None
    perfect = perfect_free_spaces(cell)
    _emit(args, jsonio.freespace_report_to_json(cell, u, free, ab, perfect))
    return 0 if free else 1


def cmd_perfect(args) -> int:
    from .freespace import perfect_free_spaces
    _, cell = _cell_of(_read_payload(args))
    perfect = perfect_free_spaces(cell)
    _emit(args, {"perfect_spaces": [
        {"rank": ps.space.rank,
         "basis": jsonio.subspace_to_json(ps.space),
         "witness_facets": sorted(ps.witness_facets)} for ps in perfect]})
    return 0


def cmd_extend(args) -> int:
    from .extend import SegmentSpec, minkowski_extend, recover_voronoi_metric
    data = _read_payload(args)
    form, cell = _cell_of(data)
    if "direction" not in data:
        raise InputError("missing \"direction\"")
    u = jsonio.vec_from_json(data["direction"])
    half = jsonio.str_to_rat(data.get("half_length", "1/4"))
    ext = minkowski_extend(cell, SegmentSpec(u, half))
    rec = recover_voronoi_metric(ext.polytope, ext.lattice_rows,
                                 tuple(p.facet_vector for p in ext.provenance))
    out = jsonio.extended_cell_to_json(ext)
    out["recovery"] = jsonio.recovery_to_json(rec)
    _emit(args, out)
    return 0 if rec.found else 1


def cmd_recover(args) -> int:
    from .extend import recover_voronoi_metric
    data = _read_payload(args)
    poly = _polytope_of(data)
    if "lattice" not in data:
        raise InputError("missing \"lattice\"")
    rows = [jsonio.vec_from_json(r) for r in data["lattice"]]
    rec = recover_voronoi_metric(poly, rows)
    _emit(args, jsonio.recovery_to_json(rec))
    return 0 if rec.found else 1


def cmd_dilate(args) -> int:
    from .structure import check_lemma72, dilate
    data = _read_payload(args)
    form = jsonio.form_from_json(data)
    if "direction" not in data:
        raise InputError("missing \"direction\"")
    n = jsonio.vec_from_json(data["direction"])
    G2 = dilate(form.gram, n)
    ok = check_lemma72(form, n)
    _emit(args, {"gram": jsonio.mat_to_json(G2),
                 "span_inclusion": ok})
    return 0 if ok else 1


def cmd_twofold(args) -> int:
    from .structure import twofold_dilatation
    data = _read_payload(args)
    form = jsonio.form_from_json(data)
    if "pi1" not in data or "pi2" not in data:
        raise InputError("missing \"pi1\"/\"pi2\"")
    pi1 = Subspace.span([jsonio.vec_from_json(v) for v in data["pi1"]],
                        form.dim)
    pi2 = Subspace.span([jsonio.vec_from_json(v) for v in data["pi2"]],
                        form.dim)
    tw = twofold_dilatation(form, pi1, pi2)
    _emit(args, jsonio.twofold_to_json(tw))
    return 0


def cmd_cross(args) -> int:
    from .structure import find_cross
    _, cell = _cell_of(_read_payload(args))
    cross = find_cross(cell)
    _emit(args, jsonio.cross_to_json(cross))
    return 0


def cmd_decompose(args) -> int:
    from .structure import decompose
    _, cell = _cell_of(_read_payload(args))
    dec = decompose(cell)
    _emit(args, jsonio.decomposition_to_json(dec))
    return 0


def cmd_analyze_plane(args) -> int:
    from .structure import lemma93_analyze
    data = _read_payload(args)
    form, cell = _cell_of(data)
    if "plane" not in data:
        raise InputError("missing \"plane\"")
    plane = Subspace.span([jsonio.vec_from_json(v) for v in data["plane"]],
                          form.dim)
    res = lemma93_analyze(cell, plane)
    _emit(args, jsonio.plane_analysis_to_json(res))
    return 0


def cmd_fuzz(args) -> int:
    from .campaign import ALL_SUITES, CampaignConfig, run_suite
    data = _read_payload(args)
    cfg = CampaignConfig(
        seed=int(data.get("seed", 0)),
        dims=tuple(data.get("dims", [2, 3])),
        count=int(data.get("count", 10)),
        entry_bound=int(data.get("entry_bound", 2)),
        suites=tuple(data.get("suites", list(ALL_SUITES))),
    )
    report = run_suite(cfg)
    _emit(args, report.to_json())
    return 0 if report.total_failures == 0 else 1


_COMMANDS = {
    "cell": (cmd_cell, "Voronoi cell of a lattice form"),
    "belts": (cmd_belts, "belts of the cell"),
    "venkov": (cmd_venkov, "Minkowski-Venkov tiling conditions"),
    "delaunay": (cmd_delaunay, "dual cells, fan types, covering radius"),
    "free": (cmd_free, "free segment test with A/B/C structure"),
    "perfect": (cmd_perfect, "maximal perfect free spaces"),
    "extend": (cmd_extend, "Minkowski extension by a segment + recovery"),
    "recover": (cmd_recover, "Voronoi metric recovery for a tiling body"),
    "dilate": (cmd_dilate, "rank-one metric dilatation"),
    "twofold": (cmd_twofold, "twofold dilatation from a cross"),
    "cross": (cmd_cross, "exhaustive cross search"),
    "decompose": (cmd_decompose, "direct-sum factorization"),
    "analyze-plane": (cmd_analyze_plane, "prism-or-cross analysis of a "
                                         "perfect plane"),
    "fuzz": (cmd_fuzz, "randomized verification campaign"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parallelohedra",
        description="exact Voronoi parallelohedra toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (fn, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", nargs="?", default="-",
                       help="JSON input file (default: stdin)")
        p.add_argument("--pretty", action="store_true",
                       help="indent the JSON output")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except TheoremViolation as exc:
        print(f"theorem violation candidate: {exc}", file=sys.stderr)
        print(jsonio.dumps({"violation": str(exc), "detail": exc.detail},
                           pretty=True), file=sys.stderr)
        return 1
    except GeometryError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
