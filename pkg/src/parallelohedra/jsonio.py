"""JSON encoding of the exact types.

Rationals travel as strings "p/q" (or "p" when the denominator is 1);
matrices are row-major arrays of such strings.  A lattice form is
{"dim": d, "gram": [[...]]} with an optional "basis": the basis rows are
canonicalized against the ambient form on load."""

from __future__ import annotations

import json
from fractions import Fraction

from .exactgeom import GeometryError, Mat, Subspace, Vec
from .voronoi import Cell, LatticeForm, VenkovReport


class InputError(ValueError):
    """Malformed JSON input."""


def rat_to_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else \
        f"{x.numerator}/{x.denominator}"


def str_to_rat(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {s!r}") from exc


def vec_to_json(v) -> list:
    return [rat_to_str(c) for c in v]


def vec_from_json(data) -> Vec:
    if not isinstance(data, (list, tuple)) or not data:
        raise InputError("vector must be a non-empty array")
    return Vec(str_to_rat(c) for c in data)


def mat_to_json(M: Mat) -> list:
    return [vec_to_json(r) for r in M]


def mat_from_json(data) -> Mat:
    if not isinstance(data, (list, tuple)) or not data:
        raise InputError("matrix must be a non-empty array of rows")
    return Mat([vec_from_json(r) for r in data])


def subspace_to_json(S: Subspace) -> list:
    return [vec_to_json(b) for b in S.basis]


def form_from_json(data) -> LatticeForm:
    if not isinstance(data, dict):
        raise InputError("expected a JSON object")
    if "gram" not in data:
        raise InputError("missing \"gram\"")
    gram = mat_from_json(data["gram"])
    if "basis" in data:
        basis = mat_from_json(data["basis"])
        form = LatticeForm.from_basis(basis.rows, gram)
    else:
        form = LatticeForm(gram.nrows, gram)
    if "dim" in data and int(data["dim"]) != form.dim:
        raise InputError("\"dim\" disagrees with the matrix size")
    return form


def form_to_json(form: LatticeForm) -> dict:
    return {"dim": form.dim, "gram": mat_to_json(form.gram)}


def venkov_to_json(rep: VenkovReport) -> dict:
    return {
        "body_centrally_symmetric": rep.body_centrally_symmetric,
        "facets_centrally_symmetric": rep.facets_centrally_symmetric,
        "belts_ok": rep.belts_ok,
        "belt_sizes": list(rep.belt_sizes),
        "pass": rep.passes,
    }


def cell_to_json(cell: Cell) -> dict:
    from .voronoi import belts, check_minkowski_venkov
    return {
        "dim": cell.dim,
        "gram": mat_to_json(cell.gram),
        "facet_vectors": [vec_to_json(s) for s in cell.facet_vectors],
        "vertices": [vec_to_json(v) for v in cell.polytope.vertices],
        "belts": [{"direction": subspace_to_json(b.direction),
                   "facets": list(b.facet_indices)}
                  for b in belts(cell)],
        "venkov": venkov_to_json(check_minkowski_venkov(cell.polytope)),
    }


def dual_cell_to_json(dc) -> dict:
    from .delaunay import classify_dual_cell
    return {
        "points": [vec_to_json(p) for p in dc.points],
        "center": vec_to_json(dc.circumcenter),
        "radius_sq": rat_to_str(dc.circumradius_sq),
        "type": classify_dual_cell(dc).value if dc.dim <= 3 else None,
        "dim": dc.dim,
    }


def freespace_report_to_json(cell, u, free: bool, ab=None,
                             perfect=None) -> dict:
    out = {"direction": vec_to_json(u), "free": free}
    if ab is not None:
        out["A"] = [vec_to_json(s) for s in sorted(ab.A)]
        out["B"] = [vec_to_json(s) for s in sorted(ab.B)]
        out["C"] = [vec_to_json(s) for s in sorted(ab.C)]
        out["span_rank"] = ab.span_ab.rank
    if perfect is not None:
        out["perfect_spaces"] = [
            {"rank": ps.space.rank,
             "basis": subspace_to_json(ps.space),
             "witness_facets": sorted(ps.witness_facets)}
            for ps in perfect]
    return out


def extended_cell_to_json(ext) -> dict:
    return {
        "vertices": [vec_to_json(v) for v in ext.polytope.vertices],
        "halfspaces": [{"normal": vec_to_json(n), "offset": rat_to_str(b)}
                       for n, b in ext.polytope.halfspaces],
        "lattice": [vec_to_json(r) for r in ext.lattice_rows],
        "layer_vector": vec_to_json(ext.layer_vector),
        "provenance": [{"kind": p.kind,
                        "source": vec_to_json(p.source_vector),
                        "shift_sign": p.shift_sign,
                        "facet_vector": vec_to_json(p.facet_vector)}
                       for p in ext.provenance],
        "volume": rat_to_str(ext.polytope.volume()),
    }


def recovery_to_json(rec) -> dict:
    return {
        "status": rec.status,
        "gram": mat_to_json(rec.gram) if rec.gram is not None else None,
        "multipliers": [rat_to_str(m) for m in rec.multipliers]
        if rec.multipliers is not None else None,
        "nullity": rec.nullity,
    }


def cross_to_json(cross) -> dict:
    if cross is None:
        return {"found": False}
    return {
        "found": True,
        "pi1": subspace_to_json(cross.pi1),
        "pi2": subspace_to_json(cross.pi2),
        "assignment": [{"class": vec_to_json(s), "side": side}
                       for s, side in cross.assignment],
    }


def decomposition_to_json(dec) -> dict:
    return {
        "k": dec.k,
        "irreducible": dec.irreducible,
        "factors": [{"dim": f.dim,
                     "subspace": subspace_to_json(f.subspace),
                     "basis": [vec_to_json(r) for r in f.basis_rows],
                     "classes": [vec_to_json(s) for s in sorted(f.classes)],
                     "gram": mat_to_json(f.form.gram)}
                    for f in dec.factors],
    }


def twofold_to_json(tw) -> dict:
    def dil(nv):
        out = {"direction": vec_to_json(nv.direction),
               "scale_sq": rat_to_str(nv.scale_sq)}
        try:
            out["vector"] = vec_to_json(nv.as_qvec())
        except GeometryError:
            out["vector"] = None
        return out

    return {
        "n1": dil(tw.n1),
        "n2": dil(tw.n2),
        "gram2": mat_to_json(tw.gram2),
        "free_plane": subspace_to_json(tw.free_plane),
        "rho_sq": rat_to_str(tw.rho_sq),
    }


def plane_analysis_to_json(res) -> dict:
    out = {"kind": res.kind, "open_findings": list(res.open_findings)}
    if res.projection is not None:
        out["projection_vertices"] = [vec_to_json(v)
                                      for v in res.projection.vertices]
        out["projection_gram"] = mat_to_json(res.projection_form.gram)
    if res.cross is not None:
        out["cross"] = cross_to_json(res.cross)
    return out


def good_bad_to_json(rep) -> dict:
    return {
        "v": vec_to_json(rep.v),
        "good": [vec_to_json(s) for s in sorted(rep.good)],
        "bad": [vec_to_json(s) for s in sorted(rep.bad)],
        "v_prime": vec_to_json(rep.v_prime),
    }


def dumps(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=True)
    return json.dumps(obj, sort_keys=True)
