"""JSON wire formats for polygons, arrangements, reports and search results.

Two error channels: FormatError for documents that are structurally wrong
(missing keys, bad types, unparseable fractions), plain ValueError for
well-formed documents whose values violate domain rules (offsets out of
range, classes that do not sum to zero).  Callers map the first to parse
failures and the second to validation failures.

All rational numbers travel as reduced fraction strings like "3/4" so no
precision is lost in transit.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from importlib import resources

from .arrangement import (
    FACE_CW,
    FACE_CCW,
    AdmissibilityReport,
    Arrangement,
    TorusLine,
    check_admissible,
)
from .lattice import (
    LatticePolygon,
    angle_sort,
    canonical_polygon,
    polygon_from_classes,
    polygon_metrics,
)
from .moduli import SearchOutcome, VolumeEstimate

_FRACTION_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")


class FormatError(ValueError):
    """A JSON document does not have the expected shape."""


# ---------------------------------------------------------------------------
# scalars


def fraction_to_str(value) -> str:
    return str(Fraction(value))


def parse_fraction(raw) -> Fraction:
    """Accept an int or a fraction string "p/q"; reject everything else."""
    if isinstance(raw, bool):
        raise FormatError(f"expected a rational, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str) and _FRACTION_RE.match(raw):
        return Fraction(raw)
    raise FormatError(f"expected a rational like \"3/4\", got {raw!r}")


def _require_int(raw, what: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise FormatError(f"{what} must be an integer, got {raw!r}")
    return raw


def _require_int_pair(raw, what: str):
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise FormatError(f"{what} must be a pair of integers, got {raw!r}")
    return (_require_int(raw[0], what), _require_int(raw[1], what))


def _require_keys(obj, allowed: set, what: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be a JSON object, got {type(obj).__name__}")
    extra = set(obj) - allowed
    if extra:
        raise FormatError(f"{what} has unknown keys: {sorted(extra)}")


def _point_json(pt):
    return [fraction_to_str(pt[0]), fraction_to_str(pt[1])]


# ---------------------------------------------------------------------------
# polygons


def polygon_to_json(poly: LatticePolygon) -> dict:
    return {"vertices": [list(v) for v in poly.vertices]}


def classes_to_json(classes) -> dict:
    """Canonical class serialization: sorted by direction angle."""
    return {"classes": [list(h) for h in angle_sort(tuple(classes))]}


def polygon_from_json(obj) -> LatticePolygon:
    """Read either form of polygon JSON: corner vertices or edge classes."""
    _require_keys(obj, {"vertices", "classes"}, "polygon")
    if ("vertices" in obj) == ("classes" in obj):
        raise FormatError(
            'polygon needs exactly one of "vertices" or "classes"'
        )
    if "vertices" in obj:
        raw = obj["vertices"]
        if not isinstance(raw, list) or not raw:
            raise FormatError('"vertices" must be a non-empty array')
        return LatticePolygon(
            [_require_int_pair(v, "vertex") for v in raw]
        )
    raw = obj["classes"]
    if not isinstance(raw, list) or not raw:
        raise FormatError('"classes" must be a non-empty array')
    return polygon_from_classes(
        [_require_int_pair(h, "class") for h in raw]
    )


# ---------------------------------------------------------------------------
# arrangements


def arrangement_to_json(
    arr: Arrangement,
    provenance: dict | None = None,
    verification: dict | None = None,
) -> dict:
    out: dict = {
        "lines": [
            {"h": list(line.h), "c": fraction_to_str(line.c)}
            for line in arr.lines
        ]
    }
    if provenance is not None:
        out["provenance"] = provenance
    if verification is not None:
        out["verification"] = verification
    return out


def arrangement_from_json(obj) -> Arrangement:
    _require_keys(obj, {"lines", "provenance", "verification"}, "arrangement")
    if "lines" not in obj:
        raise FormatError('arrangement needs a "lines" array')
    raw = obj["lines"]
    if not isinstance(raw, list):
        raise FormatError('"lines" must be an array')
    lines = []
    for i, entry in enumerate(raw):
        _require_keys(entry, {"h", "c"}, f"line {i}")
        if "h" not in entry or "c" not in entry:
            raise FormatError(f'line {i} needs "h" and "c"')
        h = _require_int_pair(entry["h"], f"line {i} class")
        lines.append(TorusLine(h, parse_fraction(entry["c"])))
    return Arrangement(tuple(lines))


def provenance_dict(construction: str, parameters: dict, seed: int | None) -> dict:
    out = {"construction": construction, "parameters": parameters}
    if seed is not None:
        out["seed"] = seed
    return out


# ---------------------------------------------------------------------------
# reports


def counts_to_json(counts) -> dict:
    return {
        "n": counts.n,
        "v": counts.v,
        "e": counts.e,
        "f": counts.f,
        "f_cw": counts.f_cw,
        "f_ccw": counts.f_ccw,
        "f_x": counts.f_x,
        "e_cw": counts.e_cw,
        "e_ccw": counts.e_ccw,
        "genus": counts.genus,
        "surface": {"genus": counts.genus, "punctures": counts.surface_boundary},
    }


def _face_geometry(report: AdmissibilityReport) -> list:
    sub = report.subdivision
    faces = []
    for fid in range(sub.f):
        rings = [
            [_point_json(pt) for pt in ring] for ring in sub.face_pieces(fid)
        ]
        faces.append({
            "face": fid,
            "label": report.face_labels[fid],
            "rings": rings,
        })
    return faces


def _line_segments(line: TorusLine) -> list:
    """The torus line as straight pieces inside the unit square.

    Walk one period p0 + t*h, split at every integer coordinate crossing,
    and translate each piece back into the square.
    """
    p0 = line.base_point()
    h = line.h
    cuts = {Fraction(0), Fraction(1)}
    for axis in (0, 1):
        if h[axis] == 0:
            continue
        start = p0[axis]
        lo = min(start, start + h[axis])
        hi = max(start, start + h[axis])
        k = int(lo) - 1
        while k <= hi + 1:
            t = Fraction(k - start, h[axis])
            if 0 < t < 1:
                cuts.add(t)
            k += 1
    ts = sorted(cuts)
    segments = []
    for t0, t1 in zip(ts, ts[1:]):
        tm = (t0 + t1) / 2
        mx = p0[0] + tm * h[0]
        my = p0[1] + tm * h[1]
        sx, sy = mx // 1, my // 1
        a = (p0[0] + t0 * h[0] - sx, p0[1] + t0 * h[1] - sy)
        b = (p0[0] + t1 * h[0] - sx, p0[1] + t1 * h[1] - sy)
        segments.append([_point_json(a), _point_json(b)])
    return segments


def _dimer_overlay(report: AdmissibilityReport) -> dict | None:
    """Node-and-edge data for the matching graph over consistent faces.

    One node per consistently oriented face, anchored at the centroid of
    its largest piece inside the square; one edge per subdivision vertex
    and per diagonally opposite pair of consistent faces there.
    """
    if not report.admissible:
        return None
    sub = report.subdivision
    labels = report.face_labels
    nodes = []
    for fid in range(sub.f):
        if labels[fid] not in (FACE_CW, FACE_CCW):
            continue
        pieces = sub.face_pieces(fid)
        ring = max(pieces, key=_ring_area2)
        cx = sum(p[0] for p in ring) / len(ring)
        cy = sum(p[1] for p in ring) / len(ring)
        nodes.append({
            "face": fid,
            "side": labels[fid],
            "at": _point_json((cx, cy)),
        })
    edges = []
    for vid in range(sub.v):
        s = sub.sector_faces(vid)
        for a, b in ((s[0], s[2]), (s[1], s[3])):
            if labels[a] in (FACE_CW, FACE_CCW) and labels[b] in (FACE_CW, FACE_CCW):
                edges.append({
                    "vertex": vid,
                    "at": _point_json(sub.points[vid]),
                    "faces": sorted((a, b)),
                })
    return {"nodes": nodes, "edges": edges}


def _ring_area2(ring) -> Fraction:
    total = Fraction(0)
    for i in range(len(ring)):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % len(ring)]
        total += x0 * y1 - x1 * y0
    return total


def report_to_json(
    report: AdmissibilityReport, include_geometry: bool = True
) -> dict:
    out: dict = {
        "k": report.k,
        "admissible": report.admissible,
        "matches_prescribed": report.matches_prescribed,
        "parallelogram": report.parallelogram,
        "prescribed_classes": [list(h) for h in report.arrangement.classes()],
        "induced_classes": (
            None
            if report.induced_classes is None
            else [list(h) for h in report.induced_classes]
        ),
        "counts": None if report.counts is None else counts_to_json(report.counts),
        "face_labels": list(report.face_labels),
        "notes": list(report.notes),
    }
    if include_geometry:
        out["faces"] = _face_geometry(report)
    return out


def render_geometry(report: AdmissibilityReport) -> dict:
    """Everything a renderer needs: faces, line pieces, crossing points,
    and the matching overlay when one exists."""
    sub = report.subdivision
    return {
        "faces": _face_geometry(report),
        "lines": [
            {"line": i, "h": list(line.h), "segments": _line_segments(line)}
            for i, line in enumerate(report.arrangement.lines)
        ],
        "vertices": [
            {"vertex": vid, "at": _point_json(sub.points[vid])}
            for vid in range(sub.v)
        ],
        "dimer": _dimer_overlay(report),
    }


def verification_transcript(report: AdmissibilityReport) -> dict:
    """The re-checkable summary embedded in certificate files."""
    return {
        "admissible": report.admissible,
        "matches_prescribed": report.matches_prescribed,
        "k": report.k,
        "counts": None if report.counts is None else counts_to_json(report.counts),
        "induced_classes": (
            None
            if report.induced_classes is None
            else [list(h) for h in report.induced_classes]
        ),
    }


# ---------------------------------------------------------------------------
# search, volume, classification


def search_outcome_to_json(
    outcome: SearchOutcome,
    provenance: dict | None = None,
) -> dict:
    certificate = None
    if outcome.certificate is not None:
        verification = verification_transcript(
            check_admissible(outcome.certificate)
        )
        certificate = arrangement_to_json(
            outcome.certificate, provenance=provenance, verification=verification
        )
    return {
        "status": outcome.status,
        "inconclusive": outcome.inconclusive,
        "resolution": outcome.resolution,
        "trials": outcome.trials,
        "degenerate_skips": outcome.degenerate_skips,
        "note": outcome.note,
        "certificate": certificate,
    }


def volume_estimate_to_json(
    est: VolumeEstimate,
    closed_form: Fraction | None = None,
    shape: str | None = None,
) -> dict:
    cf = None
    if closed_form is not None:
        cf = {
            "value": fraction_to_str(closed_form),
            "value_float": float(closed_form),
            "shape": shape or "",
        }
    return {
        "estimate": fraction_to_str(est.estimate),
        "estimate_float": float(est.estimate),
        "trials": est.trials,
        "hits": est.hits,
        "std_error": est.std_error,
        "seed": est.seed,
        "closed_form": cf,
    }


def metrics_to_json(poly: LatticePolygon) -> dict:
    met = polygon_metrics(poly)
    canon = canonical_polygon(poly)
    return {
        "vertices": [list(v) for v in poly.vertices],
        "canonical_vertices": [list(v) for v in canon.vertices],
        "classes": classes_to_json(
            tuple(_primitive_edges(poly))
        )["classes"],
        "area2": met.area2,
        "boundary": met.boundary,
        "interior": met.interior,
        "genus": met.genus,
        "surface": {"genus": met.interior, "punctures": met.boundary},
    }


def _primitive_edges(poly: LatticePolygon):
    for ex, ey in poly.edges():
        g = math.gcd(ex, ey)
        for _ in range(g):
            yield (ex // g, ey // g)


# ---------------------------------------------------------------------------
# schemas


def load_schema(name: str) -> dict:
    """Read one of the published JSON schemas shipped with the package."""
    path = resources.files("affinedimers.schemas").joinpath(f"{name}.json")
    return json.loads(path.read_text("utf-8"))
