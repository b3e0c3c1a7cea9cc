"""JSON-over-HTTP facade for the engine.

Stateless: every response is a pure function of the request body (seeds
are client-supplied).  Hard request budgets keep the service interactive;
exceeding one returns a structured 400 instead of a slow response:

  MAX_LINES        16       lines in an evaluated or input arrangement,
                            primitive sides of a searched polygon
  MAX_TRIALS       200000   random search / volume budget per request
  MAX_MESH_POINTS  100000   mesh grid size (resolution ** free offsets)
  MAX_DOUBLE_CLASSES  8     classes accepted by the doubling construction
  MAX_RESULT_LINES 64       lines a lift is allowed to produce

Error channels: 400 for bodies that cannot be understood or that exceed a
budget, 422 for well-formed bodies that violate domain rules (classes not
summing to zero, degenerate arrangements), with machine-readable detail.
Rationals travel as reduced fraction strings "p/q".
"""

from __future__ import annotations

import json
import math
import time

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware

from .arrangement import (
    Arrangement,
    check_admissible,
    check_general_position,
    normal_covector,
)
from .constructions import (
    SublatticeSpec,
    add_parallel_pair,
    apply_linear_to_dimer,
    double_everything,
    lift_sublattice,
    triangle_dimer,
)
from .jsonio import (
    FormatError,
    arrangement_from_json,
    arrangement_to_json,
    metrics_to_json,
    polygon_from_json,
    polygon_to_json,
    provenance_dict,
    render_geometry,
    report_to_json,
    search_outcome_to_json,
    verification_transcript,
)
from .lattice import Mat2, canonical_polygon, polygon_from_classes, polygon_metrics
from .moduli import mesh_search, random_search

MAX_LINES = 16
MAX_TRIALS = 200_000
MAX_MESH_POINTS = 100_000
MAX_DOUBLE_CLASSES = 8
MAX_RESULT_LINES = 64

CONSTRUCTION_KINDS = ("triangle", "double", "add-pair", "lift", "linear")


def _parse_error(message: str) -> HTTPException:
    return HTTPException(
        status_code=400, detail={"error": "parse", "message": message}
    )


def _budget_error(name: str, limit: int, got: int) -> HTTPException:
    return HTTPException(
        status_code=400,
        detail={
            "error": "budget_exceeded",
            "budget": name,
            "limit": limit,
            "got": got,
        },
    )


def _domain_error(message: str) -> HTTPException:
    return HTTPException(
        status_code=422, detail={"error": "invalid", "message": message}
    )


async def _body_json(request: Request):
    raw = await request.body()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _parse_error(f"request body is not valid JSON: {exc}")


def _require_request_keys(body, allowed: set, what: str) -> None:
    if not isinstance(body, dict):
        raise _parse_error(f"{what} must be a JSON object")
    extra = set(body) - allowed
    if extra:
        raise _parse_error(f"{what} has unknown keys: {sorted(extra)}")


def _opt_int(body: dict, key: str, default: int) -> int:
    if key not in body:
        return default
    raw = body[key]
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise _parse_error(f'"{key}" must be an integer, got {raw!r}')
    return raw


def _int_pair(raw, what: str):
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 2
        or any(isinstance(x, bool) or not isinstance(x, int) for x in raw)
    ):
        raise _parse_error(f"{what} must be a pair of integers, got {raw!r}")
    return (raw[0], raw[1])


def _int_matrix(raw, what: str) -> Mat2:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise _parse_error(f"{what} must be two integer column pairs")
    col0 = _int_pair(raw[0], f"{what} column 0")
    col1 = _int_pair(raw[1], f"{what} column 1")
    return Mat2.from_columns(col0, col1)


def _checked_arrangement(arr: Arrangement):
    """Zero-sum and degeneracy gate shared by evaluate and constructs.

    Returns the admissibility report; raises structured 422s otherwise.
    """
    total = arr.class_sum()
    if total != (0, 0):
        raise HTTPException(
            status_code=422,
            detail={
                "error": "zero_sum_violation",
                "class_sum": [total[0], total[1]],
                "message": (
                    f"classes sum to ({total[0]}, {total[1]}), "
                    "expected (0, 0)"
                ),
            },
        )
    gp = check_general_position(arr)
    if not gp.ok:
        raise HTTPException(
            status_code=422,
            detail={
                "error": "degenerate",
                "all_parallel": gp.all_parallel,
                "coincident_pairs": [list(p) for p in gp.coincident_pairs],
                "triple_points": [
                    {
                        "lines": list(indices),
                        "at": [str(pt[0]), str(pt[1])],
                    }
                    for indices, pt in gp.triple_points
                ],
                "message": gp.describe(),
            },
        )
    return check_admissible(arr)


def _parse_arrangement_body(obj) -> Arrangement:
    try:
        return arrangement_from_json(obj)
    except FormatError as exc:
        raise _parse_error(str(exc))
    except ValueError as exc:
        raise _domain_error(str(exc))


def _parse_polygon_body(obj):
    try:
        return polygon_from_json(obj)
    except FormatError as exc:
        raise _parse_error(str(exc))
    except ValueError as exc:
        raise _domain_error(str(exc))


def _lifted_line_count(arr: Arrangement, basis: Mat2) -> int:
    return sum(
        math.gcd(*basis.apply_transpose(normal_covector(line.h)))
        for line in arr.lines
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="affinedimers",
        description=(
            "Evaluate oriented line arrangements on the torus, search "
            "offset space for affine dimers, and run the constructions."
        ),
    )
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/api/evaluate")
    async def evaluate(request: Request):
        started = time.perf_counter()
        obj = await _body_json(request)
        arr = _parse_arrangement_body(obj)
        if len(arr.lines) > MAX_LINES:
            raise _budget_error("lines", MAX_LINES, len(arr.lines))
        report = _checked_arrangement(arr)
        polygon = canonical_polygon(polygon_from_classes(arr.classes()))
        induced = None
        if report.induced_classes is not None:
            induced = polygon_to_json(
                canonical_polygon(
                    polygon_from_classes(report.induced_classes)
                )
            )
        return {
            "report": report_to_json(report, include_geometry=False),
            "geometry": render_geometry(report),
            "polygon": polygon_to_json(polygon),
            "induced_polygon": induced,
            "timing_ms": (time.perf_counter() - started) * 1000.0,
        }

    @app.post("/api/search")
    async def search(request: Request):
        started = time.perf_counter()
        body = await _body_json(request)
        _require_request_keys(
            body, {"polygon", "trials", "seed", "mesh"}, "search request"
        )
        if "polygon" not in body:
            raise _parse_error('search request needs a "polygon"')
        polygon = _parse_polygon_body(body["polygon"])
        trials = _opt_int(body, "trials", 10000)
        seed = _opt_int(body, "seed", 0)
        mesh = _opt_int(body, "mesh", 0)
        sides = polygon_metrics(polygon).boundary
        if sides > MAX_LINES:
            raise _budget_error("lines", MAX_LINES, sides)
        if trials < 0:
            raise _domain_error(f"trials must be >= 0, got {trials}")
        if trials > MAX_TRIALS:
            raise _budget_error("trials", MAX_TRIALS, trials)
        if mesh > 1:
            points = mesh ** max(sides - 2, 0)
            if points > MAX_MESH_POINTS:
                raise _budget_error("mesh_points", MAX_MESH_POINTS, points)

        outcome = random_search(polygon, trials, seed)
        provenance = provenance_dict("random_search", {"trials": trials}, seed)
        if outcome.status != "found" and mesh >= 1:
            outcome = mesh_search(polygon, mesh)
            provenance = provenance_dict("mesh_search", {"m": mesh}, None)
        doc = search_outcome_to_json(
            outcome,
            provenance=provenance if outcome.certificate is not None else None,
        )
        doc["timing_ms"] = (time.perf_counter() - started) * 1000.0
        return doc

    @app.post("/api/construct/{kind}")
    async def construct(kind: str, request: Request):
        started = time.perf_counter()
        if kind not in CONSTRUCTION_KINDS:
            raise HTTPException(
                status_code=404,
                detail={
                    "error": "unknown_construction",
                    "kinds": list(CONSTRUCTION_KINDS),
                },
            )
        body = await _body_json(request)
        try:
            arr, provenance = _run_construction(kind, body)
        except FormatError as exc:
            raise _parse_error(str(exc))
        except ValueError as exc:
            raise _domain_error(str(exc))
        report = check_admissible(arr)
        return {
            "arrangement": arrangement_to_json(
                arr,
                provenance=provenance,
                verification=verification_transcript(report),
            ),
            "report": report_to_json(report, include_geometry=False),
            "timing_ms": (time.perf_counter() - started) * 1000.0,
        }

    @app.get("/api/polygon/metrics")
    async def metrics(vertices: str | None = None, classes: str | None = None):
        if (vertices is None) == (classes is None):
            raise _parse_error(
                'pass exactly one of "vertices" or "classes", '
                'e.g. ?vertices=0,0;4,0;0,4'
            )
        try:
            if vertices is not None:
                poly = polygon_from_json(
                    {"vertices": _parse_pairs_query(vertices)}
                )
            else:
                poly = polygon_from_json(
                    {"classes": _parse_pairs_query(classes)}
                )
        except FormatError as exc:
            raise _parse_error(str(exc))
        except ValueError as exc:
            # this endpoint reports every rejection as 400 (documented)
            raise _parse_error(str(exc))
        return metrics_to_json(poly)

    return app


def _parse_pairs_query(raw: str):
    pairs = []
    for part in raw.split(";"):
        bits = part.split(",")
        if len(bits) != 2:
            raise FormatError(
                f'expected semicolon-separated pairs like "0,0;4,0;0,4", '
                f"got {raw!r}"
            )
        try:
            pairs.append([int(bits[0]), int(bits[1])])
        except ValueError:
            raise FormatError(f"pair entries must be integers, got {part!r}")
    return pairs


def _run_construction(kind: str, body):
    if kind == "triangle":
        _require_request_keys(body, {"u", "w"}, "triangle request")
        if "u" not in body or "w" not in body:
            raise FormatError('triangle request needs "u" and "w"')
        u = _int_pair(body["u"], '"u"')
        w = _int_pair(body["w"], '"w"')
        return (
            triangle_dimer(u, w),
            provenance_dict("triangle_dimer", {"u": list(u), "w": list(w)}, None),
        )

    if kind == "double":
        _require_request_keys(body, {"classes", "seed"}, "double request")
        if "classes" not in body:
            raise FormatError('double request needs "classes"')
        raw = body["classes"]
        if not isinstance(raw, list) or not raw:
            raise FormatError('"classes" must be a non-empty array')
        classes = tuple(
            _int_pair(h, f"class {i}") for i, h in enumerate(raw)
        )
        if len(classes) > MAX_DOUBLE_CLASSES:
            raise _budget_error("classes", MAX_DOUBLE_CLASSES, len(classes))
        seed = _opt_int(body, "seed", 0)
        return (
            double_everything(classes, seed=seed),
            provenance_dict(
                "double_everything",
                {"classes": [list(h) for h in classes]},
                seed,
            ),
        )

    # remaining kinds transform an existing arrangement
    key = {"add-pair": "line", "lift": "lattice", "linear": "matrix"}[kind]
    _require_request_keys(body, {"arrangement", key}, f"{kind} request")
    if "arrangement" not in body or key not in body:
        raise FormatError(f'{kind} request needs "arrangement" and "{key}"')
    base = _parse_arrangement_body(body["arrangement"])
    if len(base.lines) > MAX_LINES:
        raise _budget_error("lines", MAX_LINES, len(base.lines))
    base_report = _checked_arrangement(base)
    if not (base_report.admissible and base_report.matches_prescribed):
        raise ValueError(
            "the input arrangement is not an affine dimer for its "
            "prescribed classes"
        )

    if kind == "add-pair":
        if isinstance(body["line"], bool) or not isinstance(body["line"], int):
            raise FormatError(f'"line" must be an integer, got {body["line"]!r}')
        index = body["line"]
        return (
            add_parallel_pair(base, index),
            provenance_dict("add_parallel_pair", {"line": index}, None),
        )

    if kind == "lift":
        basis = _int_matrix(body["lattice"], '"lattice"')
        if basis.det() == 0:
            raise ValueError("sublattice basis is singular")
        planned = _lifted_line_count(base, basis)
        if planned > MAX_RESULT_LINES:
            raise _budget_error("result_lines", MAX_RESULT_LINES, planned)
        cols = basis.columns()
        return (
            lift_sublattice(base, SublatticeSpec(basis)),
            provenance_dict(
                "lift_sublattice",
                {"basis_columns": [list(cols[0]), list(cols[1])]},
                None,
            ),
        )

    # linear
    mat = _int_matrix(body["matrix"], '"matrix"')
    if mat.det() == 0:
        raise ValueError("matrix is singular")
    planned = _lifted_line_count(base, mat.adjugate())
    if planned > MAX_RESULT_LINES:
        raise _budget_error("result_lines", MAX_RESULT_LINES, planned)
    cols = mat.columns()
    return (
        apply_linear_to_dimer(base, mat),
        provenance_dict(
            "apply_linear_to_dimer",
            {"matrix_columns": [list(cols[0]), list(cols[1])]},
            None,
        ),
    )
