"""Tests for the HTTP service.

Run against the app in process with the test client.  The published
schemas are treated as part of the contract: representative responses of
every endpoint are validated against them.  Verdict coherence matters
more than status codes, so certificates coming back over HTTP are
re-checked with the engine directly.
"""

import json
from fractions import Fraction
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from affinedimers.arrangement import check_admissible
from affinedimers.jsonio import arrangement_from_json, load_schema
from affinedimers.service import (
    MAX_DOUBLE_CLASSES,
    MAX_LINES,
    MAX_TRIALS,
    create_app,
)

DATA = Path(__file__).parent / "data"

CERT_DOC = json.loads((DATA / "figure_certificate.json").read_text())
NONADM_DOC = json.loads((DATA / "figure_nonadmissible.json").read_text())
PSEUDO_DOC = json.loads((DATA / "pseudo_dimer.json").read_text())

SQUARE = {"classes": [[1, 0], [0, 1], [-1, 0], [0, -1]]}
FIGURE = {"classes": [[1, 0], [1, 0], [0, 1], [-1, 1], [-1, -2]]}

DEGENERATE_TRIANGLE = {
    "lines": [
        {"h": [1, 0], "c": "0"},
        {"h": [0, 1], "c": "0"},
        {"h": [-1, -1], "c": "0"},
    ]
}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _validator(name: str) -> Draft202012Validator:
    names = (
        "polygon",
        "arrangement",
        "report",
        "evaluate_response",
        "search_response",
        "volume_response",
        "metrics_response",
        "classification_report",
    )
    docs = {n: load_schema(n) for n in names}
    registry = Registry().with_resources(
        (d["$id"], Resource.from_contents(d)) for d in docs.values()
    )
    return Draft202012Validator(docs[name], registry=registry)


def ring_area2(ring) -> Fraction:
    total = Fraction(0)
    for i in range(len(ring)):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % len(ring)]
        total += x0 * y1 - x1 * y0
    return total


# ---------------------------------------------------------------------------
# evaluate


def test_evaluate_figure_certificate(client):
    resp = client.post("/api/evaluate", json=CERT_DOC)
    assert resp.status_code == 200
    body = resp.json()
    assert body["report"]["admissible"] is True
    assert body["report"]["matches_prescribed"] is True
    assert body["report"]["k"] == 1
    assert body["polygon"]["vertices"]
    assert body["induced_polygon"] == body["polygon"]
    assert body["timing_ms"] >= 0
    _validator("evaluate_response").validate(body)


def test_evaluate_faces_partition_the_square(client):
    body = client.post("/api/evaluate", json=CERT_DOC).json()
    total = Fraction(0)
    for face in body["geometry"]["faces"]:
        for ring in face["rings"]:
            pts = [(Fraction(x), Fraction(y)) for x, y in ring]
            total += ring_area2(pts)
    assert total == 2


def test_evaluate_dimer_overlay(client):
    body = client.post("/api/evaluate", json=CERT_DOC).json()
    dimer = body["geometry"]["dimer"]
    assert len(dimer["nodes"]) == 8
    assert len(dimer["edges"]) == 13


def test_evaluate_non_admissible(client):
    body = client.post("/api/evaluate", json=NONADM_DOC).json()
    assert body["report"]["admissible"] is False
    assert body["report"]["k"] == 0
    assert body["geometry"]["dimer"] is None
    assert body["induced_polygon"] is None
    _validator("evaluate_response").validate(body)


def test_evaluate_pseudo_dimer_reports_other_polygon(client):
    body = client.post("/api/evaluate", json=PSEUDO_DOC).json()
    assert body["report"]["admissible"] is True
    assert body["report"]["matches_prescribed"] is False
    assert body["induced_polygon"] is not None
    assert body["induced_polygon"] != body["polygon"]


def test_evaluate_zero_sum(client):
    resp = client.post(
        "/api/evaluate",
        json={"lines": [{"h": [1, 0], "c": "0"}, {"h": [0, 1], "c": "1/3"}]},
    )
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert detail["error"] == "zero_sum_violation"
    assert detail["class_sum"] == [1, 1]


def test_evaluate_triple_point(client):
    resp = client.post("/api/evaluate", json=DEGENERATE_TRIANGLE)
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert detail["error"] == "degenerate"
    assert detail["triple_points"][0]["lines"] == [0, 1, 2]
    assert detail["triple_points"][0]["at"] == ["0", "0"]


def test_evaluate_coincident_lines(client):
    resp = client.post(
        "/api/evaluate",
        json={
            "lines": [
                {"h": [1, 0], "c": "1/2"},
                {"h": [1, 0], "c": "1/2"},
                {"h": [-1, 0], "c": "0"},
                {"h": [-1, 0], "c": "1/4"},
            ]
        },
    )
    assert resp.status_code == 422
    assert [0, 1] in resp.json()["detail"]["coincident_pairs"]


def test_evaluate_line_budget(client):
    body = {
        "lines": [{"h": [1, 0], "c": f"{i}/41"} for i in range(20)]
        + [{"h": [-1, 0], "c": f"{i + 20}/41"} for i in range(20)]
    }
    resp = client.post("/api/evaluate", json=body)
    assert resp.status_code == 400
    detail = resp.json()["detail"]
    assert detail["error"] == "budget_exceeded"
    assert detail["limit"] == MAX_LINES
    assert detail["got"] == 40


def test_evaluate_malformed_body(client):
    resp = client.post(
        "/api/evaluate",
        content=b"{nope",
        headers={"content-type": "application/json"},
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["error"] == "parse"


def test_evaluate_wrong_shape(client):
    resp = client.post("/api/evaluate", json={"lines": 3})
    assert resp.status_code == 400
    resp = client.post("/api/evaluate", json=[1, 2])
    assert resp.status_code == 400


def test_evaluate_is_stateless(client):
    a = client.post("/api/evaluate", json=CERT_DOC).json()
    b = client.post("/api/evaluate", json=CERT_DOC).json()
    a.pop("timing_ms")
    b.pop("timing_ms")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_cors_headers_present(client):
    resp = client.post(
        "/api/evaluate", json=CERT_DOC, headers={"Origin": "http://editor"}
    )
    assert resp.headers["access-control-allow-origin"] == "*"


# ---------------------------------------------------------------------------
# search


def test_search_square_found(client):
    resp = client.post(
        "/api/search", json={"polygon": SQUARE, "trials": 100, "seed": 1}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "found"
    assert body["inconclusive"] is False
    # verdict coherence: the returned certificate passes the engine check
    cert = arrangement_from_json(body["certificate"])
    report = check_admissible(cert)
    assert report.admissible and report.matches_prescribed
    _validator("search_response").validate(body)


def test_search_zero_budget(client):
    resp = client.post("/api/search", json={"polygon": SQUARE, "trials": 0})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "trials_exhausted"
    assert body["inconclusive"] is True
    assert body["certificate"] is None
    _validator("search_response").validate(body)


def test_search_genus1_polygon_within_default_budget(client):
    resp = client.post("/api/search", json={"polygon": FIGURE, "seed": 0})
    assert resp.status_code == 200
    assert resp.json()["status"] == "found"


def test_search_mesh_fallback(client):
    resp = client.post(
        "/api/search", json={"polygon": SQUARE, "trials": 0, "mesh": 2}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "found"
    assert body["certificate"]["provenance"]["construction"] == "mesh_search"


def test_search_trial_budget_cap(client):
    resp = client.post(
        "/api/search", json={"polygon": SQUARE, "trials": MAX_TRIALS + 1}
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["budget"] == "trials"


def test_search_mesh_budget_cap(client):
    resp = client.post(
        "/api/search", json={"polygon": SQUARE, "trials": 0, "mesh": 400}
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["budget"] == "mesh_points"


def test_search_rejects_unknown_keys(client):
    resp = client.post(
        "/api/search", json={"polygon": SQUARE, "budget": 5}
    )
    assert resp.status_code == 400


def test_search_invalid_polygon(client):
    resp = client.post(
        "/api/search", json={"polygon": {"classes": [[1, 0], [0, 1]]}}
    )
    assert resp.status_code == 422


def test_search_is_stateless(client):
    req = {"polygon": SQUARE, "trials": 50, "seed": 9}
    a = client.post("/api/search", json=req).json()
    b = client.post("/api/search", json=req).json()
    a.pop("timing_ms")
    b.pop("timing_ms")
    assert a == b


# ---------------------------------------------------------------------------
# construct


def test_construct_triangle(client):
    resp = client.post(
        "/api/construct/triangle", json={"u": [2, 0], "w": [0, 2]}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["arrangement"]["lines"]) == 6
    assert body["arrangement"]["verification"]["admissible"] is True
    assert body["report"]["matches_prescribed"] is True
    _validator("arrangement").validate(body["arrangement"])
    _validator("report").validate(body["report"])


def test_construct_triangle_collinear(client):
    resp = client.post(
        "/api/construct/triangle", json={"u": [1, 0], "w": [2, 0]}
    )
    assert resp.status_code == 422


def test_construct_double(client):
    resp = client.post(
        "/api/construct/double",
        json={"classes": [[1, 0], [0, 1]], "seed": 0},
    )
    assert resp.status_code == 200
    counts = resp.json()["report"]["counts"]
    assert counts["f_x"] * 2 == counts["f"]


def test_construct_double_class_budget(client):
    classes = [[1, 0]] * (MAX_DOUBLE_CLASSES + 1)
    resp = client.post("/api/construct/double", json={"classes": classes})
    assert resp.status_code == 400
    assert resp.json()["detail"]["budget"] == "classes"


def test_construct_lift_mirrors_cli_example(client):
    tri = client.post(
        "/api/construct/triangle", json={"u": [2, 0], "w": [0, 2]}
    ).json()["arrangement"]
    resp = client.post(
        "/api/construct/lift",
        json={"arrangement": tri, "lattice": [[1, 0], [0, 2]]},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["arrangement"]["lines"]) == 8
    assert body["report"]["matches_prescribed"] is True


def test_construct_lift_result_budget(client):
    # six base lines, each splitting 16 ways: 96 planned lines
    tri = client.post(
        "/api/construct/triangle", json={"u": [2, 0], "w": [0, 2]}
    ).json()["arrangement"]
    resp = client.post(
        "/api/construct/lift",
        json={"arrangement": tri, "lattice": [[16, 0], [0, 16]]},
    )
    assert resp.status_code == 400
    assert resp.json()["detail"]["budget"] == "result_lines"


def test_construct_add_pair(client):
    tri = client.post(
        "/api/construct/triangle", json={"u": [1, 0], "w": [0, 1]}
    ).json()["arrangement"]
    resp = client.post(
        "/api/construct/add-pair", json={"arrangement": tri, "line": 0}
    )
    assert resp.status_code == 200
    assert len(resp.json()["arrangement"]["lines"]) == len(tri["lines"]) + 2


def test_construct_add_pair_bad_index(client):
    tri = client.post(
        "/api/construct/triangle", json={"u": [1, 0], "w": [0, 1]}
    ).json()["arrangement"]
    resp = client.post(
        "/api/construct/add-pair", json={"arrangement": tri, "line": 99}
    )
    assert resp.status_code == 422


def test_construct_linear(client):
    tri = client.post(
        "/api/construct/triangle", json={"u": [2, 0], "w": [0, 2]}
    ).json()["arrangement"]
    resp = client.post(
        "/api/construct/linear",
        json={"arrangement": tri, "matrix": [[0, -1], [1, 0]]},
    )
    assert resp.status_code == 200
    assert resp.json()["report"]["admissible"] is True


def test_construct_unknown_kind(client):
    resp = client.post("/api/construct/extrude", json={})
    assert resp.status_code == 404


def test_construct_refuses_non_dimer_input(client):
    resp = client.post(
        "/api/construct/lift",
        json={"arrangement": PSEUDO_DOC, "lattice": [[1, 0], [0, 2]]},
    )
    assert resp.status_code == 422


def test_construct_missing_params(client):
    resp = client.post("/api/construct/triangle", json={"u": [1, 0]})
    assert resp.status_code == 400


# ---------------------------------------------------------------------------
# metrics


def test_metrics_figure_polygon(client):
    resp = client.get("/api/polygon/metrics?classes=1,0;1,0;0,1;-1,1;-1,-2")
    assert resp.status_code == 200
    body = resp.json()
    assert body["genus"] == 1
    assert body["area2"] == 5
    _validator("metrics_response").validate(body)


def test_metrics_unit_triangle(client):
    resp = client.get("/api/polygon/metrics?vertices=0,0;1,0;0,1")
    assert resp.status_code == 200
    assert resp.json()["genus"] == 0


def test_metrics_4x4_triangle(client):
    resp = client.get("/api/polygon/metrics?vertices=0,0;4,0;0,4")
    assert resp.status_code == 200
    assert resp.json()["interior"] == 3


def test_metrics_requires_exactly_one_form(client):
    assert client.get("/api/polygon/metrics").status_code == 400
    both = "/api/polygon/metrics?vertices=0,0;1,0;0,1&classes=1,0"
    assert client.get(both).status_code == 400


def test_metrics_rejects_bad_input_with_400(client):
    assert (
        client.get("/api/polygon/metrics?vertices=0,0;zap").status_code == 400
    )
    collinear = "/api/polygon/metrics?vertices=0,0;1,0;2,0"
    assert client.get(collinear).status_code == 400
