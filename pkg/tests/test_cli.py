"""Tests for the command-line interface.

Most cases call main() in process and read the captured streams; one test
runs the installed console script in a subprocess to cover the entry
point.  Exit codes are asserted against the documented contract, and the
determinism guarantee is checked byte for byte.
"""

import json
import subprocess
import sys
from collections import Counter
from pathlib import Path

import pytest

from affinedimers.cli import (
    EXIT_INCONCLUSIVE,
    EXIT_INVALID,
    EXIT_NOT_ADMISSIBLE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_WRONG_POLYGON,
    main,
)
from affinedimers.jsonio import arrangement_from_json, polygon_from_json

DATA = Path(__file__).parent / "data"
CERT = str(DATA / "figure_certificate.json")
NONADM = str(DATA / "figure_nonadmissible.json")
PSEUDO = str(DATA / "pseudo_dimer.json")
POLY = str(DATA / "figure_polygon.json")


def write_json(path: Path, obj) -> str:
    path.write_text(json.dumps(obj) + "\n")
    return str(path)


def square_polygon_file(tmp_path: Path) -> str:
    return write_json(
        tmp_path / "square.json",
        {"classes": [[1, 0], [0, 1], [-1, 0], [0, -1]]},
    )


# ---------------------------------------------------------------------------
# check


def test_check_figure_certificate(capsys):
    assert main(["check", CERT]) == EXIT_OK
    out = capsys.readouterr().out
    assert "k=1, f_x=5" in out
    assert "admissible: yes" in out
    assert "matches prescribed classes: yes" in out


def test_check_json_format(capsys):
    assert main(["check", CERT, "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["k"] == 1
    assert doc["counts"]["v"] == 13
    assert doc["counts"]["genus"] == 1
    assert len(doc["faces"]) == 13


def test_check_recomputes_instead_of_trusting_the_file(tmp_path, capsys):
    # certificate with a verification block claiming admissibility, but
    # offsets that are not admissible: the recomputation must win
    doc = json.loads(Path(NONADM).read_text())
    doc["verification"] = {"admissible": True, "k": 1}
    path = write_json(tmp_path / "liar.json", doc)
    assert main(["check", path]) == EXIT_NOT_ADMISSIBLE
    assert "admissible: no" in capsys.readouterr().out


def test_check_pseudo_dimer_prints_actual_classes(capsys):
    assert main(["check", PSEUDO]) == EXIT_WRONG_POLYGON
    out = capsys.readouterr().out
    assert "matches prescribed classes: no" in out
    assert "induced classes:" in out
    assert "(-1,-1) (-1,-1) (1,0) (1,0) (0,1) (0,1)" in out


def test_check_not_admissible(capsys):
    assert main(["check", NONADM]) == EXIT_NOT_ADMISSIBLE
    out = capsys.readouterr().out
    assert "k=0" in out
    assert "admissible: no" in out


def test_check_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    assert main(["check", str(path)]) == EXIT_PARSE


def test_check_missing_file():
    assert main(["check", "/no/such/file.json"]) == EXIT_PARSE


def test_check_wrong_shape(tmp_path):
    path = write_json(tmp_path / "list.json", [1, 2, 3])
    assert main(["check", path]) == EXIT_PARSE


def test_check_zero_sum_violation(tmp_path, capsys):
    path = write_json(
        tmp_path / "zs.json",
        {"lines": [{"h": [1, 0], "c": "0"}, {"h": [0, 1], "c": "1/3"}]},
    )
    assert main(["check", path]) == EXIT_INVALID
    assert "sum to (1, 1)" in capsys.readouterr().err


def test_check_degenerate_reports_violating_lines(tmp_path, capsys):
    path = write_json(
        tmp_path / "deg.json",
        {
            "lines": [
                {"h": [1, 0], "c": "0"},
                {"h": [0, 1], "c": "0"},
                {"h": [-1, -1], "c": "0"},
            ]
        },
    )
    assert main(["check", path]) == EXIT_NOT_ADMISSIBLE
    out = capsys.readouterr().out
    assert "lines 0, 1, 2 share the point" in out


def test_usage_error_exits_with_parse_code():
    with pytest.raises(SystemExit) as err:
        main(["check"])
    assert err.value.code == EXIT_PARSE


# ---------------------------------------------------------------------------
# search


def test_search_writes_reloadable_certificate(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    code = main(
        ["search", POLY, "--trials", "4000", "--seed", "0",
         "--output", str(out_path)]
    )
    assert code == EXIT_OK
    assert "status: found" in capsys.readouterr().out
    assert main(["check", str(out_path)]) == EXIT_OK
    doc = json.loads(out_path.read_text())
    assert doc["provenance"]["construction"] == "random_search"
    assert doc["verification"]["counts"]["f_x"] == 5


def test_search_stdout_is_byte_identical_across_runs(tmp_path, capsys):
    def run():
        code = main(
            ["search", POLY, "--trials", "4000", "--seed", "0",
             "--output", str(tmp_path / "c.json"), "--format", "json"]
        )
        assert code == EXIT_OK
        return capsys.readouterr().out

    assert run() == run()


def test_search_zero_budget_is_inconclusive(tmp_path, capsys):
    path = square_polygon_file(tmp_path)
    assert main(["search", path, "--trials", "0", "--mesh", "0"]) \
        == EXIT_INCONCLUSIVE
    out = capsys.readouterr().out
    assert "status: trials_exhausted" in out
    assert "does not certify" in out


def test_search_mesh_fallback(tmp_path, capsys):
    path = square_polygon_file(tmp_path)
    out_path = tmp_path / "mesh-cert.json"
    code = main(
        ["search", path, "--trials", "0", "--mesh", "2",
         "--output", str(out_path)]
    )
    assert code == EXIT_OK
    assert "status: found" in capsys.readouterr().out
    doc = json.loads(out_path.read_text())
    assert doc["provenance"]["construction"] == "mesh_search"
    assert main(["check", str(out_path)]) == EXIT_OK


def test_search_default_output_name(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["search", POLY, "--trials", "4000", "--seed", "0"]) == EXIT_OK
    assert (tmp_path / "figure_polygon.certificate.json").exists()


def test_search_enumerated_genus1_class(tmp_path, capsys):
    from affinedimers.lattice import enumerate_polygons

    poly = enumerate_polygons(1, 6)[7]
    path = write_json(
        tmp_path / "class7.json", {"vertices": [list(v) for v in poly.vertices]}
    )
    out_path = tmp_path / "class7-cert.json"
    code = main(
        ["search", path, "--trials", "10000", "--seed", "0",
         "--output", str(out_path)]
    )
    assert code == EXIT_OK
    assert main(["check", str(out_path)]) == EXIT_OK


def test_search_invalid_polygon(tmp_path):
    path = write_json(tmp_path / "bad.json", {"classes": [[1, 0], [0, 1]]})
    assert main(["search", path]) == EXIT_INVALID


# ---------------------------------------------------------------------------
# volume


def box21_file(tmp_path: Path) -> str:
    return write_json(
        tmp_path / "box21.json",
        {"classes": [[1, 0], [1, 0], [0, 1], [-1, 0], [-1, 0], [0, -1]]},
    )


def test_volume_closed_form_parallelogram(tmp_path, capsys):
    path = box21_file(tmp_path)
    assert main(
        ["volume", path, "--trials", "400", "--seed", "0", "--format", "json"]
    ) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["closed_form"]["value"] == "1/3"
    assert doc["trials"] == 400
    assert abs(doc["estimate_float"] - 1 / 3) <= 3 * doc["std_error"]


def test_volume_text_mentions_exact_value(tmp_path, capsys):
    path = box21_file(tmp_path)
    assert main(["volume", path, "--trials", "200", "--seed", "1"]) == EXIT_OK
    assert "1/3" in capsys.readouterr().out


def test_volume_unit_square_is_certain(tmp_path, capsys):
    path = square_polygon_file(tmp_path)
    assert main(
        ["volume", path, "--trials", "64", "--seed", "2", "--format", "json"]
    ) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["estimate"] == "1"
    assert doc["closed_form"]["value"] == "1"
    assert doc["closed_form"]["shape"] == "parallelogram 1x1"


def test_volume_closed_form_triangle(tmp_path, capsys):
    path = write_json(
        tmp_path / "wedge3.json",
        {"vertices": [[0, 0], [3, 0], [0, 1]]},
    )
    assert main(
        ["volume", path, "--trials", "60", "--seed", "0", "--format", "json"]
    ) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["closed_form"] == {
        "value": "2/9",
        "value_float": 2 / 9,
        "shape": "triangle 3x1",
    }


def test_volume_no_reduce_flag(tmp_path, capsys):
    path = square_polygon_file(tmp_path)
    assert main(
        ["volume", path, "--trials", "32", "--seed", "0", "--no-reduce"]
    ) == EXIT_OK
    assert "reduced: no" in capsys.readouterr().out


def test_volume_worker_count_does_not_change_output(
    tmp_path, monkeypatch, capsys
):
    path = box21_file(tmp_path)
    args = ["volume", path, "--trials", "120", "--seed", "5",
            "--format", "json"]
    monkeypatch.delenv("AFFINEDIMERS_WORKERS", raising=False)
    assert main(args) == EXIT_OK
    single = capsys.readouterr().out
    monkeypatch.setenv("AFFINEDIMERS_WORKERS", "3")
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == single


def test_volume_rejects_bad_worker_env(tmp_path, monkeypatch):
    path = square_polygon_file(tmp_path)
    monkeypatch.setenv("AFFINEDIMERS_WORKERS", "0")
    assert main(["volume", path, "--trials", "8"]) == EXIT_INVALID
    monkeypatch.setenv("AFFINEDIMERS_WORKERS", "many")
    assert main(["volume", path, "--trials", "8"]) == EXIT_INVALID


# ---------------------------------------------------------------------------
# construct


def test_construct_triangle_round_trips(tmp_path, capsys):
    out_path = tmp_path / "tri.json"
    code = main(
        ["construct", "triangle", "2", "0", "0", "2", "--output", str(out_path)]
    )
    assert code == EXIT_OK
    assert "written:" in capsys.readouterr().out
    doc = json.loads(out_path.read_text())
    assert len(doc["lines"]) == 6
    assert doc["verification"]["counts"]["f_x"] == 4
    assert doc["verification"]["counts"]["genus"] == 0
    assert main(["check", str(out_path)]) == EXIT_OK


def test_construct_triangle_rejects_collinear(tmp_path):
    assert main(
        ["construct", "triangle", "1", "0", "2", "0",
         "--output", str(tmp_path / "x.json")]
    ) == EXIT_INVALID


def test_construct_double_square(tmp_path, capsys):
    out_path = tmp_path / "dbl.json"
    code = main(
        ["construct", "double", "--classes", "1,0;0,1",
         "--output", str(out_path), "--format", "json"]
    )
    assert code == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    counts = doc["verification"]["counts"]
    assert counts["f_x"] * 2 == counts["f"]
    assert main(["check", str(out_path)]) == EXIT_OK


def test_construct_double_rejects_bad_classes_string(tmp_path):
    assert main(
        ["construct", "double", "--classes", "1,0;zap",
         "--output", str(tmp_path / "x.json")]
    ) == EXIT_PARSE


def test_construct_add_pair_grows_classes_by_antiparallel_pair(
    tmp_path, capsys
):
    tri = tmp_path / "tri.json"
    assert main(
        ["construct", "triangle", "1", "0", "0", "1", "--output", str(tri)]
    ) == EXIT_OK
    out_path = tmp_path / "plus.json"
    assert main(
        ["construct", "add-pair", str(tri), "--line", "0",
         "--output", str(out_path)]
    ) == EXIT_OK
    capsys.readouterr()
    base = arrangement_from_json(json.loads(tri.read_text()))
    grown = arrangement_from_json(json.loads(out_path.read_text()))
    h = base.lines[0].h
    neg = (-h[0], -h[1])
    delta = Counter(grown.classes()) - Counter(base.classes())
    assert delta == Counter([h, neg])
    assert main(["check", str(out_path)]) == EXIT_OK


def test_construct_add_pair_rejects_bad_index(tmp_path):
    tri = tmp_path / "tri.json"
    assert main(
        ["construct", "triangle", "1", "0", "0", "1", "--output", str(tri)]
    ) == EXIT_OK
    assert main(
        ["construct", "add-pair", str(tri), "--line", "99",
         "--output", str(tmp_path / "x.json")]
    ) == EXIT_INVALID


def test_construct_lift_stretches_polygon(tmp_path, capsys):
    tri = tmp_path / "tri.json"
    assert main(
        ["construct", "triangle", "2", "0", "0", "2", "--output", str(tri)]
    ) == EXIT_OK
    out_path = tmp_path / "lift.json"
    assert main(
        ["construct", "lift", str(tri), "--lattice", "1", "0", "0", "2",
         "--output", str(out_path)]
    ) == EXIT_OK
    capsys.readouterr()
    lifted = arrangement_from_json(json.loads(out_path.read_text()))
    assert len(lifted.lines) == 8
    assert Counter(lifted.classes()) == Counter(
        [(1, 0)] * 4 + [(0, 1)] * 2 + [(-2, -1)] * 2
    )
    assert main(["check", str(out_path)]) == EXIT_OK


def test_construct_linear_round_trips(tmp_path):
    tri = tmp_path / "tri.json"
    assert main(
        ["construct", "triangle", "2", "0", "0", "2", "--output", str(tri)]
    ) == EXIT_OK
    out_path = tmp_path / "rot.json"
    assert main(
        ["construct", "linear", str(tri), "--matrix", "0", "-1", "1", "0",
         "--output", str(out_path)]
    ) == EXIT_OK
    assert main(["check", str(out_path)]) == EXIT_OK


def test_construct_refuses_non_dimer_input(tmp_path):
    assert main(
        ["construct", "lift", PSEUDO, "--lattice", "1", "0", "0", "2",
         "--output", str(tmp_path / "x.json")]
    ) == EXIT_INVALID


# ---------------------------------------------------------------------------
# enumerate


def test_enumerate_genus1_lists_16_classes(capsys):
    assert main(["enumerate", "--genus", "1", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == 16
    assert len(doc["polygons"]) == 16
    for entry in doc["polygons"]:
        polygon_from_json(entry)  # every listed polygon is re-readable


def test_enumerate_genus2_histogram(capsys):
    assert main(["enumerate", "--genus", "2", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == 45
    corners = Counter(len(p["vertices"]) for p in doc["polygons"])
    assert corners == {3: 5, 4: 19, 5: 16, 6: 5}


def test_enumerate_genus0_uses_bound(capsys):
    assert main(
        ["enumerate", "--genus", "0", "--bound", "6", "--format", "json"]
    ) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == 28


def test_enumerate_unsupported_genus():
    assert main(["enumerate", "--genus", "3"]) == EXIT_INVALID


def test_enumerate_output_file(tmp_path, capsys):
    out_path = tmp_path / "genus1.json"
    assert main(
        ["enumerate", "--genus", "1", "--output", str(out_path)]
    ) == EXIT_OK
    doc = json.loads(out_path.read_text())
    assert doc["count"] == 16


# ---------------------------------------------------------------------------
# classify


def test_classify_genus0_writes_verified_certificates(tmp_path, capsys):
    out_dir = tmp_path / "cls"
    code = main(
        ["classify", "--genus", "0", "--trials", "50",
         "--volume-trials", "8", "--output", str(out_dir)]
    )
    assert code == EXIT_OK
    capsys.readouterr()
    report = json.loads((out_dir / "report.json").read_text())
    assert report["class_count"] == 28
    assert report["certified_count"] == 28
    assert all(rec["certified"] for rec in report["records"])
    assert all(rec["method"] != "random_search" for rec in report["records"])
    for rec in report["records"]:
        cert_path = out_dir / rec["certificate"]
        assert main(["check", str(cert_path)]) == EXIT_OK
        capsys.readouterr()
        assert rec["volume"]["trials"] == 8


def test_classify_report_validates_against_schema(tmp_path, capsys):
    from jsonschema import Draft202012Validator
    from referencing import Registry, Resource

    from affinedimers.jsonio import load_schema

    out_dir = tmp_path / "cls"
    assert main(
        ["classify", "--genus", "0", "--trials", "50",
         "--volume-trials", "8", "--output", str(out_dir)]
    ) == EXIT_OK
    capsys.readouterr()
    schemas = [
        load_schema(n)
        for n in ("classification_report", "volume_response", "arrangement")
    ]
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s)) for s in schemas
    )
    validator = Draft202012Validator(schemas[0], registry=registry)
    validator.validate(json.loads((out_dir / "report.json").read_text()))


def test_classify_unsupported_genus(tmp_path):
    assert main(
        ["classify", "--genus", "5", "--output", str(tmp_path / "x")]
    ) == EXIT_INVALID


# ---------------------------------------------------------------------------
# console entry point


def test_console_script_runs():
    proc = subprocess.run(
        ["affinedimers", "check", CERT], capture_output=True, text=True
    )
    assert proc.returncode == EXIT_OK
    assert "k=1, f_x=5" in proc.stdout


def test_module_invocation_matches_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "affinedimers.cli", "check", CERT],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    assert "k=1, f_x=5" in proc.stdout
