"""Command-line interface: check, search, volume, construct, enumerate,
classify, serve.

Exit codes are a stable contract:

  0   success: admissible and matching / certificate found / work complete
  1   checked arrangement is not admissible, or is degenerate
  2   admissible, but for a different polygon than the prescribed classes
  3   inconclusive: search budget exhausted, or classification incomplete
  64  input could not be read: missing file, bad JSON, wrong document shape
  65  input read fine but violates domain rules (zero sum, bad genus, ...)

Identical invocations with the same seed print identical bytes to stdout.
Wall-clock timings go to stderr only.

The environment variable AFFINEDIMERS_WORKERS (default 1) sets how many
processes the volume subcommand spreads its trials over.  The estimate is
a pure function of (polygon, trials, seed); the worker count only changes
how the trial range is partitioned, never the result.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .arrangement import (
    Arrangement,
    check_admissible,
    check_general_position,
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
    polygon_from_json,
    polygon_to_json,
    provenance_dict,
    report_to_json,
    search_outcome_to_json,
    verification_transcript,
    volume_estimate_to_json,
)
from .lattice import (
    LatticePolygon,
    Mat2,
    enumerate_polygons,
    equivalent,
    polygon_from_classes,
    polygon_metrics,
)
from .moduli import (
    VolumeEstimate,
    classify_genus,
    estimate_admissible_volume,
    mesh_search,
    parallelogram_volume_exact,
    random_search,
    triangle_volume_exact,
)

EXIT_OK = 0
EXIT_NOT_ADMISSIBLE = 1
EXIT_WRONG_POLYGON = 2
EXIT_INCONCLUSIVE = 3
EXIT_PARSE = 64
EXIT_INVALID = 65

_WORKERS_ENV = "AFFINEDIMERS_WORKERS"


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; 2 means something else
    here, so usage problems are remapped onto the parse-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


# ---------------------------------------------------------------------------
# small helpers


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_output(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump_json(obj))


def _classes_text(classes) -> str:
    return " ".join(f"({h[0]},{h[1]})" for h in classes)


def _print_report_text(report) -> None:
    print(f"lines: {len(report.arrangement.lines)}")
    cts = report.counts
    if cts is None:
        print(f"k={report.k}")
    else:
        print(f"k={report.k}, f_x={cts.f_x}")
        print(
            f"counts: v={cts.v}, e={cts.e}, f={cts.f} "
            f"({cts.f_cw} clockwise, {cts.f_ccw} counterclockwise, "
            f"{cts.f_x} inconsistent)"
        )
        print(f"genus: {cts.genus}, punctures: {cts.surface_boundary}")
    print(f"admissible: {'yes' if report.admissible else 'no'}")
    print(
        "matches prescribed classes: "
        f"{'yes' if report.matches_prescribed else 'no'}"
    )
    print(f"prescribed classes: {_classes_text(report.arrangement.classes())}")
    if report.induced_classes is not None and not report.matches_prescribed:
        print(f"induced classes: {_classes_text(report.induced_classes)}")
    for note in report.notes:
        print(f"note: {note}")


def _certificate_document(arr: Arrangement, provenance: dict) -> dict:
    report = check_admissible(arr)
    if not (report.admissible and report.matches_prescribed):
        raise RuntimeError(
            "internal error: refusing to write an unverified certificate"
        )
    return arrangement_to_json(
        arr,
        provenance=provenance,
        verification=verification_transcript(report),
    )


# ---------------------------------------------------------------------------
# check


def _cmd_check(args) -> int:
    arr = arrangement_from_json(_load_json(args.arrangement))
    total = arr.class_sum()
    if total != (0, 0):
        print(
            f"invalid arrangement: classes sum to ({total[0]}, {total[1]}), "
            "expected (0, 0)",
            file=sys.stderr,
        )
        return EXIT_INVALID
    gp = check_general_position(arr)
    if not gp.ok:
        print(f"degenerate arrangement: {gp.describe()}")
        return EXIT_NOT_ADMISSIBLE
    report = check_admissible(arr)
    if args.format == "json":
        sys.stdout.write(_dump_json(report_to_json(report)))
    else:
        _print_report_text(report)
    if report.admissible and report.matches_prescribed:
        return EXIT_OK
    if report.admissible:
        return EXIT_WRONG_POLYGON
    return EXIT_NOT_ADMISSIBLE


# ---------------------------------------------------------------------------
# search


def _cmd_search(args) -> int:
    polygon = polygon_from_json(_load_json(args.polygon))
    started = time.perf_counter()
    outcome = random_search(polygon, args.trials, args.seed)
    provenance = provenance_dict(
        "random_search", {"trials": args.trials}, args.seed
    )
    if outcome.status != "found" and args.mesh >= 1:
        outcome = mesh_search(polygon, args.mesh)
        provenance = provenance_dict("mesh_search", {"m": args.mesh}, None)
    elapsed = time.perf_counter() - started

    doc = search_outcome_to_json(
        outcome,
        provenance=provenance if outcome.certificate is not None else None,
    )
    out_path = None
    if outcome.certificate is not None:
        out_path = args.output or _default_certificate_name(args.polygon)
        _write_output(out_path, doc["certificate"])

    if args.format == "json":
        sys.stdout.write(_dump_json(doc))
    else:
        print(f"status: {outcome.status}")
        print(
            f"trials: {outcome.trials} "
            f"(degenerate skips: {outcome.degenerate_skips})"
        )
        if outcome.resolution is not None:
            print(f"mesh resolution: {outcome.resolution}")
        if outcome.note:
            print(f"note: {outcome.note}")
        if out_path is not None:
            print(f"certificate written: {out_path}")
    print(f"search took {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK if outcome.status == "found" else EXIT_INCONCLUSIVE


def _default_certificate_name(polygon_path: str) -> str:
    stem = os.path.splitext(os.path.basename(polygon_path))[0]
    return f"{stem}.certificate.json"


# ---------------------------------------------------------------------------
# volume


def _volume_chunk(polygon, trials, seed, reduce_flag, offset) -> int:
    est = estimate_admissible_volume(
        polygon, trials, seed, reduce=reduce_flag, trial_offset=offset
    )
    return est.hits


def _estimate_with_workers(
    polygon, trials: int, seed: int, reduce_flag: bool, workers: int
) -> VolumeEstimate:
    if workers == 1 or trials < workers:
        return estimate_admissible_volume(
            polygon, trials, seed, reduce=reduce_flag
        )
    base, extra = divmod(trials, workers)
    chunks = []
    offset = 0
    for i in range(workers):
        size = base + (1 if i < extra else 0)
        chunks.append((polygon, size, seed, reduce_flag, offset))
        offset += size
    with ProcessPoolExecutor(max_workers=workers) as pool:
        hits = sum(pool.map(_volume_chunk_star, chunks))
    estimate = Fraction(hits, trials)
    std_error = math.sqrt(float(estimate) * (1.0 - float(estimate)) / trials)
    return VolumeEstimate(
        estimate=estimate,
        trials=trials,
        hits=hits,
        std_error=std_error,
        seed=seed,
    )


def _volume_chunk_star(packed) -> int:
    return _volume_chunk(*packed)


def _closed_form_volume(polygon: LatticePolygon):
    """Exact admissible volume when the polygon is a known shape.

    Recognizes lattice parallelograms with side multiplicities (a, b) and
    triangles with leg multiplicities (a, 1), up to unimodular equivalence
    and translation.  Returns (value, shape name) or (None, None).
    """
    area2 = polygon_metrics(polygon).area2
    if len(polygon.vertices) == 4 and area2 % 2 == 0:
        target = area2 // 2
        a = 1
        while a * a <= target:
            if target % a == 0:
                b = target // a
                box = polygon_from_classes(
                    ((1, 0),) * a + ((0, 1),) * b + ((-1, 0),) * a + ((0, -1),) * b
                )
                if equivalent(polygon, box):
                    return (
                        parallelogram_volume_exact(a, b),
                        f"parallelogram {a}x{b}",
                    )
            a += 1
    if len(polygon.vertices) == 3:
        a = area2
        wedge = LatticePolygon([(0, 0), (a, 0), (0, 1)])
        if equivalent(polygon, wedge):
            return triangle_volume_exact(a), f"triangle {a}x1"
    return None, None


def _cmd_volume(args) -> int:
    polygon = polygon_from_json(_load_json(args.polygon))
    workers = _worker_count()
    started = time.perf_counter()
    est = _estimate_with_workers(
        polygon, args.trials, args.seed, not args.no_reduce, workers
    )
    elapsed = time.perf_counter() - started
    value, shape = _closed_form_volume(polygon)

    if args.format == "json":
        sys.stdout.write(_dump_json(volume_estimate_to_json(est, value, shape)))
    else:
        print(
            f"estimate: {est.estimate} = {float(est.estimate):.6f} "
            f"(hits {est.hits}/{est.trials}, std error {est.std_error:.6f})"
        )
        print(
            f"seed: {est.seed}, reduced: {'no' if args.no_reduce else 'yes'}"
        )
        if value is not None:
            print(f"closed form ({shape}): {value} = {float(value):.6f}")
    print(f"volume took {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def _worker_count() -> int:
    raw = os.environ.get(_WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"{_WORKERS_ENV} must be an integer, got {raw!r}")
    if workers < 1:
        raise ValueError(f"{_WORKERS_ENV} must be >= 1, got {workers}")
    return workers


# ---------------------------------------------------------------------------
# construct


def _parse_classes_flag(raw: str):
    """Parse "1,0;0,1" into ((1, 0), (0, 1))."""
    out = []
    for part in raw.split(";"):
        bits = part.split(",")
        if len(bits) != 2:
            raise FormatError(
                f"--classes expects pairs like \"1,0;0,1\", got {raw!r}"
            )
        try:
            out.append((int(bits[0]), int(bits[1])))
        except ValueError:
            raise FormatError(
                f"--classes entries must be integers, got {part!r}"
            )
    return tuple(out)


def _load_dimer(path: str) -> Arrangement:
    """Read an arrangement file and insist it is a verified dimer."""
    arr = arrangement_from_json(_load_json(path))
    report = check_admissible(arr)
    if not (report.admissible and report.matches_prescribed):
        raise ValueError(
            f"{path} is not an affine dimer for its prescribed classes; "
            "constructions need a verified dimer as input"
        )
    return arr


def _cmd_construct(args) -> int:
    if args.kind == "triangle":
        u = (args.ints[0], args.ints[1])
        w = (args.ints[2], args.ints[3])
        arr = triangle_dimer(u, w)
        provenance = provenance_dict(
            "triangle_dimer", {"u": list(u), "w": list(w)}, None
        )
    elif args.kind == "double":
        classes = _parse_classes_flag(args.classes)
        arr = double_everything(classes, seed=args.seed)
        provenance = provenance_dict(
            "double_everything",
            {"classes": [list(h) for h in classes]},
            args.seed,
        )
    elif args.kind == "add-pair":
        base = _load_dimer(args.arrangement)
        arr = add_parallel_pair(base, args.line)
        provenance = provenance_dict(
            "add_parallel_pair",
            {"source": os.path.basename(args.arrangement), "line": args.line},
            None,
        )
    elif args.kind == "lift":
        base = _load_dimer(args.arrangement)
        a, b, c, d = args.lattice
        arr = lift_sublattice(base, SublatticeSpec(Mat2(a, b, c, d)))
        provenance = provenance_dict(
            "lift_sublattice",
            {
                "source": os.path.basename(args.arrangement),
                "basis_columns": [[a, b], [c, d]],
            },
            None,
        )
    else:  # linear
        base = _load_dimer(args.arrangement)
        a, b, c, d = args.matrix
        arr = apply_linear_to_dimer(base, Mat2(a, b, c, d))
        provenance = provenance_dict(
            "apply_linear_to_dimer",
            {
                "source": os.path.basename(args.arrangement),
                "matrix_columns": [[a, b], [c, d]],
            },
            None,
        )

    doc = _certificate_document(arr, provenance)
    out_path = args.output or f"{args.kind}-dimer.json"
    _write_output(out_path, doc)

    if args.format == "json":
        sys.stdout.write(_dump_json(doc))
    else:
        ver = doc["verification"]
        print(f"construction: {provenance['construction']}")
        print(f"lines: {len(arr.lines)}")
        print(f"k={ver['k']}, f_x={ver['counts']['f_x']}")
        print(f"classes: {_classes_text(arr.classes())}")
        print(f"written: {out_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# enumerate


def _cmd_enumerate(args) -> int:
    polygons = enumerate_polygons(args.genus, args.bound)
    doc = {
        "genus": args.genus,
        "bound": args.bound,
        "count": len(polygons),
        "polygons": [polygon_to_json(p) for p in polygons],
    }
    if args.output:
        _write_output(args.output, doc)
    if args.format == "json":
        sys.stdout.write(_dump_json(doc))
    else:
        print(
            f"{len(polygons)} classes of genus {args.genus} "
            f"(vertex coordinate bound {args.bound})"
        )
        for i, poly in enumerate(polygons):
            corners = " ".join(f"({x},{y})" for x, y in poly.vertices)
            print(f"  [{i}] {corners}")
        if args.output:
            print(f"written: {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify


def _cmd_classify(args) -> int:
    started = time.perf_counter()
    report = classify_genus(
        args.genus,
        trials_per_class=args.trials,
        seed=args.seed,
        volume_trials=args.volume_trials,
    )
    elapsed = time.perf_counter() - started

    out_dir = args.output or f"classification-genus-{args.genus}"
    cert_dir = os.path.join(out_dir, "certificates")
    os.makedirs(cert_dir, exist_ok=True)

    records = []
    certified = 0
    for i, rec in enumerate(report.records):
        cert_path = None
        if rec.certified and rec.certificate is not None:
            certified += 1
            cert_path = os.path.join("certificates", f"class-{i:03d}.json")
            provenance = provenance_dict(
                rec.method,
                {"genus": args.genus, "class_index": i},
                args.seed,
            )
            _write_output(
                os.path.join(out_dir, cert_path),
                _certificate_document(rec.certificate, provenance),
            )
        records.append(
            {
                "index": i,
                "polygon": polygon_to_json(rec.polygon),
                "corners": len(rec.polygon.vertices),
                "method": rec.method,
                "certified": rec.certified,
                "certificate": cert_path,
                "volume": (
                    None
                    if rec.volume is None
                    else volume_estimate_to_json(rec.volume)
                ),
            }
        )
    doc = {
        "genus": args.genus,
        "class_count": len(report.records),
        "certified_count": certified,
        "records": records,
    }
    _write_output(os.path.join(out_dir, "report.json"), doc)

    if args.format == "json":
        sys.stdout.write(_dump_json(doc))
    else:
        print(
            f"genus {args.genus}: {certified}/{len(report.records)} "
            "classes certified"
        )
        for rec in records:
            tail = rec["certificate"] or "-"
            print(
                f"  [{rec['index']}] corners {rec['corners']}, "
                f"method {rec['method']}, certificate {tail}"
            )
        print(f"written: {os.path.join(out_dir, 'report.json')}")
    print(f"classification took {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK if certified == len(report.records) else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# serve


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="affinedimers",
        description=(
            "Decide whether convex lattice polygons admit affine dimers: "
            "check oriented line arrangements on the torus, search offset "
            "space, apply constructions, and measure admissible volume."
        ),
        epilog=(
            f"Environment: {_WORKERS_ENV} (default 1) sets the process "
            "count for volume estimation; results never depend on it."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify an arrangement file")
    p.add_argument("arrangement", help="arrangement JSON file")
    _add_format(p)
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("search", help="search offsets for a polygon's dimer")
    p.add_argument("polygon", help="polygon JSON file (vertices or classes)")
    p.add_argument("--trials", type=int, default=10000,
                   help="random trials (default 10000)")
    p.add_argument("--mesh", type=int, default=0,
                   help="fallback mesh resolution, 0 skips the mesh pass")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--output", help="certificate path "
                   "(default <polygon>.certificate.json)")
    _add_format(p)
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("volume", help="estimate the admissible volume")
    p.add_argument("polygon", help="polygon JSON file (vertices or classes)")
    p.add_argument("--trials", type=int, default=10000,
                   help="Monte Carlo trials (default 10000)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--no-reduce", action="store_true",
                   help="sample the full torus instead of the pinned subtorus")
    _add_format(p)
    p.set_defaults(handler=_cmd_volume)

    p = sub.add_parser("construct", help="build a dimer by a named recipe")
    kinds = p.add_subparsers(dest="kind", required=True)

    k = kinds.add_parser("triangle", help="dimer for the triangle spanned "
                         "by two integer vectors")
    k.add_argument("ints", type=int, nargs=4, metavar="N",
                   help="u_x u_y w_x w_y")
    _add_construct_common(k)

    k = kinds.add_parser("double", help="dimer for classes S together "
                         "with their negatives")
    k.add_argument("--classes", required=True,
                   help='semicolon-separated pairs, e.g. "1,0;0,1"')
    k.add_argument("--seed", type=int, default=0,
                   help="seed for base offsets (default 0)")
    _add_construct_common(k)

    k = kinds.add_parser("add-pair", help="insert an antiparallel line pair "
                         "next to one line of an existing dimer")
    k.add_argument("arrangement", help="certificate JSON file")
    k.add_argument("--line", type=int, required=True,
                   help="index of the line to duplicate")
    _add_construct_common(k)

    k = kinds.add_parser("lift", help="lift a dimer to a finite-index "
                         "sublattice")
    k.add_argument("arrangement", help="certificate JSON file")
    k.add_argument("--lattice", type=int, nargs=4, required=True,
                   metavar="N", help="basis columns: a b c d -> (a,b),(c,d)")
    _add_construct_common(k)

    k = kinds.add_parser("linear", help="transform a dimer by an integer "
                         "matrix acting on its polygon")
    k.add_argument("arrangement", help="certificate JSON file")
    k.add_argument("--matrix", type=int, nargs=4, required=True,
                   metavar="N", help="matrix columns: a b c d -> (a,b),(c,d)")
    _add_construct_common(k)

    p = sub.add_parser("enumerate", help="list lattice polygon classes "
                       "of a fixed genus")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--bound", type=int, default=6,
                   help="vertex coordinate bound for genus 0 (default 6)")
    p.add_argument("--output", help="write the list to this file")
    _add_format(p)
    p.set_defaults(handler=_cmd_enumerate)

    p = sub.add_parser("classify", help="find a dimer for every polygon "
                       "class of a fixed genus")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000,
                   help="search trials per class (default 10000)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--volume-trials", type=int, default=256,
                   help="volume trials per record (default 256)")
    p.add_argument("--output", help="output directory "
                   "(default classification-genus-<g>)")
    _add_format(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("serve", help="start the JSON HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.set_defaults(handler=_cmd_serve)

    return parser


def _add_format(p) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output format (default text)")


def _add_construct_common(k) -> None:
    k.add_argument("--output", help="certificate path "
                   "(default <kind>-dimer.json)")
    _add_format(k)
    k.set_defaults(handler=_cmd_construct)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
