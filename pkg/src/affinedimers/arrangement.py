"""Oriented line arrangements on the unit torus and their face complexes.

A line is the torus image of {x : <x, a> = c mod Z}, where the normal
covector a is the clockwise quarter turn of the line's primitive direction
class h and the offset c is a rational in [0, 1).  All geometry here is
exact rational arithmetic; nothing compares floats.

The pipeline is: pair_intersections solves two lines at a time after a
unimodular change of basis, build_subdivision assembles the half-edge face
complex, check_admissible runs the checkerboard test that decides whether
the arrangement carries a consistent orientation, and perfect_matching
pairs up the consistently oriented faces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, floor

from .lattice import (
    LatticePolygon,
    Mat2,
    Vec,
    angle_cmp,
    det2,
    ext_gcd,
    is_primitive,
    polygon_from_classes,
    polygon_metrics,
    sl2_sending_to_e1,
    vec_neg,
)

Point = tuple[Fraction, Fraction]

FACE_CW = "clockwise"
FACE_CCW = "counterclockwise"
FACE_X = "inconsistent"

_DIR_KEY = cmp_to_key(angle_cmp)


def normal_covector(h: Vec) -> Vec:
    """Clockwise quarter turn of a primitive class; det2(h, result) < 0."""
    if not is_primitive(h):
        raise ValueError(f"class {h} is not primitive")
    return (h[1], -h[0])


def _apply_point(m: Mat2, p: Point) -> Point:
    return (m.a * p[0] + m.c * p[1], m.b * p[0] + m.d * p[1])


def _mod1(p) -> Point:
    return (p[0] % 1, p[1] % 1)


@dataclass(frozen=True)
class TorusLine:
    """A closed oriented geodesic: direction class h, normal offset c."""

    h: Vec
    c: Fraction

    def __post_init__(self):
        h = (int(self.h[0]), int(self.h[1]))
        if not is_primitive(h):
            raise ValueError(f"class {h} is not primitive")
        c = Fraction(self.c)
        if not 0 <= c < 1:
            raise ValueError(f"offset {c} outside [0, 1)")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", c)

    @property
    def alpha(self) -> Vec:
        return (self.h[1], -self.h[0])

    def base_point(self) -> Point:
        """Some point p0 on the line; the line is p0 + t*h for t in [0, 1)."""
        a = self.alpha
        g, s, t = ext_gcd(a[0], a[1])
        assert g == 1
        return (self.c * s % 1, self.c * t % 1)

    def param_of(self, pt) -> Fraction:
        """Position t in [0, 1) of a point known to lie on the line."""
        g, s, t = ext_gcd(self.h[0], self.h[1])
        assert g == 1
        p0 = self.base_point()
        return (s * (pt[0] - p0[0]) + t * (pt[1] - p0[1])) % 1

    def contains(self, pt) -> bool:
        a = self.alpha
        return (a[0] * pt[0] + a[1] * pt[1] - self.c) % 1 == 0


@dataclass(frozen=True)
class Arrangement:
    lines: tuple[TorusLine, ...]

    def __post_init__(self):
        lines = tuple(self.lines)
        if len(lines) < 2:
            raise ValueError("an arrangement needs at least 2 lines")
        for line in lines:
            if not isinstance(line, TorusLine):
                raise ValueError("arrangement entries must be TorusLine")
        object.__setattr__(self, "lines", lines)

    def classes(self) -> tuple[Vec, ...]:
        return tuple(line.h for line in self.lines)

    def class_sum(self) -> Vec:
        return (
            sum(line.h[0] for line in self.lines),
            sum(line.h[1] for line in self.lines),
        )


def pair_intersections(line1: TorusLine, line2: TorusLine) -> list[Point]:
    """All torus points on both lines, sorted; exactly |det2(h1, h2)| many.

    Change basis by U in SL2(Z) with U h1 = (1, 0).  In the new coordinates
    line 1 is horizontal (y = -c1 mod 1) and line 2 has class (p, q) with
    q = det2(h1, h2), so its covector equation pins x to |q| residues.
    """
    d = det2(line1.h, line2.h)
    if d == 0:
        raise ValueError(
            f"classes {line1.h} and {line2.h} are parallel; no transverse"
            " intersection"
        )
    u = sl2_sending_to_e1(line1.h)
    p, q = u.apply(line2.h)
    assert q == d
    y2 = (-line1.c) % 1
    back = u.adjugate()  # inverse, since det(u) == 1
    pts = set()
    for j in range(abs(d)):
        y1 = Fraction(line2.c + p * y2 + j, q)
        pts.add(_mod1(_apply_point(back, (y1, y2))))
    if len(pts) != abs(d):  # pragma: no cover - arithmetic guarantee
        raise RuntimeError(f"expected {abs(d)} intersections, found {len(pts)}")
    return sorted(pts)


# ---------------------------------------------------------------------------
# general position


@dataclass(frozen=True)
class GeneralPositionReport:
    ok: bool
    all_parallel: bool
    coincident_pairs: tuple[tuple[int, int], ...]
    triple_points: tuple[tuple[tuple[int, ...], Point], ...]

    def describe(self) -> str:
        if self.ok:
            return "general position"
        parts = []
        if self.all_parallel:
            parts.append("all lines are parallel")
        for i, j in self.coincident_pairs:
            parts.append(f"lines {i} and {j} coincide")
        for indices, pt in self.triple_points:
            names = ", ".join(str(i) for i in indices)
            parts.append(f"lines {names} share the point ({pt[0]}, {pt[1]})")
        return "; ".join(parts)


def check_general_position(arr: Arrangement) -> GeneralPositionReport:
    """Verify: parallel lines disjoint, no triple points, not all parallel.

    Violations are returned as data, never raised; callers that need general
    position raise on a failed report themselves.
    """
    lines = arr.lines
    n = len(lines)

    all_parallel = all(
        det2(lines[0].h, lines[j].h) == 0 for j in range(1, n)
    )

    coincident = []
    for i in range(n):
        for j in range(i + 1, n):
            hi, hj = lines[i].h, lines[j].h
            if det2(hi, hj) != 0:
                continue
            if hi == hj:
                same = lines[i].c == lines[j].c
            else:
                # opposite classes: covectors are negatives, so the point
                # sets agree exactly when the offsets sum to an integer
                same = (lines[i].c + lines[j].c) % 1 == 0
            if same:
                coincident.append((i, j))

    seen: dict[Point, set[int]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if det2(lines[i].h, lines[j].h) == 0:
                continue
            for pt in pair_intersections(lines[i], lines[j]):
                seen.setdefault(pt, set()).update((i, j))
    triples = []
    for pt in sorted(seen):
        members = seen[pt]
        if len(members) > 2:
            triples.append((tuple(sorted(members)), pt))

    ok = not all_parallel and not coincident and not triples
    return GeneralPositionReport(
        ok=ok,
        all_parallel=all_parallel,
        coincident_pairs=tuple(coincident),
        triple_points=tuple(triples),
    )


# ---------------------------------------------------------------------------
# subdivision


class Subdivision:
    """Half-edge complex of an arrangement in general position.

    Every vertex is a transverse crossing of exactly two lines, every face
    cycle runs counterclockwise (interior on the left), and face ids are
    stable for identical inputs.  Instances are immutable once built.
    """

    __slots__ = (
        "arrangement",
        "points",
        "vertex_lines",
        "line_events",
        "he_origin",
        "he_line",
        "he_sign",
        "he_twin",
        "he_next",
        "he_face",
        "faces",
        "_outgoing",
        "_sectors",
        "_lift_cache",
        "_piece_cache",
    )

    def __init__(self, arrangement, points, vertex_lines, line_events,
                 he_origin, he_line, he_sign, he_twin, he_next, he_face,
                 faces, outgoing):
        self.arrangement = arrangement
        self.points = points
        self.vertex_lines = vertex_lines
        self.line_events = line_events
        self.he_origin = he_origin
        self.he_line = he_line
        self.he_sign = he_sign
        self.he_twin = he_twin
        self.he_next = he_next
        self.he_face = he_face
        self.faces = faces
        self._outgoing = outgoing
        self._sectors = None
        self._lift_cache = {}
        self._piece_cache = {}

    @property
    def v(self) -> int:
        return len(self.points)

    @property
    def e(self) -> int:
        return len(self.he_origin) // 2

    @property
    def f(self) -> int:
        return len(self.faces)

    def direction(self, he: int) -> Vec:
        h = self.arrangement.lines[self.he_line[he]].h
        return h if self.he_sign[he] > 0 else vec_neg(h)

    def head(self, he: int) -> int:
        return self.he_origin[self.he_twin[he]]

    def outgoing(self, vertex: int, line: int, sign: int) -> int:
        return self._outgoing[(vertex, line, sign)]

    def outgoing_half_edges(self, vertex: int) -> tuple[int, ...]:
        li, lj = self.vertex_lines[vertex]
        return (
            self.outgoing(vertex, li, 1),
            self.outgoing(vertex, li, -1),
            self.outgoing(vertex, lj, 1),
            self.outgoing(vertex, lj, -1),
        )

    def sector_faces(self, vertex: int) -> tuple[int, int, int, int]:
        """The four faces around a vertex in counterclockwise direction
        order; entries 0,2 and 1,3 are the two opposite pairs."""
        if self._sectors is None:
            sectors = []
            for vid in range(self.v):
                out = sorted(
                    self.outgoing_half_edges(vid),
                    key=lambda he: _DIR_KEY(self.direction(he)),
                )
                sectors.append(tuple(self.he_face[he] for he in out))
            self._sectors = tuple(sectors)
        return self._sectors[vertex]

    def _segment_step(self, he: int) -> Point:
        """Exact displacement of a half-edge in the universal cover."""
        line = self.arrangement.lines[self.he_line[he]]
        t_from = line.param_of(self.points[self.he_origin[he]])
        t_to = line.param_of(self.points[self.head(he)])
        if self.he_sign[he] > 0:
            dt = (t_to - t_from) % 1
        else:
            dt = -((t_from - t_to) % 1)
        if dt == 0:
            # a line crossed exactly once: its single segment wraps fully
            dt = Fraction(self.he_sign[he])
        h = line.h
        return (dt * h[0], dt * h[1])

    def face_lift(self, fid: int) -> tuple[Point, ...]:
        """The face as one convex counterclockwise polygon in the plane,
        starting at the stored coordinates of its first boundary vertex."""
        cached = self._lift_cache.get(fid)
        if cached is not None:
            return cached
        cycle = self.faces[fid]
        start = self.points[self.he_origin[cycle[0]]]
        ring = [start]
        x, y = start
        for he in cycle[:-1]:
            dx, dy = self._segment_step(he)
            x, y = x + dx, y + dy
            ring.append((x, y))
        dx, dy = self._segment_step(cycle[-1])
        if (x + dx, y + dy) != start:  # pragma: no cover - internal check
            raise RuntimeError(f"face {fid} does not close in the cover")
        out = tuple(ring)
        self._lift_cache[fid] = out
        return out

    def face_pieces(self, fid: int) -> tuple[tuple[Point, ...], ...]:
        """The face clipped to the unit square, as one convex ring per unit
        translate it meets.  Ring areas add up to the face area exactly."""
        cached = self._piece_cache.get(fid)
        if cached is not None:
            return cached
        ring = self.face_lift(fid)
        xs = [p[0] for p in ring]
        ys = [p[1] for p in ring]
        pieces = []
        for m in range(floor(min(xs)), ceil(max(xs))):
            for k in range(floor(min(ys)), ceil(max(ys))):
                clipped = _clip_to_unit_square(
                    [(x - m, y - k) for x, y in ring]
                )
                if clipped is not None:
                    pieces.append(clipped)
        out = tuple(pieces)
        self._piece_cache[fid] = out
        return out


def _clip_to_unit_square(ring):
    """Sutherland-Hodgman clip of a convex ring to [0,1]^2, or None if the
    overlap has no area."""
    sides = (
        lambda p: p[0],
        lambda p: 1 - p[0],
        lambda p: p[1],
        lambda p: 1 - p[1],
    )
    current = list(ring)
    for side in sides:
        if not current:
            return None
        nxt = []
        prev = current[-1]
        d_prev = side(prev)
        for pt in current:
            d = side(pt)
            if d_prev >= 0:
                nxt.append(prev)
                if d < 0:
                    t = d_prev / (d_prev - d)
                    nxt.append(
                        (prev[0] + t * (pt[0] - prev[0]),
                         prev[1] + t * (pt[1] - prev[1]))
                    )
            elif d >= 0:
                t = d_prev / (d_prev - d)
                nxt.append(
                    (prev[0] + t * (pt[0] - prev[0]),
                     prev[1] + t * (pt[1] - prev[1]))
                )
            prev, d_prev = pt, d
        current = nxt
    if len(current) < 3:
        return None
    cleaned = []
    for pt in current:
        if not cleaned or pt != cleaned[-1]:
            cleaned.append(pt)
    if len(cleaned) > 1 and cleaned[0] == cleaned[-1]:
        cleaned.pop()
    out = []
    n = len(cleaned)
    for i in range(n):
        a = cleaned[(i - 1) % n]
        b = cleaned[i]
        c = cleaned[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross != 0:
            out.append(b)
    if len(out) < 3:
        return None
    area2 = Fraction(0)
    for i in range(len(out)):
        x0, y0 = out[i]
        x1, y1 = out[(i + 1) % len(out)]
        area2 += x0 * y1 - x1 * y0
    if area2 <= 0:
        return None
    return tuple(out)


def build_subdivision(arr: Arrangement) -> Subdivision:
    """Construct the full half-edge complex of an arrangement.

    Raises ValueError when the arrangement is not in general position and
    RuntimeError when an internal consistency check fails (the latter would
    be a bug in this module, not bad input).
    """
    gp = check_general_position(arr)
    if not gp.ok:
        raise ValueError(f"arrangement is degenerate: {gp.describe()}")

    lines = arr.lines
    n = len(lines)

    points: list[Point] = []
    vertex_ids: dict[Point, int] = {}
    vertex_lines: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(i + 1, n):
            if det2(lines[i].h, lines[j].h) == 0:
                continue
            for pt in pair_intersections(lines[i], lines[j]):
                if pt in vertex_ids:  # pragma: no cover - triple point
                    raise RuntimeError(f"unexpected shared point {pt}")
                vertex_ids[pt] = len(points)
                points.append(pt)
                vertex_lines.append((i, j))

    # order each line's crossings along its closed parameter
    line_events: list[tuple[tuple[Fraction, int], ...]] = []
    for i in range(n):
        events = []
        for vid, (a, b) in enumerate(vertex_lines):
            if i in (a, b):
                events.append((lines[i].param_of(points[vid]), vid))
        events.sort()
        for r in range(1, len(events)):
            if events[r][0] == events[r - 1][0]:  # pragma: no cover
                raise RuntimeError(f"coincident parameters on line {i}")
        line_events.append(tuple(events))

    he_origin: list[int] = []
    he_line: list[int] = []
    he_sign: list[int] = []
    he_twin: list[int] = []
    outgoing: dict[tuple[int, int, int], int] = {}
    for i in range(n):
        events = line_events[i]
        m = len(events)
        if m == 0:  # pragma: no cover - excluded with general position
            raise RuntimeError(f"line {i} crosses nothing")
        for r in range(m):
            v_from = events[r][1]
            v_to = events[(r + 1) % m][1]
            fwd = len(he_origin)
            he_origin.append(v_from)
            he_line.append(i)
            he_sign.append(1)
            bwd = len(he_origin)
            he_origin.append(v_to)
            he_line.append(i)
            he_sign.append(-1)
            he_twin.extend((bwd, fwd))
            outgoing[(v_from, i, 1)] = fwd
            outgoing[(v_to, i, -1)] = bwd

    total = len(he_origin)
    for vid in range(len(points)):
        count = sum(1 for key in outgoing if key[0] == vid)
        if count != 4:  # pragma: no cover - degree check
            raise RuntimeError(f"vertex {vid} has degree {count}, wanted 4")

    # face traversal: arriving at a crossing, turn left onto the other line
    he_next = [0] * total
    for he in range(total):
        head = he_origin[he_twin[he]]
        a, b = vertex_lines[head]
        other = b if he_line[he] == a else a
        d = lines[he_line[he]].h
        if he_sign[he] < 0:
            d = vec_neg(d)
        w = lines[other].h
        sign = 1 if det2(d, w) > 0 else -1
        he_next[he] = outgoing[(head, other, sign)]

    he_face = [-1] * total
    faces: list[tuple[int, ...]] = []
    for he in range(total):
        if he_face[he] != -1:
            continue
        cycle = []
        cur = he
        while he_face[cur] == -1:
            he_face[cur] = len(faces)
            cycle.append(cur)
            cur = he_next[cur]
        if cur != he:  # pragma: no cover - internal check
            raise RuntimeError("face walk did not close on its start")
        faces.append(tuple(cycle))

    v = len(points)
    e = total // 2
    f = len(faces)
    if v - e + f != 0:  # pragma: no cover - Euler check
        raise RuntimeError(f"Euler check failed: v={v} e={e} f={f}")

    return Subdivision(
        arrangement=arr,
        points=tuple(points),
        vertex_lines=tuple(vertex_lines),
        line_events=tuple(line_events),
        he_origin=tuple(he_origin),
        he_line=tuple(he_line),
        he_sign=tuple(he_sign),
        he_twin=tuple(he_twin),
        he_next=tuple(he_next),
        he_face=tuple(he_face),
        faces=tuple(faces),
        outgoing=outgoing,
    )


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class CountSummary:
    n: int
    v: int
    e: int
    f: int
    f_cw: int
    f_ccw: int
    f_x: int
    e_cw: int
    e_ccw: int
    genus: int
    surface_boundary: int


@dataclass(frozen=True)
class AdmissibilityReport:
    k: int
    admissible: bool
    matches_prescribed: bool
    induced_classes: tuple[Vec, ...] | None
    face_labels: tuple[str, ...]
    counts: CountSummary | None
    parallelogram: bool
    notes: tuple[str, ...]
    subdivision: Subdivision = field(repr=False, compare=False)
    arrangement: Arrangement = field(repr=False, compare=False)


def _is_parallelogram_classes(classes) -> bool:
    axes = set()
    for h in classes:
        axes.add(max(h, vec_neg(h)))
    return len(axes) == 2


def check_admissible(arr: Arrangement) -> AdmissibilityReport:
    """Decide whether the arrangement carries a consistent orientation.

    Builds the face complex, forms the graph whose edges join the two
    opposite face pairs at every vertex, and counts its bipartite components
    (k).  k >= 1 means admissible; the induced per-line orientation is read
    back off the 2-coloring and compared against the prescribed classes.
    """
    if arr.class_sum() != (0, 0):
        raise ValueError(
            f"classes sum to {arr.class_sum()}, expected (0, 0)"
        )
    gp = check_general_position(arr)
    if not gp.ok:
        raise ValueError(f"arrangement is degenerate: {gp.describe()}")

    sub = build_subdivision(arr)
    f = sub.f

    neighbors: list[list[int]] = [[] for _ in range(f)]
    for vid in range(sub.v):
        s = sub.sector_faces(vid)
        for a, b in ((s[0], s[2]), (s[1], s[3])):
            neighbors[a].append(b)
            neighbors[b].append(a)

    comp = [-1] * f
    comp_count = 0
    for root in range(f):
        if comp[root] != -1:
            continue
        comp[root] = comp_count
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            for nxt in neighbors[cur]:
                if comp[nxt] == -1:
                    comp[nxt] = comp_count
                    queue.append(nxt)
        comp_count += 1
    if comp_count != 2:  # pragma: no cover - structural theorem
        raise RuntimeError(
            f"expected exactly 2 checkerboard classes, found {comp_count}"
        )

    # 2-color each component where possible
    color = [-1] * f
    bipartite = [True, True]
    for root in range(f):
        if color[root] != -1:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            for nxt in neighbors[cur]:
                if color[nxt] == -1:
                    color[nxt] = 1 - color[cur]
                    queue.append(nxt)
                elif color[nxt] == color[cur]:
                    bipartite[comp[cur]] = False
    k = sum(bipartite)

    classes = arr.classes()
    parallelogram = _is_parallelogram_classes(classes)
    if k == 2 and not parallelogram:  # pragma: no cover - structural theorem
        raise RuntimeError("two bipartite classes on a non-parallelogram")

    notes: list[str] = []
    if k == 0:
        return AdmissibilityReport(
            k=0,
            admissible=False,
            matches_prescribed=False,
            induced_classes=None,
            face_labels=tuple([FACE_X] * f),
            counts=None,
            parallelogram=parallelogram,
            notes=(),
            subdivision=sub,
            arrangement=arr,
        )

    # read the per-line orientation off one component's coloring: a
    # counterclockwise face traverses each boundary line along its oriented
    # direction
    def read_orientation(which: int, flip: bool) -> tuple[Vec, ...]:
        induced: list[Vec | None] = [None] * len(arr.lines)
        for fid in range(f):
            if comp[fid] != which:
                continue
            ccw = (color[fid] == 0) != flip
            for he in sub.faces[fid]:
                d = sub.direction(he)
                want = d if ccw else vec_neg(d)
                i = sub.he_line[he]
                if induced[i] is None:
                    induced[i] = want
                elif induced[i] != want:  # pragma: no cover
                    raise RuntimeError(
                        f"line {i} reads inconsistent orientations"
                    )
        if any(d is None for d in induced):  # pragma: no cover
            raise RuntimeError("some line bounds no oriented face")
        return tuple(induced)  # type: ignore[return-value]

    def component_reading(which: int) -> tuple[tuple[Vec, ...], bool]:
        induced = read_orientation(which, flip=False)
        if induced[0] != classes[0]:
            return read_orientation(which, flip=True), True
        return induced, False

    # each bipartite component carries its own orientation family (up to a
    # global flip); the prescription matches if either family realizes it
    candidates = [c for c in range(2) if bipartite[c]]
    chosen = candidates[0]
    induced_classes, flipped = component_reading(chosen)
    matches = induced_classes == classes
    if not matches and len(candidates) == 2:
        alt_induced, alt_flipped = component_reading(candidates[1])
        if alt_induced == classes:
            chosen = candidates[1]
            induced_classes, flipped = alt_induced, alt_flipped
            matches = True
    if flipped:
        notes.append("2-coloring flipped so line 0 matches its class")
    if k == 2:
        notes.append(
            "both checkerboard classes are orientable; faces of class"
            f" {chosen} were 2-colored and edge counts are incidences with"
            " that class"
        )

    labels = []
    for fid in range(f):
        if comp[fid] != chosen:
            labels.append(FACE_X)
        elif (color[fid] == 0) != flipped:
            labels.append(FACE_CCW)
        else:
            labels.append(FACE_CW)
    face_labels = tuple(labels)

    summary = _count_summary(arr, sub, face_labels, induced_classes)

    return AdmissibilityReport(
        k=k,
        admissible=True,
        matches_prescribed=matches,
        induced_classes=induced_classes,
        face_labels=face_labels,
        counts=summary,
        parallelogram=parallelogram,
        notes=tuple(notes),
        subdivision=sub,
        arrangement=arr,
    )


def _count_summary(arr, sub, face_labels, induced_classes) -> CountSummary:
    n = len(arr.lines)
    v, e, f = sub.v, sub.e, sub.f
    f_cw = face_labels.count(FACE_CW)
    f_ccw = face_labels.count(FACE_CCW)
    f_x = face_labels.count(FACE_X)

    e_cw = e_ccw = 0
    for he in range(len(sub.he_origin)):
        if sub.he_sign[he] < 0:
            continue
        side_a = face_labels[sub.he_face[he]]
        side_b = face_labels[sub.he_face[sub.he_twin[he]]]
        oriented = [lbl for lbl in (side_a, side_b) if lbl != FACE_X]
        if len(oriented) != 1:  # pragma: no cover - checkerboard property
            raise RuntimeError("segment without a unique oriented side")
        if oriented[0] == FACE_CW:
            e_cw += 1
        else:
            e_ccw += 1

    poly = polygon_from_classes(induced_classes)
    met = polygon_metrics(poly)
    summary = CountSummary(
        n=n, v=v, e=e, f=f, f_cw=f_cw, f_ccw=f_ccw, f_x=f_x,
        e_cw=e_cw, e_ccw=e_ccw, genus=met.interior, surface_boundary=n,
    )
    _assert_count_invariants(summary, met.area2)
    return summary


def _assert_count_invariants(cs: CountSummary, area2: int) -> None:
    checks = (
        cs.v == cs.f,
        cs.e == 2 * cs.v,
        cs.f_cw == cs.f_ccw,
        cs.f == cs.f_cw + cs.f_ccw + cs.f_x,
        cs.e_cw == cs.e_ccw,
        cs.e_cw + cs.e_ccw == cs.e,
        2 * cs.f_x <= cs.f <= 3 * cs.f_x,
        cs.f_x == area2,
    )
    if not all(checks):  # pragma: no cover - structural theorem
        raise RuntimeError(f"count invariants violated: {cs}, area2={area2}")


def counts(arr: Arrangement, report: AdmissibilityReport) -> CountSummary:
    """The count summary of an admissible report; raises otherwise."""
    if not report.admissible or report.counts is None:
        raise ValueError("counts are only defined for admissible arrangements")
    return report.counts


# ---------------------------------------------------------------------------
# matchings


@dataclass(frozen=True)
class Matching:
    """Pairs (clockwise face, counterclockwise face, shared vertex)."""

    pairs: tuple[tuple[int, int, int], ...]


def perfect_matching(report: AdmissibilityReport, rho: Vec) -> Matching:
    """Match every clockwise face to a counterclockwise face across the one
    boundary vertex where the face's two oriented line directions straddle
    the probe direction rho."""
    if rho == (0, 0):
        raise ValueError("rho must be nonzero")
    for idx, line in enumerate(report.arrangement.lines):
        if det2(rho, line.h) == 0:
            raise ValueError(f"rho {rho} is parallel to line {idx}")
    if not report.admissible or report.k != 1:
        raise ValueError("matching requires an admissible arrangement with k = 1")

    sub = report.subdivision
    labels = report.face_labels
    pairs = []
    used_ccw = set()
    for fid in range(sub.f):
        if labels[fid] != FACE_CW:
            continue
        cycle = sub.faces[fid]
        m = len(cycle)
        hit = None
        for pos in range(m):
            he_in = cycle[pos - 1]
            he_out = cycle[pos]
            d_in = sub.direction(he_in)
            d_out = sub.direction(he_out)
            # oriented directions at this corner are -d_out (arriving) and
            # -d_in (leaving); rho must fall strictly between them
            if det2(d_out, rho) > 0 and det2(rho, d_in) > 0:
                if hit is not None:  # pragma: no cover - uniqueness theorem
                    raise RuntimeError(f"face {fid} straddles rho twice")
                hit = he_out
        if hit is None:  # pragma: no cover - existence theorem
            raise RuntimeError(f"face {fid} has no straddle corner for {rho}")
        vertex = sub.he_origin[hit]
        opposite = sub.outgoing(
            vertex, sub.he_line[hit], -sub.he_sign[hit]
        )
        partner = sub.he_face[opposite]
        if labels[partner] != FACE_CCW:  # pragma: no cover
            raise RuntimeError(
                f"matched partner of face {fid} is not counterclockwise"
            )
        if partner in used_ccw:  # pragma: no cover - bijection theorem
            raise RuntimeError(f"face {partner} matched twice")
        used_ccw.add(partner)
        pairs.append((fid, partner, vertex))
    return Matching(pairs=tuple(sorted(pairs)))


# ---------------------------------------------------------------------------
# surface type


def surface_type(poly: LatticePolygon) -> tuple[int, int]:
    """(genus, punctures) of the surface carried by a dimer with this
    homology polygon: interior and boundary lattice point counts."""
    met = polygon_metrics(poly)
    return (met.interior, met.boundary)
