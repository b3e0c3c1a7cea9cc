"""Exact lattice geometry for the plane.

Primitive integer vectors, 2x2 integer matrices, convex lattice polygons and
the bijection between polygons (up to translation) and multisets of primitive
edge vectors summing to zero.  Everything is integer or rational arithmetic;
there are no epsilons anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cmp_to_key, lru_cache

Vec = tuple[int, int]


def det2(u: Vec, v: Vec) -> int:
    """Determinant of the 2x2 matrix with columns u, v."""
    return u[0] * v[1] - u[1] * v[0]


def dot2(u: Vec, v: Vec) -> int:
    return u[0] * v[0] + u[1] * v[1]


def vec_add(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vec_sub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vec_neg(u: Vec) -> Vec:
    return (-u[0], -u[1])


def is_primitive(v: Vec) -> bool:
    """True iff v is nonzero with coprime coordinates."""
    return v != (0, 0) and math.gcd(v[0], v[1]) == 1


def is_parallel(u: Vec, v: Vec) -> bool:
    """True iff u and v span the same line (orientation ignored)."""
    return det2(u, v) == 0


@dataclass(frozen=True)
class Mat2:
    """2x2 integer matrix with columns (a, b) and (c, d)."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_columns(cls, alpha: Vec, beta: Vec) -> Mat2:
        return cls(alpha[0], alpha[1], beta[0], beta[1])

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1, 0, 0, 1)

    def columns(self) -> tuple[Vec, Vec]:
        return (self.a, self.b), (self.c, self.d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> Mat2:
        """Adjugate: self @ adj = adj @ self = det * I."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def apply(self, v: Vec) -> Vec:
        return (self.a * v[0] + self.c * v[1], self.b * v[0] + self.d * v[1])

    def apply_transpose(self, v: Vec) -> Vec:
        """Apply the transpose, i.e. pair v with each column."""
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def __matmul__(self, other: Mat2) -> Mat2:
        c0 = self.apply((other.a, other.b))
        c1 = self.apply((other.c, other.d))
        return Mat2(c0[0], c0[1], c1[0], c1[1])

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def sl2_sending_to_e1(h: Vec) -> Mat2:
    """A determinant-one matrix U with U @ h == (1, 0); h must be primitive."""
    if not is_primitive(h):
        raise ValueError(f"class {h} is not primitive")
    a, b = h
    g, s, t = ext_gcd(a, b)
    assert g == 1
    # rows (s, t) and (-b, a)  ->  columns (s, -b), (t, a)
    return Mat2(s, -b, t, a)


def _half(v: Vec) -> int:
    # 0 for argument in [0, pi), 1 for [pi, 2*pi)
    x, y = v
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def angle_cmp(u: Vec, v: Vec) -> int:
    """Compare nonzero vectors by angle from the positive x-axis in [0, 2pi).

    Vectors pointing the same way compare equal, so a stable sort keeps
    multiset input order for repeated directions.
    """
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    cr = det2(u, v)
    if cr > 0:
        return -1
    if cr < 0:
        return 1
    return 0


_ANGLE_KEY = cmp_to_key(angle_cmp)


def angle_sort(vectors: list[Vec] | tuple[Vec, ...]) -> tuple[Vec, ...]:
    """Sort vectors by angle in [0, 2pi), stable for equal directions."""
    if any(v == (0, 0) for v in vectors):
        raise ValueError("cannot angle-sort a zero vector")
    return tuple(sorted(vectors, key=_ANGLE_KEY))


@dataclass(frozen=True)
class PolygonMetrics:
    area2: int      # twice the Euclidean area, positive
    boundary: int   # lattice points on the boundary
    interior: int   # lattice points strictly inside
    genus: int      # = interior


class LatticePolygon:
    """Convex lattice polygon: counterclockwise corner vertices, no three
    consecutive collinear.  The stored vertex tuple is rotated to start at the
    lexicographically smallest vertex, so equality is positional equality."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        verts = [(int(x), int(y)) for x, y in vertices]
        if len(verts) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        n = len(verts)
        if len(set(verts)) != n:
            raise ValueError("repeated vertex")
        area2 = 0
        for i in range(n):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % n]
            area2 += x0 * y1 - x1 * y0
        if area2 < 0:
            raise ValueError("vertices are clockwise; expected counterclockwise")
        if area2 == 0:
            raise ValueError("degenerate polygon with zero area")
        for i in range(n):
            e0 = vec_sub(verts[(i + 1) % n], verts[i])
            e1 = vec_sub(verts[(i + 2) % n], verts[(i + 1) % n])
            if det2(e0, e1) <= 0:
                raise ValueError(
                    f"not strictly convex at vertex {verts[(i + 1) % n]}"
                )
        start = min(range(n), key=lambda i: verts[i])
        self.vertices: tuple[Vec, ...] = tuple(verts[start:] + verts[:start])

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"LatticePolygon({list(self.vertices)})"

    def edges(self) -> tuple[Vec, ...]:
        v = self.vertices
        n = len(v)
        return tuple(vec_sub(v[(i + 1) % n], v[i]) for i in range(n))

    def translate(self, t: Vec) -> LatticePolygon:
        return LatticePolygon([vec_add(p, t) for p in self.vertices])


def polygon_from_classes(classes) -> LatticePolygon:
    """Build the convex polygon whose primitive edge vectors are `classes`.

    The classes are sorted by angle and walked from the origin; runs of equal
    directions merge into a single edge.  The walk starts at the polygon's
    bottom-left vertex, which lands at (0, 0).
    """
    cl = validate_classes(classes)
    ordered = angle_sort(cl)
    verts: list[Vec] = [(0, 0)]
    for h in ordered:
        verts.append(vec_add(verts[-1], h))
    if verts[-1] != (0, 0):
        raise ValueError("classes do not sum to zero")
    verts.pop()
    corners: list[Vec] = []
    n = len(verts)
    for i in range(n):
        before = vec_sub(verts[i], verts[(i - 1) % n])
        after = vec_sub(verts[(i + 1) % n], verts[i])
        if det2(before, after) != 0:
            corners.append(verts[i])
    return LatticePolygon(corners)


def classes_from_polygon(poly: LatticePolygon) -> tuple[Vec, ...]:
    """Primitive edge vectors of the polygon, angle-sorted.

    An edge of lattice length g contributes g copies of its primitive
    direction, so the result sums to zero and recovers the polygon.
    """
    out: list[Vec] = []
    for e in poly.edges():
        g = math.gcd(e[0], e[1])
        prim = (e[0] // g, e[1] // g)
        out.extend([prim] * g)
    return angle_sort(out)


def validate_classes(classes) -> tuple[Vec, ...]:
    """Check a homology class multiset: primitive entries, zero sum, not all
    parallel.  Returns the multiset as a tuple."""
    cl = tuple((int(x), int(y)) for x, y in classes)
    if not cl:
        raise ValueError("empty class multiset")
    for h in cl:
        if not is_primitive(h):
            raise ValueError(f"class {h} is not primitive")
    sx = sum(h[0] for h in cl)
    sy = sum(h[1] for h in cl)
    if (sx, sy) != (0, 0):
        raise ValueError(f"classes sum to ({sx}, {sy}), expected (0, 0)")
    first = cl[0]
    if all(is_parallel(first, h) for h in cl):
        raise ValueError("all classes are parallel")
    return cl


def polygon_metrics(poly: LatticePolygon) -> PolygonMetrics:
    """Twice-area, boundary and interior lattice point counts.

    Interior count comes from Pick's formula: area2 = 2*interior + boundary - 2.
    """
    verts = poly.vertices
    n = len(verts)
    area2 = 0
    boundary = 0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        area2 += x0 * y1 - x1 * y0
        boundary += math.gcd(x1 - x0, y1 - y0)
    interior2 = area2 - boundary + 2
    if interior2 < 0 or interior2 % 2:
        raise RuntimeError(f"Pick count failed: area2={area2} boundary={boundary}")
    interior = interior2 // 2
    return PolygonMetrics(area2=area2, boundary=boundary, interior=interior,
                          genus=interior)


def apply_matrix(m: Mat2, poly: LatticePolygon) -> LatticePolygon:
    """Image of the polygon under an invertible integer matrix; vertex order is
    reversed when det < 0 to restore counterclockwise orientation."""
    d = m.det()
    if d == 0:
        raise ValueError("matrix is singular")
    verts = [m.apply(p) for p in poly.vertices]
    if d < 0:
        verts.reverse()
    return LatticePolygon(verts)


# ---------------------------------------------------------------------------
# unimodular equivalence


def _multiset_key(images: list[Vec]) -> tuple[int, tuple[Vec, ...]]:
    m = max(max(abs(x), abs(y)) for x, y in images)
    return m, tuple(sorted(images))


def _best_shear_key(images: list[Vec]) -> tuple[int, tuple[Vec, ...]]:
    """Minimize the multiset key over integer shears (x, y) -> (x + t*y, y).

    The max-norm objective is convex piecewise-linear in t, so walk downhill
    to its minimizer, then compare sorted tuples across the flat stretch.
    """

    def norm_at(t: int) -> int:
        return max(max(abs(x + t * y), abs(y)) for x, y in images)

    t = 0
    cur = norm_at(t)
    while norm_at(t - 1) < cur:
        t -= 1
        cur = norm_at(t)
    while norm_at(t + 1) < cur:
        t += 1
        cur = norm_at(t)
    lo = t
    while norm_at(lo - 1) == cur:
        lo -= 1
    hi = t
    while norm_at(hi + 1) == cur:
        hi += 1
    best = None
    for s in range(lo, hi + 1):
        key = (cur, tuple(sorted((x + s * y, y) for x, y in images)))
        if best is None or key < best:
            best = key
    assert best is not None
    return best


_REFLECT = Mat2(1, 0, 0, -1)  # fixes (1, 0), determinant -1


@lru_cache(maxsize=None)
def _canonical_from_sorted(classes: tuple[Vec, ...]) -> tuple[Vec, ...]:
    best = None
    seen_firsts: set[Vec] = set()
    for w in classes:
        if w in seen_firsts:
            continue
        seen_firsts.add(w)
        u0 = sl2_sending_to_e1(w)
        for u in (u0, _REFLECT @ u0):
            images = [u.apply(h) for h in classes]
            key = _best_shear_key(images)
            if best is None or key < best:
                best = key
    assert best is not None
    return angle_sort(best[1])


def canonical_classes(poly: LatticePolygon) -> tuple[Vec, ...]:
    """Canonical representative of the polygon's edge class multiset under the
    unimodular group, angle-sorted.  Equal canonical classes is exactly
    equivalence up to GL2(Z) and translation."""
    return _canonical_from_sorted(tuple(sorted(classes_from_polygon(poly))))


def canonical_polygon(poly: LatticePolygon) -> LatticePolygon:
    """Distinguished representative of the polygon's equivalence class, with
    its lexicographically smallest vertex at the origin."""
    rep = polygon_from_classes(canonical_classes(poly))
    t = vec_neg(min(rep.vertices))
    return rep.translate(t)


def equivalent(p: LatticePolygon, q: LatticePolygon) -> bool:
    """Equality up to GL2(Z) change of basis and translation."""
    mp, mq = polygon_metrics(p), polygon_metrics(q)
    if (mp.area2, mp.boundary, mp.interior) != (mq.area2, mq.boundary, mq.interior):
        return False
    if len(p.vertices) != len(q.vertices):
        return False
    return canonical_classes(p) == canonical_classes(q)


# ---------------------------------------------------------------------------
# enumeration


def enumerate_polygons(genus: int, bound: int) -> list[LatticePolygon]:
    """All convex lattice polygons with the given number of interior points
    that fit in a bound x bound box, one canonical representative per
    equivalence class, deterministically ordered.

    Walks convex edge cycles from the bottom-left vertex with strictly
    increasing edge angles.  The interior count of the partial hull is
    monotone, which prunes the search hard.
    """
    if genus not in (0, 1, 2):
        raise ValueError(f"unsupported genus {genus}; expected 0, 1 or 2")
    if bound < 4:
        raise ValueError(f"bound {bound} too small; need at least 4")

    dirs: dict[Vec, list[Vec]] = {}
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if (x, y) == (0, 0):
                continue
            g = math.gcd(x, y)
            dirs.setdefault((x // g, y // g), []).append((x, y))
    sorted_dirs = angle_sort(list(dirs.keys()))
    dir_index = {d: i for i, d in enumerate(sorted_dirs)}
    # candidate edges grouped by direction, in angle order
    candidates: list[tuple[int, Vec]] = []
    for d in sorted_dirs:
        for v in sorted(dirs[d]):
            candidates.append((dir_index[d], v))
    # first candidate position whose direction index is >= i
    starts = [0] * (len(sorted_dirs) + 1)
    pos = 0
    for i in range(len(sorted_dirs)):
        while pos < len(candidates) and candidates[pos][0] < i:
            pos += 1
        starts[i] = pos
    starts[len(sorted_dirs)] = len(candidates)

    found: dict[tuple[Vec, ...], LatticePolygon] = {}

    def close_and_record(path: list[Vec], last_idx: int) -> None:
        if len(path) < 3:
            return
        tail = path[-1]
        e_close = vec_neg(tail)
        g = math.gcd(e_close[0], e_close[1])
        close_dir = (e_close[0] // g, e_close[1] // g)
        ci = dir_index.get(close_dir)
        if ci is None or ci <= last_idx:
            return
        e_last = vec_sub(path[-1], path[-2])
        if det2(e_last, e_close) <= 0:
            return
        e_first = path[1]
        if det2(e_close, e_first) <= 0:
            return
        poly = LatticePolygon(path)
        if polygon_metrics(poly).interior != genus:
            return
        key = canonical_classes(poly)
        if key not in found:
            found[key] = canonical_polygon(poly)

    def walk(path: list[Vec], last_idx: int, last_edge: Vec, area2: int,
             brd: int, min_x: int, max_x: int, max_y: int) -> None:
        close_and_record(path, last_idx)
        tail = path[-1]
        for p in range(starts[last_idx + 1], len(candidates)):
            idx, e = candidates[p]
            if det2(last_edge, e) <= 0:
                break  # turned past half a revolution; later angles only worse
            nxt = (tail[0] + e[0], tail[1] + e[1])
            if nxt[1] < 0 or (nxt[1] == 0 and nxt[0] <= 0):
                continue  # start vertex must stay the (y, x)-minimum
            nmin_x = min(min_x, nxt[0])
            nmax_x = max(max_x, nxt[0])
            nmax_y = max(max_y, nxt[1])
            if nmax_x - nmin_x > bound or nmax_y > bound:
                continue
            narea2 = area2 + det2(tail, nxt)
            g_close = math.gcd(nxt[0], nxt[1])
            nbrd = brd + math.gcd(e[0], e[1])
            interior2 = narea2 - (nbrd + g_close) + 2
            if interior2 > 2 * genus:
                continue
            path.append(nxt)
            walk(path, idx, e, narea2, nbrd, nmin_x, nmax_x, nmax_y)
            path.pop()

    for idx, first in candidates:
        if first[1] < 0 or (first[1] == 0 and first[0] <= 0):
            continue  # first edge angle must lie in [0, pi)
        path = [(0, 0), first]
        walk(path, idx, first, 0, math.gcd(first[0], first[1]),
             min(0, first[0]), max(0, first[0]), first[1])

    reps = list(found.values())
    reps.sort(key=lambda p: (polygon_metrics(p).area2, len(p.vertices), p.vertices))
    return reps
