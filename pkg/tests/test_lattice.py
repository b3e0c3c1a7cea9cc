"""Lattice geometry tests.

Oracles come first: interior/boundary counts are recomputed by brute-force
point scans and compared against the Pick-based implementation, and the
polygon <-> class-multiset bijection is exercised both ways.
"""

import math
import random

import pytest

from affinedimers.lattice import (
    LatticePolygon,
    Mat2,
    angle_sort,
    apply_matrix,
    canonical_classes,
    canonical_polygon,
    classes_from_polygon,
    det2,
    enumerate_polygons,
    equivalent,
    ext_gcd,
    is_primitive,
    polygon_from_classes,
    polygon_metrics,
    sl2_sending_to_e1,
    validate_classes,
)


# --- oracles ---------------------------------------------------------------


def point_in_polygon(pt, poly):
    """-1 outside, 0 on boundary, 1 strictly inside (convex, ccw)."""
    verts = poly.vertices
    n = len(verts)
    on_edge = False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        cr = det2((b[0] - a[0], b[1] - a[1]), (pt[0] - a[0], pt[1] - a[1]))
        if cr < 0:
            return -1
        if cr == 0:
            lo_x, hi_x = min(a[0], b[0]), max(a[0], b[0])
            lo_y, hi_y = min(a[1], b[1]), max(a[1], b[1])
            if lo_x <= pt[0] <= hi_x and lo_y <= pt[1] <= hi_y:
                on_edge = True
    return 0 if on_edge else 1


def count_lattice_points(poly):
    """Brute-force (interior, boundary) scan over the bounding box."""
    xs = [v[0] for v in poly.vertices]
    ys = [v[1] for v in poly.vertices]
    interior = boundary = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            side = point_in_polygon((x, y), poly)
            if side == 1:
                interior += 1
            elif side == 0:
                boundary += 1
    return interior, boundary


def area2_by_triangulation(poly):
    """Twice the area as a fan of triangles from the first vertex."""
    v = poly.vertices
    total = 0
    for i in range(1, len(v) - 1):
        u = (v[i][0] - v[0][0], v[i][1] - v[0][1])
        w = (v[i + 1][0] - v[0][0], v[i + 1][1] - v[0][1])
        total += det2(u, w)
    return total


FIGURE_CLASSES = [(1, 0), (1, 0), (0, 1), (-1, 1), (-1, -2)]


def random_polygon(rng, max_classes=8, coord=3):
    """Random valid class multiset -> polygon."""
    while True:
        n = rng.randint(3, max_classes)
        classes = []
        for _ in range(n - 1):
            while True:
                v = (rng.randint(-coord, coord), rng.randint(-coord, coord))
                if is_primitive(v):
                    classes.append(v)
                    break
        sx = -sum(v[0] for v in classes)
        sy = -sum(v[1] for v in classes)
        g = math.gcd(sx, sy)
        if g == 0:
            continue
        classes.extend([(sx // g, sy // g)] * g)
        try:
            validate_classes(classes)
        except ValueError:
            continue
        return polygon_from_classes(classes)


# --- vector and matrix basics ----------------------------------------------


def test_is_primitive():
    assert is_primitive((1, 0))
    assert is_primitive((-3, 2))
    assert not is_primitive((0, 0))
    assert not is_primitive((2, 2))
    assert not is_primitive((4, 6))


def test_det2_examples():
    assert det2((1, 0), (0, 1)) == 1
    assert det2((2, 1), (1, 1)) == 1
    assert det2((1, 2), (2, 4)) == 0
    assert det2((0, 1), (1, 0)) == -1


def test_ext_gcd_bezout():
    rng = random.Random(7)
    for _ in range(300):
        a = rng.randint(-40, 40)
        b = rng.randint(-40, 40)
        g, s, t = ext_gcd(a, b)
        assert g == math.gcd(a, b)
        assert s * a + t * b == g


def test_sl2_sending_to_e1():
    rng = random.Random(11)
    for _ in range(200):
        v = (rng.randint(-9, 9), rng.randint(-9, 9))
        if not is_primitive(v):
            continue
        u = sl2_sending_to_e1(v)
        assert u.det() == 1
        assert u.apply(v) == (1, 0)


def test_adjugate():
    m = Mat2.from_columns((3, 1), (1, 2))
    assert m.adjugate() == Mat2.from_columns((2, -1), (-1, 3))
    assert m @ m.adjugate() == Mat2(5, 0, 0, 5)
    d = Mat2.from_columns((1, 0), (0, 2))
    assert d.adjugate() == Mat2.from_columns((2, 0), (0, 1))
    rng = random.Random(3)
    for _ in range(100):
        m = Mat2(*(rng.randint(-5, 5) for _ in range(4)))
        adj = m.adjugate()
        prod = m @ adj
        assert prod == Mat2(m.det(), 0, 0, m.det())
        assert adj.adjugate() == m


def test_angle_sort_order_and_stability():
    vs = [(0, -1), (1, 0), (-1, 1), (0, 1), (1, 1), (-1, -1)]
    assert angle_sort(vs) == (
        (1, 0), (1, 1), (0, 1), (-1, 1), (-1, -1), (0, -1))
    # same-direction entries keep multiset input order (stable)
    assert angle_sort([(2, 0), (1, 0), (1, 0)]) == ((2, 0), (1, 0), (1, 0))
    with pytest.raises(ValueError):
        angle_sort([(0, 0), (1, 0)])


# --- polygons ----------------------------------------------------------------


def test_polygon_from_classes_figure_example():
    p = polygon_from_classes(FIGURE_CLASSES)
    assert p.vertices == ((0, 0), (2, 0), (2, 1), (1, 2))


def test_polygon_from_classes_elementary_triangle():
    p = polygon_from_classes([(1, 0), (0, 1), (-1, -1)])
    assert p.vertices == ((0, 0), (1, 0), (1, 1))
    m = polygon_metrics(p)
    assert (m.area2, m.boundary, m.interior) == (1, 3, 0)
    assert equivalent(p, LatticePolygon([(0, 0), (1, 0), (0, 1)]))


def test_polygon_from_classes_rejects_bad_input():
    with pytest.raises(ValueError):
        polygon_from_classes([(1, 0), (-1, 0)])  # all parallel
    with pytest.raises(ValueError):
        polygon_from_classes([(1, 0), (0, 1), (-1, 0)])  # nonzero sum
    with pytest.raises(ValueError):
        polygon_from_classes([(2, 0), (0, 1), (-2, -1)])  # not primitive
    with pytest.raises(ValueError):
        polygon_from_classes([])


def test_classes_round_trip_random():
    rng = random.Random(2024)
    for _ in range(150):
        poly = random_polygon(rng)
        classes = classes_from_polygon(poly)
        again = polygon_from_classes(classes)
        # the walk starts at the bottom-left vertex: equal up to translation
        d = (poly.vertices[0][0] - again.vertices[0][0],
             poly.vertices[0][1] - again.vertices[0][1])
        assert again.translate(d) == poly
        assert sorted(classes_from_polygon(again)) == sorted(classes)


def test_polygon_constructor_validation():
    with pytest.raises(ValueError):
        LatticePolygon([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        LatticePolygon([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(ValueError):
        LatticePolygon([(0, 0), (1, 0), (2, 0), (1, 1)])  # collinear triple
    with pytest.raises(ValueError):
        LatticePolygon([(0, 0), (1, 0), (1, 0), (0, 1)])  # repeat
    p = LatticePolygon([(5, 5), (4, 7), (3, 5)])  # rotation canonicalized
    assert p.vertices[0] == (3, 5)


def test_metrics_against_point_scan():
    cases = [
        LatticePolygon([(0, 0), (4, 0), (0, 4)]),
        LatticePolygon([(0, 0), (2, 0), (0, 2)]),
        LatticePolygon([(0, 0), (1, 0), (1, 1), (0, 1)]),
        polygon_from_classes(FIGURE_CLASSES),
    ]
    rng = random.Random(5)
    cases.extend(random_polygon(rng) for _ in range(60))
    for poly in cases:
        m = polygon_metrics(poly)
        interior, boundary = count_lattice_points(poly)
        assert m.interior == interior, poly
        assert m.boundary == boundary, poly
        assert m.area2 == area2_by_triangulation(poly)
        assert m.genus == m.interior
        # Pick's identity
        assert m.area2 == 2 * m.interior + m.boundary - 2


def test_metrics_frozen_values():
    m = polygon_metrics(LatticePolygon([(0, 0), (4, 0), (0, 4)]))
    assert (m.area2, m.boundary, m.interior) == (16, 12, 3)
    m = polygon_metrics(polygon_from_classes(FIGURE_CLASSES))
    assert (m.area2, m.boundary, m.interior, m.genus) == (5, 5, 1, 1)
    # legs-2 right triangle: no interior points at all
    m = polygon_metrics(LatticePolygon([(0, 0), (2, 0), (0, 2)]))
    assert (m.area2, m.boundary, m.interior) == (4, 6, 0)


def test_apply_matrix():
    tri = LatticePolygon([(0, 0), (1, 0), (0, 1)])
    sheared = apply_matrix(Mat2.from_columns((1, 0), (1, 1)), tri)
    assert sheared == LatticePolygon([(0, 0), (1, 0), (1, 1)])
    flipped = apply_matrix(Mat2.from_columns((0, 1), (1, 0)), tri)
    assert flipped == tri  # symmetric triangle, orientation restored
    with pytest.raises(ValueError):
        apply_matrix(Mat2(1, 1, 1, 1), tri)
    rng = random.Random(17)
    for _ in range(80):
        poly = random_polygon(rng)
        while True:
            m = Mat2(*(rng.randint(-3, 3) for _ in range(4)))
            if abs(m.det()) == 1:
                break
        q = apply_matrix(m, poly)
        mp, mq = polygon_metrics(poly), polygon_metrics(q)
        assert (mp.area2, mp.boundary, mp.interior) == (mq.area2, mq.boundary, mq.interior)
        assert equivalent(poly, q)


def test_equivalent():
    unit = LatticePolygon([(0, 0), (1, 0), (0, 1)])
    assert equivalent(unit, LatticePolygon([(0, 0), (1, 0), (1, 1)]))
    assert equivalent(unit, unit.translate((7, -3)))
    square = LatticePolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert not equivalent(unit, square)
    assert not equivalent(
        LatticePolygon([(0, 0), (2, 0), (0, 2)]),
        LatticePolygon([(0, 0), (4, 0), (0, 1)]),
    )  # same area, different boundary counts


def test_canonical_is_class_function():
    rng = random.Random(23)
    for _ in range(60):
        poly = random_polygon(rng, max_classes=6, coord=2)
        canon = canonical_classes(poly)
        for _ in range(4):
            while True:
                m = Mat2(*(rng.randint(-4, 4) for _ in range(4)))
                if abs(m.det()) == 1:
                    break
            moved = apply_matrix(m, poly).translate(
                (rng.randint(-5, 5), rng.randint(-5, 5)))
            assert canonical_classes(moved) == canon
        rep = canonical_polygon(poly)
        assert equivalent(rep, poly)
        assert min(rep.vertices) == (0, 0)


def test_enumerate_genus1_is_16_and_saturated():
    reps6 = enumerate_polygons(1, 6)
    assert len(reps6) == 16
    reps7 = enumerate_polygons(1, 7)
    assert {canonical_classes(p) for p in reps6} == \
           {canonical_classes(p) for p in reps7}


def test_enumerate_genus0_families():
    reps = enumerate_polygons(0, 6)
    canon = {canonical_classes(p) for p in reps}
    # legs-2 right triangle
    assert canonical_classes(LatticePolygon([(0, 0), (2, 0), (0, 2)])) in canon
    # a x 1 triangles
    for a in range(1, 7):
        assert canonical_classes(LatticePolygon([(0, 0), (a, 0), (0, 1)])) in canon
    # trapezoids with parallel sides b >= c
    assert canonical_classes(
        LatticePolygon([(0, 0), (3, 0), (1, 1), (0, 1)])) in canon
    # only triangles and quadrilaterals occur
    assert {len(p.vertices) for p in reps} == {3, 4}


def test_enumerate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        enumerate_polygons(3, 6)
    with pytest.raises(ValueError):
        enumerate_polygons(1, 3)
