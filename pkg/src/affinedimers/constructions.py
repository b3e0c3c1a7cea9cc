"""Constructions that turn admissible arrangements into new ones.

Five operations: duplicate a line into an antiparallel pair, double a whole
class multiset, lift along a finite-index sublattice, apply an integer
matrix, and build triangle dimers from two spanning vectors.  Everything is
exact rational arithmetic; the only randomness is the seeded offset draw in
``double_everything``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .arrangement import (
    FACE_X,
    Arrangement,
    TorusLine,
    build_subdivision,
    check_admissible,
    check_general_position,
)
from .lattice import Mat2, Vec, det2, is_primitive, vec_neg

# Denominator for random offsets: a prime close to 2**31, so coincidences
# between independently drawn offsets are essentially impossible.
OFFSET_DENOMINATOR = 2147483647

_MAX_PLACEMENTS = 32
_MAX_SHRINKS = 12

# The fixed three-line arrangement every triangle dimer is lifted from.
BASE_TRIANGLE_CLASSES: tuple[Vec, ...] = ((1, 0), (0, 1), (-1, -1))
BASE_TRIANGLE_OFFSETS: tuple[Fraction, ...] = (
    Fraction(0),
    Fraction(0),
    Fraction(1, 2),
)


@dataclass(frozen=True)
class SublatticeSpec:
    """A finite-index sublattice of Z^2, spanned by the basis columns."""

    basis: Mat2
    det: int = field(init=False)

    def __post_init__(self) -> None:
        d = self.basis.det()
        if d == 0:
            raise ValueError("sublattice basis is singular")
        object.__setattr__(self, "det", d)

    @property
    def covolume(self) -> int:
        return abs(self.det)


# ---------------------------------------------------------------------------
# feature gaps along a line's normal coordinate


def _feature_gap(arr: Arrangement, sub, index: int) -> Fraction:
    """Distance from line ``index`` to its nearest feature, measured in the
    line's normal coordinate mod 1.

    A feature is either a (anti)parallel line's level or the level of any
    vertex of the subdivision.  Vertices on the line itself sit at the
    line's own level and are ignored, so the returned gap spans an open
    band with no arrangement structure inside.
    """
    line = arr.lines[index]
    alpha = line.alpha
    levels = set()
    for j, other in enumerate(arr.lines):
        if j == index or det2(line.h, other.h) != 0:
            continue
        levels.add(other.c if other.h == line.h else (-other.c) % 1)
    for p in sub.points:
        levels.add((p[0] * alpha[0] + p[1] * alpha[1]) % 1)
    gaps = [(lv - line.c) % 1 for lv in levels]
    positive = [g for g in gaps if g > 0]
    return min(positive) if positive else Fraction(1)


# ---------------------------------------------------------------------------
# duplicating a line into an antiparallel pair


def add_parallel_pair(arr: Arrangement, line_index: int) -> Arrangement:
    """Add an antiparallel copy of one line, growing the polygon by the
    class pair {h, -h}.

    The duplicated line keeps its class h; two new lines are placed inside
    the empty band next to it, the far one (at half the feature gap) with
    class h and the near one (at a quarter of the gap) with class -h.  The
    new lines are inserted immediately before the duplicated line in the
    line tuple.  The input must be admissible and match its prescribed
    classes; the output is verified before it is returned.
    """
    if not 0 <= line_index < len(arr.lines):
        raise ValueError(
            f"line index {line_index} out of range for {len(arr.lines)} lines"
        )
    report = check_admissible(arr)
    if not (report.admissible and report.matches_prescribed):
        raise ValueError("input arrangement is not an affine dimer")
    line = arr.lines[line_index]
    g = _feature_gap(arr, report.subdivision, line_index)
    far = TorusLine(line.h, (line.c + g / 2) % 1)
    near = TorusLine(vec_neg(line.h), (-(line.c + g / 4)) % 1)
    out = Arrangement(
        arr.lines[:line_index] + (far, near) + arr.lines[line_index:]
    )
    result = check_admissible(out)
    if not (result.admissible and result.matches_prescribed):
        raise RuntimeError(
            "adding a parallel pair produced a non-matching arrangement; "
            "this is a bug in the placement rule"
        )
    return out


# ---------------------------------------------------------------------------
# doubling a class multiset


def _random_offset(rng: random.Random) -> Fraction:
    return Fraction(rng.randrange(OFFSET_DENOMINATOR), OFFSET_DENOMINATOR)


def double_everything(classes, seed: int = 0) -> Arrangement:
    """Build a dimer for the polygon with side classes S and -S.

    One line per class is placed at a seeded random offset, then each line
    receives an oppositely oriented companion inside its feature gap, close
    enough that no third line passes between the two.  Which member of a
    pair ends up with which orientation is read back from the checker, so
    the returned arrangement always matches its prescribed classes.  The
    result has exactly half its faces inconsistent, all of them 4-gons.

    Degenerate placements are retried with fresh offsets and, within one
    placement, with smaller companion distances.  Same seed, same output.
    """
    cls = tuple((int(h[0]), int(h[1])) for h in classes)
    if not cls:
        raise ValueError("the class multiset is empty")
    for h in cls:
        if not is_primitive(h):
            raise ValueError(f"class {h} is not primitive")
    if all(det2(cls[0], h) == 0 for h in cls[1:]):
        raise ValueError(
            "all classes are parallel; the doubled polygon would be degenerate"
        )
    want = sorted(cls + tuple(vec_neg(h) for h in cls))
    rng = random.Random(seed)
    for _ in range(_MAX_PLACEMENTS):
        base = tuple(TorusLine(h, _random_offset(rng)) for h in cls)
        base_arr = Arrangement(base)
        if not check_general_position(base_arr).ok:
            continue
        sub = build_subdivision(base_arr)
        gaps = [_feature_gap(base_arr, sub, i) for i in range(len(cls))]
        for shrink in range(_MAX_SHRINKS):
            scale = 4 << shrink
            lines: list[TorusLine] = []
            for ln, gap in zip(base, gaps):
                level = (ln.c + gap / scale) % 1
                lines.append(ln)
                lines.append(TorusLine(vec_neg(ln.h), (-level) % 1))
            cand = Arrangement(tuple(lines))
            try:
                rep = check_admissible(cand)
            except ValueError:
                continue
            if rep.counts is None:
                continue
            if 2 * rep.counts.f_x != rep.counts.f:
                continue
            if any(
                len(rep.subdivision.faces[i]) != 4
                for i, lab in enumerate(rep.face_labels)
                if lab == FACE_X
            ):
                continue
            # Re-prescribe each line with its induced orientation.
            out = Arrangement(
                tuple(
                    ln
                    if ln.h == ind
                    else TorusLine(ind, (-ln.c) % 1)
                    for ln, ind in zip(cand.lines, rep.induced_classes)
                )
            )
            if sorted(out.classes()) != want:
                continue
            final = check_admissible(out)
            if final.admissible and final.matches_prescribed:
                return out
    raise RuntimeError(
        f"no non-degenerate doubled placement found after "
        f"{_MAX_PLACEMENTS} offset draws (seed {seed})"
    )


# ---------------------------------------------------------------------------
# lifting along a sublattice


def lift_sublattice(arr: Arrangement, spec: SublatticeSpec) -> Arrangement:
    """Reinterpret the arrangement on the torus of a finite-index sublattice.

    In the coordinates of the sublattice basis, a line with normal covector
    a and offset c becomes the level set of the covector basis^T a, which
    splits into gcd(basis^T a) parallel lines with equally spaced offsets.
    Orientations are carried along: the lifted class is the primitive
    direction of basis^(-1) h, which is adjugate(basis) h / gcd for a
    positively oriented basis and its negative otherwise.  The homology
    polygon of the result is the adjugate image of the input polygon, and
    the result covers the input with degree |det(basis)|.

    The input is expected to be admissible; this is not re-checked here.
    """
    basis = spec.basis
    sign = 1 if spec.det > 0 else -1
    lifted: list[TorusLine] = []
    for line in arr.lines:
        beta = basis.apply_transpose(line.alpha)
        g = gcd(beta[0], beta[1])
        h_new = (-sign * (beta[1] // g), sign * (beta[0] // g))
        for j in range(g):
            lifted.append(TorusLine(h_new, (sign * (line.c + j) / g) % 1))
    return Arrangement(tuple(lifted))


def apply_linear_to_dimer(arr: Arrangement, mat: Mat2) -> Arrangement:
    """Transform a dimer so its polygon becomes the matrix image mat(P).

    This is the sublattice lift along adjugate(mat): taking the adjugate
    twice returns mat itself, so the polygon transforms by mat while the
    lift machinery does the geometric work.
    """
    if mat.det() == 0:
        raise ValueError("matrix is singular")
    return lift_sublattice(arr, SublatticeSpec(mat.adjugate()))


# ---------------------------------------------------------------------------
# triangle dimers


def triangle_dimer(u, w) -> Arrangement:
    """Dimer for the triangle spanned by u and w (not necessarily primitive).

    Starts from the fixed three-line arrangement for the unit triangle and
    pushes it through the matrix with columns u and w.  The base offsets
    are a project constant; they are re-verified on every call and a
    failure raises RuntimeError rather than returning a bad arrangement.
    """
    u = (int(u[0]), int(u[1]))
    w = (int(w[0]), int(w[1]))
    if det2(u, w) == 0:
        raise ValueError(f"{u} and {w} are collinear; they span no triangle")
    base = Arrangement(
        tuple(
            TorusLine(h, c)
            for h, c in zip(BASE_TRIANGLE_CLASSES, BASE_TRIANGLE_OFFSETS)
        )
    )
    rep = check_admissible(base)
    if not (rep.admissible and rep.matches_prescribed):
        raise RuntimeError("the base triangle arrangement failed verification")
    return apply_linear_to_dimer(base, Mat2.from_columns(u, w))
