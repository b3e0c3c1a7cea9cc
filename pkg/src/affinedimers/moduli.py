"""Moduli of line offsets for a fixed multiset of homology classes.

With the directions pinned, an arrangement is determined by its n offsets,
which live on an n-dimensional torus.  A point of that torus is degenerate
when two parallel lines coincide or three lines pass through a common
point.  Both events are finitely many rational congruence conditions, so
membership is exactly decidable; the non-degenerate admissible points form
a region whose volume this module estimates by Monte Carlo, and searches
by grid sweep or random sampling.

Translating every line by a fixed vector moves all offsets but changes no
incidence, so two torus dimensions are redundant.  Searches and (by
default) volume estimation therefore pin the first line, and the first
line transverse to it, at offset zero.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .arrangement import Arrangement, TorusLine, check_admissible
from .constructions import (
    OFFSET_DENOMINATOR,
    add_parallel_pair,
    double_everything,
    triangle_dimer,
)
from .lattice import (
    LatticePolygon,
    Vec,
    classes_from_polygon,
    det2,
    enumerate_polygons,
    polygon_from_classes,
    validate_classes,
    vec_neg,
    vec_sub,
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_REJECTION_BOUND = (1 << 64) - ((1 << 64) % OFFSET_DENOMINATOR)
_MAX_REDRAWS = 4096
_MESH_SHIFT_BASE = 3
_MAX_MESH_SHIFTS = 64


# ---------------------------------------------------------------------------
# points and the degeneracy locus


@dataclass(frozen=True)
class ModuliPoint:
    """An offset vector, one rational in [0, 1) per line."""

    offsets: tuple[Fraction, ...]

    def __post_init__(self):
        reduced = tuple(Fraction(c) % 1 for c in self.offsets)
        object.__setattr__(self, "offsets", reduced)

    def __len__(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class ParallelConstraint:
    """Lines i and j coincide when c_i - sign * c_j is an integer."""

    i: int
    j: int
    sign: int  # +1 same direction, -1 opposite


@dataclass(frozen=True)
class TripleConstraint:
    """Lines i, j, k share a point iff <(c_i,c_j,c_k), normal> in modulus*Z.

    The normal is (det(h_j,h_k), -det(h_i,h_k), det(h_i,h_j)), the integer
    vector annihilating the three covectors from the left; the modulus is
    gcd(normal).  Sign-normalized so the first nonzero component is
    positive, which makes the stored data invariant under unimodular maps
    of the classes.
    """

    i: int
    j: int
    k: int
    normal: tuple[int, int, int]
    modulus: int


@dataclass(frozen=True)
class DegeneracyLocus:
    """All coincidence hypersurfaces for a fixed class multiset.

    Triple constraints are stored for every 3-subset spanning two
    directions.  When such a triple contains a parallel pair its normal
    acquires a zero in the transverse slot and the congruence collapses to
    that pair's coincidence condition, so keeping them is redundant but
    harmless, and it keeps one uniform formula.
    """

    size: int
    parallel_constraints: tuple[ParallelConstraint, ...]
    triple_constraints: tuple[TripleConstraint, ...]


def build_degeneracy_locus(classes) -> DegeneracyLocus:
    cl = validate_classes(classes)
    n = len(cl)

    pairs = []
    for i, j in combinations(range(n), 2):
        if det2(cl[i], cl[j]) == 0:
            sign = 1 if cl[i] == cl[j] else -1
            pairs.append(ParallelConstraint(i, j, sign))

    triples = []
    for i, j, k in combinations(range(n), 3):
        dij = det2(cl[i], cl[j])
        dik = det2(cl[i], cl[k])
        if dij == 0 and dik == 0:
            continue  # all three parallel; pair constraints cover this
        djk = det2(cl[j], cl[k])
        normal = (djk, -dik, dij)
        lead = next(v for v in normal if v)
        if lead < 0:
            normal = (-normal[0], -normal[1], -normal[2])
        modulus = math.gcd(*normal)
        triples.append(TripleConstraint(i, j, k, normal, modulus))

    return DegeneracyLocus(n, tuple(pairs), tuple(triples))


def is_degenerate(point: ModuliPoint, locus: DegeneracyLocus) -> bool:
    """Exact membership test against every stored constraint."""
    c = point.offsets
    if len(c) != locus.size:
        raise ValueError(
            f"point has {len(c)} offsets, locus expects {locus.size}"
        )
    for pc in locus.parallel_constraints:
        if (c[pc.i] - pc.sign * c[pc.j]) % 1 == 0:
            return True
    for tc in locus.triple_constraints:
        value = (
            tc.normal[0] * c[tc.i]
            + tc.normal[1] * c[tc.j]
            + tc.normal[2] * c[tc.k]
        )
        if value % tc.modulus == 0:
            return True
    return False


def realize(classes, point: ModuliPoint) -> Arrangement:
    """Place one line per class at the point's offsets."""
    cl = tuple((int(x), int(y)) for x, y in classes)
    if len(cl) != len(point.offsets):
        raise ValueError(
            f"{len(cl)} classes but {len(point.offsets)} offsets"
        )
    return Arrangement(
        tuple(TorusLine(h, c) for h, c in zip(cl, point.offsets))
    )


def _pinned_indices(cl) -> tuple[int, int]:
    """Index 0 plus the first line transverse to it; fixing those two
    offsets at zero cuts the two translation directions."""
    j0 = next(j for j in range(1, len(cl)) if det2(cl[0], cl[j]) != 0)
    return (0, j0)


# ---------------------------------------------------------------------------
# deterministic splittable sampling

# Trials are independent streams keyed by (seed, trial index): results do
# not depend on how a trial range is partitioned across workers, and hit
# counts merge by addition.


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class _TrialStream:
    """splitmix64 sequence whose starting state hashes (seed, trial)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int, trial: int):
        base = _mix64(seed & _MASK64)
        self._state = _mix64(base ^ ((_GOLDEN * (trial + 1)) & _MASK64))

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def next_offset(self) -> Fraction:
        # rejection sampling keeps the numerator exactly uniform
        while True:
            v = self.next_uint64()
            if v < _REJECTION_BOUND:
                return Fraction(v % OFFSET_DENOMINATOR, OFFSET_DENOMINATOR)


def _sample_offsets(n: int, pinned, stream: _TrialStream):
    return tuple(
        Fraction(0) if i in pinned else stream.next_offset()
        for i in range(n)
    )


def _stable_seed(seed: int, *salts: int) -> int:
    s = _mix64(seed & _MASK64)
    for x in salts:
        s = _mix64(s ^ (x & _MASK64))
    return s


# ---------------------------------------------------------------------------
# searches


@dataclass(frozen=True)
class SearchOutcome:
    """Result of a grid or randomized hunt for an admissible point.

    An exhausted outcome is never evidence of nonexistence: no computable
    grid density is known that would separate every admissible region, so
    failing to find a dimer only says this particular sweep missed.
    """

    status: str  # "found" | "trials_exhausted" | "exhausted_at_resolution"
    certificate: Arrangement | None
    resolution: int | None
    trials: int
    degenerate_skips: int
    wall_time: float
    note: str = ""

    @property
    def inconclusive(self) -> bool:
        return self.status != "found"


def _search_target(polygon):
    if not isinstance(polygon, LatticePolygon):
        raise TypeError(f"expected a LatticePolygon, got {type(polygon).__name__}")
    cl = classes_from_polygon(polygon)
    return cl, build_degeneracy_locus(cl), _pinned_indices(cl)


def random_search(polygon: LatticePolygon, trials: int, seed: int) -> SearchOutcome:
    """Sample pinned offset vectors until one realizes an affine dimer.

    Offsets are uniform numerators over a fixed prime denominator, so
    degeneracies are possible but vanishingly rare, and exactly detected
    when they do occur (the sample is skipped, not silently evaluated).
    Fully deterministic for a given seed.
    """
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    cl, locus, pinned = _search_target(polygon)
    start = time.perf_counter()
    skips = 0
    for t in range(trials):
        stream = _TrialStream(seed, t)
        point = ModuliPoint(_sample_offsets(len(cl), pinned, stream))
        if is_degenerate(point, locus):
            skips += 1
            continue
        arr = realize(cl, point)
        report = check_admissible(arr)
        if report.admissible and report.matches_prescribed:
            return SearchOutcome(
                status="found",
                certificate=arr,
                resolution=None,
                trials=t + 1,
                degenerate_skips=skips,
                wall_time=time.perf_counter() - start,
                note=f"admissible point on trial {t}",
            )
    return SearchOutcome(
        status="trials_exhausted",
        certificate=None,
        resolution=None,
        trials=trials,
        degenerate_skips=skips,
        wall_time=time.perf_counter() - start,
        note=(
            f"inconclusive: {trials} random samples found no dimer; "
            "this does not certify that none exists"
        ),
    )


def _nudge_off_locus(offsets, free, m, locus) -> ModuliPoint:
    """Deterministic exact perturbation of a degenerate grid point.

    Each free coordinate gets its own shift 1 / (2m * 3^(s*(pos+1))).  A
    shared shift would cancel out of every same-direction pair condition,
    and any single geometric weight vector can be annihilated by some
    integer normal, hence per-coordinate shifts with an escalating
    exponent; each constraint excludes finitely many exponents, so the
    loop terminates.
    """
    for s in range(1, _MAX_MESH_SHIFTS + 1):
        candidate = list(offsets)
        for pos, i in enumerate(free):
            step = Fraction(1, 2 * m * _MESH_SHIFT_BASE ** (s * (pos + 1)))
            candidate[i] = (candidate[i] + step) % 1
        point = ModuliPoint(tuple(candidate))
        if not is_degenerate(point, locus):
            return point
    raise RuntimeError(
        "could not perturb a grid point off the degeneracy locus"
    )  # pragma: no cover - escalation always terminates in practice


def mesh_search(polygon: LatticePolygon, m: int) -> SearchOutcome:
    """Sweep the resolution-m grid on the pinned subtorus.

    Grid points that land on the degeneracy locus are nudged off it
    exactly (see _nudge_off_locus) rather than dropped, so every grid cell
    contributes one evaluated arrangement.  The sweep has m^(n-2) points;
    resolution is the caller's budget to spend.
    """
    if m < 1:
        raise ValueError(f"resolution must be >= 1, got {m}")
    cl, locus, pinned = _search_target(polygon)
    n = len(cl)
    free = [i for i in range(n) if i not in pinned]
    start = time.perf_counter()
    checked = 0
    nudged = 0
    for combo in product(range(m), repeat=len(free)):
        offsets = [Fraction(0)] * n
        for pos, i in enumerate(free):
            offsets[i] = Fraction(combo[pos], m)
        point = ModuliPoint(tuple(offsets))
        if is_degenerate(point, locus):
            nudged += 1
            point = _nudge_off_locus(offsets, free, m, locus)
        checked += 1
        arr = realize(cl, point)
        report = check_admissible(arr)
        if report.admissible and report.matches_prescribed:
            return SearchOutcome(
                status="found",
                certificate=arr,
                resolution=m,
                trials=checked,
                degenerate_skips=nudged,
                wall_time=time.perf_counter() - start,
                note=f"admissible grid point after {checked} evaluations",
            )
    return SearchOutcome(
        status="exhausted_at_resolution",
        certificate=None,
        resolution=m,
        trials=checked,
        degenerate_skips=nudged,
        wall_time=time.perf_counter() - start,
        note=(
            f"inconclusive: no dimer on the resolution-{m} grid; the grid "
            "density sufficient for this polygon is unknown, so "
            "nonexistence is not established"
        ),
    )


# ---------------------------------------------------------------------------
# admissible volume


@dataclass(frozen=True)
class VolumeEstimate:
    estimate: Fraction
    trials: int
    hits: int
    std_error: float
    seed: int


def estimate_admissible_volume(
    polygon: LatticePolygon,
    trials: int,
    seed: int,
    reduce: bool = True,
    trial_offset: int = 0,
) -> VolumeEstimate:
    """Monte Carlo fraction of non-degenerate points realizing a dimer.

    Degenerate draws are redrawn within their own trial stream, so the
    estimate is over the non-degenerate part of the torus.  With reduce
    set, sampling happens on the pinned subtorus; translation invariance
    makes both estimates converge to the same value.  trial_offset selects
    which slice of the trial index range this call evaluates, so a caller
    may split the range across workers and add up the hits.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if trial_offset < 0:
        raise ValueError(f"trial_offset must be >= 0, got {trial_offset}")
    cl, locus, pinned = _search_target(polygon)
    if not reduce:
        pinned = ()
    n = len(cl)
    hits = 0
    for t in range(trial_offset, trial_offset + trials):
        stream = _TrialStream(seed, t)
        for _ in range(_MAX_REDRAWS):
            point = ModuliPoint(_sample_offsets(n, pinned, stream))
            if not is_degenerate(point, locus):
                break
        else:  # pragma: no cover - would need 4096 straight collisions
            raise RuntimeError("could not draw a non-degenerate sample")
        report = check_admissible(realize(cl, point))
        if report.admissible and report.matches_prescribed:
            hits += 1
    estimate = Fraction(hits, trials)
    std_error = math.sqrt(float(estimate) * (1.0 - float(estimate)) / trials)
    return VolumeEstimate(
        estimate=estimate,
        trials=trials,
        hits=hits,
        std_error=std_error,
        seed=seed,
    )


def parallelogram_volume_exact(a: int, b: int) -> Fraction:
    """Admissible volume of the a-by-b lattice parallelogram."""
    if a < 1 or b < 1:
        raise ValueError(f"side multiplicities must be >= 1, got ({a}, {b})")
    return Fraction(4, math.comb(2 * a, a) * math.comb(2 * b, b))


def triangle_volume_exact(a: int) -> Fraction:
    """Admissible volume of the triangle with legs a and 1."""
    if a < 1:
        raise ValueError(f"side multiplicity must be >= 1, got {a}")
    return Fraction(math.factorial(a), a**a)


# ---------------------------------------------------------------------------
# genus classification


@dataclass(frozen=True)
class ClassificationRecord:
    polygon: LatticePolygon
    classes: tuple[Vec, ...]
    method: str
    certificate: Arrangement | None
    certified: bool
    volume: VolumeEstimate


@dataclass(frozen=True)
class ClassificationReport:
    genus: int
    records: tuple[ClassificationRecord, ...]

    @property
    def all_certified(self) -> bool:
        return all(rec.certified for rec in self.records)

    def method_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for rec in self.records:
            counts[rec.method] = counts.get(rec.method, 0) + 1
        return counts


def _seed_for_classes(seed: int, key) -> int:
    salts = [(a * 0x100000001 + b) for a, b in key]
    return _stable_seed(seed, *salts)


def _try_constructions(cl, seed, memo):
    """Build a dimer for the multiset by structure alone, if possible.

    Three routes, tried in order: a three-cornered polygon is a linear
    image of the standard triangle; a multiset symmetric under negation
    doubles each representative with an antiparallel companion; and a
    class available in triplicate across the two directions peels off one
    parallel pair, solves the rest recursively, then adds the pair back.
    Returns (arrangement, method) or (None, None); results are memoized by
    sorted multiset, including failures.
    """
    key = tuple(sorted(cl))
    if key in memo:
        return memo[key]
    result = (None, None)

    poly = polygon_from_classes(cl)
    if len(poly.vertices) == 3:
        v0, v1, v2 = poly.vertices
        try:
            result = (
                triangle_dimer(vec_sub(v1, v0), vec_sub(v2, v1)),
                "triangle",
            )
        except (ValueError, RuntimeError):
            result = (None, None)

    counter = Counter(cl)
    if result[0] is None and all(
        counter[h] == counter[vec_neg(h)] for h in counter
    ):
        half = []
        for h in sorted(counter):
            if h > vec_neg(h):
                half.extend([h] * counter[h])
        try:
            result = (
                double_everything(tuple(half), seed=_seed_for_classes(seed, key)),
                "antiparallel_doubling",
            )
        except (ValueError, RuntimeError):
            result = (None, None)

    if result[0] is None:
        for h in sorted(counter):
            nh = vec_neg(h)
            if h < nh or counter[h] < 1 or counter[nh] < 1:
                continue
            if counter[h] + counter[nh] < 3:
                continue
            rest = list(cl)
            rest.remove(h)
            rest.remove(nh)
            try:
                validate_classes(rest)
            except ValueError:
                continue
            inner, _ = _try_constructions(tuple(rest), seed, memo)
            if inner is None:
                continue
            inner_classes = inner.classes()
            anchor = (
                inner_classes.index(h)
                if h in inner_classes
                else inner_classes.index(nh)
            )
            try:
                result = (add_parallel_pair(inner, anchor), "parallel_pair")
                break
            except (ValueError, RuntimeError):
                continue

    memo[key] = result
    return result


def classify_genus(
    genus: int,
    trials_per_class: int,
    seed: int,
    volume_trials: int = 256,
) -> ClassificationReport:
    """Hunt a dimer for every polygon class of the given interior count.

    Structure-based constructions run first; classes they miss fall back
    to random_search with trials_per_class samples.  Every certificate is
    re-verified from scratch before being recorded, and each class gets an
    independent admissible-volume estimate with volume_trials samples.
    """
    if genus not in (0, 1, 2):
        raise ValueError(f"unsupported genus {genus}; expected 0, 1 or 2")
    if trials_per_class < 0:
        raise ValueError(f"trials_per_class must be >= 0, got {trials_per_class}")
    if volume_trials < 1:
        raise ValueError(f"volume_trials must be >= 1, got {volume_trials}")

    memo: dict = {}
    records = []
    for index, poly in enumerate(enumerate_polygons(genus, 6)):
        cl = classes_from_polygon(poly)
        arr, method = _try_constructions(cl, _stable_seed(seed, index), memo)
        if arr is None:
            outcome = random_search(
                poly, trials_per_class, _stable_seed(seed, index, 0x5EA2C4)
            )
            if outcome.status == "found":
                arr, method = outcome.certificate, "random_search"

        certified = False
        if arr is not None:
            fresh = check_admissible(arr)
            certified = (
                fresh.admissible
                and fresh.matches_prescribed
                and sorted(arr.classes()) == sorted(cl)
            )

        volume = estimate_admissible_volume(
            poly,
            trials=volume_trials,
            seed=_stable_seed(seed, index, 0xB0DE4),
            reduce=True,
        )
        records.append(
            ClassificationRecord(
                polygon=poly,
                classes=cl,
                method=method if certified else (method or "unresolved"),
                certificate=arr if certified else None,
                certified=certified,
                volume=volume,
            )
        )
    return ClassificationReport(genus=genus, records=tuple(records))
