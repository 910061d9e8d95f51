"""Experiment drivers: the special cluster collection, Tverberg censuses,
degree-zero search, motion scans, colored Tverberg, and planar sign cases."""
from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .degree import (
    DegreeReport,
    ExhaustedRetries,
    combinatorial_sign,
    compute_degree,
    default_threads,
    geometric_sign,
)
from .exact import QVector, det_sign, qvec
from .geometry import CollectionGeometry
from .genpos import check_sufficient
from .model import (
    BmzCollection,
    RookPlacement,
    class_representative,
    classes_of,
    count_partitions,
    enumerate_partitions,
    interpolate,
    validate_collection,
)
from .transform import RPartition, WBasis, has_tverberg_point, in_convex_hull, make_w_basis

log = logging.getLogger(__name__)


class ResidueMismatch(AssertionError):
    """Two generic samples of a motion have degrees in different residue
    classes; this would contradict the mod r! invariance."""

    def __init__(self, message: str, trace: "MotionTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class WrongShape(ValueError):
    pass


class NotFound(RuntimeError):
    pass


# -- constructions ----------------------------------------------------------

def simplex_vertices(d: int) -> list[QVector]:
    """``e_1, ..., e_d, 0``."""
    verts = [tuple(Fraction(int(i == k)) for i in range(d)) for k in range(d)]
    verts.append(tuple(Fraction(0) for _ in range(d)))
    return verts


def special_collection(
    d: int,
    r: int,
    radius: Fraction = Fraction(1, 100),
    seed: int = 0,
    max_attempts: int = 40,
) -> BmzCollection:
    """Clusters of ``r-1`` points around the vertices of the standard simplex
    with ``z`` at its barycenter, in sufficiently general position.

    Offsets are drawn from a generator seeded by ``(d, r, seed)``; failed
    draws are redrawn, and the radius is halved every 10 failures.
    """
    radius = Fraction(radius)
    rng = random.Random(f"special:{d}:{r}:{seed}")
    verts = simplex_vertices(d)
    z = tuple(Fraction(1, d + 1) for _ in range(d))
    grid = 1000
    for attempt in range(max_attempts):
        if attempt and attempt % 10 == 0:
            radius /= 2
        pts = []
        for v in verts:
            for _ in range(r - 1):
                pts.append(tuple(x + radius * Fraction(rng.randint(-grid, grid), grid) for x in v))
        pts.append(z)
        c = BmzCollection(d, r, tuple(pts), label=f"special d={d} r={r}")
        if validate_collection(c):
            continue
        if check_sufficient(c, exhaustive=False).sufficiently_general:
            return c
    raise ExhaustedRetries(f"no valid cluster configuration for d={d}, r={r}")


def random_collection(
    d: int,
    r: int,
    rng: random.Random,
    coord_bound: int = 1,
    denom_bound: int = 10**6,
    max_retries: int = 100,
) -> BmzCollection:
    """Uniform rational points in ``[0, coord_bound]^d`` with denominator
    ``denom_bound``, redrawn until in sufficiently general position."""
    n = (d + 1) * (r - 1)
    hi = coord_bound * denom_bound
    for _ in range(max_retries):
        pts = tuple(
            tuple(Fraction(rng.randint(0, hi), denom_bound) for _ in range(d)) for _ in range(n + 1)
        )
        c = BmzCollection(d, r, pts)
        if validate_collection(c):
            continue
        if check_sufficient(c, exhaustive=False).sufficiently_general:
            return c
    raise ExhaustedRetries("no random collection in general position")


# -- Tverberg census ----------------------------------------------------------

@dataclass
class Census:
    d: int
    r: int
    tverberg: list[tuple[RookPlacement, QVector]] = field(default_factory=list)

    @property
    def placements(self) -> list[RookPlacement]:
        return [p for p, _ in self.tverberg]

    @property
    def class_count(self) -> int:
        """Equivalence classes containing at least one Tverberg placement."""
        return len({class_representative(p) for p in self.placements})

    @property
    def full_class_count(self) -> int:
        """Equivalence classes all of whose ``r!`` members are Tverberg."""
        counts: dict[RookPlacement, int] = {}
        for p in self.placements:
            rep = class_representative(p)
            counts[rep] = counts.get(rep, 0) + 1
        return sum(1 for v in counts.values() if v == factorial(self.r))


def _boxes_overlap(classes: Sequence[Sequence[QVector]], d: int) -> bool:
    for k in range(d):
        lo = max(min(p[k] for p in cl) for cl in classes)
        hi = min(max(p[k] for p in cl) for cl in classes)
        if lo > hi:
            return False
    return True


def partition_points(p: RookPlacement, c: BmzCollection) -> list[list[QVector]]:
    return [[c.points[j] for j in sorted(cl)] for cl in classes_of(p, c)]


def tverberg_test(p: RookPlacement, c: BmzCollection, memo: dict | None = None) -> QVector | None:
    """Tverberg point of the placement's classes, or None.

    Empty classes and disjoint bounding boxes are rejected before the LP.
    """
    key = frozenset(classes_of(p, c))
    if memo is not None and key in memo:
        return memo[key]
    classes = partition_points(p, c)
    witness = None
    if all(classes) and _boxes_overlap(classes, c.d):
        ok, witness = has_tverberg_point(RPartition.from_classes(classes))
    if memo is not None:
        memo[key] = witness
    return witness


def _census_chunk(args) -> list[tuple[RookPlacement, QVector]]:
    c, start, stop, first_only = args
    memo: dict = {}
    found = []
    for p in enumerate_partitions(c.d, c.r, start, stop):
        x = tverberg_test(p, c, memo)
        if x is not None:
            found.append((p, x))
            if first_only:
                break
    return found


def tverberg_census(c: BmzCollection, first_only: bool = False, threads: int | None = None) -> Census:
    """All placements whose classes have a common point, with witnesses,
    in enumeration order."""
    threads = threads or default_threads()
    total = count_partitions(c.d, c.r)
    if threads <= 1 or first_only:
        found = _census_chunk((c, 0, total, first_only))
    else:
        step = -(-total // threads)
        jobs = [(c, s, min(s + step, total), False) for s in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            found = [h for part in pool.map(_census_chunk, jobs) for h in part]
    return Census(c.d, c.r, found)


# -- degree-zero search -------------------------------------------------------

@dataclass
class Find:
    trial: int
    collection: BmzCollection
    report: DegreeReport
    census: Census


@dataclass
class SearchLog:
    d: int
    r: int
    seed: int
    trials: int = 0
    found: list[Find] = field(default_factory=list)
    degrees: dict[int, int] = field(default_factory=dict)
    alarms: list[int] = field(default_factory=list)


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"search:{seed}:{trial}")


def _run_trial(args) -> tuple[int, BmzCollection, DegreeReport]:
    d, r, seed, trial = args
    c = random_collection(d, r, trial_rng(seed, trial))
    c = BmzCollection(c.d, c.r, c.points, label=f"search seed={seed} trial={trial}")
    return trial, c, compute_degree(c, threads=1)


def search_degree_zero(
    d: int,
    r: int,
    budget: int,
    seed: int = 0,
    stop_after: int | None = None,
    workers: int = 1,
    on_find: Callable[[Find], None] | None = None,
) -> SearchLog:
    """Sample random collections and keep the ones of degree 0.

    Trial ``i`` uses its own generator derived from ``(seed, i)``, so the
    outcome of every trial is independent of ``workers``.  A find whose
    census is empty is logged as an alarm.
    """
    log_ = SearchLog(d, r, seed)
    batch = max(1, workers) * 4
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for start in range(0, budget, batch):
            jobs = [(d, r, seed, t) for t in range(start, min(start + batch, budget))]
            results = pool.map(_run_trial, jobs) if pool else map(_run_trial, jobs)
            for trial, c, rep in results:
                log_.trials += 1
                log_.degrees[rep.degree] = log_.degrees.get(rep.degree, 0) + 1
                if rep.degree != 0:
                    continue
                census = tverberg_census(c)
                find = Find(trial, c, rep, census)
                if not census.tverberg:
                    log_.alarms.append(trial)
                    log.warning("degree-0 collection without Tverberg partition (trial %d)", trial)
                log_.found.append(find)
                if on_find:
                    on_find(find)
                if stop_after is not None and len(log_.found) >= stop_after:
                    return log_
    finally:
        if pool:
            pool.shutdown()
    return log_


# -- motion scan ----------------------------------------------------------------

@dataclass(frozen=True)
class MotionSample:
    t: Fraction
    sufficiently_general: bool
    degree: int | None
    note: str = ""


@dataclass
class MotionTrace:
    r: int
    samples: list[MotionSample] = field(default_factory=list)

    @property
    def residues(self) -> set[int]:
        m = factorial(self.r)
        return {s.degree % m for s in self.samples if s.degree is not None}

    @property
    def degrees(self) -> list[int]:
        return [s.degree for s in self.samples if s.degree is not None]


def motion_scan(c0: BmzCollection, c1: BmzCollection, steps: int, w: WBasis | None = None) -> MotionTrace:
    """Degrees along the straight-line motion from ``c0`` to ``c1`` sampled
    at ``t = k/steps``; raises :class:`ResidueMismatch` if two generic
    samples disagree mod ``r!``."""
    if (c0.d, c0.r) != (c1.d, c1.r):
        raise ValueError("collections must share (d, r)")
    if steps < 1:
        raise ValueError("steps must be positive")
    w = w or make_w_basis(c0.r)
    trace = MotionTrace(c0.r)
    for k in range(steps + 1):
        t = Fraction(k, steps)
        c = interpolate(c0, c1, t)
        problems = validate_collection(c)
        if problems:
            trace.samples.append(MotionSample(t, False, None, problems[0]))
            continue
        rep = check_sufficient(c, w, exhaustive=False)
        if not rep.sufficiently_general:
            trace.samples.append(MotionSample(t, False, None, rep.violations[0].describe()))
            continue
        try:
            deg = compute_degree(c, w=w, threads=1)
        except ExhaustedRetries as exc:
            trace.samples.append(MotionSample(t, True, None, str(exc)))
            continue
        trace.samples.append(MotionSample(t, True, deg.degree, deg.ray_source))
    if len(trace.residues) > 1:
        raise ResidueMismatch(f"degrees {trace.degrees} are not congruent mod {factorial(c0.r)}", trace)
    return trace


# -- colored Tverberg -----------------------------------------------------------

@dataclass
class ColoredTverberg:
    """``parts[i]`` lists ``(color, index)`` pairs; ``point`` is common to all hulls."""

    parts: list[list[tuple[int, int]]]
    point: QVector
    collection: BmzCollection
    placement: RookPlacement


def solve_colored_tverberg(classes: Sequence[Sequence], z=None) -> ColoredTverberg:
    """A rainbow partition into ``len(classes[0])`` parts with intersecting
    hulls, found by adding an apex point (default: the centroid) and
    discarding the part that contains it."""
    classes = [[qvec(p) for p in cl] for cl in classes]
    sizes = {len(cl) for cl in classes}
    if len(sizes) != 1:
        raise ValueError("all color classes must have the same size")
    d = len(classes) - 1
    if any(len(p) != d for cl in classes for p in cl):
        raise ValueError(f"{d + 1} color classes require points in R^{d}")
    r0 = sizes.pop()
    flat = [p for cl in classes for p in cl]
    if z is None:
        z = tuple(sum(p[k] for p in flat) / len(flat) for k in range(d))
    z = qvec(z)
    c = BmzCollection.from_classes(classes, z)
    problems = validate_collection(c)
    if problems:
        raise ValueError("; ".join(problems))
    census = tverberg_census(c, first_only=True)
    if not census.tverberg:
        raise NotFound(f"no Tverberg placement (r = {r0 + 1})")
    p, x = census.tverberg[0]
    parts = []
    pts = []
    for cl in classes_of(p, c)[: c.r - 1]:
        parts.append([divmod(j, r0) for j in sorted(cl)])
        pts.append([c.points[j] for j in sorted(cl)])
    if not all(in_convex_hull(x, ps) for ps in pts):
        raise AssertionError("witness failed verification")
    return ColoredTverberg(parts, x, c, p)


# -- planar sign case studies ---------------------------------------------------

CASE_BOARDS = {
    # R_1 = {c1, c3, c5}, R_2 = {c2, c4, c6}, R_3 = {z}
    1: ((0, 1), (0, 1), (0, 1)),
    # R_1 = {c1, c3, c6}, R_2 = {c2, c4}, R_3 = {c5, z}
    2: ((0, 1), (0, 1), (2, 0)),
    # R_1 = {c2, c5}, R_2 = {c4, c6}, R_3 = {c1, c3, z}
    3: ((2, 0), (2, 1), (0, 1)),
}


def orientation(a: QVector, b: QVector, c: QVector) -> int:
    return det_sign([[b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]])


def _line(a: QVector, b: QVector) -> tuple[Fraction, Fraction, Fraction]:
    # homogeneous coordinates: (a, 1) x (b, 1)
    return (a[1] - b[1], b[0] - a[0], a[0] * b[1] - a[1] * b[0])


def sign_case_study(c: BmzCollection, case: int, w: WBasis | None = None) -> dict:
    """Sign of a fixed partition type next to candidate planar predicates.

    Point numbers in the output are 1-based (``c1 .. c6``).
    """
    if (c.d, c.r) != (2, 3):
        raise WrongShape("sign case studies need d = 2 and r = 3")
    if case not in CASE_BOARDS:
        raise ValueError("case must be 1, 2 or 3")
    w = w or make_w_basis(3)
    p = RookPlacement(2, 3, CASE_BOARDS[case])
    csgn = combinatorial_sign(p)
    gsgn = geometric_sign(p, c, w)
    pts = c.points
    g = CollectionGeometry(c, w)
    masks = g.class_masks(p)
    out = {
        "case": case,
        "classes": [[f"c{j + 1}" if j < c.n else "z" for j in sorted(cl)] for cl in classes_of(p, c)],
        "csgn": csgn,
        "gsgn": gsgn,
        "sgn": csgn * gsgn,
        "class_affinely_dependent": any(not g.subset(m).independent for m in masks),
        "facet_degenerate": g.facet_degenerate(masks),
        "affine_tverberg_point": g.affine_tverberg(masks),
    }
    if case == 1:
        out["orientation_c1c3c5"] = orientation(pts[0], pts[2], pts[4])
        out["orientation_c2c4c6"] = orientation(pts[1], pts[3], pts[5])
    elif case == 2:
        out["orientation_c1c3c6"] = orientation(pts[0], pts[2], pts[5])
        out["orientation_c2c4c5"] = orientation(pts[1], pts[3], pts[4])
    else:
        lines = {"c2c5": (pts[1], pts[4]), "c4c6": (pts[3], pts[5]), "c1c3": (pts[0], pts[2])}
        dirs = {k: (b[0] - a[0], b[1] - a[1]) for k, (a, b) in lines.items()}
        names = list(lines)
        for i in range(3):
            for j in range(i + 1, 3):
                u, v = dirs[names[i]], dirs[names[j]]
                out[f"turn_{names[i]}_{names[j]}"] = det_sign([list(u), list(v)])
        out["concurrency"] = det_sign([list(_line(a, b)) for a, b in lines.values()])
    return out


def sign_case_sweep(case: int, samples: int, seed: int = 0) -> dict:
    """Tabulate sgn against the case's planar predicates over random
    collections.  ``determined`` says whether every observed predicate
    pattern came with a single sgn value; this is data, not a claim."""
    rng = random.Random(f"sweep:{case}:{seed}")
    table: dict[tuple, dict[int, int]] = {}
    for _ in range(samples):
        c = random_collection(2, 3, rng)
        rep = sign_case_study(c, case)
        key = tuple((k, v) for k, v in rep.items() if k.startswith(("orientation_", "turn_", "concurrency")))
        row = table.setdefault(key, {})
        row[rep["sgn"]] = row.get(rep["sgn"], 0) + 1
    return {
        "case": case,
        "samples": samples,
        "patterns": [{"predicates": dict(k), "sgn_counts": v} for k, v in sorted(table.items())],
        "determined": all(len(v) == 1 for v in table.values()),
    }
