"""Signs of facets, ray casting and the degree of a BMZ-collection.

The facet of a placement ``R`` is the simplex spanned by the clones of
``c_0 .. c_{N-1}``, each taken with the index of its partition class, in
global point order.  The degree is the signed number of facets met by a
ray from the origin; the default ray points away from the apex clone.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .exact import QVector, Singular, bareiss_det, solve_unique
from .geometry import CollectionGeometry, ReducedRaySolver
from .model import (
    BmzCollection,
    ExhaustedRetries,
    RookPlacement,
    chessboard_perms,
    count_partitions,
    enumerate_partitions,
    parity,
)
from .transform import WBasis, clone, make_w_basis


class NonGenericRay(ArithmeticError):
    """The ray meets a facet boundary or runs parallel to a facet."""

    def __init__(self, message: str, placement: RookPlacement | None = None):
        super().__init__(message)
        self.placement = placement


class DegenerateFacet(ArithmeticError):
    def __init__(self, message: str, placement: RookPlacement | None = None):
        super().__init__(message)
        self.placement = placement


@dataclass(frozen=True)
class Facet:
    placement: RookPlacement
    vertices: tuple[QVector, ...]


@dataclass(frozen=True)
class Signs:
    csgn: int
    gsgn: int

    @property
    def sgn(self) -> int:
        return self.csgn * self.gsgn


@dataclass(frozen=True)
class RayHit:
    t: Fraction
    barycentric: tuple[Fraction, ...]


@dataclass
class DegreeReport:
    d: int
    r: int
    ray_direction: QVector
    hits: list[tuple[RookPlacement, Signs, RayHit]] = field(default_factory=list)
    ray_source: str = "default"

    @property
    def degree(self) -> int:
        return sum(s.sgn for _, s, _ in self.hits)

    @property
    def residue(self) -> int:
        return self.degree % factorial(self.r)


def combinatorial_sign(p: RookPlacement) -> int:
    sign = 1
    for pi in chessboard_perms(p):
        sign *= parity(pi)
    return sign


def build_facet(p: RookPlacement, c: BmzCollection, w: WBasis | None = None) -> Facet:
    w = w or make_w_basis(c.r)
    verts = tuple(clone(c.points[j], p.row_of(j), w) for j in range(c.n))
    return Facet(p, verts)


def _gsgn(geom: CollectionGeometry, p: RookPlacement) -> int:
    rows = [list(geom.clone_row(j, row)) for j, row in enumerate(p.assignment())]
    det = bareiss_det(rows)
    return (det > 0) - (det < 0)


def geometric_sign(
    p: RookPlacement,
    c: BmzCollection,
    w: WBasis | None = None,
    geometry: CollectionGeometry | None = None,
) -> int:
    """Sign of det of the facet vertex matrix, rows in global point order.

    Pass ``geometry`` to share clone caches across many placements.
    """
    return _gsgn(geometry or CollectionGeometry(c, w), p)


def signs(
    p: RookPlacement,
    c: BmzCollection,
    w: WBasis | None = None,
    geometry: CollectionGeometry | None = None,
) -> Signs:
    return Signs(combinatorial_sign(p), geometric_sign(p, c, w, geometry))


def ray_hits_facet(direction: Sequence[Fraction], facet: Facet) -> RayHit | None:
    """Solve ``t dir = sum lam_j v_j``, ``sum lam_j = 1`` exactly.

    Returns the hit when ``t > 0`` and all ``lam_j > 0``; None when the ray
    misses.  Raises :class:`NonGenericRay` on a singular system or when the
    ray passes through the facet's relative boundary.
    """
    verts = facet.vertices
    n = len(verts)
    if len(direction) != n or any(len(v) != n for v in verts):
        raise ValueError("facet must have N vertices in R^N and dir must be in R^N")
    if all(x == 0 for x in direction):
        raise ValueError("ray direction must be nonzero")
    # unknowns (lam_0..lam_{n-1}, t)
    a = [[verts[j][k] for j in range(n)] + [-Fraction(direction[k])] for k in range(n)]
    a.append([Fraction(1)] * n + [Fraction(0)])
    b = [Fraction(0)] * n + [Fraction(1)]
    try:
        sol = solve_unique(a, b)
    except Singular:
        raise NonGenericRay("ray is parallel to the facet's affine hull", facet.placement) from None
    lam, t = sol[:n], sol[n]
    return _classify(t, lam, facet.placement)


def _classify(t: Fraction, lam: Sequence[Fraction], placement) -> RayHit | None:
    if t <= 0:
        return None
    if any(x < 0 for x in lam):
        return None
    if any(x == 0 for x in lam):
        raise NonGenericRay("ray meets the relative boundary of a facet", placement)
    return RayHit(t, tuple(lam))


def default_ray(c: BmzCollection, w: WBasis | None = None) -> QVector:
    """Direction opposite to the apex clone ``phi_{r-1}(z)``."""
    w = w or make_w_basis(c.r)
    return tuple(-x for x in clone(c.z, c.r - 1, w))


def sample_ray(rng: random.Random, n: int, bound: int = 10**6) -> QVector:
    """Uniform random nonzero integer direction with entries in ``[-bound, bound]``."""
    while True:
        v = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(n))
        if any(v):
            return v


def _hit_fast(solver: ReducedRaySolver, geom: CollectionGeometry, p: RookPlacement) -> RayHit | None:
    res = solver.solve(geom.class_masks(p))
    if res is None:
        facet = Facet(p, tuple(geom.clone(j, row) for j, row in enumerate(p.assignment())))
        return ray_hits_facet(solver.direction, facet)
    scale = geom.hom_scale
    negative = zero = False
    for info, nums, den in res:
        for x in nums:
            if x == 0:
                zero = True
            elif (x < 0) != (den < 0):
                negative = True
    if negative or zero:
        # sign of sum(mu) decides between a miss and a parallel ray
        total, prod = 0, 1
        for _, _, den in res:
            prod *= den
        for info, nums, den in res:
            part = sum(x * int(scale[j]) for x, j in zip(nums, info.indices))
            total += part * (prod // den)
        sgn_total = (total > 0) - (total < 0)
        if prod < 0:
            sgn_total = -sgn_total
        if sgn_total == 0:
            raise NonGenericRay("ray is parallel to the facet's affine hull", p)
        if sgn_total < 0 or negative:
            return None
        raise NonGenericRay("ray meets the relative boundary of a facet", p)
    mu = [Fraction(0)] * geom.n
    for info, nums, den in res:
        for x, j in zip(nums, info.indices):
            mu[j] = Fraction(x, den * solver.scale) * scale[j]
    t = 1 / sum(mu)
    return RayHit(t, tuple(m * t for m in mu))


def _degree_chunk(args) -> list[tuple[RookPlacement, Signs, RayHit]]:
    c, w, direction, start, stop, fast = args
    geom = CollectionGeometry(c, w)
    solver = ReducedRaySolver(geom, direction)
    hits = []
    for p in enumerate_partitions(c.d, c.r, start, stop):
        if fast:
            hit = _hit_fast(solver, geom, p)
        else:
            facet = Facet(p, tuple(geom.clone(j, row) for j, row in enumerate(p.assignment())))
            hit = ray_hits_facet(direction, facet)
        if hit is None:
            continue
        g = _gsgn(geom, p)
        if g == 0:
            raise DegenerateFacet("ray hits a degenerate facet", p)
        hits.append((p, Signs(combinatorial_sign(p), g), hit))
    return hits


def default_threads() -> int:
    return int(os.environ.get("TVERDEG_THREADS", "1"))


def degree(
    c: BmzCollection,
    ray: Sequence[Fraction] | None = None,
    w: WBasis | None = None,
    threads: int | None = None,
    fast: bool = True,
) -> DegreeReport:
    """Signed count of facets hit by ``ray`` (default: away from the apex clone).

    ``fast=False`` solves every facet's full (N+1)-square system; the
    default reduces each to a (d+1)-square one.  Both are exact.
    Work is split into contiguous placement ranges when ``threads > 1``;
    the result does not depend on the split.
    """
    w = w or make_w_basis(c.r)
    direction = tuple(Fraction(x) for x in (default_ray(c, w) if ray is None else ray))
    if len(direction) != c.n or not any(direction):
        raise ValueError("ray must be a nonzero vector in R^N")
    threads = threads or default_threads()
    total = count_partitions(c.d, c.r)
    if threads <= 1:
        hits = _degree_chunk((c, w, direction, 0, total, fast))
    else:
        step = -(-total // threads)
        jobs = [(c, w, direction, s, min(s + step, total), fast) for s in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            hits = [h for part in pool.map(_degree_chunk, jobs) for h in part]
    return DegreeReport(c.d, c.r, direction, hits, "default" if ray is None else "given")


def compute_degree(
    c: BmzCollection,
    ray: str | int | Sequence[Fraction] = "default",
    w: WBasis | None = None,
    threads: int | None = None,
    max_retries: int = 20,
) -> DegreeReport:
    """Degree with fallback: on a non-generic ray, resample seeded rays.

    ``ray`` is ``"default"``, an integer seed, or an explicit direction.
    """
    w = w or make_w_basis(c.r)
    if isinstance(ray, str) and ray != "default":
        raise ValueError(f"unknown ray option {ray!r}")
    if not isinstance(ray, (str, int)):
        return degree(c, ray, w, threads)
    seed = None
    if ray == "default":
        try:
            return degree(c, None, w, threads)
        except NonGenericRay:
            seed = 0
    else:
        seed = ray
    rng = random.Random(seed)
    for attempt in range(max_retries):
        direction = sample_ray(rng, c.n)
        try:
            rep = degree(c, direction, w, threads)
        except NonGenericRay:
            continue
        rep.ray_source = f"seed={seed}" + (f" attempt={attempt}" if attempt else "")
        return rep
    raise ExhaustedRetries(f"no generic ray found in {max_retries} attempts")


def ridge_partner(p: RookPlacement, dropped_point: int) -> RookPlacement:
    """The other placement sharing the ridge obtained by dropping ``c_j``.

    The dropped rook goes back into the row that was free on its board.
    """
    n = (p.d + 1) * (p.r - 1)
    if not 0 <= dropped_point < n:
        raise ValueError("dropped point must be a colored point (not z)")
    k, j = divmod(dropped_point, p.r - 1)
    board = list(p.boards[k])
    free = (set(range(p.r)) - set(board)).pop()
    board[j] = free
    boards = list(p.boards)
    boards[k] = tuple(board)
    return RookPlacement(p.d, p.r, tuple(boards))


def check_pseudomanifold(d: int, r: int) -> list[str]:
    """Exhaustively verify every ridge lies on exactly two facets with
    opposite combinatorial signs; returns the counterexamples found."""
    n = (d + 1) * (r - 1)
    problems = []
    placements = list(enumerate_partitions(d, r))
    csgn = {p: combinatorial_sign(p) for p in placements}
    for j in range(n):
        groups: dict[tuple, list[RookPlacement]] = {}
        for p in placements:
            a = list(p.assignment())
            a[j] = -1
            groups.setdefault(tuple(a), []).append(p)
        for key, members in groups.items():
            if len(members) != 2:
                problems.append(f"ridge dropping c_{j} of {members[0]} lies on {len(members)} facets")
                continue
            p, q = members
            if csgn[p] != -csgn[q]:
                problems.append(f"{p} and {q} share a ridge but have equal combinatorial sign")
            if ridge_partner(p, j) != q or ridge_partner(q, j) != p:
                problems.append(f"ridge_partner disagrees with enumeration for {p}, c_{j}")
    return problems
