"""Sufficiently / almost general position checks and random perturbation."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import affinely_independent, origin_in_affine_hull
from .geometry import CollectionGeometry
from .model import (
    BmzCollection,
    ExhaustedRetries,
    RookPlacement,
    count_partitions,
    enumerate_partitions,
    validate_collection,
)
from .transform import WBasis, make_w_basis, origin_in_hull

DEFAULT_BUDGET = 10**8

FACET_DEGENERATE = "facet-degenerate"
SPAN_CONTAINS_ORIGIN = "span-contains-origin"
RIDGE_CONTAINS_ORIGIN = "ridge-contains-origin"


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Violation:
    placement: RookPlacement
    condition: str
    point: int | None = None

    def describe(self) -> str:
        where = "" if self.point is None else f" (dropping point {self.point})"
        return f"{self.condition}{where} for boards {self.placement.boards}"


@dataclass
class GenPosReport:
    # None means "not evaluated by this check"
    sufficiently_general: bool | None
    almost_general: bool | None
    violations: list[Violation] = field(default_factory=list)


def _budget(c: BmzCollection, per_placement: int, budget: int | None) -> None:
    cost = count_partitions(c.d, c.r) * per_placement
    if cost > (DEFAULT_BUDGET if budget is None else budget):
        raise BudgetExceeded(f"{cost} tests exceed the budget")


def check_sufficient(
    c: BmzCollection,
    w: WBasis | None = None,
    method: str = "direct",
    exhaustive: bool = True,
    budget: int | None = None,
    geometry: CollectionGeometry | None = None,
) -> GenPosReport:
    """Check every facet is a nondegenerate simplex and no facet of any
    ``S_R`` spans an affine subspace through the origin.

    ``method="direct"`` decides each condition by the equivalent statement
    about the partition in R^d (affine dependence / common direction /
    common point of affine hulls), memoized over unordered class lists.
    ``method="transform"`` runs the literal rank tests on clone matrices.
    With ``exhaustive=False`` the scan stops at the first violation.
    """
    _budget(c, c.n + 2, budget)
    w = w or make_w_basis(c.r)
    if method == "direct":
        violations = _check_direct(geometry or CollectionGeometry(c, w), exhaustive)
    elif method == "transform":
        violations = _check_transform(c, w, exhaustive)
    else:
        raise ValueError(f"unknown method {method!r}")
    ok = not violations
    return GenPosReport(ok, True if ok else None, violations)


def _check_direct(g: CollectionGeometry, exhaustive: bool) -> list[Violation]:
    out: list[Violation] = []
    c = g.c
    apex = g.apex_bit
    last = c.r - 1
    for p in enumerate_partitions(c.d, c.r):
        masks = g.class_masks(p)
        if g.facet_degenerate(masks):
            out.append(Violation(p, FACET_DEGENERATE))
        if g.affine_tverberg(masks):
            out.append(Violation(p, SPAN_CONTAINS_ORIGIN, c.n))
        if out and not exhaustive:
            return out
        full = list(masks)
        full[last] |= apex
        for a in range(c.n):
            bit = 1 << a
            row = p.row_of(a)
            minus = list(full)
            minus[row] &= ~bit
            if g.affine_tverberg(minus):
                out.append(Violation(p, SPAN_CONTAINS_ORIGIN, a))
                if not exhaustive:
                    return out
    return out


def _check_transform(c: BmzCollection, w: WBasis, exhaustive: bool) -> list[Violation]:
    g = CollectionGeometry(c, w)
    out: list[Violation] = []
    for p in enumerate_partitions(c.d, c.r):
        rows = {j: g.clone(j, p.row_of(j)) for j in range(c.n + 1)}
        facet = [rows[j] for j in range(c.n)]
        if not affinely_independent(facet):
            out.append(Violation(p, FACET_DEGENERATE))
        for a in range(c.n + 1):
            pts = [rows[j] for j in range(c.n + 1) if j != a]
            if origin_in_affine_hull(pts):
                out.append(Violation(p, SPAN_CONTAINS_ORIGIN, a))
        if out and not exhaustive:
            return out
    return out


def check_almost(c: BmzCollection, w: WBasis | None = None, budget: int | None = None) -> GenPosReport:
    """Every ridge ``conv(clones of R - z - a)`` avoids the origin (exact LP).

    A ridge whose affine hull already misses the origin is skipped.
    """
    _budget(c, c.n, budget)
    w = w or make_w_basis(c.r)
    g = CollectionGeometry(c, w)
    violations: list[Violation] = []
    memo: dict[tuple[int, ...], bool] = {}
    for p in enumerate_partitions(c.d, c.r):
        masks = g.class_masks(p)
        for a in range(c.n):
            minus = list(masks)
            minus[p.row_of(a)] &= ~(1 << a)
            key = tuple(minus)
            bad = memo.get(key)
            if bad is None:
                bad = False
                if g.affine_tverberg(minus):
                    pts = [g.clone(j, p.row_of(j)) for j in range(c.n) if j != a]
                    bad = origin_in_hull(pts)[0]
                memo[key] = bad
            if bad:
                violations.append(Violation(p, RIDGE_CONTAINS_ORIGIN, a))
    return GenPosReport(None, not violations, violations)


def perturb(
    c: BmzCollection,
    eps: Fraction,
    rng: random.Random,
    denom: int = 10**6,
    max_retries: int = 100,
    w: WBasis | None = None,
) -> BmzCollection:
    """A collection in sufficiently general position with every point
    within Euclidean distance ``eps`` of the original.

    Each coordinate moves by at most ``eps/d``, so the sup-norm bound
    implies the Euclidean one.  Returns ``c`` itself if it already passes.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    w = w or make_w_basis(c.r)
    if not validate_collection(c) and check_sufficient(c, w, exhaustive=False).sufficiently_general:
        return c
    step = eps / c.d
    for _ in range(max_retries):
        pts = tuple(
            tuple(x + step * Fraction(rng.randint(-denom, denom), denom) for x in p) for p in c.points
        )
        cand = BmzCollection(c.d, c.r, pts, c.label)
        if validate_collection(cand):
            continue
        if check_sufficient(cand, w, exhaustive=False).sufficiently_general:
            return cand
    raise ExhaustedRetries(f"no perturbation in general position after {max_retries} attempts")


def distance(c0: BmzCollection, c1: BmzCollection) -> Fraction:
    """Largest coordinate difference (a sup-norm bound on point distance)."""
    return max(
        (abs(a - b) for p, q in zip(c0.points, c1.points) for a, b in zip(p, q)),
        default=Fraction(0),
    )
