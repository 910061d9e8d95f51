"""The Sarkaria-Onn tensor transform and its dictionary.

Each property of an r-partition ``P`` of points in R^d has two exact
computations here: one in R^d and one on the transformed point set in
R^N, ``N = (d+1)(r-1)``.  The two are used as oracles for each other.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import (
    QVector,
    affinely_independent,
    homogenize,
    is_consistent,
    nullspace,
    origin_in_affine_hull,
    qvec,
)
from .lp import find_nonnegative_solution


class EmptyClass(ValueError):
    """A partition class is empty where a nonempty one is required."""


@dataclass(frozen=True)
class WBasis:
    """``r`` integer vectors in R^{r-1} summing to zero, any ``r-1`` independent."""

    r: int
    vectors: tuple[QVector, ...]

    def __getitem__(self, i: int) -> QVector:
        return self.vectors[i]


def make_w_basis(r: int) -> WBasis:
    """``w_i = r e_i - 1`` for ``i < r-1`` and ``w_{r-1} = -1``.

    An invertible linear image of a centred regular simplex, with integer
    coordinates.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    dim = r - 1
    vecs = []
    for i in range(dim):
        vecs.append(tuple(Fraction(r * (i == k) - 1) for k in range(dim)))
    vecs.append(tuple(Fraction(-1) for _ in range(dim)))
    return WBasis(r, tuple(vecs))


def tensor(u: Sequence[Fraction], v: Sequence[Fraction]) -> QVector:
    """``(u_1 v_1, u_1 v_2, ..., u_m v_n)``."""
    return tuple(a * b for a in u for b in v)


def clone(x: Sequence[Fraction], i: int, w: WBasis) -> QVector:
    """The ``i``-th clone ``(x, 1) (x) w_i`` of a point ``x``."""
    return tensor(homogenize(qvec(x)), w[i])


@dataclass(frozen=True)
class RPartition:
    """An r-partition of a labelled point list.

    ``labels[j]`` is the class of ``points[j]``; the position ``j`` is the
    global index that fixes the order of transformed points.
    """

    r: int
    points: tuple[QVector, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(qvec(p) for p in self.points))
        if len(self.points) != len(self.labels):
            raise ValueError("one label per point required")
        if any(not 0 <= lab < self.r for lab in self.labels):
            raise ValueError("labels must lie in range(r)")

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence]) -> "RPartition":
        pts, labels = [], []
        for i, cl in enumerate(classes):
            for p in cl:
                pts.append(p)
                labels.append(i)
        return cls(len(classes), tuple(pts), tuple(labels))

    @property
    def classes(self) -> list[list[QVector]]:
        out: list[list[QVector]] = [[] for _ in range(self.r)]
        for p, lab in zip(self.points, self.labels):
            out[lab].append(p)
        return out

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.points else 0

    def require_nonempty(self) -> None:
        for i, cl in enumerate(self.classes):
            if not cl:
                raise EmptyClass(f"class {i} is empty")


def transform_partition(p: RPartition, w: WBasis | None = None) -> list[QVector]:
    """Clones of all points, in global point order."""
    w = w or make_w_basis(p.r)
    return [clone(x, lab, w) for x, lab in zip(p.points, p.labels)]


def origin_in_hull(points: Sequence[Sequence[Fraction]]) -> tuple[bool, tuple[Fraction, ...] | None]:
    """Whether 0 is a convex combination of ``points``; returns the coefficients."""
    if not points:
        return False, None
    dim = len(points[0])
    a = [[pt[k] for pt in points] for k in range(dim)]
    a.append([Fraction(1)] * len(points))
    b = [Fraction(0)] * dim + [Fraction(1)]
    sol = find_nonnegative_solution(a, b)
    if sol is None:
        return False, None
    return True, sol


def in_convex_hull(x: Sequence[Fraction], points: Sequence[Sequence[Fraction]]) -> bool:
    x = qvec(x)
    return origin_in_hull([tuple(a - b for a, b in zip(p, x)) for p in points])[0]


def has_tverberg_point(p: RPartition) -> tuple[bool, QVector | None]:
    """Common point of all class hulls, by an LP in R^d.

    Variables are the per-class convex coefficients; the common point is
    eliminated as the combination of class 0.
    """
    p.require_nonempty()
    classes = p.classes
    d = p.dim
    sizes = [len(cl) for cl in classes]
    offsets = [sum(sizes[:i]) for i in range(p.r)]
    nvar = sum(sizes)
    rows, rhs = [], []
    for i in range(1, p.r):
        for k in range(d):
            row = [Fraction(0)] * nvar
            for j, pt in enumerate(classes[i]):
                row[offsets[i] + j] += pt[k]
            for j, pt in enumerate(classes[0]):
                row[offsets[0] + j] -= pt[k]
            rows.append(row)
            rhs.append(Fraction(0))
    for i in range(p.r):
        row = [Fraction(0)] * nvar
        for j in range(sizes[i]):
            row[offsets[i] + j] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))
    sol = find_nonnegative_solution(rows, rhs)
    if sol is None:
        return False, None
    x = tuple(sum((sol[j] * pt[k] for j, pt in enumerate(classes[0])), Fraction(0)) for k in range(d))
    return True, x


def tverberg_point_from_transform(p: RPartition, coeffs: Sequence[Fraction]) -> QVector:
    """Recover a Tverberg point from a convex combination expressing 0 in
    terms of the transformed points: with ``A`` the (common) coefficient
    mass of a class and ``s`` its weighted point sum, the point is ``s/A``.
    """
    d = p.dim
    mass = [Fraction(0)] * p.r
    sums = [[Fraction(0)] * d for _ in range(p.r)]
    for alpha, pt, lab in zip(coeffs, p.points, p.labels):
        mass[lab] += alpha
        for k in range(d):
            sums[lab][k] += alpha * pt[k]
    if len(set(mass)) != 1 or any(tuple(s) != tuple(sums[0]) for s in sums):
        raise ValueError("coefficients do not express 0 in the transformed set")
    if mass[0] <= 0:
        raise ValueError("degenerate witness (zero class mass)")
    return tuple(s / mass[0] for s in sums[0])


def has_affine_tverberg_point(p: RPartition, w: WBasis | None = None) -> bool:
    """Whether the origin lies in the affine hull of the transformed points."""
    p.require_nonempty()
    return origin_in_affine_hull(transform_partition(p, w))


def affine_tverberg_direct(p: RPartition) -> bool:
    """Common point of the class affine hulls, as a linear system in R^d."""
    p.require_nonempty()
    classes = p.classes
    d = p.dim
    sizes = [len(cl) for cl in classes]
    offsets = [sum(sizes[:i]) for i in range(p.r)]
    nvar = sum(sizes)
    rows, rhs = [], []
    for i in range(1, p.r):
        for k in range(d):
            row = [Fraction(0)] * nvar
            for j, pt in enumerate(classes[i]):
                row[offsets[i] + j] += pt[k]
            for j, pt in enumerate(classes[0]):
                row[offsets[0] + j] -= pt[k]
            rows.append(row)
            rhs.append(Fraction(0))
    for i in range(p.r):
        row = [Fraction(0)] * nvar
        for j in range(sizes[i]):
            row[offsets[i] + j] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))
    return is_consistent(rows, rhs)


def has_tverberg_direction(p: RPartition) -> bool:
    """Nonzero vector common to all linear affine hulls.

    Unknowns ``(v, beta)`` with ``v = sum_{P_i} beta p`` and
    ``sum_{P_i} beta = 0`` for every class; a direction exists iff some
    kernel vector has ``v != 0``.
    """
    p.require_nonempty()
    classes = p.classes
    d = p.dim
    sizes = [len(cl) for cl in classes]
    offsets = [d + sum(sizes[:i]) for i in range(p.r)]
    nvar = d + sum(sizes)
    rows = []
    for i in range(p.r):
        for k in range(d):
            row = [Fraction(0)] * nvar
            row[k] = Fraction(-1)
            for j, pt in enumerate(classes[i]):
                row[offsets[i] + j] = pt[k]
            rows.append(row)
        row = [Fraction(0)] * nvar
        for j in range(sizes[i]):
            row[offsets[i] + j] = Fraction(1)
        rows.append(row)
    return any(any(x != 0 for x in vec[:d]) for vec in nullspace(rows, nvar))


def affinely_dependent_transform(p: RPartition, w: WBasis | None = None) -> bool:
    return not affinely_independent(transform_partition(p, w))


def affinely_dependent_direct(p: RPartition) -> bool:
    """Some class is affinely dependent, or the partition has a Tverberg direction."""
    if any(not affinely_independent(cl) for cl in p.classes):
        return True
    if any(not cl for cl in p.classes):
        return False
    return has_tverberg_direction(p)
