"""BMZ-collections and maximal rainbow partitions encoded as rook placements.

Indexing is 0-based throughout.  A collection with parameters ``(d, r)``
has ``N = (d+1)(r-1)`` colored points ``c_0 .. c_{N-1}`` followed by the
apex point ``z = c_N``.  Color class ``k`` (``0 <= k <= d``) is the block
``c_{k(r-1)} .. c_{k(r-1)+r-2}``.

A maximal rainbow r-partition with ``z`` in the last class is a choice,
for every color class ``k``, of an injective map from the ``r-1`` points of
the class (board columns) to the ``r`` partition classes (board rows).
Row ``r-1`` is the last class, the one that also contains ``z``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

from .exact import QVector, qvec

Permutation = tuple  # tuple[int, ...], a bijection of range(r)


class ExhaustedRetries(RuntimeError):
    """A randomized retry loop gave up."""


@dataclass(frozen=True)
class BmzCollection:
    """``d+1`` color classes of ``r-1`` points each, plus the apex ``z``."""

    d: int
    r: int
    points: tuple[QVector, ...]
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(qvec(p) for p in self.points))

    @property
    def n(self) -> int:
        return (self.d + 1) * (self.r - 1)

    @property
    def z(self) -> QVector:
        return self.points[-1]

    def class_of(self, index: int) -> int:
        """Color index of point ``index``; ``d+1`` is the singleton ``{z}``."""
        if index == self.n:
            return self.d + 1
        return index // (self.r - 1)

    def color_class(self, k: int) -> tuple[int, ...]:
        if k == self.d + 1:
            return (self.n,)
        return tuple(range(k * (self.r - 1), (k + 1) * (self.r - 1)))

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence], z, label: str | None = None) -> "BmzCollection":
        d = len(classes) - 1
        r = len(classes[0]) + 1
        pts = [p for cls_ in classes for p in cls_] + [z]
        return cls(d, r, tuple(pts), label)

    def moved(self, index: int, point) -> "BmzCollection":
        pts = list(self.points)
        pts[index] = qvec(point)
        return BmzCollection(self.d, self.r, tuple(pts), self.label)


def validate_collection(c: BmzCollection) -> list[str]:
    """All violated collection invariants; an empty list means valid."""
    problems = []
    if c.d < 1:
        problems.append(f"dimension: d={c.d} must be >= 1")
    if c.r < 2:
        problems.append(f"parameter: r={c.r} must be >= 2")
    if problems:
        return problems
    expected = c.n + 1
    if len(c.points) != expected:
        problems.append(
            f"class size: expected {c.d + 1} classes of {c.r - 1} points plus z "
            f"({expected} points), got {len(c.points)}"
        )
    dims = {len(p) for p in c.points}
    if dims != {c.d}:
        problems.append(f"dimension: all points must have {c.d} coordinates, found {sorted(dims)}")
    seen: dict[QVector, int] = {}
    for i, p in enumerate(c.points):
        if p in seen:
            problems.append(f"distinctness: points {seen[p]} and {i} coincide")
        else:
            seen[p] = i
    return problems


@dataclass(frozen=True, order=True)
class RookPlacement:
    """Combinatorial type of a partition in the family of maximal rainbow
    r-partitions with ``z`` in the last class.

    ``boards[k][j]`` is the partition class (row) of point ``c_{k(r-1)+j}``.
    """

    d: int
    r: int
    boards: tuple[tuple[int, ...], ...]

    def row_of(self, index: int) -> int:
        n = (self.d + 1) * (self.r - 1)
        if index == n:
            return self.r - 1
        k, j = divmod(index, self.r - 1)
        return self.boards[k][j]

    def assignment(self) -> tuple[int, ...]:
        """Partition class of every non-apex point, in global point order."""
        return tuple(row for board in self.boards for row in board)


@lru_cache(maxsize=None)
def board_options(r: int) -> tuple[tuple[int, ...], ...]:
    """All injective maps ``range(r-1) -> range(r)`` in lexicographic order."""
    return tuple(itertools.permutations(range(r), r - 1))


def count_partitions(d: int, r: int) -> int:
    return factorial(r) ** (d + 1)


def placement_at(d: int, r: int, index: int) -> RookPlacement:
    """The ``index``-th placement in enumeration order (mixed radix ``r!``)."""
    opts = board_options(r)
    base = len(opts)
    digits = []
    for _ in range(d + 1):
        index, rem = divmod(index, base)
        digits.append(rem)
    if index:
        raise IndexError("placement index out of range")
    return RookPlacement(d, r, tuple(opts[i] for i in reversed(digits)))


def enumerate_partitions(d: int, r: int, start: int = 0, stop: int | None = None) -> Iterator[RookPlacement]:
    """Yield every placement exactly once, lexicographically by boards.

    ``start``/``stop`` select a contiguous index range, which is how work is
    split between workers.
    """
    if d < 1 or r < 2:
        raise ValueError("need d >= 1 and r >= 2")
    total = count_partitions(d, r)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    opts = board_options(r)
    it = itertools.product(opts, repeat=d + 1)
    for boards in itertools.islice(it, start, stop):
        yield RookPlacement(d, r, boards)


def classes_of(p: RookPlacement, c: BmzCollection | None = None) -> list[frozenset[int]]:
    """Point-index sets ``R_0 .. R_{r-1}``; the apex is in the last one."""
    n = (p.d + 1) * (p.r - 1)
    if c is not None and (c.d, c.r) != (p.d, p.r):
        raise ValueError("placement and collection parameters differ")
    buckets: list[set[int]] = [set() for _ in range(p.r)]
    for idx, row in enumerate(p.assignment()):
        buckets[row].add(idx)
    buckets[p.r - 1].add(n)
    return [frozenset(b) for b in buckets]


def placement_from_classes(d: int, r: int, classes: Sequence[Sequence[int]]) -> RookPlacement:
    """Inverse of :func:`classes_of`; validates maximality and rainbowness."""
    n = (d + 1) * (r - 1)
    if len(classes) != r:
        raise ValueError(f"expected {r} classes")
    row = {}
    for i, cl in enumerate(classes):
        for idx in cl:
            if idx in row:
                raise ValueError(f"point {idx} appears twice")
            row[idx] = i
    if row.get(n) != r - 1:
        raise ValueError("z must lie in the last class")
    if set(row) != set(range(n + 1)):
        raise ValueError("partition is not maximal")
    boards = []
    for k in range(d + 1):
        board = tuple(row[k * (r - 1) + j] for j in range(r - 1))
        if len(set(board)) != r - 1:
            raise ValueError(f"class {k} meets some partition class twice (not rainbow)")
        boards.append(board)
    return RookPlacement(d, r, tuple(boards))


def chessboard_perms(p: RookPlacement) -> tuple[Permutation, ...]:
    """Per board, the permutation ``j -> row of column j`` with the free row last."""
    out = []
    for board in p.boards:
        free = (set(range(p.r)) - set(board)).pop()
        out.append(tuple(board) + (free,))
    return tuple(out)


def placement_from_perms(d: int, r: int, perms: Sequence[Permutation]) -> RookPlacement:
    return RookPlacement(d, r, tuple(tuple(pi[: r - 1]) for pi in perms))


def parity(pi: Sequence[int]) -> int:
    """Sign (+1/-1) of a permutation of ``range(len(pi))``."""
    seen = [False] * len(pi)
    sign = 1
    for i in range(len(pi)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = pi[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def inverse(pi: Sequence[int]) -> Permutation:
    inv = [0] * len(pi)
    for i, v in enumerate(pi):
        inv[v] = i
    return tuple(inv)


def compose(sigma: Sequence[int], tau: Sequence[int]) -> Permutation:
    """``(sigma o tau)(i) = sigma(tau(i))``."""
    return tuple(sigma[t] for t in tau)


def apply_permutation(p: RookPlacement, pi: Sequence[int]) -> RookPlacement:
    """The partition whose class ``i`` is old class ``pi[i]`` (apex kept last).

    A point in old row ``m`` lands in row ``pi^{-1}(m)``.  This is a right
    action: ``apply(apply(p, s), t) == apply(p, compose(s, t))``.
    """
    if sorted(pi) != list(range(p.r)):
        raise ValueError("pi must be a permutation of range(r)")
    inv = inverse(pi)
    return RookPlacement(p.d, p.r, tuple(tuple(inv[row] for row in board) for board in p.boards))


def equivalence_class(p: RookPlacement) -> frozenset[RookPlacement]:
    return frozenset(apply_permutation(p, pi) for pi in itertools.permutations(range(p.r)))


def class_representative(p: RookPlacement) -> RookPlacement:
    return min(equivalence_class(p))


def is_rainbow(classes: Sequence[Sequence[int]], c: BmzCollection) -> bool:
    for cl in classes:
        colors = [c.class_of(i) for i in cl]
        if len(colors) != len(set(colors)):
            return False
    return True


def interpolate(c0: BmzCollection, c1: BmzCollection, t: Fraction) -> BmzCollection:
    """Pointwise ``(1-t) c0 + t c1``."""
    if (c0.d, c0.r) != (c1.d, c1.r):
        raise ValueError("collections must share (d, r)")
    pts = tuple(
        tuple((1 - t) * a + t * b for a, b in zip(p0, p1)) for p0, p1 in zip(c0.points, c1.points)
    )
    return BmzCollection(c0.d, c0.r, pts)
