"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator); vectors are tuples and matrices are sequences of
row tuples.  Nothing in this module ever rounds.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

Rational = Fraction
QVector = tuple  # tuple[Fraction, ...]
QMatrix = Sequence[Sequence[Fraction]]


class Singular(ArithmeticError):
    """Raised when a linear system has no unique solution."""


def q(value) -> Fraction:
    """Coerce an int, Fraction or ``"num/den"`` string to a Fraction.

    Floats are rejected: they would smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def qvec(values: Iterable) -> QVector:
    return tuple(q(v) for v in values)


def qmat(rows: Iterable[Iterable]) -> list[QVector]:
    return [qvec(row) for row in rows]


def integer_row(row: Sequence[Fraction]) -> list[int]:
    """Scale ``row`` by the positive lcm of its denominators."""
    m = 1
    for x in row:
        m = lcm(m, x.denominator)
    return [int(x * m) for x in row]


def bareiss_det(a: list[list[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination.

    ``a`` is consumed (overwritten in place).
    """
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(m: QMatrix) -> Fraction:
    """Exact determinant of a square rational matrix."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("det requires a square matrix")
    scale = 1
    rows = []
    for row in m:
        mult = 1
        for x in row:
            mult = lcm(mult, x.denominator)
        scale *= mult
        rows.append([int(x * mult) for x in row])
    return Fraction(bareiss_det(rows), scale)


def det_sign(m: QMatrix) -> int:
    """Sign of det(m) in {-1, 0, +1}.

    Rows are cleared of denominators by positive factors, so the integer
    Bareiss determinant has the same sign as the rational one.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("det_sign requires a square matrix")
    d = bareiss_det([integer_row(row) for row in m])
    return (d > 0) - (d < 0)


def _echelon(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    pr = 0
    for col in range(ncols):
        piv = next((i for i in range(pr, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        inv = 1 / rows[pr][col]
        rows[pr] = [x * inv for x in rows[pr]]
        for i in range(len(rows)):
            if i != pr and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[pr])]
        pivots.append(col)
        pr += 1
        if pr == len(rows):
            break
    return rows, pivots


def rank(m: QMatrix) -> int:
    """Exact rank over the rationals."""
    if not m or not len(m[0]):
        return 0
    _, pivots = _echelon([[q(x) for x in row] for row in m])
    return len(pivots)


def int_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix via fraction-free elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rk = 0
    for col in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        p = a[rk][col]
        prow = a[rk]
        for i in range(rk + 1, len(a)):
            f = a[i][col]
            if f:
                a[i] = [x * p - f * y for x, y in zip(a[i], prow)]
        rk += 1
        if rk == len(a):
            break
    return rk


def solve_unique(a: QMatrix, b: Sequence[Fraction]) -> QVector:
    """The unique solution of ``a x = b``; raises :class:`Singular` otherwise."""
    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("solve_unique needs an n x n matrix and a length-n vector")
    aug = [[q(x) for x in row] + [q(bi)] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        inv = 1 / prow[col]
        for i in range(col + 1, n):
            f = aug[i][col]
            if f:
                f *= inv
                row = aug[i]
                for j in range(col, n + 1):
                    row[j] -= f * prow[j]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = aug[i][n]
        row = aug[i]
        for j in range(i + 1, n):
            s -= row[j] * x[j]
        x[i] = s / row[i]
    return tuple(x)


def nullspace(m: QMatrix, ncols: int | None = None) -> list[QVector]:
    """Basis of the right kernel ``{x : m x = 0}``."""
    if ncols is None:
        if not m:
            raise ValueError("ncols is required for an empty matrix")
        ncols = len(m[0])
    if not m:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    rows, pivots = _echelon([[q(x) for x in row] for row in m])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def is_consistent(a: QMatrix, b: Sequence[Fraction]) -> bool:
    """Whether ``a x = b`` has at least one solution."""
    if not a:
        return True
    return rank(a) == rank([list(row) + [bi] for row, bi in zip(a, b)])


def homogenize(point: Sequence[Fraction]) -> QVector:
    return tuple(point) + (Fraction(1),)


def affinely_independent(points: Sequence[Sequence[Fraction]]) -> bool:
    """True iff the homogenized points are linearly independent."""
    if not points:
        return True
    return rank([homogenize(p) for p in points]) == len(points)


def matmul(a: QMatrix, b: QMatrix) -> list[QVector]:
    cols = list(zip(*b))
    return [tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols) for row in a]


def identity(n: int) -> list[QVector]:
    return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]


def origin_in_affine_hull(points: Sequence[Sequence[Fraction]]) -> bool:
    """0 is in aff(points) iff adding the origin does not raise the affine
    rank, i.e. rank of the homogenized points exceeds the linear rank by one."""
    if not points:
        return False
    return rank([homogenize(p) for p in points]) == rank(points) + 1
