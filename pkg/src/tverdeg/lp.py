"""Exact feasibility LP: find ``x >= 0`` with ``A x = b`` over the rationals.

Phase one of the tableau simplex method with one artificial variable per
row, minimizing the sum of artificials.  Bland's smallest-index rule for
both the entering and the leaving variable rules out cycling.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)


def find_nonnegative_solution(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """A vertex solution of ``{x >= 0 : a x = b}``, or None if infeasible."""
    m = len(a)
    if m == 0:
        return ()
    n = len(a[0])
    # tableau rows: [x_0..x_{n-1}, art_0..art_{m-1} | rhs], with rhs >= 0
    rows = []
    for i in range(m):
        coeffs = [Fraction(x) for x in a[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            coeffs = [-x for x in coeffs]
            rhs = -rhs
        art = [_ZERO] * m
        art[i] = Fraction(1)
        rows.append(coeffs + art + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m + 1
    # objective row: reduced costs for min sum(art); z-row = -sum of rows
    obj = [_ZERO] * width
    for row in rows:
        for j in range(n):
            obj[j] -= row[j]
        obj[-1] -= row[-1]

    while True:
        entering = next((j for j in range(n + m) if obj[j] < 0), None)
        if entering is None:
            break
        best = None
        leave = None
        for i, row in enumerate(rows):
            coef = row[entering]
            if coef > 0:
                ratio = row[-1] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # cannot happen in phase one (objective bounded below by 0)
            break
        prow = rows[leave]
        inv = 1 / prow[entering]
        prow = [x * inv for x in prow]
        rows[leave] = prow
        for i in range(m):
            if i != leave:
                f = rows[i][entering]
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
        f = obj[entering]
        obj = [x - f * y for x, y in zip(obj, prow)]
        basis[leave] = entering

    if obj[-1] != 0:
        return None
    x = [_ZERO] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = rows[i][-1]
    return tuple(x)
