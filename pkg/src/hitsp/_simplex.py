"""Exact rational phase-1 simplex for small equality systems.

Solves ``A w = b, w >= 0`` in Fraction arithmetic by minimizing the sum of
artificial variables with Bland's rule (no cycling).  Intended for small
dense systems (dozens of rows/columns), where exactness matters more than
speed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def solve_equalities_nonneg(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> list[Fraction] | None:
    """A nonnegative exact solution of ``rows @ w = rhs``, or None.

    Returns a basic feasible solution (many entries typically zero).
    """
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    a = [[Fraction(x) for x in row] for row in rows]
    b = [Fraction(x) for x in rhs]
    for i in range(m):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]

    # Tableau columns: n structural + m artificial; artificials start basic.
    width = n + m
    tableau = [a[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]

    # Phase-1 objective row: minimize sum of artificials.
    obj = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(width + 1):
            obj[j] -= tableau[i][j]
    for i in range(m):
        obj[n + i] += Fraction(1)

    while True:
        enter = None
        for j in range(width):
            if obj[j] < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            coef = tableau[i][enter]
            if coef > 0:
                ratio = tableau[i][width] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return None
        pivot = tableau[leave][enter]
        tableau[leave] = [x / pivot for x in tableau[leave]]
        for i in range(m):
            if i != leave and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[leave])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tableau[leave])]
        basis[leave] = enter

    if obj[width] != 0:
        return None

    solution = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            solution[basis[i]] = tableau[i][width]
        elif tableau[i][width] != 0:
            return None
    return solution
