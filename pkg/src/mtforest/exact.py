"""Exact integer and rational linear algebra on small dense matrices."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from functools import lru_cache
from typing import Sequence


def det_int(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by Bareiss fraction-free elimination.

    Every intermediate division is exact, so no rational ever appears.
    The empty matrix has determinant 1.
    """
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for p in range(k + 1, n):
                if a[p][k] != 0:
                    a[k], a[p] = a[p], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * pivot - a[i][k] * a[k][j]
                q, rem = divmod(num, prev)
                assert rem == 0, "Bareiss step must divide exactly"
                a[i][j] = q
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def minor(matrix: Sequence[Sequence[int]], drop: Sequence[int]) -> list[list[int]]:
    """The principal submatrix with the rows and columns in ``drop`` removed."""
    keep = [i for i in range(len(matrix)) if i not in set(drop)]
    return [[matrix[i][j] for j in keep] for i in keep]


def nullspace(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of the right kernel of a rational matrix (reduced row echelon)."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows:
        return []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


@lru_cache(maxsize=None)
def fact(n: int) -> int:
    return factorial(n)


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return fact(n) // (fact(k) * fact(n - k))
