"""Exact Gaussian elimination over the rationals.

Columns are eliminated left to right and the pivot row for a column is the
first remaining row with a nonzero entry there, so results depend only on
the row and column order.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import Inconsistent, RankDeficient


def _frac_rows(rows: Sequence[Sequence]) -> list:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple:
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    a = _frac_rows(rows)
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for col in range(ncols):
        pick = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if pick is None:
            continue
        a[r], a[pick] = a[pick], a[r]
        lead = a[r][col]
        a[r] = [x / lead for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a, pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def null_space(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    a, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -a[i][f]
        basis.append(x)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int | None = None) -> list:
    """Unique exact solution of ``A x = b``.

    Raises ``RankDeficient`` (with a null-space basis) or ``Inconsistent``
    (with the first failing row and its residual).
    """
    a = _frac_rows(rows)
    b = [Fraction(x) for x in rhs]
    if len(a) != len(b):
        raise ValueError("row count and rhs length differ")
    if ncols is None:
        ncols = len(a[0]) if a else 0
    aug = [row + [y] for row, y in zip(a, b)]
    red, pivots = rref(aug, ncols)
    for i in range(len(pivots), len(red)):
        if red[i][ncols] != 0:
            x = _least_squares_free(red, pivots, ncols)
            worst = _worst_row(a, b, x)
            raise Inconsistent(f"row {worst[0]} has residual {worst[1]}", row=worst[0], residual=worst[1])
    if len(pivots) < ncols:
        raise RankDeficient(f"rank {len(pivots)} < {ncols}", rank=len(pivots),
                            null_space=null_space(a, ncols))
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return x


def _least_squares_free(red, pivots, ncols) -> list:
    # particular solution of the consistent part, free variables set to 0
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return x


def _worst_row(a, b, x) -> tuple:
    best = (None, Fraction(0))
    for i, (row, y) in enumerate(zip(a, b)):
        res = sum((c * v for c, v in zip(row, x)), Fraction(0)) - y
        if best[0] is None or abs(res) > abs(best[1]):
            best = (i, res)
    return best


class RowSpace:
    """Incrementally maintained echelon basis, for cheap rank-increase tests."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._basis = {}  # pivot column -> normalized row

    @property
    def rank(self) -> int:
        return len(self._basis)

    def _reduce(self, row) -> list:
        v = [Fraction(x) for x in row]
        for col in sorted(self._basis):
            if v[col] != 0:
                f = v[col]
                v = [x - f * y for x, y in zip(v, self._basis[col])]
        return v

    def contains(self, row) -> bool:
        return not any(self._reduce(row))

    def add(self, row) -> bool:
        """Insert ``row``; return whether the rank went up."""
        v = self._reduce(row)
        col = next((i for i, x in enumerate(v) if x != 0), None)
        if col is None:
            return False
        lead = v[col]
        v = [x / lead for x in v]
        for c, other in self._basis.items():
            if other[col] != 0:
                f = other[col]
                self._basis[c] = [x - f * y for x, y in zip(other, v)]
        self._basis[col] = v
        return True
