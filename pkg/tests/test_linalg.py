from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from skeleta.errors import Inconsistent, RankDeficient
from skeleta.linalg import RowSpace, null_space, rank, rref, solve

entries = st.integers(-3, 3)


@st.composite
def matrices(draw, max_rows=6, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [draw(st.lists(entries, min_size=c, max_size=c)) for _ in range(r)], c


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_and_rank_match_sympy(mc):
    rows, ncols = mc
    ours, pivots = rref(rows, ncols)
    theirs, their_pivots = sympy.Matrix(rows).rref()
    assert tuple(pivots) == tuple(their_pivots)
    for i in range(len(rows)):
        assert ours[i] == [_to_fraction(theirs[i, j]) for j in range(ncols)]
    assert rank(rows) == sympy.Matrix(rows).rank()


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_null_space_is_a_kernel_basis(mc):
    rows, ncols = mc
    basis = null_space(rows, ncols)
    assert len(basis) == len(sympy.Matrix(rows).nullspace())
    for v in basis:
        assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in rows)
    if basis:
        assert sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v]
                             for v in basis]).rank() == len(basis)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.lists(entries, min_size=5, max_size=5))
def test_solve_agrees_with_sympy(mc, x_true):
    rows, ncols = mc
    x_true = x_true[:ncols]
    rhs = [sum(a * x for a, x in zip(row, x_true)) for row in rows]
    if sympy.Matrix(rows).rank() == ncols:
        assert solve(rows, rhs, ncols) == [Fraction(x) for x in x_true]
    else:
        with pytest.raises(RankDeficient) as info:
            solve(rows, rhs, ncols)
        assert info.value.rank == sympy.Matrix(rows).rank()
        assert len(info.value.null_space) == ncols - info.value.rank


def test_inconsistent_reports_a_row():
    with pytest.raises(Inconsistent) as info:
        solve([[1, 0], [0, 1], [1, 1]], [1, 1, 3])
    assert info.value.row in (0, 1, 2)
    assert info.value.residual != 0


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=8))
def test_row_space_tracks_rank(mc):
    rows, ncols = mc
    space = RowSpace(ncols)
    for i, row in enumerate(rows):
        before = space.rank
        grew = space.add(row)
        assert grew == (space.rank == before + 1)
        assert space.rank == sympy.Matrix(rows[: i + 1]).rank()
        assert space.contains(row)
