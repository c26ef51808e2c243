"""Exact row reduction over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import NotInSpanError


def row_reduce(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns of ``rows`` (not modified)."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if lead != 1:
            m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_reduce(rows)[1])


def solve_unique(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve ``a x = b`` for a matrix of full column rank.

    Raises :class:`NotInSpanError` when ``b`` is not in the column span.
    """
    ncols = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = row_reduce(aug)
    if ncols in pivots:
        raise NotInSpanError("right-hand side is not in the span of the columns")
    if pivots != list(range(ncols)):
        raise ValueError("matrix does not have full column rank")
    return [red[i][ncols] for i in range(ncols)]
