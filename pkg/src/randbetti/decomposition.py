"""Unique decomposition of two-row tables into pure diagrams."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core_tables import BettiTable, pure_diagram
from .errors import NotInConeError, ParameterError
from .linalg import rank, solve_unique
from .sampling import combine


@dataclass(frozen=True)
class Decomposition:
    r: int
    coefficients: tuple[Fraction, ...]  # x_1 .. x_r

    def __getitem__(self, i: int) -> Fraction:
        return self.coefficients[i - 1]

    def table(self) -> BettiTable:
        return combine(self.r, 2, self.coefficients)

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "coefficients": [{"i": i, "value": f"{c.numerator}/{c.denominator}"}
                             for i, c in enumerate(self.coefficients, start=1)],
            "residual": "0",
        }


def _flatten(table: BettiTable) -> list[Fraction]:
    return [v for row in table.entries for v in row]


@lru_cache(maxsize=32)
def pure_matrix(r: int) -> tuple[tuple[Fraction, ...], ...]:
    """``2(r-1) x r`` matrix whose column ``i-1`` is the flattened ``pi(r, i)``."""
    cols = [_flatten(pure_diagram(r, 2, (i,)).table) for i in range(1, r + 1)]
    return tuple(tuple(col[k] for col in cols) for k in range(2 * (r - 1)))


def pure_matrix_rank(r: int) -> int:
    return rank(pure_matrix(r))


def decompose(table: BettiTable, n: int = 2) -> Decomposition:
    """Coefficients ``x_i`` with ``table = sum_i x_i * pi(r, i)``.

    Raises :class:`NotInSpanError` if no such combination exists and
    :class:`NotInConeError` (naming the first offending ``i``) if one
    coefficient is negative.
    """
    if n != 2 or table.n != 2:
        raise ParameterError("decomposition is only implemented for two-row tables")
    if not table.is_exact:
        raise ParameterError("decomposition needs an exact-mode table")
    coeffs = solve_unique(pure_matrix(table.r), _flatten(table))
    for i, c in enumerate(coeffs, start=1):
        if c < 0:
            raise NotInConeError(i, c)
    return Decomposition(table.r, tuple(coeffs))


def generic_module_table(r: int) -> BettiTable:
    """Betti table of a general ``(r-1) x (r-1)`` matrix of linear forms.

    ``(r-1) * (pi(r, floor((r+1)/2)) + pi(r, ceil((r+1)/2)))``; for odd
    ``r`` both summands coincide and the table is pure.
    """
    if r < 4:
        raise ParameterError(f"need r >= 4, got {r}")
    lo, hi = (r + 1) // 2, (r + 2) // 2
    coeffs = [0] * r
    coeffs[lo - 1] += r - 1
    coeffs[hi - 1] += r - 1
    return combine(r, 2, coeffs)
