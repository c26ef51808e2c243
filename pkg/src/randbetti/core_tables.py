"""Exact pure Betti diagrams and the invariants used to validate them.

Tables have ``n`` rows (weights ``q = 1..n``) and ``r + 1 - n`` columns
(homological degrees ``p = 0..r-n``).  A pure diagram is indexed by an
``(n-1)``-subset ``I`` of ``{1..r}``; the complement of ``I`` is its degree
sequence ``d_0 < ... < d_{r-n}`` and column ``p`` is supported in row
``d_p - p``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ModeError, NotFiniteLengthError, ParameterError

EXACT = "exact"
FLOAT = "float"


def check_rn(r: int, n: int) -> None:
    if n < 2 or r < n + 1:
        raise ParameterError(f"need 2 <= n <= r-1, got r={r}, n={n}")


@dataclass(frozen=True)
class IndexSet:
    r: int
    n: int
    elements: tuple[int, ...]

    def __post_init__(self):
        check_rn(self.r, self.n)
        els = tuple(int(i) for i in self.elements)
        object.__setattr__(self, "elements", els)
        if len(els) != self.n - 1:
            raise ParameterError(f"index set for n={self.n} needs {self.n - 1} elements, got {els}")
        if any(b <= a for a, b in zip(els, els[1:])):
            raise ParameterError(f"index set must be strictly increasing: {els}")
        if els and (els[0] < 1 or els[-1] > self.r):
            raise ParameterError(f"index set {els} not inside [1, {self.r}]")

    @classmethod
    def of(cls, r: int, elements: Iterable[int]) -> "IndexSet":
        els = tuple(elements)
        return cls(r, len(els) + 1, els)

    def reflected(self) -> "IndexSet":
        """``{r + 1 - i}``: the index set of the dual diagram."""
        return IndexSet(self.r, self.n, tuple(sorted(self.r + 1 - i for i in self.elements)))


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.degrees, self.degrees[1:])):
            raise ParameterError(f"degree sequence must increase strictly: {self.degrees}")

    def __len__(self):
        return len(self.degrees)

    def __getitem__(self, p):
        return self.degrees[p]


def degree_sequence_of(index_set: IndexSet) -> DegreeSequence:
    skip = set(index_set.elements)
    return DegreeSequence(tuple(d for d in range(1, index_set.r + 1) if d not in skip))


class BettiTable:
    """An ``n x (r+1-n)`` grid of nonnegative Betti numbers ``k_{p,q}``.

    Exact tables hold :class:`~fractions.Fraction` entries, float tables a
    read-only ``numpy`` array.  Rows are stored in weight order, so
    ``entries[q - 1][p]`` is ``k_{p,q}``.
    """

    __slots__ = ("n", "r", "mode", "entries")

    def __init__(self, n: int, r: int, entries, mode: str = EXACT, validate: bool = True):
        check_rn(r, n)
        width = r + 1 - n
        if mode == EXACT:
            rows = tuple(tuple(Fraction(v) for v in row) for row in entries)
            if len(rows) != n or any(len(row) != width for row in rows):
                raise ParameterError(f"exact table must be {n} x {width}")
            if validate and any(v < 0 for row in rows for v in row):
                raise ParameterError("Betti table entries must be nonnegative")
            data = rows
        elif mode == FLOAT:
            data = np.array(entries, dtype=float)
            if data.shape != (n, width):
                raise ParameterError(f"float table must be {n} x {width}, got {data.shape}")
            if validate and np.any(data < 0):
                raise ParameterError("Betti table entries must be nonnegative")
            data.setflags(write=False)
        else:
            raise ParameterError(f"unknown table mode {mode!r}")
        self.n = n
        self.r = r
        self.mode = mode
        self.entries = data

    @classmethod
    def zeros(cls, r: int, n: int, mode: str = EXACT) -> "BettiTable":
        width = r + 1 - n
        if mode == EXACT:
            return cls(n, r, [[0] * width for _ in range(n)])
        return cls(n, r, np.zeros((n, width)), mode=FLOAT)

    @property
    def width(self) -> int:
        return self.r + 1 - self.n

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT

    def entry(self, p: int, q: int):
        if not (0 <= p < self.width and 1 <= q <= self.n):
            raise ParameterError(f"(p, q) = ({p}, {q}) outside a {self.n} x {self.width} table")
        value = self.entries[q - 1][p]
        return value if self.is_exact else float(value)

    def row(self, q: int) -> list:
        return [self.entry(p, q) for p in range(self.width)]

    def items(self) -> Iterator[tuple[int, int, object]]:
        """Yield ``(p, q, k_{p,q})`` column by column."""
        for p in range(self.width):
            for q in range(1, self.n + 1):
                yield p, q, self.entry(p, q)

    def to_float(self) -> "BettiTable":
        if not self.is_exact:
            return self
        return BettiTable(self.n, self.r, [[float(v) for v in row] for row in self.entries], mode=FLOAT)

    def _same_shape(self, other: "BettiTable") -> None:
        if (self.n, self.r) != (other.n, other.r):
            raise ParameterError("tables have different shapes")

    def __add__(self, other: "BettiTable") -> "BettiTable":
        self._same_shape(other)
        if self.is_exact and other.is_exact:
            rows = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
            return BettiTable(self.n, self.r, rows)
        return BettiTable(self.n, self.r, self.to_float().entries + other.to_float().entries, mode=FLOAT)

    def scaled(self, c) -> "BettiTable":
        if self.is_exact and isinstance(c, (int, Fraction)):
            return BettiTable(self.n, self.r, [[c * v for v in row] for row in self.entries])
        return BettiTable(self.n, self.r, float(c) * self.to_float().entries, mode=FLOAT)

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        if (self.n, self.r, self.mode) != (other.n, other.r, other.mode):
            return False
        if self.is_exact:
            return self.entries == other.entries
        return bool(np.array_equal(self.entries, other.entries))

    __hash__ = None

    def __repr__(self):
        return f"BettiTable(n={self.n}, r={self.r}, mode={self.mode!r})"

    def __str__(self):
        lines = []
        for q in range(1, self.n + 1):
            cells = [("-" if v == 0 else str(v)) for v in self.row(q)]
            lines.append(f"{q}: " + " ".join(cells))
        return "\n".join(lines)

    # serialization

    def to_csv(self, comments: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in comments:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        if self.is_exact:
            writer.writerow(["p", "q", "num", "den"])
            for p, q, v in self.items():
                writer.writerow([p, q, v.numerator, v.denominator])
        else:
            writer.writerow(["p", "q", "value"])
            for p, q, v in self.items():
                writer.writerow([p, q, repr(v)])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        if self.is_exact:
            entries = [{"p": p, "q": q, "value": f"{v.numerator}/{v.denominator}"} for p, q, v in self.items()]
        else:
            entries = [{"p": p, "q": q, "value": v} for p, q, v in self.items()]
        return {"n": self.n, "r": self.r, "mode": self.mode, "entries": entries}

    @classmethod
    def from_json_dict(cls, data: dict) -> "BettiTable":
        n, r, mode = int(data["n"]), int(data["r"]), data["mode"]
        grid = [[0] * (r + 1 - n) for _ in range(n)]
        for e in data["entries"]:
            v = Fraction(e["value"]) if mode == EXACT else float(e["value"])
            grid[int(e["q"]) - 1][int(e["p"])] = v
        return cls(n, r, grid, mode=mode)

    @classmethod
    def from_csv(cls, text: str, r: int | None = None, n: int | None = None) -> "BettiTable":
        """Parse the CSV written by :meth:`to_csv`.

        ``r`` and ``n`` default to the grid extent implied by the rows
        (``n`` = largest weight, ``r = n + largest p``), which is exact when
        the file lists every cell, as :meth:`to_csv` does.
        """
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        rows = list(csv.DictReader(lines))
        if not rows:
            raise ParameterError("empty table CSV")
        exact = "num" in rows[0]
        cells = {}
        for row in rows:
            p, q = int(row["p"]), int(row["q"])
            cells[p, q] = Fraction(int(row["num"]), int(row["den"])) if exact else float(row["value"])
        n = n if n is not None else max(q for _, q in cells)
        r = r if r is not None else n + max(p for p, _ in cells)
        grid = [[0] * (r + 1 - n) for _ in range(n)]
        for (p, q), v in cells.items():
            if not (0 <= p <= r - n and 1 <= q <= n):
                raise ParameterError(f"cell ({p}, {q}) outside a table with r={r}, n={n}")
            grid[q - 1][p] = v
        return cls(n, r, grid, mode=EXACT if exact else FLOAT)


@dataclass(frozen=True, eq=False)
class PureDiagram:
    index_set: IndexSet
    degree_sequence: DegreeSequence
    table: BettiTable

    @property
    def r(self):
        return self.index_set.r

    @property
    def n(self):
        return self.index_set.n

    def entry(self, p: int, q: int) -> Fraction:
        return self.table.entry(p, q)


def _plus(m: int) -> int:
    return m if m > 0 else 0


def pure_entry(r: int, n: int, elements: Sequence[int], p: int, q: int) -> Fraction:
    """``k_{p,q}`` of the pure diagram with index set ``elements``, in the
    factorial form with truncated linear factors (no absolute values)."""
    num = math.factorial(r - n)
    for i in elements[: q - 1]:
        num *= _plus(p + q - i)
    for i in elements[q - 1 :]:
        num *= _plus(i - p - q)
    if num == 0:
        return Fraction(0)
    return Fraction(num, math.factorial(p + q - 1) * math.factorial(r - p - q))


def pure_entry_product_form(r: int, n: int, degrees: Sequence[int], p: int) -> Fraction:
    """Nonzero entry of column ``p``: ``(r-n)! / prod_{l != p} |d_l - d_p|``."""
    den = 1
    for ell, d in enumerate(degrees):
        if ell != p:
            den *= abs(d - degrees[p])
    return Fraction(math.factorial(r - n), den)


def _as_index_set(r: int, n: int, index_set) -> IndexSet:
    if isinstance(index_set, IndexSet):
        if (index_set.r, index_set.n) != (r, n):
            raise ParameterError(f"index set built for (r={index_set.r}, n={index_set.n}), not ({r}, {n})")
        return index_set
    if isinstance(index_set, int):
        index_set = (index_set,)
    return IndexSet(r, n, tuple(index_set))


def pure_diagram(r: int, n: int, index_set) -> PureDiagram:
    """Build ``pi(r, I)`` exactly.

    ``index_set`` may be an :class:`IndexSet` or any iterable of ints (a
    bare int is accepted when ``n == 2``).
    """
    check_rn(r, n)
    iset = _as_index_set(r, n, index_set)
    degs = degree_sequence_of(iset)
    width = r + 1 - n
    grid = [[Fraction(0)] * width for _ in range(n)]
    for p in range(width):
        for q in range(1, n + 1):
            grid[q - 1][p] = pure_entry(r, n, iset.elements, p, q)
        q_p = degs[p] - p
        assert all(grid[q - 1][p] == 0 for q in range(1, n + 1) if q != q_p)
        assert grid[q_p - 1][p] == pure_entry_product_form(r, n, degs.degrees, p)
    return PureDiagram(iset, degs, BettiTable(n, r, grid))


def sigma_b(a: int, b: int) -> int:
    """Elementary symmetric polynomial ``e_b(1, 2, ..., a)``."""
    if b < 0 or a < b:
        raise ParameterError(f"sigma_b needs a >= b >= 0, got a={a}, b={b}")
    e = [1] + [0] * b
    for j in range(1, a + 1):
        for k in range(min(j, b), 0, -1):
            e[k] += j * e[k - 1]
    return e[b]


def _require_exact(table: BettiTable) -> None:
    if not table.is_exact:
        raise ModeError("operation needs an exact-mode table")


def _hf_value(table: BettiTable, j: int) -> Fraction:
    m = table.r - table.n
    total = Fraction(0)
    for p, q, k in table.items():
        if k:
            t = m - 1 + j - (p + q)
            if t >= m - 1:
                c = math.comb(t, m - 1)
                total += -k * c if p % 2 else k * c
    return total


def hilbert_function(table: BettiTable, through: int | None = None) -> list[Fraction]:
    """Alternating-sum Hilbert function of the (formal) module of ``table``.

    Element ``j - 1`` of the result is ``HF(j)``; degrees start at 1 since
    every generator sits in degree ``p + q >= 1``.  Without ``through`` the
    values run up to degree ``r`` (the last degree a resolution of this
    shape can reach) with trailing zeros removed.
    """
    _require_exact(table)
    top = table.r if through is None else through
    values = [_hf_value(table, j) for j in range(1, top + 1)]
    if through is None:
        while values and values[-1] == 0:
            values.pop()
    return values


def multiplicity(table: BettiTable) -> Fraction:
    """Total length ``sum_j HF(j)``.

    Raises :class:`NotFiniteLengthError` if HF does not vanish past degree
    ``r``; checking ``r - n`` consecutive degrees is enough because HF is a
    polynomial of degree ``< r - n`` there.
    """
    _require_exact(table)
    m = table.r - table.n
    for j in range(table.r + 1, table.r + m + 1):
        v = _hf_value(table, j)
        if v != 0:
            raise NotFiniteLengthError(f"Hilbert function is {v} in degree {j}; table has no finite length")
    return sum(hilbert_function(table), Fraction(0))


def herzog_kuhl_check(table: BettiTable) -> bool:
    """True iff ``sum (-1)^p k_{p,q} (p+q)^j = 0`` for ``j = 0..r-n-1``."""
    _require_exact(table)
    for j in range(table.r - table.n):
        s = Fraction(0)
        for p, q, k in table.items():
            if k:
                term = k * (p + q) ** j
                s += -term if p % 2 else term
        if s != 0:
            return False
    return True
