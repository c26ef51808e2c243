"""Betti numbers ``k_{p,1}`` of large-degree embeddings of curves.

For a curve of genus ``g`` embedded by a line bundle of degree ``d`` in
``P^{r_d}`` with ``r_d = d - g``, the Euler characteristic computation gives
``k_{p,1}`` in closed form whenever ``1 <= p <= r_d - g``.  Beyond that range
only a crude bound is available.  For ``g = 0`` the closed form is checked
against a direct Koszul cohomology computation.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .asymptotics import LOG2, log_fraction
from .errors import CapacityError, OutOfRegimeError, ParameterError
from .linalg import rank

ORACLE_MAX_DEGREE = 8


def binom(a: int, b: int) -> int:
    """Binomial coefficient, zero when ``b < 0`` or ``b > a``."""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


@dataclass(frozen=True)
class CurveEmbedding:
    """Degree-``d`` embedding of a genus-``g`` curve.

    ``guard`` controls the ``d >= 2g + 3`` sanity bound: ``"raise"``,
    ``"warn"`` or ``"off"``.
    """

    genus: int
    degree: int
    guard: str = "raise"

    def __post_init__(self):
        if self.genus < 0:
            raise ParameterError(f"genus must be >= 0, got {self.genus}")
        if self.guard not in ("raise", "warn", "off"):
            raise ParameterError(f"unknown guard mode {self.guard!r}")
        if self.degree < 2 * self.genus + 3:
            msg = f"degree {self.degree} < 2g+3 = {2 * self.genus + 3}; formula regime not guaranteed"
            if self.guard == "raise":
                raise ParameterError(msg)
            if self.guard == "warn":
                warnings.warn(msg, stacklevel=2)
        if self.degree - self.genus < 1:
            raise ParameterError("need d > g")

    @property
    def r_d(self) -> int:
        return self.degree - self.genus

    @property
    def regime(self) -> range:
        """Values of ``p`` where :func:`curve_k_p1` applies."""
        return range(1, self.r_d - self.genus + 1)


def curve_k_p1(embedding: CurveEmbedding, p: int) -> Fraction:
    d, g = embedding.degree, embedding.genus
    if p not in embedding.regime:
        raise OutOfRegimeError(f"p={p} outside the closed-form range [1, {embedding.r_d - g}]")
    top = d + 1 - g
    return math.comb(d - g, p) * (Fraction(-p * d, d - g) + top - Fraction(top, p + 1))


def curve_k_p1_upper_bound(embedding: CurveEmbedding, p: int) -> Fraction:
    """``C(d+1-g, p) * (d+1-g)``, with the binomial zero past its range."""
    if p < 0:
        raise ParameterError(f"need p >= 0, got {p}")
    top = embedding.degree + 1 - embedding.genus
    return Fraction(binom(top, p) * top)


def log_curve_normalized(embedding: CurveEmbedding, p: int) -> float:
    r = embedding.r_d
    return -r * LOG2 + 0.5 * math.log(2 * math.pi / r) + log_fraction(curve_k_p1(embedding, p))


def curve_normalized(embedding: CurveEmbedding, p: int) -> float:
    """``2^(-r_d) * sqrt(2 pi / r_d) * k_{p,1}``."""
    return math.exp(log_curve_normalized(embedding, p))


def curve_profile(embedding: CurveEmbedding) -> list[tuple[int, Fraction]]:
    return [(p, curve_k_p1(embedding, p)) for p in embedding.regime]


def _koszul_rank(d: int, p: int, k: int) -> int:
    """Rank of the Koszul differential ``L^p V (x) W_{kd} -> L^{p-1} V (x) W_{(k+1)d}``.

    ``V = W_d`` has basis the monomials ``x^a y^(d-a)``, indexed by ``a``.
    The differential preserves total ``x``-degree, so the rank is summed
    over blocks of fixed weight.
    """
    if p == 0:
        return 0
    src = defaultdict(list)
    for wedge in itertools.combinations(range(d + 1), p):
        for b in range(k * d + 1):
            src[sum(wedge) + b].append((wedge, b))
    total = 0
    for basis in src.values():
        targets = {}
        columns = []
        for wedge, b in basis:
            col = {}
            for i, a in enumerate(wedge):
                key = (wedge[:i] + wedge[i + 1:], b + a)
                row = targets.setdefault(key, len(targets))
                col[row] = col.get(row, 0) + (-1) ** i
            columns.append(col)
        matrix = [[col.get(i, 0) for col in columns] for i in range(len(targets))]
        total += rank(matrix)
    return total


def koszul_oracle_p1(d: int, p: int) -> int:
    """``k_{p,1}`` of the degree-``d`` rational normal curve from Koszul cohomology.

    Homology at ``L^p V (x) W_d`` of
    ``L^{p+1} V -> L^p V (x) W_d -> L^{p-1} V (x) W_{2d}``, by exact
    rational elimination.
    """
    if d > ORACLE_MAX_DEGREE:
        raise CapacityError(f"Koszul oracle limited to d <= {ORACLE_MAX_DEGREE}, got {d}")
    if not 1 <= p <= d - 1:
        raise ParameterError(f"need 1 <= p <= d-1, got p={p}, d={d}")
    middle = math.comb(d + 1, p) * (d + 1)
    kernel = middle - _koszul_rank(d, p, 1)
    return kernel - _koszul_rank(d, p + 1, 0)
