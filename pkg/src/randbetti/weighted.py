"""Two-row random Betti tables with weighted coefficient ranges.

Coefficient ``i`` is uniform on ``[0, h(i/r)]`` for a weight function
``h: [0, 1] -> [0, 1]``.  Only ``n = 2`` is supported.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .asymptotics import (
    LOG2,
    ExperimentReport,
    SampledSource,
    add_point,
    exp_or_inf,
    log_binomial,
    log_fraction,
    p_of,
)
from .core_tables import check_rn
from .errors import HypothesisViolation, ParameterError
from .sampling import CoefficientVector, rng_for

RANGE_GRID = 10_000
QUAD_RTOL = 1e-10


def _rational(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class WeightFunction:
    """A weight ``h`` on ``[0, 1]``.

    Build with :meth:`constant`, :meth:`sin2` or :meth:`table`.  Constants
    given as ints, Fractions or decimal strings, and tables built from them,
    evaluate exactly at rational points.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind == "table":
            ts, hs = self.params
            if len(ts) < 2 or len(ts) != len(hs):
                raise ParameterError("weight table needs at least two (t, h) points")
            if any(b <= a for a, b in zip(ts, ts[1:])) or ts[0] < 0 or ts[-1] > 1:
                raise ParameterError("weight table abscissae must increase strictly inside [0, 1]")
            if any(not 0 <= v <= 1 for v in hs):
                raise ParameterError("weight table values must lie in [0, 1]")
        elif self.kind in ("constant", "sin2"):
            grid = self.on(np.linspace(0.0, 1.0, RANGE_GRID))
            if np.any(grid < 0) or np.any(grid > 1):
                raise ParameterError(f"{self.kind} weight leaves [0, 1]")
        else:
            raise ParameterError(f"unknown weight kind {self.kind!r}")

    @classmethod
    def constant(cls, c=1) -> "WeightFunction":
        exact = _rational(c)
        return cls("constant", (exact if exact is not None else float(c),))

    @classmethod
    def sin2(cls, shift: float = 0.35) -> "WeightFunction":
        """``h(t) = sin^2(2 pi (t - shift))``."""
        return cls("sin2", (float(shift),))

    @classmethod
    def table(cls, ts: Sequence, hs: Sequence) -> "WeightFunction":
        """Piecewise-linear interpolation through ``(ts[k], hs[k])``, constant past the ends."""
        conv = [_rational(v) for v in list(ts) + list(hs)]
        if all(v is not None for v in conv):
            ts, hs = tuple(conv[: len(ts)]), tuple(conv[len(ts):])
        else:
            ts, hs = tuple(float(v) for v in ts), tuple(float(v) for v in hs)
        return cls("table", (ts, hs))

    @classmethod
    def from_csv(cls, text: str) -> "WeightFunction":
        """Two-column ``t,h`` CSV; an optional non-numeric header row is skipped."""
        rows = [row for row in csv.reader(io.StringIO(text)) if row and not row[0].lstrip().startswith("#")]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        return cls.table([row[0].strip() for row in rows], [row[1].strip() for row in rows])

    @property
    def is_exact(self) -> bool:
        if self.kind == "constant":
            return isinstance(self.params[0], Fraction)
        if self.kind == "table":
            return isinstance(self.params[0][0], Fraction)
        return False

    @property
    def is_smooth(self) -> bool:
        return self.kind in ("constant", "sin2")

    @property
    def knots(self) -> tuple:
        return tuple(float(t) for t in self.params[0]) if self.kind == "table" else ()

    def exact(self, t: Fraction) -> Fraction:
        if not self.is_exact:
            raise ParameterError(f"{self.kind} weight has no exact values")
        if self.kind == "constant":
            return self.params[0]
        ts, hs = self.params
        if t <= ts[0]:
            return hs[0]
        if t >= ts[-1]:
            return hs[-1]
        k = bisect.bisect_right(ts, t) - 1
        return hs[k] + (hs[k + 1] - hs[k]) * (t - ts[k]) / (ts[k + 1] - ts[k])

    def on(self, t) -> np.ndarray:
        """Vectorized float evaluation."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, float(self.params[0]))
        if self.kind == "sin2":
            return np.sin(2 * np.pi * (t - self.params[0])) ** 2
        ts, hs = self.params
        return np.interp(t, [float(v) for v in ts], [float(v) for v in hs])

    def __call__(self, t):
        if self.is_exact and isinstance(t, (int, Fraction)):
            return self.exact(Fraction(t))
        return float(self.on(t))

    def at_grid(self, r: int) -> np.ndarray:
        """Float ``h(i/r)`` for ``i = 1..r``, rounded once from exact values when available."""
        if self.is_exact:
            return np.array([float(self.exact(Fraction(i, r))) for i in range(1, r + 1)])
        return self.on(np.arange(1, r + 1) / r)

    def to_json_dict(self) -> dict:
        if self.kind == "table":
            ts, hs = self.params
            return {"kind": "table", "t": [str(v) for v in ts], "h": [str(v) for v in hs]}
        return {"kind": self.kind, "param": str(self.params[0])}


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _require_n2(n: int) -> None:
    if n != 2:
        raise ParameterError(f"weighted tables are only supported for n = 2, got n = {n}")


def weighted_sample(r: int, h: WeightFunction, seed: int, n: int = 2,
                    stream: int | None = None) -> CoefficientVector:
    """Coefficients ``h(i/r) * X_i``; with ``h = 1`` this is :func:`sample_uniform`."""
    _require_n2(n)
    check_rn(r, 2)
    x = rng_for(seed, stream).random(r)
    return CoefficientVector(r, 2, h.at_grid(r) * x, seed=seed, stream=stream)


def H_integral(r: int, p: float, h: WeightFunction, q: int = 1) -> float:
    """Continuum limit of the weighted expected entry, divided by ``r * C(r-2, p)``.

    For ``q = 1`` with ``c = (p+1)/r``:
    ``int_c^1 h(t) (t - c) dt / (2 (1 - c))``.  ``q = 2`` uses the mirrored
    ``int_0^c h(t) (c - t) dt / (2 c)``.
    """
    c = (p + 1) / r
    if q == 1:
        if c >= 1:
            raise ParameterError(f"degenerate denominator: p+1 = {p + 1} >= r = {r}")
        lo, hi, denom = c, 1.0, 2 * (1 - c)
        integrand = lambda t: h.on(t) * (t - c)
    elif q == 2:
        if c <= 0:
            raise ParameterError("degenerate denominator: p+1 <= 0")
        lo, hi, denom = 0.0, min(c, 1.0), 2 * c
        integrand = lambda t: h.on(t) * (c - t)
    else:
        raise ParameterError(f"q must be 1 or 2, got {q}")
    pts = [k for k in h.knots if lo < k < hi] or None
    val, _ = quad(integrand, lo, hi, points=pts, epsabs=0.0, epsrel=QUAD_RTOL, limit=500)
    return val / denom


def _weighted_sum(r: int, p: int, h: WeightFunction, q: int):
    """``E k_{p,q}(B_r^h) / C(r-2, p)``: exact for exact weights, float otherwise."""
    if not 0 <= p <= r - 2:
        raise ParameterError(f"need 0 <= p <= r-2, got p={p}, r={r}")
    if q == 1:
        idx = range(p + 2, r + 1)
        factor = lambda i: i - p - 1
        denom = 2 * (r - p - 1)
    elif q == 2:
        idx = range(1, p + 2)
        factor = lambda i: p + 2 - i
        denom = 2 * (p + 1)
    else:
        raise ParameterError(f"q must be 1 or 2, got {q}")
    if h.is_exact:
        return sum((h.exact(Fraction(i, r)) * factor(i) for i in idx), Fraction(0)) / denom
    grid = h.at_grid(r)
    return math.fsum(grid[i - 1] * factor(i) for i in idx) / denom


def log_weighted_expected(r: int, p: int, h: WeightFunction, q: int = 1) -> float:
    s = _weighted_sum(r, p, h, q)
    log_s = log_fraction(s) if isinstance(s, Fraction) else (math.log(s) if s > 0 else -math.inf)
    return log_binomial(r - 2, p) + log_s


def weighted_expected_k_p1(r: int, p: int, h: WeightFunction, q: int = 1):
    """Expected ``k_{p,q}(B_r^h)``.

    Exact (a Fraction) when ``h`` has exact values; otherwise a float,
    ``inf`` when it exceeds the double range.
    """
    s = _weighted_sum(r, p, h, q)
    if isinstance(s, Fraction):
        return math.comb(r - 2, p) * s
    return exp_or_inf(log_weighted_expected(r, p, h, q))


def weighted_riemann_ratio(r: int, p: int, h: WeightFunction, q: int = 1) -> float:
    """``E k_{p,q}(B_r^h) / (C(r-2, p) * r * H(r, p))``, free of binomials."""
    return float(_weighted_sum(r, p, h, q)) / (r * H_integral(r, p, h, q))


def check_nonvanishing(h: WeightFunction, q: int = 1) -> None:
    """Refuse weights that vanish on the half of ``[0, 1]`` feeding row ``q``."""
    half = np.linspace(0.5, 1.0, RANGE_GRID) if q == 1 else np.linspace(0.0, 0.5, RANGE_GRID)
    if not np.any(h.on(half) > 0):
        side = "[1/2, 1]" if q == 1 else "[0, 1/2]"
        raise HypothesisViolation(f"weight vanishes identically on {side}; row {q} degenerates past r/2")
    if not h.is_smooth:
        raise HypothesisViolation("Gaussian limit is only certified for smooth weights (constant, sin2)")


def log_weighted_normalizer(r: int, h: WeightFunction, q: int = 1) -> float:
    """``log F_q(r)`` with ``F_q(r) = sqrt(2 pi r) / (2^(r-1) * r * H(r, r/2))``."""
    big_h = H_integral(r, r / 2, h, q)
    if big_h <= 0:
        raise HypothesisViolation(f"H(r, r/2) = {big_h} for r = {r}")
    return 0.5 * math.log(2 * math.pi * r) - (r - 1) * LOG2 - math.log(r * big_h)


def weighted_log_entries(r: int, p: int, h: WeightFunction, source: SampledSource, q: int = 1) -> np.ndarray:
    grid = h.at_grid(r)
    i = np.arange(1, r + 1)
    if q == 1:
        w = np.maximum(i - p - 1, 0) / (r - p - 1)
    else:
        w = np.maximum(p + 2 - i, 0) / (p + 1)
    w = w * grid
    sums = np.array([np.dot(w, rng_for(source.seed, s).random(r)) for s in range(source.samples)])
    with np.errstate(divide="ignore"):
        return log_binomial(r - 2, p) + np.log(sums)


def weighted_gaussian_experiment(h: WeightFunction, r_values: Sequence[int], a: float,
                                 seed: int = 0, N: int = 1, q: int = 1,
                                 source: str = "sampled", tolerance: float = 0.05) -> ExperimentReport:
    """Track ``F_q(r) * k_{p_r,q}(B_r^h)`` against ``exp(-a^2/2)``.

    ``source="sampled"`` averages ``N`` sampled tables (substreams of
    ``seed``); ``"expected"`` uses the exact weighted expectation.
    """
    check_nonvanishing(h, q)
    target = math.exp(-a * a / 2)
    report = ExperimentReport(
        kind="weighted",
        spec={"a": a, "r_values": [int(r) for r in r_values], "n": 2, "q": q,
              "weight": h.to_json_dict(), "source": source, "samples": N},
        tolerance=tolerance,
        seed=seed if source == "sampled" else None,
    )
    for r in r_values:
        p = p_of(r, a, 2)
        log_f = log_weighted_normalizer(r, h, q)
        if source == "expected":
            add_point(report, r, p, math.exp(log_f + log_weighted_expected(r, p, h, q)), target)
        elif source == "sampled":
            vals = np.exp(log_f + weighted_log_entries(r, p, h, SampledSource(seed, N), q))
            spread = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            add_point(report, r, p, float(vals.mean()), target, sample_std=spread)
        else:
            raise ParameterError(f"unknown source {source!r}")
    return report
