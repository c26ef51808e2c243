"""Stirling-normalized Gaussian limits of Betti table rows.

Everything large is handled as a logarithm: at ``r = 2000`` the binomial
``C(r, r/2)`` is near ``1e600`` and its normalizer near ``1e-600``, so only
their product is ever exponentiated.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import gammaln

from .core_tables import check_rn
from .errors import ParameterError
from .sampling import _check_capacity, coefficient_weights, expected_entry, rng_for

LOG2 = math.log(2.0)


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def p_of(r: int, a: float, n: int = 2) -> int:
    """Column ``round(r/2 + a*sqrt(r)/2)``, required to lie in ``[0, r-n]``."""
    p = round_half_away(r / 2 + a * math.sqrt(r) / 2)
    if not 0 <= p <= r - n:
        raise ParameterError(f"p_r = {p} for r={r}, a={a} lies outside [0, {r - n}]")
    return p


def log_binomial(a: int, b: int) -> float:
    if b < 0 or b > a:
        return -math.inf
    return float(gammaln(a + 1) - (gammaln(b + 1) + gammaln(a - b + 1)))


def log_fraction(x) -> float:
    """Natural log of a positive Fraction/int of any size (``-inf`` for zero)."""
    if x == 0:
        return -math.inf
    if x < 0:
        raise ParameterError("log of a negative value")
    return math.log(x.numerator) - math.log(x.denominator)


def exp_or_inf(log_value: float) -> float:
    return math.exp(log_value) if log_value < 709.0 else math.inf


def log_stirling_normalizer(r: int, n: int, q: int) -> float:
    if not 1 <= q <= n:
        raise ParameterError(f"need 1 <= q <= n, got q={q}, n={n}")
    return (math.lgamma(q) + math.lgamma(n - q + 1) + 0.5 * math.log(2 * math.pi * r)
            - (r + 2 - 3 * n) * LOG2 - (n - 1) * math.log(r))


def stirling_normalizer(r: int, n: int, q: int) -> float:
    """``(q-1)! (n-q)! sqrt(2 pi r) / (2^(r+2-3n) r^(n-1))``; underflows to 0 past r ~ 1070."""
    return math.exp(log_stirling_normalizer(r, n, q))


def binomial_gaussian_ratio(r: int, p: int) -> float:
    """``sqrt(2 pi r) / 2^(r+1) * C(r, p)``."""
    if not 0 <= p <= r:
        raise ParameterError(f"need 0 <= p <= r, got p={p}, r={r}")
    return math.exp(0.5 * math.log(2 * math.pi * r) - (r + 1) * LOG2 + log_binomial(r, p))


@dataclass(frozen=True)
class GaussianSequenceSpec:
    a: float
    r_values: tuple[int, ...]
    n: int = 2
    q: int = 1

    def __post_init__(self):
        rs = tuple(int(r) for r in self.r_values)
        object.__setattr__(self, "r_values", rs)
        if not rs or any(b <= a for a, b in zip(rs, rs[1:])):
            raise ParameterError(f"r_values must be nonempty and increasing: {rs}")
        if not 1 <= self.q <= self.n:
            raise ParameterError(f"need 1 <= q <= n, got q={self.q}, n={self.n}")
        for r in rs:
            check_rn(r, self.n)
            p_of(r, self.a, self.n)

    def p_values(self) -> list[int]:
        return [p_of(r, self.a, self.n) for r in self.r_values]


@dataclass(frozen=True)
class SampledSource:
    seed: int = 0
    samples: int = 1


@dataclass
class ExperimentReport:
    kind: str
    spec: dict
    per_r: list[dict] = field(default_factory=list)
    tolerance: float = 0.05
    seed: int | None = None

    @property
    def passed(self) -> bool:
        """Relative error at the largest ``r`` is within tolerance."""
        if not self.per_r:
            return False
        last = self.per_r[-1]
        return last["target"] != 0 and last["abs_error"] <= self.tolerance * abs(last["target"])

    def values(self) -> list[float]:
        return [row["value"] for row in self.per_r]

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def add_point(report: ExperimentReport, r: int, p: int, value: float, target: float, **extra) -> None:
    err = abs(value - target)
    row = {"r": r, "p_r": p, "value": value, "target": target, "abs_error": err,
           "rel_error": err / abs(target) if target else math.inf}
    row.update(extra)
    report.per_r.append(row)


LogEntrySource = Callable[[int, int, int, int], float]
Source = Union[str, SampledSource, LogEntrySource]


def sampled_log_entries(r: int, n: int, p: int, q: int, source: SampledSource) -> np.ndarray:
    """``log k_{p,q}`` for ``source.samples`` substreams of ``source.seed``."""
    count = _check_capacity(r, n)
    w = coefficient_weights(r, n, p, q)
    log_c = log_binomial(r - n, p)
    sums = np.array([np.dot(w, rng_for(source.seed, i).random(count)) for i in range(source.samples)])
    with np.errstate(divide="ignore"):
        return log_c + np.log(sums)


def gaussian_experiment(spec: GaussianSequenceSpec, source: Source = "expected",
                        tolerance: float = 0.05) -> ExperimentReport:
    """Track ``F(r) * k_{p_r,q}`` against ``exp(-a^2/2)`` along ``spec.r_values``.

    ``source`` is ``"expected"`` (exact expected table), a
    :class:`SampledSource` (mean over sampled tables; the per-sample spread
    is recorded too), or a callable ``(r, n, p, q) -> log k_{p,q}`` that
    returns ``-inf`` for a zero entry.
    """
    target = math.exp(-spec.a**2 / 2)
    seed = source.seed if isinstance(source, SampledSource) else None
    label = source if isinstance(source, str) else ("sampled" if seed is not None else "custom")
    report = ExperimentReport(
        kind="gauss",
        spec={"a": spec.a, "r_values": list(spec.r_values), "n": spec.n, "q": spec.q, "source": label},
        tolerance=tolerance,
        seed=seed,
    )
    for r in spec.r_values:
        p = p_of(r, spec.a, spec.n)
        log_f = log_stirling_normalizer(r, spec.n, spec.q)
        if source == "expected":
            value = math.exp(log_f + log_fraction(expected_entry(r, spec.n, p, spec.q)))
            add_point(report, r, p, value, target)
        elif isinstance(source, SampledSource):
            vals = np.exp(log_f + sampled_log_entries(r, spec.n, p, spec.q, source))
            spread = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            add_point(report, r, p, float(vals.mean()), target, sample_std=spread)
        elif callable(source):
            log_k = source(r, spec.n, p, spec.q)
            add_point(report, r, p, 0.0 if log_k == -math.inf else math.exp(log_f + log_k), target)
        else:
            raise ParameterError(f"unknown source {source!r}")
    return report


def gaussian_grid(a_values: Sequence[float], r_values: Sequence[int], n: int = 2, q: int = 1,
                  source: Source = "expected", tolerance: float = 0.05) -> list[ExperimentReport]:
    return [gaussian_experiment(GaussianSequenceSpec(a, tuple(r_values), n, q), source, tolerance)
            for a in a_values]
