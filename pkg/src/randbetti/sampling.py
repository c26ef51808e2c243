"""Random Boij-Soderberg coefficient vectors and the random table they define.

Every pure diagram ``pi(r, I)`` factors as ``C(r-n, p) * c_I(p, q)`` in
entry ``(p, q)``, where ``c_I`` is a ratio of small integer products lying
in ``[0, 1]``.  Normalized quantities are computed from the ``c_I``
directly, which keeps them finite long after ``C(r-n, p)`` has overflowed a
double.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .core_tables import EXACT, FLOAT, BettiTable, check_rn, pure_entry, sigma_b
from .errors import CapacityError, ParameterError

DEFAULT_MAX_SUBSETS = 10**7
EXACT_CUTOFF = 40
MAX_SUBSETS_ENV = "RANDBETTI_MAX_SUBSETS"


def max_subsets() -> int:
    env = os.environ.get(MAX_SUBSETS_ENV)
    return int(env) if env else DEFAULT_MAX_SUBSETS


def _check_capacity(r: int, n: int, cap: int | None = None) -> int:
    count = math.comb(r, n - 1)
    cap = max_subsets() if cap is None else cap
    if count > cap:
        raise CapacityError(f"C({r}, {n - 1}) = {count} index sets exceeds the enumeration cap {cap}")
    return count


@lru_cache(maxsize=32)
def index_sets(r: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All ``(n-1)``-subsets of ``[r]`` in lexicographic order."""
    check_rn(r, n)
    _check_capacity(r, n)
    return tuple(itertools.combinations(range(1, r + 1), n - 1))


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed:
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def rng_for(seed: int, stream: int | None = None) -> np.random.Generator:
    """Philox generator for ``seed``; ``stream`` selects an independent substream.

    Substream ``i`` depends only on ``(seed, i)``, so a sweep over samples
    reproduces exactly however it is split across workers.
    """
    seed = _check_seed(seed)
    entropy = seed if stream is None else [seed, int(stream)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    r: int
    n: int
    values: Sequence  # float ndarray, or exact Fractions
    seed: int | None = None
    stream: int | None = None
    index_sets: tuple = field(init=False, repr=False)

    def __post_init__(self):
        check_rn(self.r, self.n)
        sets = index_sets(self.r, self.n)
        object.__setattr__(self, "index_sets", sets)
        if len(self.values) != len(sets):
            raise ParameterError(f"expected {len(sets)} coefficients, got {len(self.values)}")
        if isinstance(self.values, np.ndarray):
            vals = np.asarray(self.values, dtype=float)
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)
            bad = not np.all((vals >= 0) & (vals <= 1))
        else:
            vals = tuple(self.values)
            object.__setattr__(self, "values", vals)
            bad = any(not 0 <= v <= 1 for v in vals)
        if bad:
            raise ParameterError("coefficients must lie in [0, 1]")

    @property
    def is_exact(self) -> bool:
        return not isinstance(self.values, np.ndarray)

    def __getitem__(self, index_set) -> float:
        if isinstance(index_set, int):
            index_set = (index_set,)
        return self.values[self.index_sets.index(tuple(index_set))]

    def as_dict(self) -> dict:
        return dict(zip(self.index_sets, self.values))


@dataclass(frozen=True)
class DeviationEstimate:
    r: int
    n: int
    p: int
    q: int
    epsilon: float
    samples: int
    hit_fraction: float
    standard_error: float
    analytic_ratio_std: float
    seed: int

    def to_json_dict(self) -> dict:
        return dict(self.__dict__)


def sample_uniform(r: int, n: int, rng_seed: int, stream: int | None = None) -> CoefficientVector:
    check_rn(r, n)
    count = _check_capacity(r, n)
    values = rng_for(rng_seed, stream).random(count)
    return CoefficientVector(r, n, values, seed=rng_seed, stream=stream)


@lru_cache(maxsize=8)
def pure_stack(r: int, n: int, exact_cutoff: int = EXACT_CUTOFF) -> np.ndarray:
    """Float array ``S[k, q-1, p]`` = ``k_{p,q}(pi(r, I_k))`` over lexicographic ``I_k``.

    Up to ``exact_cutoff`` the entries are exact rationals rounded once;
    beyond it they come from log-gamma evaluation of the product formula.
    """
    sets = index_sets(r, n)
    width = r + 1 - n
    stack = np.zeros((len(sets), n, width))
    cols = np.arange(width)
    if r <= exact_cutoff:
        for k, els in enumerate(sets):
            degs = [d for d in range(1, r + 1) if d not in els]
            for p, d in enumerate(degs):
                q = d - p
                stack[k, q - 1, p] = float(pure_entry(r, n, els, p, q))
    else:
        log_top = gammaln(r - n + 1)
        for k, els in enumerate(sets):
            degs = np.array([d for d in range(1, r + 1) if d not in els], dtype=float)
            logs = log_top - gammaln(degs) - gammaln(r - degs + 1)
            for i in els:
                logs += np.log(np.abs(degs - i))
            stack[k, degs.astype(int) - cols - 1, cols] = np.exp(logs)
    stack.setflags(write=False)
    return stack


def combine(r: int, n: int, coefficients: Sequence) -> BettiTable:
    """Exact ``sum_I x_I * pi(r, I)`` over lexicographic ``I``; no range check on ``x_I``."""
    sets = index_sets(r, n)
    if len(coefficients) != len(sets):
        raise ParameterError(f"expected {len(sets)} coefficients, got {len(coefficients)}")
    width = r + 1 - n
    grid = [[Fraction(0)] * width for _ in range(n)]
    for els, x in zip(sets, coefficients):
        x = Fraction(x)
        if not x:
            continue
        degs = [d for d in range(1, r + 1) if d not in els]
        for p, d in enumerate(degs):
            grid[d - p - 1][p] += x * pure_entry(r, n, els, p, d - p)
    return BettiTable(n, r, grid, validate=False)


def table_of(coeffs: CoefficientVector, exact: bool | None = None,
             exact_cutoff: int = EXACT_CUTOFF) -> BettiTable:
    """Betti table ``sum_I x_I * pi(r, I)`` of a coefficient vector.

    Exact-valued vectors give an exact table unless ``exact=False``.  Float
    accumulation runs in lexicographic order of ``I`` so results are
    bit-reproducible.  Entries overflow to ``inf`` once ``C(r-n, p)``
    leaves the double range (around ``r = 1030``).
    """
    if exact is None:
        exact = coeffs.is_exact
    if exact:
        return combine(coeffs.r, coeffs.n, coeffs.values)
    stack = pure_stack(coeffs.r, coeffs.n, exact_cutoff)
    acc = np.zeros(stack.shape[1:])
    for k, x in enumerate(np.asarray(coeffs.values, dtype=float)):
        acc += x * stack[k]
    return BettiTable(coeffs.n, coeffs.r, acc, mode=FLOAT)


def tables_of(r: int, n: int, values: np.ndarray, exact_cutoff: int = EXACT_CUTOFF) -> np.ndarray:
    """Batched :func:`table_of`: ``values`` is ``(N, #I)``, result ``(N, n, r+1-n)``.

    Uses the same accumulation order as the single-table path, so row ``i``
    is bitwise equal to ``table_of`` of that vector.
    """
    stack = pure_stack(r, n, exact_cutoff)
    values = np.asarray(values, dtype=float)
    acc = np.zeros((values.shape[0],) + stack.shape[1:])
    for k in range(stack.shape[0]):
        acc += values[:, k, None, None] * stack[k]
    return acc


def mean_table(r: int, n: int, samples: int, master_seed: int,
               exact_cutoff: int = EXACT_CUTOFF, chunk: int = 1000):
    """Mean and standard error of ``table_of`` over ``samples`` substreams of ``master_seed``."""
    if samples < 1:
        raise ParameterError("need at least one sample")
    count = _check_capacity(r, n)
    total = None
    total_sq = None
    for start in range(0, samples, chunk):
        idx = range(start, min(samples, start + chunk))
        vals = np.stack([rng_for(master_seed, i).random(count) for i in idx])
        tabs = tables_of(r, n, vals, exact_cutoff)
        s, s2 = tabs.sum(axis=0), (tabs * tabs).sum(axis=0)
        total = s if total is None else total + s
        total_sq = s2 if total_sq is None else total_sq + s2
    mean = total / samples
    if samples > 1:
        var = np.maximum(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
        stderr = np.sqrt(var / samples)
    else:
        stderr = np.full_like(mean, np.nan)
    return BettiTable(n, r, mean, mode=FLOAT), stderr


def _check_pq(r: int, n: int, p: int, q: int) -> None:
    check_rn(r, n)
    if not (0 <= p <= r - n and 1 <= q <= n):
        raise ParameterError(f"need 0 <= p <= {r - n} and 1 <= q <= {n}, got p={p}, q={q}")


def _falling(top: int, count: int) -> int:
    """``top * (top-1) * ... `` with ``count`` factors."""
    return math.prod(range(top - count + 1, top + 1))


def expected_entry(r: int, n: int, p: int, q: int) -> Fraction:
    """Exact ``E k_{p,q}(B_r)``, via elementary symmetric sums (no enumeration)."""
    _check_pq(r, n, p, q)
    low = Fraction(sigma_b(p + q - 1, q - 1), _falling(p + q - 1, q - 1))
    high = Fraction(sigma_b(r - p - q, n - q), _falling(r - p - q, n - q))
    return math.comb(r - n, p) * low * high / 2


def expected_table(r: int, n: int) -> BettiTable:
    check_rn(r, n)
    grid = [[expected_entry(r, n, p, q) for p in range(r + 1 - n)] for q in range(1, n + 1)]
    return BettiTable(n, r, grid)


def mu(r: int, p: int, q: int, n: int) -> Fraction:
    """Leading-order ``E k_{p,q}(B_r) / C(r-n, p)``."""
    _check_pq(r, n, p, q)
    num = p ** (q - 1) * (r - p - n) ** (n - q)
    return Fraction(num, 2**n * math.factorial(q - 1) * math.factorial(n - q))


def coefficient_weights(r: int, n: int, p: int, q: int, exact: bool = False):
    """``c_I`` with ``k_{p,q}(pi(r, I)) = C(r-n, p) * c_I``, for lexicographic ``I``."""
    _check_pq(r, n, p, q)
    sets = index_sets(r, n)
    den = _falling(p + q - 1, q - 1) * _falling(r - p - q, n - q)
    if exact:
        out = []
        for els in sets:
            num = 1
            for i in els[: q - 1]:
                num *= max(p + q - i, 0)
            for i in els[q - 1 :]:
                num *= max(i - p - q, 0)
            out.append(Fraction(num, den))
        return out
    els = np.array(sets, dtype=float).reshape(len(sets), n - 1)
    num = np.ones(len(sets))
    if q > 1:
        num *= np.prod(np.maximum(p + q - els[:, : q - 1], 0), axis=1)
    if q < n:
        num *= np.prod(np.maximum(els[:, q - 1 :] - p - q, 0), axis=1)
    return num / float(den)


def _nonzero_mu(r, p, q, n) -> Fraction:
    m = mu(r, p, q, n)
    if m == 0:
        raise ParameterError(f"degenerate normalizer: mu(r={r}, p={p}, q={q}, n={n}) = 0")
    return m


def normalized_entry(coeffs: CoefficientVector, p: int, q: int) -> float:
    """``k_{p,q}(table_of(coeffs)) / (C(r-n, p) * mu)``, overflow-free."""
    m = _nonzero_mu(coeffs.r, p, q, coeffs.n)
    if coeffs.is_exact:
        w = coefficient_weights(coeffs.r, coeffs.n, p, q, exact=True)
        return float(sum((a * Fraction(x) for a, x in zip(w, coeffs.values)), Fraction(0)) / m)
    w = coefficient_weights(coeffs.r, coeffs.n, p, q)
    return float(np.dot(w, coeffs.values)) / float(m)


def analytic_ratio_std(r: int, n: int, p: int, q: int) -> float:
    """Exact standard deviation of :func:`normalized_entry` under uniform sampling."""
    m = _nonzero_mu(r, p, q, n)
    if math.comb(r, n - 1) <= 20000:
        w = coefficient_weights(r, n, p, q, exact=True)
        var = float(sum((c * c for c in w), Fraction(0)) / 12)
    else:
        w = coefficient_weights(r, n, p, q)
        var = math.fsum(w * w) / 12
    return math.sqrt(var) / float(m)


def normalized_samples(r: int, n: int, p: int, q: int, samples: int, master_seed: int,
                       workers: int = 1) -> np.ndarray:
    """Normalized entry for substreams ``0..samples-1`` of ``master_seed``."""
    if samples < 1:
        raise ParameterError("need at least one sample")
    m = float(_nonzero_mu(r, p, q, n))
    w = coefficient_weights(r, n, p, q)
    count = len(w)

    def run(idx):
        return [float(np.dot(w, rng_for(master_seed, i).random(count))) / m for i in idx]

    if workers <= 1:
        return np.array(run(range(samples)))
    bounds = np.linspace(0, samples, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(run, [range(a, b) for a, b in zip(bounds, bounds[1:])])
        return np.concatenate([np.array(part, dtype=float) for part in parts])


def estimate_deviation_probability(r: int, n: int, p: int, q: int, epsilon: float,
                                   N: int, master_seed: int, workers: int = 1) -> DeviationEstimate:
    """Monte Carlo estimate of ``P(|normalized_entry - 1| > epsilon)``."""
    vals = normalized_samples(r, n, p, q, N, master_seed, workers)
    hits = int(np.count_nonzero(np.abs(vals - 1.0) > epsilon))
    frac = hits / N
    return DeviationEstimate(
        r=r, n=n, p=p, q=q, epsilon=float(epsilon), samples=N,
        hit_fraction=frac,
        standard_error=math.sqrt(frac * (1 - frac) / N),
        analytic_ratio_std=analytic_ratio_std(r, n, p, q),
        seed=master_seed,
    )
