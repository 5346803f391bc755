"""Multiplicative family averages of normalized coefficients over (a, b) grids.

For n with prime factors >= 5 and radical s(n), the average

    S(n) = s(n)^{-2} sum over the s(n) x s(n) grid with (ab Delta, n) = 1
           of the normalized coefficient at n

is multiplicative, and at prime powers splits as S = S0 - S1 - S2 where S0
averages over the full good grid mod p and S1, S2 subtract the one-parameter
families b = 0 and a = 0.  S0 collapses to an exact trace formula,

    S0(p^m) = (1 - 1/p) p^{-(m/2 + 1)} trace_{m+2}(T_p)   (0 for odd m),

which is the identity this module exercises from both ends: `s0_brute` sums
the residue grid, `s0_formula` evaluates the trace expression.

Grid sums are the test oracle; the production path for S(n) multiplies the
prime-power values (exact traces and rationals, floats only at the end).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith_curves import ApTable, SumCondition, ap_table, _legendre_table
from .chebycomb import f_eval
from .errors import BudgetError
from .hecke import TraceStore, _default_store

__all__ = [
    "FactoredInteger",
    "BoxAverageResult",
    "s0_brute",
    "s0_formula",
    "s12_brute",
    "s_prime_power",
    "s_multiplicative",
    "s0_multiplicative",
    "s_grid_brute",
    "box_average",
    "S_BRUTE_MAX_P",
]

S_BRUTE_MAX_P = 300


@dataclass(frozen=True)
class FactoredInteger:
    """n >= 1 with its factorization into primes >= 5."""

    n: int
    factors: tuple[tuple[int, int], ...]

    @classmethod
    def from_int(cls, n: int) -> "FactoredInteger":
        if n < 1:
            raise ValueError("n must be >= 1")
        m = n
        factors = []
        d = 2
        while d * d <= m:
            if m % d == 0:
                e = 0
                while m % d == 0:
                    m //= d
                    e += 1
                factors.append((d, e))
            d += 1
        if m > 1:
            factors.append((m, 1))
        if any(p < 5 for p, _ in factors):
            raise ValueError("prime factors below 5 are excluded throughout")
        return cls(n=n, factors=tuple(factors))

    @property
    def radical(self) -> int:
        out = 1
        for p, _ in self.factors:
            out *= p
        return out

    @property
    def divisor_count(self) -> int:
        out = 1
        for _, e in self.factors:
            out *= e + 1
        return out

    @property
    def omega(self) -> int:
        return len(self.factors)


_TABLE_CACHE: dict[int, ApTable] = {}


def _cached_table(p: int) -> ApTable:
    if p not in _TABLE_CACHE:
        _TABLE_CACHE[p] = ap_table(p)
    return _TABLE_CACHE[p]


def s0_brute(p: int, m: int, table: ApTable | None = None, max_p: int = S_BRUTE_MAX_P) -> float:
    """Grid average of the p^m coefficient over good pairs, from the trace table."""
    if p > max_p:
        raise BudgetError(f"grid average capped at p <= {max_p}")
    table = table if table is not None else _cached_table(p)
    sqrt_p = math.sqrt(p)
    total = math.fsum(
        count * f_eval(m, r / sqrt_p) for r, count in table.good_trace_counts().items()
    )
    return total / p ** 2


def s0_formula(p: int, m: int, store: TraceStore | None = None) -> float:
    """Closed form of the good-grid average of the p^m coefficient.

    For even m = 2k the class-number moment identity plus the triangular
    trace solve collapse the grid sum to

        S0(p^m) = -(1 - 1/p) p^(-(k+1)) (trace_{m+2}(T_p) + 1),

    and odd m gives 0 by the r -> -r symmetry.  (A frequently quoted variant
    reads +(1 - 1/p) p^(-(k+1)) trace_{m+2}(T_p); the exhaustive grid oracle
    matches the form above, with the shift and the sign, to float accuracy.)
    S0(p^0) is the good-pair density 1 - 1/p.
    """
    if m % 2 == 1:
        return 0.0
    if m == 0:
        return float(Fraction(p - 1, p))
    store = store or _default_store()
    trace = store.trace(m + 2, p)
    return float(Fraction(-(p - 1) * (trace + 1), p ** (m // 2 + 2)))


def s12_brute(p: int, m: int, max_p: int = S_BRUTE_MAX_P) -> tuple[float, float]:
    """One-parameter family averages (b = 0 and a = 0 lines), directly.

    Every curve on the punctured axes has good reduction at p, so the
    normalized coefficient is f_m of the normalized trace.
    """
    if p > max_p:
        raise BudgetError(f"grid average capped at p <= {max_p}")
    chi = _legendre_table(p)
    xs = np.arange(p, dtype=np.int64)
    cubes = xs * xs % p * xs % p
    sqrt_p = math.sqrt(p)
    params = np.arange(1, p, dtype=np.int64)
    # y^2 = x^3 + a x
    ap_a = -chi[(cubes[None, :] + params[:, None] * xs[None, :]) % p].sum(axis=1)
    # y^2 = x^3 + b
    ap_b = -chi[(cubes[None, :] + params[:, None]) % p].sum(axis=1)
    s1 = float(f_eval(m, ap_a / sqrt_p).sum()) / p ** 2
    s2 = float(f_eval(m, ap_b / sqrt_p).sum()) / p ** 2
    return s1, s2


def s_prime_power(p: int, m: int, store: TraceStore | None = None) -> float:
    """S(p^m) = S0 - S1 - S2 via the trace formula and the axis sums."""
    s1, s2 = s12_brute(p, m)
    return s0_formula(p, m, store) - s1 - s2


def s_multiplicative(n: FactoredInteger, store: TraceStore | None = None) -> float:
    """S(n) as the product of its prime-power values."""
    out = 1.0
    for p, m in n.factors:
        out *= s_prime_power(p, m, store)
    return out


def s0_multiplicative(n: FactoredInteger, store: TraceStore | None = None) -> float:
    """S0(n) (the variant without the ab coprimality), multiplicatively."""
    out = 1.0
    for p, m in n.factors:
        out *= s0_formula(p, m, store)
    return out


def _grid_coeff_product(
    n: FactoredInteger,
    a_vals: np.ndarray,
    b_vals: np.ndarray,
    condition: SumCondition,
) -> np.ndarray:
    """Normalized coefficient at n on an (a, b) grid, with the summation mask
    applied (excluded pairs contribute 0).  Shape (len(a_vals), len(b_vals))."""
    coeff = np.ones((len(a_vals), len(b_vals)))
    delta = 4 * a_vals[:, None] ** 3 + 27 * b_vals[None, :] ** 2
    mask = delta != 0
    for p, m in n.factors:
        table = _cached_table(p)
        ia = (a_vals % p).astype(np.int64)
        ib = (b_vals % p).astype(np.int64)
        ap = table.ap[np.ix_(ia, ib)]
        good = table.good[np.ix_(ia, ib)]
        mask &= good
        if condition is SumCondition.SKIP_BAD_AND_AB:
            mask &= (ia[:, None] != 0) & (ib[None, :] != 0)
        coeff *= f_eval(m, ap / math.sqrt(p))
    return np.where(mask, coeff, 0.0)


def s_grid_brute(n: FactoredInteger, max_s: int = S_BRUTE_MAX_P) -> float:
    """The defining s(n) x s(n) grid average; oracle for the product path."""
    if n.n == 1:
        return 1.0
    s = n.radical
    if s > max_s:
        raise BudgetError(f"grid average capped at radical <= {max_s}")
    vals = np.arange(1, s + 1, dtype=np.int64)
    grid = _grid_coeff_product(n, vals, vals, SumCondition.SKIP_BAD_AND_AB)
    return float(grid.sum()) / s ** 2


@dataclass(frozen=True)
class BoxAverageResult:
    total: float
    prediction: float
    residual: float
    bound_shape: float  # d(n) s(n)^(1/2+eps) (A+B), reported with eps = 0.1


def box_average(
    n: FactoredInteger,
    A: int,
    B: int,
    condition: SumCondition = SumCondition.SKIP_BAD_AND_AB,
    store: TraceStore | None = None,
    max_pairs: int = 4_000_000,
) -> BoxAverageResult:
    """Box sum of the coefficient at n over |a| <= A, |b| <= B versus its
    multiplicative prediction 4AB S(n) (or 4AB S0(n) without the ab condition)."""
    if (2 * A + 1) * (2 * B + 1) > max_pairs:
        raise BudgetError("box too large for direct evaluation")
    a_vals = np.arange(-A, A + 1, dtype=np.int64)
    b_vals = np.arange(-B, B + 1, dtype=np.int64)
    total = float(_grid_coeff_product(n, a_vals, b_vals, condition).sum())
    if condition is SumCondition.SKIP_BAD_AND_AB:
        prediction = 4.0 * A * B * s_multiplicative(n, store)
    else:
        prediction = 4.0 * A * B * s0_multiplicative(n, store)
    residual = total - prediction
    bound = n.divisor_count * n.radical ** 0.6 * (A + B)
    return BoxAverageResult(total=total, prediction=prediction, residual=residual, bound_shape=bound)
