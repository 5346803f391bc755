"""Prime windows, point counts of y^2 = x^3 + ax + b over F_p, and interval counts.

Only primes p >= 5 ever reach the curve operations (the window x >= 10 puts
every window prime above 5 automatically).  Bad reduction is detected by
p | Delta(a, b) with Delta = 4a^3 + 27b^2; a pair with p | Delta reduces to a
nodal cubic (trace +1 when the tangents at the node split over F_p, -1
otherwise) or to a cusp (trace 0, exactly when a = b = 0 mod p).

The full residue grid of traces for one prime, needed by the family sums, is
built from a single Legendre lookup table: for each residue a the histogram
of x^3 + ax over x is circularly correlated against the Legendre table, which
gives -a_p for every b at once.  Rounding the length-p FFT correlation back
to integers is safe because every value is an integer bounded by p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .chebycomb import f_eval
from .errors import BudgetError

__all__ = [
    "Reduction",
    "TraceValue",
    "CurveParams",
    "PrimeWindow",
    "Interval",
    "ApTable",
    "SumCondition",
    "primes_in_window",
    "legendre",
    "curve_ap",
    "ap_table",
    "normalized_coeff",
    "count_in_interval",
    "AP_TABLE_MAX_P",
]

AP_TABLE_MAX_P = 3000

_GOOD, _NODE, _CUSP = 0, 1, 2


class Reduction(Enum):
    GOOD = "good"
    NODE = "node"
    CUSP = "cusp"


class SumCondition(Enum):
    """Which primes a per-curve prime sum skips.

    SKIP_BAD_ONLY drops p | Delta; SKIP_BAD_AND_AB also drops p | ab (for the
    axis curves a = 0 or b = 0 this drops every prime).
    """

    SKIP_BAD_ONLY = "skip-bad"
    SKIP_BAD_AND_AB = "skip-bad-and-ab"


@dataclass(frozen=True)
class TraceValue:
    kind: Reduction
    ap: int


@dataclass(frozen=True)
class CurveParams:
    a: int
    b: int

    @property
    def delta(self) -> int:
        return 4 * self.a ** 3 + 27 * self.b ** 2


@dataclass(frozen=True)
class PrimeWindow:
    """Primes p with x/2 < p <= x, in ascending order."""

    x: float
    primes: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.primes)


def _snap(v: float) -> float:
    """Clean the float noise of 2 cos(pi/2) and friends: a trace value can
    only collide with an endpoint at 0 (a_p/sqrt(p) is irrational otherwise),
    so only that endpoint needs to be exact."""
    return 0.0 if abs(v) < 1e-12 else v


@dataclass(frozen=True)
class Interval:
    """Subinterval [2 cos(beta), 2 cos(alpha)] of [-2, 2], angles in radians.

    Membership is closed by default; ``half_open`` switches to [lo, hi).
    """

    alpha: float
    beta: float
    half_open: bool = False

    def __post_init__(self):
        if not (0.0 <= self.alpha < self.beta <= math.pi + 1e-15):
            raise ValueError("need 0 <= alpha < beta <= pi")

    @property
    def lo(self) -> float:
        return _snap(2.0 * math.cos(self.beta))

    @property
    def hi(self) -> float:
        return _snap(2.0 * math.cos(self.alpha))

    def contains(self, value: float) -> bool:
        if self.half_open:
            return self.lo <= value < self.hi
        return self.lo <= value <= self.hi


def primes_in_window(x: float) -> PrimeWindow:
    """Sieve-exact list of primes in (x/2, x]; requires x >= 10."""
    if x < 10:
        raise ValueError("window operations require x >= 10")
    limit = int(math.floor(x))
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            start = q * q
            sieve[start:limit + 1:q] = b"\x00" * ((limit - start) // q + 1)
    primes = tuple(q for q in range(2, limit + 1) if sieve[q] and q > x / 2)
    return PrimeWindow(x=x, primes=primes)


def legendre(n: int, p: int) -> int:
    """Quadratic residue symbol (n/p) in {-1, 0, 1} for odd p.

    p is assumed prime; the check here only rejects even moduli.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("legendre symbol needs an odd prime modulus")
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def _legendre_table(p: int) -> np.ndarray:
    """chi(c) for c = 0..p-1 as an int8 array (read-only)."""
    tab = np.full(p, -1, dtype=np.int8)
    squares = (np.arange(p, dtype=np.int64) ** 2) % p
    tab[squares] = 1
    tab[0] = 0
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=None)
def _sqrt_lists(p: int) -> tuple[tuple[int, ...], ...]:
    """For each residue r, the y with y^2 = r mod p."""
    roots: list[list[int]] = [[] for _ in range(p)]
    for y in range(p):
        roots[(y * y) % p].append(y)
    return tuple(tuple(r) for r in roots)


def _classify_singular(p: int, a: int, b: int) -> TraceValue:
    """Reduction type of a singular cubic (p | Delta, p >= 5)."""
    a %= p
    b %= p
    if a == 0 and b == 0:
        return TraceValue(Reduction.CUSP, 0)
    # double root e = -3b / (2a); tangents split iff 3e is a square mod p
    e = (-3 * b) * pow(2 * a, p - 2, p) % p
    sign = legendre(3 * e, p)
    return TraceValue(Reduction.NODE, sign)


def curve_ap(p: int, curve: CurveParams) -> TraceValue:
    """Trace of Frobenius at p, or the nodal/cuspidal marker if p | Delta."""
    if p < 5:
        raise ValueError("curve operations require p >= 5")
    if curve.delta == 0:
        raise ValueError("Delta(a, b) = 0 is not an elliptic curve")
    a, b = curve.a % p, curve.b % p
    if curve.delta % p == 0:
        return _classify_singular(p, a, b)
    chi = _legendre_table(p)
    xs = np.arange(p, dtype=np.int64)
    vals = (xs * xs % p * xs + a * xs + b) % p
    ap = -int(chi[vals].sum())
    return TraceValue(Reduction.GOOD, ap)


def _trace_rows(p: int, a_residues: np.ndarray) -> np.ndarray:
    """-sum_x chi(x^3 + a x + b) for the given a residues and every b.

    Returns an int64 array of shape (len(a_residues), p); entries at pairs
    with p | Delta carry the raw character sum and must be overwritten by the
    caller.  One batched complex FFT computes all circular correlations.
    """
    chi = _legendre_table(p).astype(np.float64)
    xs = np.arange(p, dtype=np.int64)
    cubes = xs * xs % p * xs % p
    counts = np.empty((len(a_residues), p), dtype=np.float64)
    for i, a in enumerate(a_residues):
        t = (cubes + int(a) * xs) % p
        counts[i] = np.bincount(t, minlength=p)
    corr = np.fft.ifft(np.conj(np.fft.fft(counts, axis=1)) * np.fft.fft(chi)).real
    return -np.rint(corr).astype(np.int64)


def _singular_pairs(p: int, a: int) -> list[int]:
    """Residues b with p | Delta(a, b), for a fixed residue a."""
    inv27 = pow(27, p - 2, p)
    rhs = (-4 * a * a % p * a) * inv27 % p
    return list(_sqrt_lists(p)[rhs])


@dataclass
class ApTable:
    """Full residue grid of traces for one prime.

    ``ap[a, b]`` is the trace and ``kind[a, b]`` one of good/node/cusp.
    Exactly p of the p^2 pairs are singular.  Immutable after construction.
    """

    p: int
    ap: np.ndarray
    kind: np.ndarray

    def entry(self, a: int, b: int) -> TraceValue:
        k = int(self.kind[a % self.p, b % self.p])
        kinds = (Reduction.GOOD, Reduction.NODE, Reduction.CUSP)
        return TraceValue(kinds[k], int(self.ap[a % self.p, b % self.p]))

    @property
    def good(self) -> np.ndarray:
        return self.kind == _GOOD

    def good_trace_counts(self) -> dict[int, int]:
        """Histogram of traces over the good pairs."""
        vals, counts = np.unique(self.ap[self.good], return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}


def ap_table(p: int, max_p: int = AP_TABLE_MAX_P) -> ApTable:
    """Build the p x p trace grid; O(p^2 log p) work, O(p^2) memory."""
    if p < 5:
        raise ValueError("curve operations require p >= 5")
    if p > max_p:
        raise BudgetError(f"ap_table capped at p <= {max_p}")
    ap = _trace_rows(p, np.arange(p))
    kind = np.zeros((p, p), dtype=np.uint8)
    for a in range(p):
        for b in _singular_pairs(p, a):
            tv = _classify_singular(p, a, b)
            kind[a, b] = _NODE if tv.kind is Reduction.NODE else _CUSP
            ap[a, b] = tv.ap
    ap.setflags(write=False)
    kind.setflags(write=False)
    return ApTable(p=p, ap=ap, kind=kind)


def normalized_coeff(tv: TraceValue, p: int, m: int) -> float:
    """Normalized coefficient at p^m: f_m(a_p/sqrt(p)) at good primes,
    a_p^m at bad ones (the bad trace is already in {-1, 0, 1})."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if tv.kind is Reduction.GOOD:
        return f_eval(m, tv.ap / math.sqrt(p))
    return float(tv.ap ** m) if m else 1.0


def count_in_interval(curve: CurveParams, x: float, interval: Interval) -> int:
    """Number of window primes of good reduction whose normalized trace lies
    in the interval."""
    if curve.delta == 0:
        raise ValueError("Delta(a, b) = 0 is not an elliptic curve")
    window = primes_in_window(x)
    count = 0
    for p in window.primes:
        if curve.delta % p == 0:
            continue
        tv = curve_ap(p, curve)
        if interval.contains(tv.ap / math.sqrt(p)):
            count += 1
    return count
