"""Exact combinatorics behind the trace identities and the moment pipeline.

The polynomial family

    f_m(x) = sum_{j=0}^{floor(m/2)} (-1)^j C(m-j, j) x^(m-2j)

satisfies f_m(2 cos t) = sin((m+1)t)/sin(t) and the three-term recurrence
f_{m+1} = x f_m - f_{m-1}.  It converts a normalized Frobenius trace into the
normalized prime-power coefficient: at a prime p of good reduction the p^m
coefficient of a curve equals f_m(a_p/sqrt(p)).  The product rule

    f_i * f_j = sum_{l=0}^{min(i,j)} f_{i+j-2l}

is the engine for `u_product_expand`, which writes a product of prime-power
coefficients as an integer combination of single prime-power coefficients.

Two further exact tools live here because everything downstream trusts them:
Melzak's finite-difference identity for polynomials, used to prove that the
triangular system relating class-number moments to operator traces has unit
diagonal (`a_lk`), and the signed coefficients attached to set partitions
that separate sums over pairwise-distinct primes into products of plain prime
sums (`partition_coeff`, `separate_distinct_sums`).

All arithmetic in this module is exact (int / Fraction); floats never enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetError

__all__ = [
    "PowerPoly",
    "f_poly",
    "f_eval",
    "u_product_expand",
    "melzak_eval",
    "a_lk",
    "set_partitions",
    "partition_coeff",
    "separate_distinct_sums",
    "gaussian_moment_constant",
    "all_exponent_multisets",
]


@dataclass(frozen=True)
class PowerPoly:
    """Polynomial with exact coefficients in the power basis.

    ``coeffs[d]`` multiplies x^d; trailing zeros are allowed but the
    constructor strips them so ``degree`` is honest.
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction arguments."""
        acc = x * 0 + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc


def f_poly(m: int) -> PowerPoly:
    """Exact coefficients of f_m in the power basis.

    f_0 = 1, f_1 = x, f_2 = x^2 - 1, f_3 = x^3 - 2x, ...
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    coeffs = [0] * (m + 1)
    for j in range(m // 2 + 1):
        coeffs[m - 2 * j] = (-1) ** j * math.comb(m - j, j)
    return PowerPoly(tuple(coeffs))


def f_eval(m: int, x):
    """Evaluate f_m at x via the three-term recurrence.

    Works for float, int and Fraction inputs.  On [-2, 2] the values are
    bounded by m + 1, so the forward recurrence stays well conditioned.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return x * 0 + 1
    prev, cur = x * 0 + 1, x
    for _ in range(m - 1):
        prev, cur = cur, x * cur - prev
    return cur


def u_product_expand(ms: Sequence[int]) -> dict[int, int]:
    """Expand a product of prime-power coefficients in the single-power basis.

    Given exponents (m_1, ..., m_r), returns the integer table D with

        prod_i f_{m_i} = sum_m D[m] * f_m,

    computed by left-folding the product rule
    f_a * f_b = sum_{l<=min(a,b)} f_{a+b-2l}.  The support is contained in
    [0, m_1+...+m_r] and has constant parity; all values are nonnegative.
    """
    ms = list(ms)
    if not ms:
        raise ValueError("need at least one exponent")
    if any(m < 1 for m in ms):
        raise ValueError("exponents must be >= 1")
    acc: dict[int, int] = {ms[0]: 1}
    for m in ms[1:]:
        nxt: dict[int, int] = {}
        for a, coeff in acc.items():
            for l in range(min(a, m) + 1):
                key = a + m - 2 * l
                nxt[key] = nxt.get(key, 0) + coeff
        acc = nxt
    return acc


def _rational_binomial(top: Fraction, n: int) -> Fraction:
    """Generalized binomial C(top, n) = top (top-1) ... (top-n+1) / n!."""
    num = Fraction(1)
    for i in range(n):
        num *= top - i
    return num / math.factorial(n)


def melzak_eval(f: PowerPoly, x, y, n: int) -> tuple[Fraction, Fraction]:
    """Both sides of Melzak's identity, evaluated exactly.

    For any polynomial f of degree <= n and x outside {0, -1, ..., -n}:

        f(x+y) = x C(x+n, n) sum_{a=0}^n (-1)^a C(n, a) f(y-a) / (x+a).

    Returns (lhs, rhs) as Fractions; callers assert equality.
    """
    if f.degree > n:
        raise ValueError("polynomial degree exceeds n")
    x = Fraction(x)
    y = Fraction(y)
    if x.denominator == 1 and -n <= x <= 0:
        raise ValueError(f"x={x} is a pole of the identity")
    lhs = Fraction(f(x + y))
    total = Fraction(0)
    for a in range(n + 1):
        total += (-1) ** a * math.comb(n, a) * Fraction(f(y - a)) / (x + a)
    rhs = x * _rational_binomial(x + n, n) * total
    return lhs, rhs


def a_lk(l: int, k: int) -> Fraction:
    """The triangular-solve coefficient

        A_{l,k} = (2l+1) sum_{j=l}^{k} (-1)^(k-j) C(k+j, k-j) (2j)! / ((j-l)! (j+l+1)!),

    evaluated as the defining sum in exact rationals.  Melzak's identity
    forces A_{l,k} = 0 for l < k and A_{k,k} = 1; tests assert this.
    """
    if not 0 <= l <= k:
        raise ValueError("need 0 <= l <= k")
    total = Fraction(0)
    for j in range(l, k + 1):
        term = Fraction(math.factorial(2 * j), math.factorial(j - l) * math.factorial(j + l + 1))
        total += (-1) ** (k - j) * math.comb(k + j, k - j) * term
    return (2 * l + 1) * total


def set_partitions(items: Iterable) -> Iterator[tuple[tuple, ...]]:
    """All partitions of ``items`` into nonempty blocks (tuples of tuples)."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + ((first,) + smaller[i],) + smaller[i + 1:]
        yield ((first,),) + smaller


def partition_coeff(blocks: Sequence[Sequence[int]]) -> int:
    """Signed coefficient (-1)^(n-k) * prod (|block|-1)! of a set partition.

    ``blocks`` must be disjoint nonempty sets covering {1, ..., n}.
    """
    flat = [i for block in blocks for i in block]
    n = len(flat)
    if n == 0 or any(len(b) == 0 for b in blocks):
        raise ValueError("blocks must be nonempty")
    if set(flat) != set(range(1, n + 1)) or len(set(flat)) != n:
        raise ValueError("blocks must partition {1, ..., n}")
    k = len(blocks)
    coeff = (-1) ** (n - k)
    for block in blocks:
        coeff *= math.factorial(len(block) - 1)
    return coeff


def separate_distinct_sums(values: Sequence[Mapping[int, object]], n: int):
    """Sum over pairwise-distinct prime tuples, computed two ways.

    ``values[i]`` maps each prime to the i-th factor's value there.  The
    direct route enumerates all ordered n-tuples of distinct primes; the
    partition route rewrites the sum as

        sum_P A(P) prod_{blocks B} sum_p prod_{i in B} values[i][p].

    Returns (direct, partitioned); the two agree identically (exactly so for
    Fraction inputs).  Guarded at n <= 6 since the direct route is O(P^n).
    """
    if n > 6:
        raise BudgetError("distinct-tuple enumeration capped at n = 6")
    if len(values) != n:
        raise ValueError("values must supply one map per index")
    keys = list(values[0].keys())
    for v in values[1:]:
        if set(v.keys()) != set(keys):
            raise ValueError("all index maps must share the same prime support")

    direct = 0
    for tup in permutations(keys, n):
        term = 1
        for i, p in enumerate(tup):
            term = term * values[i][p]
        direct += term

    partitioned = 0
    for blocks in set_partitions(range(n)):
        coeff = (-1) ** (n - len(blocks))
        for block in blocks:
            coeff *= math.factorial(len(block) - 1)
        contrib = 1
        for block in blocks:
            block_sum = 0
            for p in keys:
                term = 1
                for i in block:
                    term = term * values[i][p]
                block_sum += term
            contrib = contrib * block_sum
        partitioned += coeff * contrib
    return direct, partitioned


def gaussian_moment_constant(t: int) -> int:
    """t-th moment of a standard Gaussian: 0 for odd t, (t-1)!! for even t."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if t % 2 == 1:
        return 0
    return math.factorial(t) // (2 ** (t // 2) * math.factorial(t // 2))


def all_exponent_multisets(total: int) -> Iterator[tuple[int, ...]]:
    """Nonincreasing tuples of positive integers with sum <= total."""

    def rec(remaining: int, cap: int, prefix: tuple[int, ...]):
        if prefix:
            yield prefix
        for first in range(min(cap, remaining), 0, -1):
            yield from rec(remaining - first, first, prefix + (first,))

    yield from rec(total, total, ())
