"""Hurwitz class numbers by reduced-form enumeration, and the identities
tying them to the curve family.

H(N) is the weighted number of SL_2(Z)-classes of positive definite binary
quadratic forms ax^2 + bxy + cy^2 of discriminant b^2 - 4ac = -N, where the
square class (a, 0, a) counts 1/2 and the hexagonal class (a, a, a) counts
1/3.  Values are stored as the integers 12 H(N); no floating point enters
this module.  H(N) is defined for N > 0 with N = 0 or 3 mod 4.

Two exact consequences are exposed as operations: the mass identity
sum_{r^2 <= 4p} H(4p - r^2) = 2p, and the family moment identity

    sum over the good residue grid of a_p^g  =  (p-1)/2 sum_r r^g H(r^2 - 4p),

whose right side the trace solver later inverts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "ReducedForm",
    "HurwitzTable",
    "reduced_forms",
    "hurwitz",
    "twelve_hurwitz",
    "build_hurwitz_table",
    "eichler_mass",
    "family_moment_classnum",
]


@dataclass(frozen=True)
class ReducedForm:
    """Reduced positive definite form: |b| <= a <= c, with b >= 0 whenever
    |b| = a or a = c."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def weight(self) -> Fraction:
        if self.a == self.b == self.c:
            return Fraction(1, 3)
        if self.b == 0 and self.a == self.c:
            return Fraction(1, 2)
        return Fraction(1)


def _check_class_number_arg(n: int) -> None:
    if n <= 0 or n % 4 not in (0, 3):
        raise ValueError("class numbers need N > 0 with N = 0 or 3 mod 4")


def reduced_forms(n: int) -> list[ReducedForm]:
    """All reduced forms of discriminant -N.

    b runs over the parity class of N with 3b^2 <= N; each (a, b, c) with
    0 < b < a < c contributes its negative-b twin as well.
    """
    _check_class_number_arg(n)
    forms: list[ReducedForm] = []
    b = n % 2
    while 3 * b * b <= n:
        m4 = b * b + n
        assert m4 % 4 == 0
        m = m4 // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                forms.append(ReducedForm(a, b, c))
                if 0 < b < a < c:
                    forms.append(ReducedForm(a, -b, c))
            a += 1
        b += 2
    return forms


def hurwitz(n: int) -> Fraction:
    """H(N) as an exact rational, by direct enumeration."""
    return sum((f.weight() for f in reduced_forms(n)), Fraction(0))


def twelve_hurwitz(n: int) -> int:
    """12 H(N) as an integer."""
    value = 12 * hurwitz(n)
    assert value.denominator == 1
    return int(value)


@dataclass
class HurwitzTable:
    """12 H(N) for all N <= max_n; slots with N = 1, 2 mod 4 stay zero."""

    max_n: int
    twelve_h: np.ndarray

    def twelve(self, n: int) -> int:
        _check_class_number_arg(n)
        if n > self.max_n:
            raise ValueError(f"table covers N <= {self.max_n}")
        return int(self.twelve_h[n])

    def h(self, n: int) -> Fraction:
        return Fraction(self.twelve(n), 12)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("N,twelve_h\n")
            for n in range(self.max_n + 1):
                fh.write(f"{n},{int(self.twelve_h[n])}\n")


def build_hurwitz_table(max_n: int) -> HurwitzTable:
    """Bin one sweep over reduced triples (b, a, c) by discriminant.

    O(max_n^(3/2)) total instead of a per-N scan.
    """
    if max_n < 3:
        raise ValueError("max_n must be at least 3")
    t12 = np.zeros(max_n + 1, dtype=np.int64)
    b = 0
    while 3 * b * b <= max_n:
        a = max(b, 1)
        while 4 * a * a - b * b <= max_n:
            c = a
            n = 4 * a * c - b * b
            while n <= max_n:
                if a == b == c:
                    w12 = 4
                elif b == 0 and a == c:
                    w12 = 6
                else:
                    w12 = 12
                mult = 2 if 0 < b < a < c else 1
                t12[n] += mult * w12
                c += 1
                n += 4 * a
            a += 1
        b += 1
    return HurwitzTable(max_n=max_n, twelve_h=t12)


def _signed_power_class_sum(p: int, g: int, table: HurwitzTable) -> int:
    """sum over |r| <= 2 sqrt(p) of r^g * 12 H(4p - r^2); 0 for odd g."""
    if g % 2 == 1:
        return 0
    rmax = math.isqrt(4 * p)
    if rmax * rmax == 4 * p:  # cannot happen for prime p >= 5
        rmax -= 1
    total = table.twelve(4 * p) if g == 0 else 0
    for r in range(1, rmax + 1):
        total += 2 * r ** g * table.twelve(4 * p - r * r)
    return total


def _table_for(p: int, table: HurwitzTable | None) -> HurwitzTable:
    if table is None:
        return build_hurwitz_table(4 * p)
    if table.max_n < 4 * p:
        raise ValueError("Hurwitz table does not cover 4p")
    return table


def eichler_mass(p: int, table: HurwitzTable | None = None) -> int:
    """Residual 12 (sum_{r^2 <= 4p} H(4p - r^2) - 2p); zero is the contract."""
    if p < 5:
        raise ValueError("mass identity is used for p >= 5 only")
    table = _table_for(p, table)
    return _signed_power_class_sum(p, 0, table) - 24 * p


def family_moment_classnum(p: int, g: int, table: HurwitzTable | None = None) -> int:
    """(p-1)/2 sum_r r^g H(r^2 - 4p), exactly; equals the grid moment
    sum over good residue pairs of a_p^g."""
    if p < 5:
        raise ValueError("needs p >= 5")
    if g < 0:
        raise ValueError("g must be nonnegative")
    if g % 2 == 1:
        return 0
    table = _table_for(p, table)
    value = (p - 1) * _signed_power_class_sum(p, g, table)
    assert value % 24 == 0
    return value // 24
