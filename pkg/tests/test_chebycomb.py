import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_

from stmoments.chebycomb import (
    PowerPoly,
    a_lk,
    all_exponent_multisets,
    f_eval,
    f_poly,
    gaussian_moment_constant,
    melzak_eval,
    partition_coeff,
    separate_distinct_sums,
    set_partitions,
    u_product_expand,
)
from stmoments.errors import BudgetError


def direct_coeffs(m: int) -> list[int]:
    """The defining alternating-binomial coefficients, written independently."""
    out = [0] * (m + 1)
    for j in range(m // 2 + 1):
        out[m - 2 * j] = (-1) ** j * math.comb(m - j, j)
    return out


def poly_mul(f: tuple, g: tuple) -> tuple:
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        for j, gj in enumerate(g):
            out[i + j] += fi * gj
    return tuple(out)


def to_f_basis(coeffs: tuple) -> dict[int, int]:
    """Rewrite a power-basis polynomial in the f_m basis by peeling leading
    terms; independent of the product-rule fold."""
    work = list(coeffs)
    out: dict[int, int] = {}
    while work:
        deg = len(work) - 1
        lead = work[-1]
        if lead:
            out[deg] = lead
            for d, c in enumerate(f_poly(deg).coeffs):
                work[d] -= lead * c
        work.pop()
    return {k: v for k, v in out.items() if v}


def test_base_cases():
    assert f_poly(0).coeffs == (1,)
    assert f_poly(1).coeffs == (0, 1)
    assert f_poly(2).coeffs == (-1, 0, 1)
    assert f_poly(3).coeffs == (0, -2, 0, 1)


@pytest.mark.parametrize("m", list(range(25)) + [100, 200])
def test_f_poly_matches_defining_formula(m):
    assert list(f_poly(m).coeffs) == direct_coeffs(m)


@pytest.mark.parametrize("m", range(1, 201))
def test_three_term_recurrence_exact(m):
    lhs = f_poly(m + 1).coeffs
    x_fm = (0,) + f_poly(m).coeffs
    fm1 = f_poly(m - 1).coeffs + (0,) * (m + 2 - len(f_poly(m - 1).coeffs))
    rhs = tuple(a - b for a, b in zip(x_fm, fm1[: len(x_fm)]))
    assert lhs == PowerPoly(rhs).coeffs


@given(st_.integers(0, 40), st_.integers(0, 40))
@settings(max_examples=60, deadline=None)
def test_product_rule(i, j):
    product = poly_mul(f_poly(i).coeffs, f_poly(j).coeffs)
    expected = [0] * (i + j + 1)
    for l in range(min(i, j) + 1):
        for d, c in enumerate(f_poly(i + j - 2 * l).coeffs):
            expected[d] += c
    assert list(product) == expected


def test_bound_on_the_interval():
    assert f_eval(2, 2.0) == pytest.approx(3.0)
    assert f_eval(3, 0.0) == 0.0
    assert f_eval(2, -3 / math.sqrt(5)) == pytest.approx(0.8)
    for m in (5, 17, 50):
        for k in range(101):
            x = -2 + 4 * k / 100
            assert abs(f_eval(m, x)) <= m + 1 + 1e-9


def test_angle_identity():
    # 2 cos(m t) = f_m(2 cos t) - f_{m-2}(2 cos t)
    for m in range(2, 30):
        for k in range(1, 40):
            theta = math.pi * k / 40
            x = 2 * math.cos(theta)
            lhs = f_eval(m, x) - f_eval(m - 2, x)
            assert lhs == pytest.approx(2 * math.cos(m * theta), abs=1e-12)


def test_product_expand_examples():
    assert u_product_expand([1]) == {1: 1}
    assert u_product_expand([1, 1]) == {0: 1, 2: 1}
    assert u_product_expand([2, 2]) == {0: 1, 2: 1, 4: 1}
    with pytest.raises(ValueError):
        u_product_expand([])
    with pytest.raises(ValueError):
        u_product_expand([0, 2])


@given(st_.lists(st_.integers(1, 6), min_size=1, max_size=4))
@settings(max_examples=80, deadline=None)
def test_product_expand_against_basis_conversion(ms):
    product = (1,)
    for m in ms:
        product = poly_mul(product, f_poly(m).coeffs)
    assert to_f_basis(product) == {m: c for m, c in u_product_expand(ms).items() if c}


def test_product_expand_relations_small():
    for ms in all_exponent_multisets(12):
        s = sum(ms)
        table = u_product_expand(ms)
        assert all(v >= 0 for v in table.values())
        assert all(0 <= m <= s for m in table)
        assert all((m - s) % 2 == 0 for m in table)
        if len(ms) == 2:
            assert table.get(0, 0) == (1 if ms[0] == ms[1] else 0)


def test_melzak_examples():
    lhs, rhs = melzak_eval(PowerPoly((0, 1)), 1, 0, 1)
    assert lhs == rhs == 1
    for n in (1, 2, 5):
        lhs, rhs = melzak_eval(PowerPoly((1,)), Fraction(3, 2), Fraction(-1, 3), n)
        assert lhs == rhs == 1
    with pytest.raises(ValueError):
        melzak_eval(PowerPoly((0, 1)), -1, 0, 2)
    with pytest.raises(ValueError):
        melzak_eval(PowerPoly((0, 0, 0, 1)), 1, 0, 2)  # degree above n


def test_melzak_random_instances():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(1, 6)
        deg = rng.randint(0, n)
        coeffs = tuple(rng.randint(-9, 9) for _ in range(deg)) + (rng.randint(1, 9),)
        x = Fraction(rng.randint(1, 10), rng.randint(1, 7))
        y = Fraction(rng.randint(-10, 10), rng.randint(1, 7))
        lhs, rhs = melzak_eval(PowerPoly(coeffs), x, y, n)
        assert lhs == rhs


def test_alk_examples_and_triangle():
    assert a_lk(1, 1) == 1
    assert a_lk(0, 1) == 0
    assert a_lk(0, 2) == 0
    for k in range(26):
        for l in range(k + 1):
            assert a_lk(l, k) == (1 if l == k else 0)
    with pytest.raises(ValueError):
        a_lk(3, 2)


def test_partition_coeff():
    assert partition_coeff([[1], [2]]) == 1
    assert partition_coeff([[1, 2]]) == -1
    assert partition_coeff([[1, 2, 3]]) == 2
    assert partition_coeff([[1, 3], [2, 4]]) == 1
    with pytest.raises(ValueError):
        partition_coeff([[1], [1, 2]])


def test_partition_count():
    # Bell numbers
    assert sum(1 for _ in set_partitions(range(4))) == 15
    assert sum(1 for _ in set_partitions(range(6))) == 203


def test_separate_distinct_sums_exact():
    rng = random.Random(5)
    primes = (5, 7, 11, 13)
    for n in (1, 2, 3, 4):
        maps = [
            {p: Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for p in primes}
            for _ in range(n)
        ]
        direct, part = separate_distinct_sums(maps, n)
        assert direct == part
        # independent brute enumeration
        from itertools import permutations

        brute = sum(
            math.prod(maps[i][p] for i, p in enumerate(tup))
            for tup in permutations(primes, n)
        )
        assert direct == brute


def test_separate_distinct_sums_special_cases():
    maps = [{5: Fraction(2), 7: Fraction(3)}]
    direct, part = separate_distinct_sums(maps, 1)
    assert direct == part == 5
    g = {5: Fraction(1, 2), 7: Fraction(1, 3)}
    direct, part = separate_distinct_sums([g, g], 2)
    total = Fraction(5, 6)
    square_sum = Fraction(1, 4) + Fraction(1, 9)
    assert direct == part == total * total - square_sum
    with pytest.raises(BudgetError):
        separate_distinct_sums([g] * 7, 7)


def test_gaussian_moment_constants():
    assert [gaussian_moment_constant(t) for t in range(1, 9)] == [0, 1, 0, 3, 0, 15, 0, 105]
    with pytest.raises(ValueError):
        gaussian_moment_constant(0)
