import math
from fractions import Fraction

import pytest

from stmoments.arith_curves import ap_table
from stmoments.classnumbers import (
    build_hurwitz_table,
    eichler_mass,
    family_moment_classnum,
    hurwitz,
    reduced_forms,
    twelve_hurwitz,
)

from conftest import trial_division_primes


def brute_reduced_forms(n: int) -> set[tuple[int, int, int]]:
    """Exhaustive scan over the full (a, b, c) ranges, written independently
    of the production enumeration."""
    out = set()
    amax = int(math.isqrt(n // 3)) + 2
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            num = b * b + n
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if (abs(b) == a or a == c) and b < 0:
                continue
            out.add((a, b, c))
    return out


def test_reduced_form_examples():
    assert {(f.a, f.b, f.c) for f in reduced_forms(3)} == {(1, 1, 1)}
    assert {(f.a, f.b, f.c) for f in reduced_forms(4)} == {(1, 0, 1)}
    assert {(f.a, f.b, f.c) for f in reduced_forms(20)} == {(1, 0, 5), (2, 2, 3)}
    with pytest.raises(ValueError):
        reduced_forms(5)
    with pytest.raises(ValueError):
        reduced_forms(-4)


@pytest.mark.parametrize("n", [n for n in range(3, 400) if n % 4 in (0, 3)])
def test_reduced_forms_against_brute_scan(n):
    got = {(f.a, f.b, f.c) for f in reduced_forms(n)}
    assert got == brute_reduced_forms(n)
    for f in reduced_forms(n):
        assert f.discriminant == -n


def test_hurwitz_anchors():
    anchors = {3: Fraction(1, 3), 4: Fraction(1, 2), 7: 1, 8: 1, 11: 1,
               12: Fraction(4, 3), 15: 2, 16: Fraction(3, 2), 19: 1, 20: 2}
    for n, h in anchors.items():
        assert hurwitz(n) == Fraction(h)
        assert twelve_hurwitz(n) == 12 * Fraction(h)


def test_table_matches_single_enumeration():
    table = build_hurwitz_table(1200)
    for n in range(3, 1201):
        if n % 4 in (0, 3):
            assert table.twelve(n) == twelve_hurwitz(n)
    assert all(table.twelve_h[n] == 0 for n in range(1201) if n % 4 in (1, 2))


def test_table_bounds_and_csv(tmp_path):
    table = build_hurwitz_table(100)
    with pytest.raises(ValueError):
        table.twelve(104)
    with pytest.raises(ValueError):
        table.twelve(5)
    path = tmp_path / "h.csv"
    table.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "N,twelve_h"
    assert lines[4] == f"4,{table.twelve(4)}"


def test_eichler_mass_examples(hurwitz_table):
    # p = 5: H(20) + 2H(19) + 2H(16) + 2H(11) + 2H(4) = 2p
    total = (hurwitz(20) + 2 * hurwitz(19) + 2 * hurwitz(16)
             + 2 * hurwitz(11) + 2 * hurwitz(4))
    assert total == 10
    assert eichler_mass(5, hurwitz_table) == 0
    assert eichler_mass(7, hurwitz_table) == 0
    for p in trial_division_primes(200):
        if p >= 5:
            assert eichler_mass(p, hurwitz_table) == 0


def test_family_moment_examples(hurwitz_table):
    assert family_moment_classnum(5, 1, hurwitz_table) == 0
    assert family_moment_classnum(5, 3, hurwitz_table) == 0
    assert family_moment_classnum(5, 2, hurwitz_table) == 96
    assert family_moment_classnum(5, 0, hurwitz_table) == 20


@pytest.mark.parametrize("p", [5, 7, 11, 13, 23, 41, 97])
def test_family_moment_matches_grid(p, hurwitz_table):
    table = ap_table(p)
    vals = table.ap[table.good].astype(object)
    for g in range(7):
        assert int((vals ** g).sum()) == family_moment_classnum(p, g, hurwitz_table)
