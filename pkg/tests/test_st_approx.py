import math

import numpy as np
import pytest
from scipy.integrate import quad

from stmoments.arith_curves import CurveParams, Interval, SumCondition, count_in_interval, primes_in_window
from stmoments.st_approx import (
    CoeffMode,
    coeffs_to_csv,
    exact_st_coeffs,
    p_polynomial_sum,
    parseval_check,
    profile_M,
    sandwich_coeffs,
    sandwich_error_bound,
    st_measure,
)

INTERVALS = [
    Interval(0.0, math.pi / 2),
    Interval(math.pi / 3, 2 * math.pi / 3),
    Interval(0.7, 2.0),
    Interval(0.0, math.pi),
    Interval(1.9, math.pi),
]


def quad_measure(iv: Interval) -> float:
    lo, hi = 2 * math.cos(iv.beta), 2 * math.cos(iv.alpha)
    val, err = quad(lambda t: math.sqrt(max(1 - t * t / 4, 0.0)) / math.pi, lo, hi, limit=200)
    assert err < 1e-12
    return val


@pytest.mark.parametrize("iv", INTERVALS)
def test_measure_against_quadrature(iv):
    assert st_measure(iv) == pytest.approx(quad_measure(iv), abs=1e-12)


def test_measure_examples():
    assert st_measure(Interval(0.0, math.pi)) == pytest.approx(1.0)
    assert st_measure(Interval(0.0, math.pi / 2)) == pytest.approx(0.5)
    assert st_measure(Interval(math.pi / 3, 2 * math.pi / 3)) == pytest.approx(1 / 3 + math.sqrt(3) / (2 * math.pi))


def test_exact_coeffs_examples():
    full = exact_st_coeffs(Interval(0.0, math.pi), 12)
    assert np.allclose(full.u, 0.0)
    assert full.const_term == pytest.approx(1.0)
    half = exact_st_coeffs(Interval(0.0, math.pi / 2), 12)
    assert half.u[1] == pytest.approx(4 / (3 * math.pi))
    assert half.const_term == pytest.approx(0.5)
    # decay: |u(m)| <= 4/(pi m)
    c = exact_st_coeffs(Interval(0.7, 2.0), 500)
    ms = np.arange(1, 501)
    assert np.all(np.abs(c.u[1:]) <= 4 / (math.pi * ms) + 1e-15)
    assert c.u_decay <= 4 / math.pi + 1e-12


def test_exact_coeffs_are_fourier_coefficients():
    # u(m) equals the integral of f_m(2 cos t) over the arc, against the
    # angle-variable measure (2/pi) sin^2 t
    iv = Interval(0.7, 2.0)
    M = 30
    coeffs = exact_st_coeffs(iv, M)
    from stmoments.chebycomb import f_eval

    for m in (1, 2, 5, 11, M - 2):
        val, err = quad(
            lambda t: f_eval(m, 2 * math.cos(t)) * (2 / math.pi) * math.sin(t) ** 2,
            iv.alpha, iv.beta, limit=300,
        )
        assert coeffs.u[m] == pytest.approx(val, abs=1e-10)


def test_udef_edge_slots():
    iv = Interval(0.7, 2.0)
    M = 20
    c = exact_st_coeffs(iv, M)
    for m in range(1, M - 1):
        assert c.u[m] == pytest.approx(c.s[m] - c.s[m + 2], abs=0)
    assert c.u[M - 1] == c.s[M - 1]
    assert c.u[M] == c.s[M]
    tiny = exact_st_coeffs(iv, 1)
    assert tiny.u[1] == tiny.s[1]


@pytest.mark.parametrize("iv", INTERVALS[:3])
def test_parseval_contract(iv):
    gaps = []
    for M in (100, 1000, 10_000):
        res = parseval_check(iv, M)
        assert res.gap <= 20 * math.log(2 * M) / M
        assert res.mu_term == pytest.approx(st_measure(iv) - st_measure(iv) ** 2)
        gaps.append(res.gap)
    assert gaps[0] > gaps[1] > gaps[2]


def test_parseval_full_interval():
    res = parseval_check(Interval(0.0, math.pi), 100)
    assert res.z == 0.0 and res.mu_term == pytest.approx(0.0) and res.gap <= 1e-15


@pytest.mark.parametrize("iv", INTERVALS[:3])
@pytest.mark.parametrize("M", [16, 64, 256])
def test_sandwich_pointwise(iv, M):
    thetas = np.linspace(0.0, math.pi, 20001)
    chi = ((thetas >= iv.alpha) & (thetas <= iv.beta)).astype(float)
    plus = sandwich_coeffs(iv, M, CoeffMode.MAJORANT)
    minus = sandwich_coeffs(iv, M, CoeffMode.MINORANT)
    assert float((plus.eval_cosine(thetas) - chi).min()) >= -1e-12
    assert float((chi - minus.eval_cosine(thetas)).min()) >= -1e-12


def test_sandwich_converges_to_exact():
    iv = Interval(0.7, 2.0)
    dev_small = sandwich_coeffs(iv, 256, CoeffMode.MAJORANT).cert
    dev_large = sandwich_coeffs(iv, 4096, CoeffMode.MAJORANT).cert
    assert dev_large < dev_small


def test_sandwich_full_interval_major_is_one():
    c = sandwich_coeffs(Interval(0.0, math.pi), 64, CoeffMode.MAJORANT)
    assert np.allclose(c.u, 0.0)
    assert c.const_term == pytest.approx(1.0)


def test_sandwich_guards():
    with pytest.raises(ValueError):
        sandwich_coeffs(Interval(1.0, 1.05), 16, CoeffMode.MINORANT)
    with pytest.raises(ValueError):
        sandwich_coeffs(Interval(0.7, 2.0), 8, CoeffMode.MAJORANT)
    with pytest.raises(ValueError):
        sandwich_coeffs(Interval(0.7, 2.0), 64, CoeffMode.EXACT)


def test_p_polynomial_sum_examples():
    iv = Interval(0.0, math.pi / 2)
    coeffs = exact_st_coeffs(iv, 5)
    curve = CurveParams(1, 1)
    zeroed = exact_st_coeffs(iv, 5)
    zeroed.u = np.zeros(6)
    assert p_polynomial_sum(curve, 12.0, zeroed) == 0.0
    single = exact_st_coeffs(iv, 5)
    single.u = np.zeros(6)
    single.u[1] = 1.0
    got = p_polynomial_sum(curve, 12.0, single)
    assert got == pytest.approx(3 / math.sqrt(7) - 2 / math.sqrt(11), abs=1e-12)
    # axis curve with the ab condition: every prime divides ab
    axis = CurveParams(0, 7)
    assert p_polynomial_sum(axis, 12.0, coeffs, SumCondition.SKIP_BAD_AND_AB) == 0.0
    with pytest.raises(ValueError):
        p_polynomial_sum(CurveParams(0, 0), 12.0, coeffs)


def test_error_bracket_full_interval():
    iv = Interval(0.0, math.pi)
    curve = CurveParams(0, 7)  # bad exactly at 7 in the window (6, 12]
    lo, hi = sandwich_error_bound(curve, 12.0, iv, 64)
    window = primes_in_window(12.0)
    err = count_in_interval(curve, 12.0, iv) - window.count * st_measure(iv)
    assert err == -1.0
    assert lo == pytest.approx(err) and hi == pytest.approx(err)


def test_error_bracket_random_curves():
    import random

    iv = Interval(0.0, math.pi / 2)
    mu = st_measure(iv)
    window = primes_in_window(300.0)
    rng = random.Random(42)
    widths = []
    for _ in range(40):
        while True:
            a, b = rng.randint(-30, 30), rng.randint(-30, 30)
            if 4 * a ** 3 + 27 * b ** 2 != 0:
                break
        curve = CurveParams(a, b)
        lo, hi = sandwich_error_bound(curve, 300.0, iv, 128)
        err = count_in_interval(curve, 300.0, iv) - window.count * mu
        assert lo <= err <= hi
        widths.append(hi - lo)
    # wider degree tightens the bracket on average
    wide = []
    rng = random.Random(42)
    for _ in range(10):
        while True:
            a, b = rng.randint(-30, 30), rng.randint(-30, 30)
            if 4 * a ** 3 + 27 * b ** 2 != 0:
                break
        lo64, hi64 = sandwich_error_bound(CurveParams(a, b), 300.0, iv, 64)
        lo256, hi256 = sandwich_error_bound(CurveParams(a, b), 300.0, iv, 256)
        wide.append((hi64 - lo64) - (hi256 - lo256))
    assert sum(wide) / len(wide) > 0


def test_profile_m():
    assert profile_M(2000.0, 2, "mrh") == math.ceil(math.sqrt(primes_in_window(2000.0).count))
    assert profile_M(2000.0, 2, "unconditional") == math.ceil(2000 ** 0.25 * math.log(2000) ** 0.25)
    assert profile_M(2000.0, 2, "hypotheses") == math.ceil(2000 ** 0.5 * math.log(2000) ** 0.25)
    with pytest.raises(ValueError):
        profile_M(2000.0, 2, "bogus")


def test_coeff_csv(tmp_path):
    c = exact_st_coeffs(Interval(0.7, 2.0), 8)
    path = tmp_path / "bs.csv"
    coeffs_to_csv(c, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "m,s,u"
    assert len(lines) == 9
