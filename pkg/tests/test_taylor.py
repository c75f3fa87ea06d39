from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from ramanujan_pi import hyperseries as hs
from ramanujan_pi import lfunc, numerics, taylor
from ramanujan_pi.catalog import coding_from_text


def recovered(rep, idx):
    return next(c.recovered for c in rep.checks if c.index == idx and c.note != "C1/C2 formula")


def direct_series_oracle(f, x):
    """S(H, a, P; x) from mpmath.gamma directly (no recurrence), at the caller's precision."""
    x = mpmath.mpf(x)
    absa = mpmath.mpf(abs(f.a.numerator)) / f.a.denominator
    a = mpmath.mpf(f.a.numerator) / f.a.denominator

    def H(y):
        v = mpmath.mpf(1)
        for alpha, m in f.H.factors:
            al = mpmath.mpf(alpha.numerator) / alpha.denominator
            v *= (mpmath.gamma(al + y) / mpmath.gamma(al)) ** m
        return v / mpmath.gamma(1 + y) ** f.H.factorial_power

    return mpmath.nsum(lambda n: hs.poly_eval(f.P, n + x) * H(n + x) / a ** n, [0, mpmath.inf]) / absa ** x


def test_log_coeff_examples():
    H = coding_from_text("2^3")
    c = taylor.shifted_h_log_coeffs(H, 0, 3, 50)
    with mp.workdps(60):
        assert abs(c[0]) < mpmath.mpf(10) ** -45
        assert abs(c[1] + 6 * mpmath.log(2)) < mpmath.mpf(10) ** -45
        H = coding_from_text("2.6")
        c = taylor.shifted_h_log_coeffs(H, 0, 2, 50)
        ref = (mpmath.psi(1, 0.5) + mpmath.psi(1, mpmath.mpf(1) / 6) + mpmath.psi(1, mpmath.mpf(5) / 6)
               - 3 * mpmath.psi(1, 1)) / 2
        assert abs(c[2] - ref) < mpmath.mpf(10) ** -45


def test_taylor_against_direct_oracle(row):
    """mpmath.taylor of a direct gamma-function sum (independent of the polygamma walker)."""
    f = row("pi", 36)
    with mp.workdps(60):
        ref = mpmath.taylor(lambda x: direct_series_oracle(f, x), 0, 3)
    t = taylor.taylor_series(f, 3, 40)
    for i in range(4):
        assert abs(t[i] - ref[i]) < mpmath.mpf(10) ** -20


def test_row33_examples(row):
    f = row("pi", 33)
    t = taylor.taylor_series(f, 2, 100)
    with mp.workdps(110):
        assert abs(t[1]) < mpmath.mpf(10) ** -75
        assert abs(t[0] - 2 / mpmath.pi) < mpmath.mpf(10) ** -75
        assert abs(t[2] + Fraction(1, 4) * 16 * 1 * lfunc.L_value(-4, 1, 100)) < mpmath.mpf(10) ** -75


def test_odd_coefficients_vanish(catalog):
    prec = 60
    for f in catalog:
        if f.convergent and f.family == "pic" and f.id in (1, 4):
            t = taylor.taylor_series(f, 2 * f.c - 1, prec)
            for j in range(1, f.c + 1):
                assert abs(t[2 * j - 1]) < mpmath.mpf(10) ** (-(prec - 30)), f.label


def test_t0_matches_series(catalog):
    prec = 50
    for f in catalog:
        if f.convergent and f.taylor:
            t0 = taylor.taylor_series(f, 0, prec)[0]
            v = hs.evaluate_series(f, prec).value
            with mp.workdps(prec + 10):
                assert abs(t0 - v) < mpmath.mpf(10) ** (-(prec - 20)), f.label


def test_numerator_pattern(row):
    for i in range(1, 8):
        f = row("pi", i)
        assert Fraction(f.taylor["a2"]).numerator == abs(f.tau.disc) - 4


@pytest.mark.parametrize("label", [("pi", 1), ("pi", 36), ("pic", 1), ("pic", 4), ("pi", 8)])
def test_shift_identity(row, label):
    f = row(*label)
    prec = 50
    for x in (Fraction(1, 10), Fraction(3, 10)):
        s0 = taylor.series_at(f, x, prec).value
        s1 = taylor.series_at(f, x + 1, prec).value
        with mp.workdps(prec + 10):
            H_x = taylor.h_shifted(f.H, x, prec)
            absa = mpmath.mpf(abs(f.a.numerator)) / f.a.denominator
            rhs = (1 if f.a > 0 else -1) * (s0 - hs.poly_eval(f.P, numerics.rat_to_mpf(x)) * H_x / absa ** numerics.rat_to_mpf(x))
            assert abs(s1 - rhs) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("label", [("pi", 2), ("pi", 30), ("pic", 1)])
def test_finite_differences(row, label):
    f = row(*label)
    prec = 60
    h = Fraction(1, 10 ** (prec // 4))
    t = taylor.taylor_series(f, 2, prec)
    sp = taylor.series_at(f, h, prec).value
    sm = taylor.series_at(f, -h, prec).value
    with mp.workdps(prec + 10):
        hh = numerics.rat_to_mpf(h)
        d1 = (sp - sm) / (2 * hh)
        d2 = (sp - 2 * t[0] + sm) / (2 * hh * hh)
        assert abs(d1 - t[1]) < mpmath.mpf(10) ** (-(prec // 3))
        assert abs(d2 - t[2]) < mpmath.mpf(10) ** (-(prec // 3))


def test_match_examples(row):
    rep = taylor.match_taylor_row(row("pi", 1), 100)
    assert rep.passed and recovered(rep, 2) == Fraction(3, 4) and recovered(rep, 3) == Fraction(1, 2)
    rep = taylor.match_taylor_row(row("pic", 7), 100)
    assert rep.passed
    assert (recovered(rep, 2), recovered(rep, 4), recovered(rep, 5)) == (Fraction(3, 2), Fraction(887, 32), Fraction(21, 8))
    rep = taylor.match_taylor_row(row("pic", 11), 100)
    assert rep.passed
    t4 = rep.t[4]
    with mp.workdps(110):
        assert abs(t4 - 32 * Fraction(16, 3) * lfunc.L_value(-4, 1, 100)) < mpmath.mpf(10) ** -70


def test_errata_reported(row):
    rep = taylor.match_taylor_row(row("pi", 7), 80)
    assert rep.passed
    note = next(c.note for c in rep.checks if c.index == 3)
    assert "printed 1/11560 inconsistent; corrected 1/1156 matches" == note
    rep = taylor.match_taylor_row(row("pic", 12), 120)
    assert rep.passed
    assert "corrected -147/40" in next(c.note for c in rep.checks if c.index == 6)


def test_half_value_examples(row):
    rep = taylor.half_value(row("pi", 1), 100)
    assert rep.passed and rep.reading == "printed"
    assert taylor.half_value(row("pi", 8), 100).passed
    rep = taylor.half_value(row("pic", 12), 100)
    assert rep.passed
    with mp.workdps(110):
        assert abs(rep.value - 9216 * mpmath.zeta(3) / mpmath.pi ** 7) < mpmath.mpf(10) ** -70


def test_half_value_corrected_readings(row):
    rep = taylor.half_value(row("pi", 22), 100)
    assert rep.passed and rep.reading == "corrected" and rep.discrepancy
    rep = taylor.half_value(row("pi", 14), 100)
    assert rep.passed and rep.reading == "corrected"


def test_harmonic_constants():
    c1, c2 = taylor.harmonic_constants(60)
    d1, d2 = taylor.harmonic_constants(110)
    with mp.workdps(120):
        assert abs(c1 - d1) < mpmath.mpf(10) ** -45 and abs(c2 - d2) < mpmath.mpf(10) ** -45
        # first term of C_2 is -1/9; the full sum lies between the first two partial sums
        s1 = -mpmath.mpf(1) / 9
        s2 = s1 + (1 + mpmath.mpf(1) / 2) / 25
        assert s1 < d2 < s2


def test_divergent_and_order_errors(row):
    with pytest.raises(hs.SeriesError):
        taylor.taylor_series(row("pi", 40), 2, 50)
    with pytest.raises(ValueError):
        taylor.taylor_series(row("pi", 1), taylor.ORDER_CAP + 1, 50)
