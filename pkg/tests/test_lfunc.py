import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from ramanujan_pi import lfunc
from ramanujan_pi.numerics import bernoulli

# frozen oracle values (mpmath.dirichlet at 70 digits)
L_FROZEN = {
    (-4, 2): "0.915965594177219015054603514932384110774149374281672134266498",
    (-3, 2): "0.7813024128964862968671874296240923563651343365452854202221",
    (5, 3): "0.854824766648543010235690083538137697138396464937005282730702",
    (-8, 3): "1.02772258593685856787925661800225576721010031853699746533108",
}


def legendre_euler(a, p):
    """Euler's criterion, independent of the Jacobi reciprocity loop."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def catalog_discriminants(catalog):
    return sorted({f.D for f in catalog} | {f.updown.D for f in catalog if f.updown})


def test_fundamental():
    good = [1, -3, -4, 5, -7, -8, 8, 12, -15, -20, -24, 28, -40020]
    bad = [0, 2, 3, -1, 4, 9, -12 * 4, 16, 25, -9]
    assert all(lfunc.is_fundamental(D) for D in good)
    assert not any(lfunc.is_fundamental(D) for D in bad)


def test_fundamental_discriminant():
    assert lfunc.fundamental_discriminant(Fraction(-3)) == -3
    assert lfunc.fundamental_discriminant(Fraction(-1)) == -4
    assert lfunc.fundamental_discriminant(Fraction(2 ** 11)) == 8
    assert lfunc.fundamental_discriminant(Fraction(9, 4)) == 1
    assert lfunc.fundamental_discriminant(Fraction(-375, 1)) == -15
    with pytest.raises(ValueError):
        lfunc.fundamental_discriminant(Fraction(0))


def test_kronecker_against_euler_criterion():
    for p in (3, 5, 7, 11, 13, 97, 101):
        for a in range(-30, 31):
            assert lfunc.kronecker_symbol(a, p) == legendre_euler(a, p)


def test_kronecker_at_two():
    assert [lfunc.kronecker_symbol(D, 2) for D in (1, 5, -3, -7, 8, -4)] == [1, -1, -1, 1, 0, 0]
    with pytest.raises(ValueError):
        lfunc.kronecker_symbol(5, 0)
    with pytest.raises(ValueError):
        lfunc.kronecker(12 * 4, 3)


def test_multiplicativity(catalog):
    rng = random.Random(1)
    for D in catalog_discriminants(catalog):
        for _ in range(200):
            m, n = rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)
            assert lfunc.kronecker(D, m * n) == lfunc.kronecker(D, m) * lfunc.kronecker(D, n)


def test_periodicity_and_zero_sum(catalog):
    for D in catalog_discriminants(catalog):
        chi = lfunc.KroneckerChar(D)
        f = abs(D)
        for n in range(1, 3 * f + 5, max(1, f // 50)):
            assert chi(n) == lfunc.kronecker(D, n) == lfunc.kronecker(D, n + f)
        if D != 1:
            assert sum(chi(r) for r in range(1, f + 1)) == 0


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([-3, -4, -7, -8, 5, 8, 12, -15, -20, -24, 28, -40020]),
       st.integers(1, 10 ** 9), st.integers(1, 10 ** 9))
def test_multiplicativity_property(D, m, n):
    assert lfunc.kronecker(D, m * n) == lfunc.kronecker(D, m) * lfunc.kronecker(D, n)


@pytest.mark.parametrize("key", sorted(L_FROZEN))
def test_L_value_frozen(key):
    D, m = key
    v = lfunc.L_value(D, m, 60)
    with mp.workdps(80):
        assert abs(v - mpmath.mpf(L_FROZEN[key])) < mpmath.mpf(10) ** -55


@pytest.mark.parametrize("D,m", [(-4, 1), (-3, 1), (5, 1), (-7, 2), (-15, 2), (-20, 3), (12, 2), (-24, 2), (8, 1)])
def test_L_value_against_mpmath(D, m):
    f = abs(D)
    chi = [lfunc.kronecker(D, r) if r else 0 for r in range(f)]
    with mp.workdps(60):
        ref = mpmath.dirichlet(m, chi)
    assert abs(lfunc.L_value(D, m, 50) - ref) < mpmath.mpf(10) ** -45


def test_L_value_large_conductor_blocked():
    D = -40020
    assert abs(D) > lfunc.BLOCKED_CONDUCTOR
    lo, hi = lfunc.L_value(D, 2, 60), lfunc.L_value(D, 2, 110)
    with mp.workdps(120):
        assert abs(lo - hi) < mpmath.mpf(10) ** -45


def test_L_value_precision_stability(catalog):
    prec = 60
    for D in catalog_discriminants(catalog):
        for m in (2, 3):
            lo, hi = lfunc.L_value(D, m, prec), lfunc.L_value(D, m, prec + 50)
            with mp.workdps(prec + 60):
                assert abs(lo - hi) < mpmath.mpf(10) ** (-(prec - 15))


def test_L_value_errors():
    with pytest.raises(ValueError):
        lfunc.L_value(1, 1, 50)
    with pytest.raises(ValueError):
        lfunc.L_value(-4, 0, 50)
    with pytest.raises(ValueError):
        lfunc.L_value(12 * 4, 2, 50)


def test_L_neg_known_values():
    assert lfunc.L_neg(1, 0) == Fraction(-1, 2)
    assert lfunc.L_neg(-4, 0) == Fraction(1, 2)
    assert lfunc.L_neg(-3, 0) == Fraction(1, 3)
    assert lfunc.L_neg(-4, -1) == 0  # parity mismatch


@pytest.mark.parametrize("D,s", [(-4, -2), (5, -1), (-3, -2), (-4, -4), (8, -1), (-7, -2), (12, -3), (1, -3)])
def test_L_neg_against_hurwitz(D, s):
    chi = [lfunc.kronecker(D, r) if r else 0 for r in range(abs(D))] if D != 1 else [1]
    value = lfunc.L_neg(D, s)
    with mp.workdps(40):
        assert abs(mpmath.dirichlet(s, chi) - mpmath.mpf(value.numerator) / value.denominator) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("k", [1, 2, 3])
def test_L_neg_zeta_consistency(k):
    """zeta(1 - 2k) = -B_2k / 2k with Bernoulli numbers from mpmath."""
    num, den = mpmath.bernfrac(2 * k)
    assert lfunc.L_neg(1, 1 - 2 * k) == -Fraction(num, den) / (2 * k)
    assert bernoulli(2 * k) == Fraction(num, den)


def test_functional_equation_link():
    """L(-4, 3) = pi^3/32 and L(-4, -2) = -1/2 (Euler number E_2 / 2)."""
    with mp.workdps(60):
        assert abs(lfunc.L_value(-4, 3, 50) - mpmath.pi ** 3 / 32) < mpmath.mpf(10) ** -45
    assert lfunc.L_neg(-4, -2) == Fraction(-1, 2)
