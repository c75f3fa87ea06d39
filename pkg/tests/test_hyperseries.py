import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from ramanujan_pi import hyperseries as hs
from ramanujan_pi.catalog import coding_from_text, poch_product


def pochhammer_oracle(H, n):
    """Direct product definition of H_n."""
    value = Fraction(1)
    for alpha, mult in H.factors:
        p = Fraction(1)
        for j in range(n):
            p *= alpha + j
        value *= p ** mult
    return value / math.factorial(n) ** H.factorial_power


def test_h_term_examples():
    H = coding_from_text("2^3")
    assert hs.h_term(H, 0) == 1
    assert hs.h_term(H, 1) == Fraction(1, 8)
    assert hs.h_term(coding_from_text("2.6"), 1) == Fraction(5, 72)
    with pytest.raises(ValueError):
        hs.h_term(H, -1)


def test_ratio_recurrence_all_catalog_H(catalog):
    for H in {f.H for f in catalog}:
        terms = list(hs.h_terms(H, 201))
        for n in range(200):
            num = math.prod((alpha + n) ** m for alpha, m in H.factors)
            assert terms[n + 1] == terms[n] * num / Fraction(n + 1) ** H.factorial_power
        for n in (0, 1, 7, 30):
            assert terms[n] == pochhammer_oracle(H, n)


def test_R2_central_binomial():
    R2 = list(hs.h_terms(coding_from_text("2"), 201))
    for n in range(201):
        assert R2[n] == Fraction(math.comb(2 * n, n), 4 ** n)


@pytest.mark.parametrize("coding", ["2^3", "2.6", "2^5.3.4", "2.8"])
def test_asymptotic_decay(coding):
    H = coding_from_text(coding)
    with mp.workdps(30):
        vals = []
        for n in (1000, 2000, 5000, 10000):
            h = hs.h_term(H, n)
            vals.append(mpmath.mpf(h.numerator) / h.denominator * mpmath.mpf(n) ** (mpmath.mpf(H.degree) / 2))
        assert max(vals) / min(vals) < 1.01


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 11), st.integers(2, 12), st.integers(1, 3)), min_size=1, max_size=3),
       st.integers(0, 40))
def test_ratio_ints_property(spec, n):
    factors = {}
    for i, d, m in spec:
        if i < d:
            factors[Fraction(i, d)] = factors.get(Fraction(i, d), 0) + m
    if not factors:
        return
    H = poch_product(sorted(factors.items()), 2)
    num, den = hs.ratio_ints(H, n)
    assert Fraction(num, den) == pochhammer_oracle(H, n + 1) / pochhammer_oracle(H, n)


def closed(f, prec):
    from ramanujan_pi import closedform
    return closedform.evaluate(f.rhs_closed_form(), prec)


def test_evaluate_examples(row):
    with mp.workdps(220):
        ev = hs.evaluate_series(row("pi", 36), 200)
        assert abs(ev.value - 16 / mpmath.pi) < mpmath.mpf(10) ** -185
        assert ev.method == "direct" and ev.tail_bound < mpmath.mpf(10) ** -200
        ev = hs.evaluate_series(row("pi", 33), 200)
        assert abs(ev.value - 2 / mpmath.pi) < mpmath.mpf(10) ** -185
        assert ev.method == "accelerated"
        ev = hs.evaluate_series(row("pic", 1), 200)
        assert abs(ev.value - 8 / mpmath.pi ** 2) < mpmath.mpf(10) ** -185


def test_divergent_rejected(row):
    with pytest.raises(hs.SeriesError, match="divergent"):
        hs.evaluate_series(row("pi", 38), 50)
    with pytest.raises(hs.SeriesError):
        hs.sum_series(coding_from_text("2^3"), Fraction(1, 2), (1, 4), 50)
    with pytest.raises(hs.SeriesError):
        hs.sum_series(coding_from_text("2^3"), 0, (1,), 50)


@pytest.mark.parametrize("label", [("pi", 2), ("pi", 7), ("pic", 13)])
def test_verify_examples(row, label):
    rep = hs.verify_formula(row(*label), 200)
    assert rep.passed and rep.delta < mpmath.mpf(10) ** -175
    assert rep.line().startswith("PASS")


def test_precision_stability(catalog):
    prec = 60
    for f in catalog:
        if f.convergent:
            lo = hs.evaluate_series(f, prec).value
            hi = hs.evaluate_series(f, prec + 50).value
            with mp.workdps(prec + 60):
                assert abs(lo - hi) < mpmath.mpf(10) ** (-(prec - 20)), f.label


def test_tail_bound_dominates(row):
    """For a > 0 the reported tail bound covers |S_N - S_2N|."""
    for label in (("pi", 36), ("pi", 30), ("pic", 4)):
        f = row(*label)
        prec = 60
        ev = hs.evaluate_series(f, prec)
        N = ev.terms_used
        with mp.workdps(prec + 40):
            terms = hs._forward_terms(f.H, f.a, f.P)
            vals = [next(terms) for _ in range(2 * N)]
            gap = abs(mpmath.fsum(vals[N:]))
            assert gap <= ev.tail_bound * 1.0001 + mpmath.mpf(10) ** (-(prec + 30))


def test_cubics_and_beta():
    assert all(r.passed for r in hs.verify_equivalent_cubics(200))
    beta = hs.verify_beta_formulas(200)
    assert len(beta) == 4 and all(r.passed and r.delta < mpmath.mpf(10) ** -150 for r in beta)


def test_updown_examples(row):
    rep = hs.evaluate_updown(row("pi", 42), 120)
    assert rep.passed and "recipe ok" in rep.detail
    with mp.workdps(130):
        assert abs(rep.rhs + 2 * mpmath.catalan) < mpmath.mpf(10) ** -100
    rep = hs.evaluate_updown(row("pic", 21), 120)
    assert rep.passed
    with mp.workdps(130):
        assert abs(rep.rhs + 380928 * mpmath.zeta(5)) < mpmath.mpf(10) ** -100
    rep = hs.evaluate_updown(row("pi", 33), 120)
    assert rep.passed and "accelerated" in rep.detail
    with pytest.raises(hs.SeriesError):
        hs.sum_updown(row("pi", 1), 50)


def test_updown_recipe(row):
    f = row("pi", 42)
    assert hs.updown_recipe_ok(f)
    from dataclasses import replace
    bad = replace(f, updown=replace(f.updown, Q=(1, 3)))
    assert not hs.updown_recipe_ok(bad)
