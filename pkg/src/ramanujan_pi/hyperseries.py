"""Exact hypergeometric terms and high-precision evaluation of S(H, a, P).

Terms are produced by the exact ratio recurrence H_{n+1}/H_n and rounded once
per step into an mpf.  Geometric series stop on the tail rule below; the
|a| = 1 case goes through Chebyshev alternating acceleration.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import mpmath
from mpmath import mp

from . import closedform, lfunc, numerics
from .catalog import Formula, PochProduct, poch_product, coding_from_text

#: guard digits carried while summing
GUARD = 15
#: consecutive ratios below r required before the tail bound is trusted
RATIO_RUN = 10
MAX_TERMS = 2_000_000


class SeriesError(ValueError):
    """Divergent input or a tail bound that was never reached."""


@dataclass
class SeriesEvaluation:
    value: mpmath.mpf
    terms_used: int
    tail_bound: mpmath.mpf
    method: str  # "direct" or "accelerated"


def h_term(H: PochProduct, n: int) -> Fraction:
    """Exact H_n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    value = Fraction(1)
    for j in range(n):
        num, den = ratio_ints(H, j)
        value = value * num / den
    return value


def h_terms(H: PochProduct, count: int) -> Iterator[Fraction]:
    """H_0, ..., H_{count-1} exactly."""
    value = Fraction(1)
    for j in range(count):
        yield value
        num, den = ratio_ints(H, j)
        value = value * num / den


def ratio_ints(H: PochProduct, n: int) -> tuple:
    """(num, den) integers with H_{n+1}/H_n = num/den."""
    num = 1
    den = (n + 1) ** H.factorial_power
    for alpha, mult in H.factors:
        num *= (alpha.numerator + n * alpha.denominator) ** mult
        den *= alpha.denominator ** mult
    return num, den


def poly_eval(coeffs: Sequence, x):
    """Horner evaluation of ascending coefficients."""
    value = 0
    for c in reversed(coeffs):
        value = value * x + c
    return value


def _sum_with_tail(terms: Iterator, r: mpmath.mpf, eps: mpmath.mpf) -> SeriesEvaluation:
    """Sum a geometric-type series until |t_N| r/(1-r) < eps after RATIO_RUN good ratios."""
    total = mpmath.mpf(0)
    prev = None
    run = 0
    n = 0
    for n, t in enumerate(terms):
        total += t
        if prev:
            if abs(t) < r * abs(prev):
                run += 1
            else:
                run = 0
        else:
            run = 0
        prev = t
        if run >= RATIO_RUN:
            bound = abs(t) * r / (1 - r)
            if bound < eps:
                return SeriesEvaluation(total, n + 1, bound, "direct")
        if n >= MAX_TERMS:
            break
    raise SeriesError(f"tail bound not reached within {n + 1} terms")


def _forward_terms(H: PochProduct, a: Fraction, P: Sequence) -> Iterator:
    """P(n) H_n / a^n as mpf at the current precision."""
    u = mpmath.mpf(1)
    n = 0
    while True:
        yield poly_eval(P, n) * u
        num, den = ratio_ints(H, n)
        u = u * (num * a.denominator) / (den * a.numerator)
        n += 1


def sum_series(H: PochProduct, a, P: Sequence, prec: int) -> SeriesEvaluation:
    """S(H, a, P) = sum_{n>=0} P(n) H_n / a^n for |a| > 1, or a = -1 (accelerated)."""
    numerics._check_prec(prec)
    a = Fraction(a)
    if a == 0:
        raise SeriesError("a must be nonzero")
    dps = prec + GUARD
    with mp.workdps(dps):
        if abs(a) > 1:
            r = (1 + 1 / numerics.rat_to_mpf(abs(a))) / 2
            ev = _sum_with_tail(_forward_terms(H, a, P), r, mpmath.mpf(10) ** (-dps))
        elif a == -1 and 2 * (len(P) - 1) < H.degree:
            ev = _accelerated(_forward_terms(H, a, P), prec)
        else:
            raise SeriesError(f"series diverges or is not alternating for a = {a}")
    with mp.workdps(prec + 10):
        ev.value = +ev.value
    return ev


def _accelerated(terms: Iterator, prec: int) -> SeriesEvaluation:
    cache = []

    def term(i):
        while len(cache) <= i:
            cache.append(next(terms))
        return cache[i]

    value = numerics.accelerate_alternating(term, prec)
    n = numerics.cvz_term_count(prec + numerics.GUARD_DIGITS["accelerate_alternating"] + numerics._WORK_GUARD)
    # CVZ error is at most 2 |t_0| / (3 + sqrt 8)^n for totally monotone magnitudes
    bound = 2 * abs(cache[0]) / (3 + mpmath.sqrt(8)) ** n
    return SeriesEvaluation(value, len(cache), bound, "accelerated")


def evaluate_series(f: Formula, prec: int) -> SeriesEvaluation:
    if not f.convergent:
        raise SeriesError(f"row {f.label} is divergent (|a| < 1); only congruence/updown checks apply")
    return sum_series(f.H, f.a, f.P, prec)


@dataclass
class CheckReport:
    """One numeric identity check."""

    name: str
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    delta: mpmath.mpf
    passed: bool
    tolerance_digits: int
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        d = mpmath.nstr(self.delta, 3) if self.delta else "0"
        return f"{status} {self.name}: |delta| = {d} (tol 1e-{self.tolerance_digits}) {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": mpmath.nstr(self.lhs, 30),
            "rhs": mpmath.nstr(self.rhs, 30),
            "delta": mpmath.nstr(self.delta, 5),
            "passed": self.passed,
            "tolerance_digits": self.tolerance_digits,
            "seconds": round(self.seconds, 3),
            "detail": self.detail,
        }


def _compare(name: str, lhs, rhs, prec: int, slack: int, seconds: float, detail: str = "") -> CheckReport:
    with mp.workdps(prec + 10):
        delta = abs(lhs - rhs)
        tol = prec - slack
        passed = delta < mpmath.mpf(10) ** (-tol)
    return CheckReport(name, lhs, rhs, delta, bool(passed), tol, seconds, detail)


def verify_formula(f: Formula, prec: int) -> CheckReport:
    """Compare S(H, a, P) with sign * sqrt(k) / pi^c; pass below 10^-(prec-25)."""
    start = time.perf_counter()
    ev = evaluate_series(f, prec)
    rhs = closedform.evaluate(f.rhs_closed_form(), prec)
    return _compare(f.label, ev.value, rhs, prec, 25, time.perf_counter() - start,
                    f"{ev.method}, {ev.terms_used} terms")


# ---------------------------------------------------------------------------
# side identities

#: (name, H coding, a, P ascending, rhs s-expression)
EQUIVALENT_CUBICS = (
    ("cubic a=-8", "2^3", Fraction(-8), (0, 0, 1, 6), "(/ (- (/ (sqrt 2) 6)) pi)"),
    ("cubic a=4", "2^3", Fraction(4), (0, 0, -1, 2), "(/ 1/3 pi)"),
    ("cubic a=64", "2^3", Fraction(64), (0, 1, -5, 210), "(/ 4/3 pi)"),
)

_H_5_12 = ((Fraction(1, 12), 1), (Fraction(5, 12), 1))
_H_7_12 = ((Fraction(1, 12), 1), (Fraction(7, 12), 1))

#: (name, factors, a, P, rhs s-expression); the factorial power is 2 throughout
BETA_FORMULAS = (
    ("beta 22n+1", _H_5_12, Fraction(125, 4), (1, 22),
     "(/ (* (^ 2 1/3) (^ 5 5/4) (^ 3 -1/2)) (beta 1/3 1/3))"),
    ("beta 126n+5", _H_5_12, Fraction(1331, 8), (5, 126),
     "(/ (* (^ 2 1/2) (^ 3 1/4) (^ 11 5/4)) (beta 1/4 1/4))"),
    ("beta 150n+7", _H_7_12, Fraction(-121, 4), (7, 150),
     "(/ (* (^ 2 1/3) (^ 3 1/2) (^ 11 7/6)) (beta 1/3 1/3))"),
    ("beta 726n+29", _H_7_12, Fraction(-1323, 8), (29, 726),
     "(/ (* (^ 2 1/2) (^ 3 5/2) (^ 7 7/6)) (beta 1/4 1/4))"),
)


def verify_equivalent_cubics(prec: int) -> list:
    out = []
    for name, coding, a, P, rhs in EQUIVALENT_CUBICS:
        start = time.perf_counter()
        ev = sum_series(coding_from_text(coding), a, P, prec)
        out.append(_compare(name, ev.value, closedform.evaluate(rhs, prec), prec, 25,
                            time.perf_counter() - start))
    return out


def verify_beta_formulas(prec: int) -> list:
    out = []
    for name, factors, a, P, rhs in BETA_FORMULAS:
        start = time.perf_counter()
        ev = sum_series(poch_product(factors, 2), a, P, prec)
        out.append(_compare(name, ev.value, closedform.evaluate(rhs, prec), prec, 25,
                            time.perf_counter() - start))
    return out


# ---------------------------------------------------------------------------
# upside-down series


def _updown_terms(H: PochProduct, b: Fraction, Q: Sequence, c: int) -> Iterator:
    """Q(n) / (n^(2c+1) H_n b^n) for n >= 1."""
    w = 2 * c + 1
    v = mpmath.mpf(1)  # 1 / (H_n b^n)
    n = 0
    while True:
        num, den = ratio_ints(H, n)
        v = v * (den * b.denominator) / (num * b.numerator)
        n += 1
        yield poly_eval(Q, n) * v / mpmath.mpf(n) ** w


def updown_recipe_ok(f: Formula) -> bool:
    """b = 1/a and Q(x) = +-P(-x) exactly."""
    ud = f.updown
    if ud.b != 1 / f.a or len(ud.Q) != len(f.P):
        return False
    reflected = tuple(c * (-1) ** i for i, c in enumerate(f.P))
    return tuple(ud.Q) == reflected or tuple(ud.Q) == tuple(-c for c in reflected)


def sum_updown(f: Formula, prec: int) -> SeriesEvaluation:
    ud = f.updown
    if ud is None:
        raise SeriesError(f"row {f.label} has no upside-down data")
    b = ud.b
    dps = prec + GUARD
    with mp.workdps(dps):
        terms = _updown_terms(f.H, b, ud.Q, f.c)
        if abs(b) > 1:
            r = (1 + 1 / numerics.rat_to_mpf(abs(b))) / 2
            ev = _sum_with_tail(terms, r, mpmath.mpf(10) ** (-dps))
        elif b == -1:
            ev = _accelerated(terms, prec)
        else:
            raise SeriesError(f"upside-down series diverges for b = {b}")
    with mp.workdps(prec + 10):
        ev.value = +ev.value
    return ev


def evaluate_updown(f: Formula, prec: int) -> CheckReport:
    """sum_{n>=1} Q(n)/(n^(2c+1) H_n b^n) against A L(D, c+1)."""
    start = time.perf_counter()
    ev = sum_updown(f, prec)
    ud = f.updown
    with mp.workdps(prec + 10):
        rhs = numerics.rat_to_mpf(ud.A) * lfunc.L_value(ud.D, f.c + 1, prec)
    rep = _compare(f"{f.label} updown", ev.value, rhs, prec, 25, time.perf_counter() - start,
                   f"{ev.method}, {ev.terms_used} terms")
    recipe = updown_recipe_ok(f)
    rep.detail += f", recipe {'ok' if recipe else 'MISMATCH'}"
    rep.passed = rep.passed and recipe
    return rep
