"""Taylor expansion of S(H, a, P; x) = sum_n P(n+x) H_{n+x} / (a^n |a|^x) around x = 0.

H_{n+x} is read through (alpha)_{n+x} = Gamma(alpha+n+x)/Gamma(alpha), so

    log(H_{n+x} / H_n) = sum_k x^k / k! * [sum_alpha m_alpha psi^(k-1)(alpha+n) - f psi^(k-1)(1+n)]

with f the power of n! in the denominator.  Polygamma values are seeded once
per factor and advanced in n with psi^(k)(z+1) = psi^(k)(z) + (-1)^k k!/z^(k+1).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mp

from . import closedform, hyperseries, lfunc, numerics
from .catalog import Formula, PochProduct
from .hyperseries import GUARD, RATIO_RUN, MAX_TERMS, SeriesError, poly_eval

ORDER_CAP = 12
#: rationalization bound for recovered coefficients
MAX_DEN = 10 ** 12


def _poly_taylor_shift(P, n: int) -> list:
    """Coefficients of P(n + x) in x (exact integers)."""
    coeffs = list(P)
    deg = len(coeffs) - 1
    # repeated synthetic division by (x - n)
    out = []
    for _ in range(deg + 1):
        rem = 0
        quot = [0] * max(len(coeffs) - 1, 0)
        for i in range(len(coeffs) - 1, -1, -1):
            rem = rem * n + coeffs[i]
            if i > 0:
                quot[i - 1] = rem
        out.append(rem)
        coeffs = quot
    return out


class _PolygammaWalker:
    """psi^(k)(z + n) for k < order at successive n, for each factor argument z."""

    def __init__(self, H: PochProduct, order: int, dps: int):
        self.order = order
        self.args = [(alpha, m) for alpha, m in H.factors] + [(Fraction(1), -H.factorial_power)]
        prec = dps - numerics.GUARD_DIGITS["polygamma"] - numerics._WORK_GUARD
        self.values = [[numerics.polygamma(k, alpha, 0, prec) for k in range(order)] for alpha, _ in self.args]
        self.fact = [math.factorial(k) for k in range(order + 1)]
        self.n = 0

    def log_coeffs(self, log_abs_a) -> list:
        """[0, c_1, ..., c_order] for the current n, including the -x log|a| part."""
        out = [mpmath.mpf(0)] * (self.order + 1)
        for (alpha, m), vals in zip(self.args, self.values):
            for k in range(1, self.order + 1):
                out[k] += m * vals[k - 1]
        for k in range(1, self.order + 1):
            out[k] /= self.fact[k]
        out[1] -= log_abs_a
        return out

    def advance(self) -> None:
        for (alpha, _), vals in zip(self.args, self.values):
            z = numerics.rat_to_mpf(alpha + self.n)
            zp = 1 / z
            power = zp
            for k in range(self.order):
                term = self.fact[k] * power
                vals[k] += term if k % 2 == 0 else -term
                power *= zp
        self.n += 1


def shifted_h_log_coeffs(H: PochProduct, n: int, order: int, prec: int) -> list:
    """Taylor coefficients [0, c_1, ..., c_order] of log(H_{n+x}/H_n)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    dps = prec + GUARD
    with mp.workdps(dps):
        walker = _PolygammaWalker(H, order, dps)
        for _ in range(n):
            walker.advance()
        out = walker.log_coeffs(0)
    with mp.workdps(prec + 10):
        return [+c for c in out]


def _exp_series(c: list) -> list:
    """Coefficients of exp(sum c_k x^k) given c_0 = 0."""
    order = len(c) - 1
    e = [mpmath.mpf(1)] + [mpmath.mpf(0)] * order
    for j in range(1, order + 1):
        s = mpmath.mpf(0)
        for k in range(1, j + 1):
            if c[k]:
                s += k * c[k] * e[j - k]
        e[j] = s / j
    return e


def _term_vectors(f: Formula, order: int, dps: int):
    """Yield the Taylor vector of P(n+x) H_{n+x} / (a^n |a|^x) for n = 0, 1, ..."""
    walker = _PolygammaWalker(f.H, order, dps)
    log_abs_a = mpmath.log(numerics.rat_to_mpf(abs(f.a)))
    a = f.a
    u = mpmath.mpf(1)
    n = 0
    while True:
        e = _exp_series(walker.log_coeffs(log_abs_a))
        p = _poly_taylor_shift(f.P, n)
        vec = []
        for j in range(order + 1):
            s = mpmath.mpf(0)
            for i in range(min(j, len(p) - 1) + 1):
                if p[i]:
                    s += p[i] * e[j - i]
            vec.append(u * s)
        yield vec
        num, den = hyperseries.ratio_ints(f.H, n)
        u = u * (num * a.denominator) / (den * a.numerator)
        walker.advance()
        n += 1


def taylor_series(f: Formula, order: int, prec: int) -> list:
    """t_0..t_order of S(H, a, P; x) at x = 0."""
    if not f.convergent:
        raise SeriesError(f"row {f.label} is divergent; no Taylor expansion")
    if not 0 <= order <= ORDER_CAP:
        raise ValueError(f"order must be in [0, {ORDER_CAP}]")
    numerics._check_prec(prec)
    dps = prec + GUARD
    order_eff = max(order, 1)
    with mp.workdps(dps):
        vectors = _term_vectors(f, order_eff, dps)
        if abs(f.a) > 1:
            r = (1 + 1 / numerics.rat_to_mpf(abs(f.a))) / 2
            eps = mpmath.mpf(10) ** (-dps)
            totals = [mpmath.mpf(0)] * (order_eff + 1)
            prev = None
            run = 0
            for n, vec in enumerate(vectors):
                size = max(abs(v) for v in vec)
                for j, v in enumerate(vec):
                    totals[j] += v
                run = run + 1 if prev and size < r * prev else 0
                prev = size
                if run >= RATIO_RUN and size * r / (1 - r) < eps:
                    break
                if n >= MAX_TERMS:
                    raise SeriesError("tail bound not reached")
        elif f.a == -1:
            cache = []
            totals = []
            for j in range(order_eff + 1):
                def term(i, j=j):
                    while len(cache) <= i:
                        cache.append(next(vectors))
                    return cache[i][j]
                totals.append(numerics.accelerate_alternating(term, prec))
        else:
            raise SeriesError(f"unsupported a = {f.a}")
    with mp.workdps(prec + 10):
        return [+t for t in totals[:order + 1]]


# ---------------------------------------------------------------------------
# S(H, a, P; x) at a rational point


def _shifted_ratio(H: PochProduct, x: Fraction, n: int) -> Fraction:
    """H_{n+1+x} / H_{n+x}."""
    value = Fraction(1)
    for alpha, m in H.factors:
        value *= (alpha + x + n) ** m
    return value / (1 + x + n) ** H.factorial_power


def h_shifted(H: PochProduct, x: Fraction, prec: int) -> mpmath.mpf:
    """H_x = prod Gamma(alpha+x)^m / Gamma(alpha)^m / Gamma(1+x)^f."""
    x = Fraction(x)
    with mp.workdps(prec + GUARD):
        value = mpmath.mpf(1)
        for alpha, m in H.factors:
            value *= (numerics.gamma_rational(alpha + x, prec + 5) / numerics.gamma_rational(alpha, prec + 5)) ** m
        value /= numerics.gamma_rational(1 + x, prec + 5) ** H.factorial_power
        return value


def series_at(f: Formula, x, prec: int) -> hyperseries.SeriesEvaluation:
    """S(H, a, P; x) for a rational x > -min(alpha), seeded by Gamma and the exact ratio recurrence."""
    x = Fraction(x)
    if not f.convergent:
        raise SeriesError(f"row {f.label} is divergent")
    dps = prec + GUARD
    a = f.a
    with mp.workdps(dps):
        seed = h_shifted(f.H, x, prec) / mpmath.power(numerics.rat_to_mpf(abs(a)), numerics.rat_to_mpf(x))

        def terms():
            u = seed
            n = 0
            while True:
                yield numerics.rat_to_mpf(poly_eval(f.P, x + n)) * u
                u = u * numerics.rat_to_mpf(_shifted_ratio(f.H, x, n) / a)
                n += 1

        if abs(a) > 1:
            r = (1 + 1 / numerics.rat_to_mpf(abs(a))) / 2
            ev = hyperseries._sum_with_tail(terms(), r, mpmath.mpf(10) ** (-dps))
        elif a == -1:
            ev = hyperseries._accelerated(terms(), prec)
        else:
            raise SeriesError(f"unsupported a = {a}")
    with mp.workdps(prec + 10):
        ev.value = +ev.value
    return ev


# ---------------------------------------------------------------------------
# harmonic constants


def harmonic_constants(prec: int) -> tuple:
    """C_1 = sum_{n>=1} (-1)^n H_{2n}/(2n+1)^2 and C_2 = sum (-1)^n H_n/(2n+1)^2."""
    numerics._check_prec(prec)
    dps = prec + numerics.GUARD_DIGITS["accelerate_alternating"] + numerics._WORK_GUARD
    count = numerics.cvz_term_count(dps) + 45
    with mp.workdps(dps):
        h = [mpmath.mpf(0)]
        for j in range(1, 2 * count + 3):
            h.append(h[-1] + mpmath.mpf(1) / j)
    c1 = numerics.accelerate_alternating(lambda i: (-1) ** (i + 1) * h[2 * i + 2] / (2 * i + 3) ** 2, prec)
    c2 = numerics.accelerate_alternating(lambda i: (-1) ** (i + 1) * h[i + 1] / (2 * i + 3) ** 2, prec)
    return c1, c2


# ---------------------------------------------------------------------------
# normal forms and matching


@dataclass
class CoefficientCheck:
    index: int
    expected: mpmath.mpf
    computed: mpmath.mpf
    delta: mpmath.mpf
    passed: bool
    recovered: Optional[Fraction] = None
    catalogued: Optional[Fraction] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "computed": mpmath.nstr(self.computed, 25),
            "delta": mpmath.nstr(self.delta, 5),
            "passed": self.passed,
            "recovered": None if self.recovered is None else str(self.recovered),
            "catalogued": None if self.catalogued is None else str(self.catalogued),
            "note": self.note,
        }


@dataclass
class TaylorReport:
    label: str
    checks: list = field(default_factory=list)
    t: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rec = ", ".join(f"a{c.index}={c.recovered}" for c in self.checks if c.recovered is not None)
        return f"{status} {self.label} taylor: {rec}"

    def to_dict(self) -> dict:
        return {"name": self.label, "passed": self.passed, "seconds": round(self.seconds, 3),
                "checks": [c.to_dict() for c in self.checks]}


def normal_form(f: Formula, prec: int) -> dict:
    """index -> (catalogued rational, normalization) with t_index = rational * normalization.

    The normalization is an mpf at ``prec``; the rational is the catalogued a_i
    (a_0 for index 0).
    """
    tay = f.taylor
    D = f.D
    out = {}
    with mp.workdps(prec + 10):
        pi = numerics.pi_value(prec + 5)
        q = lambda key: Fraction(tay[key])
        if tay["form"] == "c1":
            a0 = q("a0")
            absD = abs(D)
            root = mpmath.sqrt(absD)
            base = numerics.rat_to_mpf(a0) * absD
            out[0] = (a0, absD * root / pi)
            out[1] = (Fraction(0), mpmath.mpf(1))
            out[2] = (q("a2"), -base * absD * lfunc.L_value(D, 1, prec))
            # the x^3 term enters with a plus sign: t_3 = a_0 |D| a_3 D^2 L(D, 2)
            out[3] = (q("a3"), base * D * D * lfunc.L_value(D, 2, prec))
        elif tay["form"] == "c2":
            a0 = q("a0")
            root = mpmath.sqrt(D)
            base = numerics.rat_to_mpf(a0) * D
            out[0] = (a0, D * root / pi ** 2)
            out[1] = (Fraction(0), mpmath.mpf(1))
            out[2] = (q("a2"), -base * D * root)
            out[3] = (Fraction(0), mpmath.mpf(1))
            out[4] = (q("a4"), base * D ** 3 * lfunc.L_value(D, 2, prec))
            out[5] = (q("a5"), -base * numerics.rat_to_mpf(a0) * D ** 4 * lfunc.L_value(D, 3, prec))
        else:
            scale = numerics.rat_to_mpf(q("scale"))
            for idx, (coef, basis) in tay["terms"].items():
                out[int(idx)] = (Fraction(coef), scale * closedform.evaluate(basis, prec))
    return out


def errata(f: Formula) -> dict:
    """index -> corrected rational for coefficients whose printed value is inconsistent."""
    raw = (f.taylor or {}).get("errata", {})
    return {int(key.lstrip("a")): Fraction(value) for key, value in raw.items()}


def harmonic_a4(f: Formula, prec: int) -> Optional[mpmath.mpf]:
    """t_4 predicted by the C_1/C_2 formula (rows carrying ``a4_harmonic``)."""
    spec = (f.taylor or {}).get("a4_harmonic")
    if not spec:
        return None
    c1, c2 = harmonic_constants(prec)
    with mp.workdps(prec + 10):
        inner = spec["C1"] * c1 + spec["C2"] * c2 + spec["L_log2"] * lfunc.L_value(-4, 2, prec) * mpmath.log(2)
        a4 = numerics.rat_to_mpf(Fraction(spec["scale"])) * inner
        return numerics.rat_to_mpf(Fraction(f.taylor["a0"])) * abs(f.D) * a4


def match_taylor_row(f: Formula, prec: int, a4_tol_digits: int = 120) -> TaylorReport:
    """Compare t_i with the catalogued normal form and recover each a_i by rationalization."""
    start = time.perf_counter()
    if not f.taylor:
        raise ValueError(f"row {f.label} has no Taylor data")
    forms = normal_form(f, prec)
    fixes = errata(f)
    has_a4 = "a4_harmonic" in f.taylor
    order = max(max(forms), 4 if has_a4 or f.taylor["form"] == "c1" else 0)
    t = taylor_series(f, order, prec)
    rep = TaylorReport(f.label, t=t)
    tol = mpmath.mpf(10) ** (-(prec - 30))
    with mp.workdps(prec + 10):
        for idx in sorted(forms):
            coef, norm = forms[idx]
            expected = numerics.rat_to_mpf(coef) * norm
            delta = abs(t[idx] - expected)
            check = CoefficientCheck(idx, expected, t[idx], delta, bool(delta < tol), catalogued=coef)
            if coef != 0 or idx in fixes:
                check.recovered = numerics.rationalize(t[idx] / norm, MAX_DEN, prec - 30)
                if check.recovered != coef:
                    check.passed = False
                    check.note = "rationalization mismatch"
                if idx in fixes and not check.passed:
                    fixed = fixes[idx]
                    check.delta = abs(t[idx] - numerics.rat_to_mpf(fixed) * norm)
                    check.passed = bool(check.delta < tol) and check.recovered == fixed
                    check.note = f"printed {coef} inconsistent; corrected {fixed} {'matches' if check.passed else 'also fails'}"
            else:
                check.recovered = Fraction(0) if check.passed else None
                check.note = "vanishing"
            rep.checks.append(check)
        if has_a4:
            expected = harmonic_a4(f, prec)
            delta = abs(t[4] - expected)
            rep.checks.append(CoefficientCheck(4, expected, t[4], delta, bool(delta < mpmath.mpf(10) ** (-a4_tol_digits)),
                                               note="C1/C2 formula"))
        elif f.taylor["form"] == "c1":
            rep.checks.append(CoefficientCheck(4, t[4], t[4], mpmath.mpf(0), True, note="numeric only"))
    rep.seconds = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# x = 1/2


@dataclass
class HalfValueReport:
    label: str
    value: mpmath.mpf
    expected: Optional[mpmath.mpf]
    delta: Optional[mpmath.mpf]
    passed: bool
    reading: str  # "printed" or "corrected"
    discrepancy: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        d = mpmath.nstr(self.delta, 3) if self.delta is not None else "n/a"
        extra = f" [{self.discrepancy}]" if self.discrepancy else ""
        return f"{status} {self.label} S(1/2): |delta| = {d} ({self.reading} reading){extra}"

    def to_dict(self) -> dict:
        return {"name": self.label, "passed": self.passed, "reading": self.reading,
                "value": mpmath.nstr(self.value, 30),
                "delta": None if self.delta is None else mpmath.nstr(self.delta, 5),
                "discrepancy": self.discrepancy, "seconds": round(self.seconds, 3)}


def _closed_value(hv: dict, key: str, prec: int):
    with mp.workdps(prec + 10):
        return closedform.evaluate(hv["scale"], prec) * closedform.evaluate(hv[key], prec)


def half_value(f: Formula, prec: int) -> HalfValueReport:
    """S(H, a, P; 1/2) against scale * column; a corrected reading is tried when catalogued."""
    start = time.perf_counter()
    hv = f.half_value
    if not hv:
        raise ValueError(f"row {f.label} has no half-value data")
    value = series_at(f, Fraction(1, 2), prec).value
    tol = mpmath.mpf(10) ** (-(prec - 30))
    printed_error = ""
    try:
        expected = _closed_value(hv, "column", prec)
        with mp.workdps(prec + 10):
            delta = abs(value - expected)
        printed_ok = delta < tol
    except closedform.ClosedFormError as exc:
        expected, delta, printed_ok = None, None, False
        printed_error = str(exc)
    if printed_ok or "column_corrected" not in hv:
        return HalfValueReport(f.label, value, expected, delta, bool(printed_ok), "printed",
                               printed_error, time.perf_counter() - start)
    corrected = _closed_value(hv, "column_corrected", prec)
    with mp.workdps(prec + 10):
        cdelta = abs(value - corrected)
    why = printed_error or f"printed reading off by {mpmath.nstr(delta, 3)}"
    note = f"printed {hv['column']} rejected ({why}); matches {hv['column_corrected']}"
    return HalfValueReport(f.label, value, corrected, cdelta, bool(cdelta < tol), "corrected", note,
                           time.perf_counter() - start)
