"""Arbitrary-precision scalars and the special functions used across the package.

Values are plain :class:`mpmath.mpf` / :class:`mpmath.mpc` numbers (aliased
here as ``BigReal`` / ``BigComplex``); every routine takes an explicit
precision ``prec`` in decimal digits and works internally at ``prec`` plus a
fixed number of guard digits.  Results are accurate to ``10**-(prec - g)``
where ``g`` is the per-routine guard listed in :data:`GUARD_DIGITS`.

Elementary operations (``+ - * /``, ``exp``, ``log``, ``sqrt``, ``asin``) and
the constant pi come from mpmath.  Gamma at rationals, Hurwitz zeta,
polygamma, Bernoulli numbers, alternating-series acceleration and rational
reconstruction are implemented here.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

import mpmath
from mpmath import mp

BigReal = mpmath.mpf
BigComplex = mpmath.mpc
Rat = Fraction

MIN_PREC = 30
#: internal extra digits carried by each routine (the documented guard ``g``)
GUARD_DIGITS = {
    "pi_value": 5,
    "gamma_rational": 10,
    "hurwitz_zeta": 10,
    "polygamma": 10,
    "accelerate_alternating": 10,
}
_WORK_GUARD = 15

Number = Union[int, Fraction, mpmath.mpf]


def _check_prec(prec: int) -> None:
    if prec < MIN_PREC:
        raise ValueError(f"precision too low: {prec} < {MIN_PREC} digits")


def to_rat(q) -> Fraction:
    """Coerce int / str ("num/den") / Fraction to an exact rational."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q.strip())
    raise TypeError(f"cannot interpret {q!r} as an exact rational")


def rat_to_mpf(q: Fraction) -> mpmath.mpf:
    """Round an exact rational once to the current working precision."""
    return mpmath.mpf(q.numerator) / q.denominator


def mpf_to_fraction(x) -> Fraction:
    """Exact binary value of an mpf as a Fraction."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


# ---------------------------------------------------------------------------
# Bernoulli numbers (tangent-number / zig-zag recurrence, exact integers)


@lru_cache(maxsize=None)
def _tangent_numbers(count: int) -> tuple:
    t = [0] * (count + 1)
    t[1] = 1
    for k in range(2, count + 1):
        t[k] = (k - 1) * t[k - 1]
    for k in range(2, count + 1):
        for j in range(k, count + 1):
            t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j]
    return tuple(t)


def _tangent_table(count: int) -> tuple:
    # round the cache key up so repeated growth does not recompute from scratch
    size = 64
    while size < count:
        size *= 2
    return _tangent_numbers(size)


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    k = n // 2
    t = _tangent_table(k)[k]
    four_k = 4 ** k
    sign = 1 if k % 2 else -1
    return Fraction(sign * 2 * k * t, four_k * (four_k - 1))


@lru_cache(maxsize=64)
def _bernoulli_mpf_table(count: int, dps: int) -> tuple:
    """(B_{2j} / (2j)!) as mpf, j = 1..count, at dps digits."""
    with mp.workdps(dps):
        out = []
        for j in range(1, count + 1):
            b = bernoulli(2 * j)
            out.append(mpmath.mpf(b.numerator) / (b.denominator * math.factorial(2 * j)))
        return tuple(out)


# ---------------------------------------------------------------------------
# constants


def pi_value(prec: int) -> mpmath.mpf:
    """pi to ``prec`` digits (guard 5)."""
    _check_prec(prec)
    with mp.workdps(prec + GUARD_DIGITS["pi_value"]):
        return +mp.pi


# ---------------------------------------------------------------------------
# gamma at positive rationals


def _shift_target(dps: int) -> int:
    # asymptotic expansions below converge to dps digits once the argument
    # exceeds roughly dps*ln(10)/(2*pi)
    return int(dps * 0.37) + 10


def _log_gamma_asymptotic(w: mpmath.mpf, dps: int) -> mpmath.mpf:
    eps = mpmath.mpf(2) ** (-mp.prec - 10)
    s = (w - mpmath.mpf(1) / 2) * mpmath.log(w) - w + mpmath.log(2 * mp.pi) / 2
    inv_w2 = 1 / (w * w)
    power = 1 / w
    j = 1
    prev = None
    while True:
        b = bernoulli(2 * j)
        term = mpmath.mpf(b.numerator) / (b.denominator * (2 * j) * (2 * j - 1)) * power
        s += term
        if abs(term) < eps * abs(s):
            break
        if prev is not None and abs(term) > abs(prev):
            raise ArithmeticError("Stirling series diverging; shift too small")
        prev = term
        power *= inv_w2
        j += 1
    return s


def gamma_rational(q, prec: int) -> mpmath.mpf:
    """Gamma(q) for a positive rational q, to ``prec`` digits (guard 10).

    The argument is shifted up to ``q + N`` above the Stirling threshold, the
    asymptotic series for log Gamma is summed there, and the exact rising
    factorial ``(q)_N`` is divided out.
    """
    _check_prec(prec)
    q = to_rat(q)
    if q <= 0:
        raise ValueError("gamma_rational needs a positive argument")
    if q.denominator == 1 and q <= 300:
        return mpmath.mpf(math.factorial(int(q) - 1))
    dps = prec + GUARD_DIGITS["gamma_rational"] + _WORK_GUARD
    with mp.workdps(dps):
        target = _shift_target(dps)
        shift = max(0, math.ceil(target - q))
        rising = Fraction(1)
        for i in range(shift):
            rising *= q + i
        w = rat_to_mpf(q + shift)
        lg = _log_gamma_asymptotic(w, dps)
        value = mpmath.exp(lg) / rat_to_mpf(rising)
    with mp.workdps(prec + GUARD_DIGITS["gamma_rational"]):
        return +value


def beta_rational(p, q, prec: int) -> mpmath.mpf:
    """B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q) at positive rationals."""
    p, q = to_rat(p), to_rat(q)
    with mp.workdps(prec + 20):
        value = gamma_rational(p, prec + 10) * gamma_rational(q, prec + 10) / gamma_rational(p + q, prec + 10)
    with mp.workdps(prec + GUARD_DIGITS["gamma_rational"]):
        return +value


# ---------------------------------------------------------------------------
# Hurwitz zeta and polygamma


def _as_mpf(alpha) -> mpmath.mpf:
    if isinstance(alpha, Fraction):
        return rat_to_mpf(alpha)
    if isinstance(alpha, (int, str)):
        return rat_to_mpf(to_rat(alpha))
    return mpmath.mpf(alpha)


def _hurwitz_em(s: int, x: mpmath.mpf, dps: int) -> mpmath.mpf:
    """Euler-Maclaurin evaluation of zeta(s, x), s >= 2, x > 0, at the current dps."""
    n_shift = max(0, int(math.ceil(_shift_target(dps) + s / 2 - float(x))))
    total = mpmath.mpf(0)
    for n in range(n_shift):
        total += (x + n) ** (-s)
    w = x + n_shift
    w_s = w ** (-s)
    total += w * w_s / (s - 1) + w_s / 2
    eps = mpmath.mpf(2) ** (-mp.prec - 10)
    inv_w2 = 1 / (w * w)
    # term_j = B_2j/(2j)! * (s)_{2j-1} * w^{-s-2j+1}
    rising = mpmath.mpf(s)  # (s)_{2j-1} for j = 1
    power = w_s / w
    table = _bernoulli_mpf_table(_shift_target(dps) * 2 + 2 * s + 20, dps)
    prev = None
    for j in range(1, len(table) + 1):
        term = table[j - 1] * rising * power
        total += term
        if abs(term) < eps * abs(total):
            return total
        if prev is not None and abs(term) > abs(prev):
            break
        prev = term
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power *= inv_w2
    raise ArithmeticError("Euler-Maclaurin tail did not converge")


def hurwitz_zeta(s: int, alpha, prec: int) -> mpmath.mpf:
    """zeta(s, alpha) = sum_{n>=0} (n + alpha)^-s for integer s >= 2 (guard 10).

    ``alpha`` may be a rational in (0, 1] or any positive real; rationals are
    rounded once at working precision.
    """
    _check_prec(prec)
    if not isinstance(s, int) or s < 2:
        raise ValueError("hurwitz_zeta needs an integer s >= 2")
    if isinstance(alpha, (Fraction, int, str)):
        a = to_rat(alpha)
        if not (0 < a <= 1):
            raise ValueError("alpha must lie in (0, 1]")
    dps = prec + GUARD_DIGITS["hurwitz_zeta"] + _WORK_GUARD
    with mp.workdps(dps):
        x = _as_mpf(alpha)
        if x <= 0:
            raise ValueError("alpha must be positive")
        value = _hurwitz_em(s, x, dps)
    with mp.workdps(prec + GUARD_DIGITS["hurwitz_zeta"]):
        return +value


def _digamma_em(x: mpmath.mpf, dps: int) -> mpmath.mpf:
    n_shift = max(0, int(math.ceil(_shift_target(dps) - float(x))))
    total = mpmath.mpf(0)
    for n in range(n_shift):
        total -= 1 / (x + n)
    w = x + n_shift
    total += mpmath.log(w) - 1 / (2 * w)
    eps = mpmath.mpf(2) ** (-mp.prec - 10)
    inv_w2 = 1 / (w * w)
    power = inv_w2
    j = 1
    prev = None
    while True:
        b = bernoulli(2 * j)
        term = mpmath.mpf(b.numerator) / (b.denominator * 2 * j) * power
        total -= term
        if abs(term) < eps * abs(total):
            return total
        if prev is not None and abs(term) > abs(prev):
            raise ArithmeticError("digamma asymptotic series diverging")
        prev = term
        power *= inv_w2
        j += 1


def polygamma(k: int, alpha, shift: int, prec: int) -> mpmath.mpf:
    """psi^(k)(alpha + shift), k >= 0, alpha > 0 (guard 10).

    For k >= 1 this is (-1)^(k+1) k! zeta(k+1, alpha + shift); digamma uses
    its own asymptotic expansion.  The value at ``alpha`` is computed once and
    carried forward by psi^(k)(z+1) = psi^(k)(z) + (-1)^k k! / z^(k+1).
    """
    _check_prec(prec)
    if k < 0 or shift < 0:
        raise ValueError("k and shift must be nonnegative")
    dps = prec + GUARD_DIGITS["polygamma"] + _WORK_GUARD
    with mp.workdps(dps):
        z = _as_mpf(alpha)
        if z <= 0:
            raise ValueError("polygamma needs a positive argument")
        if k == 0:
            value = _digamma_em(z, dps)
        else:
            value = (-1) ** (k + 1) * math.factorial(k) * _hurwitz_em(k + 1, z, dps)
        step = (-1) ** k * math.factorial(k)
        for i in range(shift):
            value += step / (z + i) ** (k + 1)
    with mp.workdps(prec + GUARD_DIGITS["polygamma"]):
        return +value


def zeta(s: int, prec: int) -> mpmath.mpf:
    """Riemann zeta at an integer s >= 2."""
    return hurwitz_zeta(s, 1, prec)


# ---------------------------------------------------------------------------
# alternating series


def cvz_weights(n: int) -> tuple:
    """Chebyshev acceleration weights c_k (k < n) and normaliser d at current dps.

    sum_k (-1)^k a_k ~= sum_k c_k a_k / d  (Cohen-Villegas-Zagier); the
    weights carry the alternating sign themselves.
    """
    d = (3 + mpmath.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b = mpmath.mpf(-1)
    c = -d
    weights = []
    for k in range(n):
        c = b - c
        weights.append(c)
        b = b * (k + n) * (k - n) / ((k + mpmath.mpf(1) / 2) * (k + 1))
    return weights, d


def cvz_term_count(prec: int) -> int:
    return int(math.ceil(1.32 * prec)) + 5


def accelerate_alternating(term: Callable[[int], Number], prec: int,
                           n_terms: Optional[int] = None) -> mpmath.mpf:
    """Sum of an alternating series sum_{n>=0} term(n) (guard 10).

    ``term(n)`` returns the signed n-th term.  Uses the Chebyshev-polynomial
    scheme of Cohen, Rodriguez Villegas and Zagier with ``1.32 * prec`` terms,
    which converges like 5.83^-n for totally monotone magnitudes.  A finite
    non-alternating prefix is summed directly.
    """
    _check_prec(prec)
    dps = prec + GUARD_DIGITS["accelerate_alternating"] + _WORK_GUARD
    with mp.workdps(dps):
        n = n_terms or cvz_term_count(dps)
        terms = []
        for i in range(n + 40):
            t = term(i)
            terms.append(rat_to_mpf(t) if isinstance(t, (Fraction, int)) else mpmath.mpf(t))
        start = _alternation_start(terms)
        if start is None or start > n // 4:
            raise ValueError("series is not (eventually) alternating")
        head = mpmath.fsum(terms[:start])
        tail = terms[start:start + n]
        weights, d = cvz_weights(len(tail))
        sign = 1 if tail[0] > 0 else -1
        acc = mpmath.fsum(w * abs(t) for w, t in zip(weights, tail))
        value = head + sign * acc / d
    with mp.workdps(prec + GUARD_DIGITS["accelerate_alternating"]):
        return +value


def _alternation_start(terms) -> Optional[int]:
    """First index from which signs strictly alternate (zero terms disqualify)."""
    start = None
    for i in range(len(terms) - 1, 0, -1):
        if terms[i] == 0 or terms[i - 1] == 0 or (terms[i] > 0) == (terms[i - 1] > 0):
            start = i
            break
    else:
        return 0 if terms and terms[0] != 0 else None
    return start if start < len(terms) - 1 else None


def accelerate_values(values, prec: int) -> mpmath.mpf:
    """CVZ-accelerate already computed magnitudes: sum_k (-1)^k values[k]."""
    weights, d = cvz_weights(len(values))
    return mpmath.fsum(w * v for w, v in zip(weights, values)) / d


# ---------------------------------------------------------------------------
# rational reconstruction


def rationalize(x, max_den: int, prec: int) -> Optional[Fraction]:
    """Best rational p/q with q <= max_den, accepted only if |x - p/q| < 10^-(3 prec / 4).

    Continued-fraction convergents of the exact binary value of ``x``
    (:meth:`fractions.Fraction.limit_denominator`).  Returns None when no
    such rational exists.
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    if isinstance(x, mpmath.mpc):
        if abs(x.imag) > mpmath.mpf(10) ** (-(3 * prec) // 4):
            return None
        x = x.real
    exact = mpf_to_fraction(x)
    candidate = exact.limit_denominator(max_den)
    tol = Fraction(1, 10 ** ((3 * prec) // 4))
    if abs(exact - candidate) < tol:
        return candidate
    return None
