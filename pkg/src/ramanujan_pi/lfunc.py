"""Kronecker characters, Dirichlet L-values and generalized Bernoulli numbers."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from .numerics import (
    GUARD_DIGITS,
    _WORK_GUARD,
    _check_prec,
    _digamma_em,
    _hurwitz_em,
    bernoulli,
)


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental(D: int) -> bool:
    """True for 1 and for fundamental discriminants."""
    if D == 1:
        return True
    if D == 0:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _jacobi(a: int, n: int) -> int:
    # n odd positive
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D | n) for any integer D and n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * _jacobi(D, n)


def kronecker(D: int, n: int) -> int:
    """The real character chi_D(n) = (D | n) of a fundamental discriminant D.

    D = 1 gives the trivial character.
    """
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if D == 1:
        return 1
    return kronecker_symbol(D, n)


class KroneckerChar:
    """chi_D as a periodic table over one period |D|."""

    def __init__(self, D: int):
        if not is_fundamental(D):
            raise ValueError(f"{D} is not a fundamental discriminant")
        self.D = D
        self.modulus = abs(D)
        self.values = _char_table(D)

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]

    @property
    def is_odd(self) -> bool:
        return self.D < 0


@lru_cache(maxsize=None)
def _char_table(D: int) -> tuple:
    f = abs(D)
    if D == 1:
        return (1,)
    return tuple(kronecker_symbol(D, r) if r else 0 for r in range(f))


#: conductors above this use the blocked expansion instead of one Hurwitz
#: value per residue
BLOCKED_CONDUCTOR = 2000
_BLOCKS = 8


def _L_value_blocked(D: int, m: int, dps: int) -> mpmath.mpf:
    """L(chi, m) = sum_{n <= K f} chi(n) n^-m + Taylor expansion of the tail.

    The tail sum_{k >= K} sum_r chi(r) (k f + r)^-m is expanded around the
    block centres k + 1/2:  f^-m sum_j C(m+j-1, j) (-1)^j M_j zeta(m+j, K+1/2)
    with exact character moments M_j = sum_r chi(r) (r/f - 1/2)^j.
    """
    f = abs(D)
    table = _char_table(D)
    head = mpmath.mpf(0)
    one = mpmath.mpf(1)
    for n in range(1, _BLOCKS * f + 1):
        chi = table[n % f]
        if chi:
            head += chi * one / n ** m
    ratio = math.log(2 * _BLOCKS + 1)
    n_moments = int(dps * math.log(10) / ratio) + 10
    # T_j = sum_r chi(r) (2r - f)^j; chi(f-r) = +-chi(r) kills half the j
    parity = 1 if D < 0 else 0
    moments = [0] * (n_moments + 1)
    for r in range(1, (f + 1) // 2):
        chi = table[r]
        if not chi:
            continue
        y = 2 * r - f
        y2 = y * y
        p = 2 * chi * (y if parity else 1)
        for j in range(parity, n_moments + 1, 2):
            moments[j] += p
            p *= y2
    centre = mpmath.mpf(2 * _BLOCKS + 1) / 2
    tail = mpmath.mpf(0)
    scale = mpmath.mpf(2 * f)
    for j in range(parity, n_moments + 1, 2):
        if not moments[j]:
            continue
        z = _hurwitz_em(m + j, centre, dps)
        tail += math.comb(m + j - 1, j) * (-1) ** j * mpmath.mpf(moments[j]) / scale ** j * z
    return head + tail / mpmath.mpf(f) ** m


@lru_cache(maxsize=32)
def _L_value_cached(D: int, m: int, prec: int) -> mpmath.mpf:
    f = abs(D)
    table = _char_table(D)
    dps = prec + GUARD_DIGITS["hurwitz_zeta"] + _WORK_GUARD
    with mp.workdps(dps):
        if D == 1:
            return _hurwitz_em(m, mpmath.mpf(1), dps)
        if f > BLOCKED_CONDUCTOR:
            return _L_value_blocked(D, m, dps)
        total = mpmath.mpf(0)
        # chi(f - r) = sign * chi(r): only half the residues are evaluated
        sign = -1 if D < 0 else 1
        for r in range(1, (f + 1) // 2 + (1 if f % 2 == 0 else 0)):
            chi = table[r]
            if not chi:
                continue
            x = mpmath.mpf(r) / f
            if m == 1:
                # L(chi, 1) = -(1/f) sum chi(r) psi(r/f), valid since sum chi = 0
                v = _digamma_em(x, dps)
                pair = _digamma_em(1 - x, dps) if 2 * r != f else None
                term = -v if pair is None else -(v + sign * pair)
            else:
                v = _hurwitz_em(m, x, dps)
                pair = _hurwitz_em(m, 1 - x, dps) if 2 * r != f else None
                term = v if pair is None else v + sign * pair
            total += chi * term
        if m == 1:
            return total / f
        return total / mpmath.mpf(f) ** m


def L_value(D: int, m: int, prec: int) -> mpmath.mpf:
    """L(D, m) = sum_{n>=1} (D|n) n^-m for m >= 1 (m = 1 requires D != 1).

    Computed from Hurwitz zeta values at r/|D| (digamma values for m = 1).
    """
    _check_prec(prec)
    if m < 1:
        raise ValueError("use L_neg for nonpositive arguments")
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if D == 1 and m == 1:
        raise ValueError("L(1, 1) diverges (pole of zeta)")
    value = _L_value_cached(D, m, prec)
    with mp.workdps(prec + GUARD_DIGITS["hurwitz_zeta"]):
        return +value


@lru_cache(maxsize=None)
def _power_sums(D: int, top: int) -> tuple:
    """S_j = sum_{r=1}^{|D|} chi(r) r^j for j = 0..top."""
    f = abs(D)
    table = _char_table(D)
    sums = [0] * (top + 1)
    for r in range(1, f + 1):
        chi = table[r % f]
        if not chi:
            continue
        p = chi
        for j in range(top + 1):
            sums[j] += p
            p *= r
    return tuple(sums)


def _power_sums_upto(D: int, n: int) -> tuple:
    top = 32
    while top < n:
        top *= 2
    return _power_sums(D, top)


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    """Exact Bernoulli polynomial B_n(x)."""
    return sum((math.comb(n, j) * bernoulli(j) * x ** (n - j) for j in range(n + 1)), Fraction(0))


@lru_cache(maxsize=None)
def gen_bernoulli(D: int, n: int) -> Fraction:
    """Generalized Bernoulli number B_{n, chi_D} = |D|^(n-1) sum_r chi(r) B_n(r/|D|).

    Expanded through B_n(x) = sum_j C(n, j) B_j x^(n-j) so only integer power
    sums of the character are needed.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    f = abs(D)
    if D == 1:
        value = bernoulli(n)
        return -value if n == 1 else value  # B_n(1)
    sums = _power_sums_upto(D, n)
    total = Fraction(0)
    for j in range(n + 1):
        b = bernoulli(j)
        if b:
            total += math.comb(n, j) * b * sums[n - j] * Fraction(f) ** (j - 1)
    return total


def L_neg(D: int, s: int) -> Fraction:
    """Exact L(D, s) at an integer s <= 0: -B_{1-s, chi_D} / (1 - s)."""
    if s > 0:
        raise ValueError("L_neg needs s <= 0")
    n = 1 - s
    return -gen_bernoulli(D, n) / n


def fundamental_discriminant(x: Fraction) -> int:
    """Fundamental discriminant of Q(sqrt(x)) for a nonzero rational x (1 for squares)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no discriminant")
    n = x.numerator * x.denominator
    sign = -1 if n < 0 else 1
    n = abs(n)
    core = 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            core *= p
        p += 1
    core *= n
    core *= sign
    if core == 1:
        return 1
    return core if core % 4 == 1 else 4 * core
