"""Integer relations by PSLQ, and rediscovery of (P, k) from (H, a, c).

The PSLQ here is the classical two-level-free variant: real arithmetic in
mpmath at the requested precision, integer transformation matrices kept as
Python ints.  A relation is only reported after an independent residual
check at the input precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from . import numerics
from .catalog import PochProduct
from .hyperseries import SeriesError, sum_series

DEFAULT_MAX_COEFF = 10 ** 15
#: primes scanned for the squarefree part of k
SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


class PSLQError(ArithmeticError):
    """Precision ran out before a relation or a norm bound was reached."""


@dataclass
class RelationResult:
    coefficients: list
    residual: mpmath.mpf
    confidence: int  # digits of margin below 10^-(prec/2)


def _nint(x) -> int:
    return int(mpmath.nint(x))


def pslq(xs: Sequence, prec: int, max_coeff: int = DEFAULT_MAX_COEFF,
         max_steps: Optional[int] = None) -> Optional[RelationResult]:
    """Integer vector r with sum r_i x_i = 0, |r_i| <= max_coeff, or None."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two numbers")
    numerics._check_prec(prec)
    max_steps = max_steps or 1000 * n * n + 20 * prec
    with mp.workdps(prec):
        x = [mpmath.mpf(v) for v in xs]
        if any(v == 0 for v in x):
            i = next(i for i, v in enumerate(x) if v == 0)
            coeffs = [0] * n
            coeffs[i] = 1
            return RelationResult(coeffs, mpmath.mpf(0), prec // 2)
        tol = mpmath.mpf(10) ** (-(prec * 3 // 4))
        gamma = mpmath.sqrt(mpmath.mpf(4) / 3)
        scale = max(abs(v) for v in x)
        x = [v / scale for v in x]

        s = [mpmath.mpf(0)] * n
        acc = mpmath.mpf(0)
        for k in range(n - 1, -1, -1):
            acc += x[k] ** 2
            s[k] = mpmath.sqrt(acc)
        t = s[0]
        y = [v / t for v in x]
        s = [v / t for v in s]

        H = [[mpmath.mpf(0)] * (n - 1) for _ in range(n)]
        for i in range(n):
            for j in range(min(i + 1, n - 1)):
                if i == j:
                    H[i][j] = s[j + 1] / s[j]
                else:
                    H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])
        A = [[int(i == j) for j in range(n)] for i in range(n)]
        B = [[int(i == j) for j in range(n)] for i in range(n)]

        def reduce_rows(rows, cols_upto):
            for i in rows:
                for j in range(min(i - 1, cols_upto), -1, -1):
                    if H[j][j] == 0:
                        continue
                    q = _nint(H[i][j] / H[j][j])
                    if q == 0:
                        continue
                    y[j] += q * y[i]
                    for k in range(j + 1):
                        H[i][k] -= q * H[j][k]
                    for k in range(n):
                        A[i][k] -= q * A[j][k]
                        B[k][j] += q * B[k][i]

        reduce_rows(range(1, n), n)
        for _ in range(max_steps):
            m = max(range(n - 1), key=lambda i: gamma ** (i + 1) * abs(H[i][i]))
            y[m], y[m + 1] = y[m + 1], y[m]
            A[m], A[m + 1] = A[m + 1], A[m]
            H[m], H[m + 1] = H[m + 1], H[m]
            for row in B:
                row[m], row[m + 1] = row[m + 1], row[m]
            if m < n - 2:
                t0 = mpmath.sqrt(H[m][m] ** 2 + H[m][m + 1] ** 2)
                t1, t2 = H[m][m] / t0, H[m][m + 1] / t0
                for i in range(m, n):
                    t3, t4 = H[i][m], H[i][m + 1]
                    H[i][m] = t1 * t3 + t2 * t4
                    H[i][m + 1] = -t2 * t3 + t1 * t4
            reduce_rows(range(m + 1, n), m + 1)

            best = min(range(n), key=lambda j: abs(y[j]))
            if abs(y[best]) < tol:
                coeffs = [B[k][best] for k in range(n)]
                return _accept(coeffs, xs, prec, max_coeff)
            diag = max(abs(H[i][i]) for i in range(n - 1))
            if diag == 0 or 1 / diag > max_coeff:
                return None
            if max(abs(v) for row in A for v in row) > 10 ** (prec // 2):
                raise PSLQError("precision exhausted")
    return None


def _accept(coeffs, xs, prec, max_coeff) -> Optional[RelationResult]:
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    if g == 0:
        return None
    coeffs = [c // g for c in coeffs]
    if max(abs(c) for c in coeffs) > max_coeff:
        return None
    with mp.workdps(prec):
        residual = abs(mpmath.fsum(c * mpmath.mpf(v) for c, v in zip(coeffs, xs)))
        limit = mpmath.mpf(10) ** (-(prec // 2))
        if residual >= limit:
            return None
        margin = prec // 2 if residual == 0 else int(mpmath.floor(-mpmath.log10(residual))) - prec // 2
    first = next(c for c in coeffs if c)
    if first < 0:
        coeffs = [-c for c in coeffs]
    return RelationResult(coeffs, residual, margin)


# ---------------------------------------------------------------------------
# formula search


@dataclass
class FoundFormula:
    P: tuple  # ascending, content 1, positive leading coefficient
    k: Fraction
    sign: int
    s: int
    relation: RelationResult
    recheck_residual: Optional[mpmath.mpf] = None


def moments(H: PochProduct, a, deg_p: int, prec: int) -> list:
    """v_j = sum_n n^j H_n / a^n for j = 0..deg_p."""
    out = []
    for j in range(deg_p + 1):
        P = [0] * j + [1]
        out.append(sum_series(H, Fraction(a), P, prec).value)
    return out


def prime_support(H: PochProduct, a) -> list:
    """Primes <= 31 dividing a's numerator or denominator or a denominator of H."""
    a = Fraction(a)
    dens = {alpha.denominator for alpha, _ in H.factors}
    out = []
    for p in SMALL_PRIMES:
        if a.numerator % p == 0 or a.denominator % p == 0 or any(d % p == 0 for d in dens):
            out.append(p)
    return out


def squarefree_candidates(primes: Sequence[int]) -> list:
    out = []
    for r in range(len(primes) + 1):
        for combo in combinations(primes, r):
            out.append(math.prod(combo))
    return sorted(out)


def _pi_power(c: int, prec: int):
    return numerics.pi_value(prec) ** c


def _normalize(coeffs: list, deg_p: int) -> Optional[tuple]:
    """(P, multiplier of sqrt(s)/pi^c) from a relation sum r_j v_j + r_last sqrt(s)/pi^c = 0."""
    P = coeffs[:deg_p + 1]
    r_last = coeffs[-1]
    if r_last == 0 or not any(P):
        return None
    while P and P[-1] == 0:
        P.pop()
    g = 0
    for c in P:
        g = math.gcd(g, c)
    mult = Fraction(-r_last, g)
    P = [c // g for c in P]
    if P[-1] < 0:
        P = [-c for c in P]
        mult = -mult
    return tuple(P), mult


def find_formula(H: PochProduct, a, c: int, deg_p: int, prec: int,
                 max_coeff: int = DEFAULT_MAX_COEFF, recheck: bool = True) -> Optional[FoundFormula]:
    """Search S(H, a, P) = +-sqrt(k)/pi^c with deg P <= deg_p; None when nothing is found."""
    a = Fraction(a)
    if deg_p >= H.degree:
        raise ValueError("deg_p must be below deg(H)")
    try:
        v = moments(H, a, deg_p, prec)
    except SeriesError:
        return None
    with mp.workdps(prec):
        pic = _pi_power(c, prec)
        for s in squarefree_candidates(prime_support(H, a)):
            target = mpmath.sqrt(s) / pic
            rel = pslq(v + [target], prec, max_coeff)
            if rel is None:
                continue
            norm = _normalize(list(rel.coefficients), deg_p)
            if norm is None:
                continue
            P, mult = norm
            found = FoundFormula(P, s * mult * mult, 1 if mult > 0 else -1, s, rel)
            if recheck and not _recheck(found, H, a, c, prec):
                continue
            return found
    return None


def _recheck(found: FoundFormula, H, a, c: int, prec: int) -> bool:
    """Residual at prec+100 must stay below 10^-(prec/2+40)."""
    hi = prec + 100
    value = sum_series(H, a, found.P, hi).value
    with mp.workdps(hi):
        rhs = found.sign * mpmath.sqrt(numerics.rat_to_mpf(found.k)) / _pi_power(c, hi)
        found.recheck_residual = abs(value - rhs)
        return found.recheck_residual < mpmath.mpf(10) ** (-(prec // 2 + 40))
