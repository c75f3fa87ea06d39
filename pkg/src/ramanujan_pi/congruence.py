"""Supercongruences for truncated sums S_p = sum_{n<p} P(n) H_n / a^n.

For a good prime p the truncated sum satisfies

    S_p = P(0) ((-1)^c 4k | p) p^c                         (mod p^(2c+1))
    S_p = P(0) ((-1)^c 4k | p) p^c + C p^(2c+1) L(D, c+2-p)  (mod p^(2c+2))

where the refined form needs the row's constant C and an exact value of the
L-function at a non-positive integer.  Everything here is exact rational
arithmetic reduced at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .catalog import Formula
from .hyperseries import h_terms
from .lfunc import L_neg, kronecker_symbol

DEFAULT_PRIMES = tuple(p for p in range(5, 98) if all(p % q for q in range(2, int(p ** 0.5) + 1)))
#: modulus whose divisibility of C_{2c+1} is reported, by weight c
DIVISOR_OF_C = {1: 5, 2: 7, 4: 279}


class BadPrime(ValueError):
    """p divides a denominator it must not divide."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % q for q in range(3, math.isqrt(n) + 1, 2))


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class PadicResidue:
    """r mod p^m."""

    p: int
    m: int
    r: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("modulus exponent must be positive")
        if not 0 <= self.r < self.p ** self.m:
            raise ValueError(f"residue {self.r} out of range for {self.p}^{self.m}")

    @property
    def modulus(self) -> int:
        return self.p ** self.m

    @classmethod
    def of(cls, x, p: int, m: int) -> "PadicResidue":
        x = Fraction(x)
        if x.denominator % p == 0:
            raise BadPrime(f"{p} divides the denominator of {x}")
        mod = p ** m
        return cls(p, m, x.numerator * pow(x.denominator, -1, mod) % mod)

    def reduce(self, m: int) -> "PadicResidue":
        if m > self.m:
            raise ValueError("cannot raise the modulus")
        return PadicResidue(self.p, m, self.r % self.p ** m)

    def _coerce(self, other):
        if isinstance(other, PadicResidue):
            if other.p != self.p:
                raise ValueError("different primes")
            return other
        return PadicResidue.of(other, self.p, self.m)

    def _combine(self, other, op):
        other = self._coerce(other)
        m = min(self.m, other.m)
        mod = self.p ** m
        return PadicResidue(self.p, m, op(self.r, other.r) % mod)

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return self._combine(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicResidue(self.p, self.m, -self.r % self.modulus)

    def signed(self) -> int:
        """Representative in (-p^m/2, p^m/2]."""
        r = self.r
        return r - self.modulus if 2 * r > self.modulus else r

    def __str__(self) -> str:
        return f"{self.signed()} mod {self.p}^{self.m}"


def reduce_mod(x, p: int, m: int) -> PadicResidue:
    return PadicResidue.of(x, p, m)


def bad_prime_reason(f: Formula, p: int) -> Optional[str]:
    """None for a good prime, else a short reason."""
    if not is_prime(p):
        return "not prime"
    if p < 5:
        return "p < 5"
    if p <= f.c + 1:
        return "p <= c + 1"
    dens = {d for d, _ in f.H.d_coding} if f.H.d_coding else {alpha.denominator for alpha, _ in f.H.factors}
    if any(d % p == 0 for d in dens):
        return f"p divides a denominator of H ({sorted(dens)})"
    if valuation(f.a, p) != 0:
        return "v_p(a) != 0"
    if valuation(f.k, p) != 0:
        return "v_p(k) != 0"
    return None


def partial_sum(f: Formula, p: int) -> Fraction:
    """S_p as an exact rational."""
    total = Fraction(0)
    inv_a = 1 / f.a
    power = Fraction(1)
    for n, h in enumerate(h_terms(f.H, p)):
        total += f.P_at(n) * h * power
        power *= inv_a
    return total


def partial_sum_mod(f: Formula, p: int) -> PadicResidue:
    reason = bad_prime_reason(f, p)
    if reason:
        raise BadPrime(f"{f.label}, p = {p}: {reason}")
    return reduce_mod(partial_sum(f, p), p, 2 * f.c + 2)


def leading_term(f: Formula, p: int) -> int:
    """P(0) ((-1)^c 4k | p) p^c as an integer."""
    x = (-1) ** f.c * 4 * f.k.numerator * f.k.denominator
    return f.P[0] * kronecker_symbol(x, p) * p ** f.c


def correction_value(f: Formula, p: int) -> tuple:
    """(C * L(D, c+2-p), note); the value is None when the refined form is unavailable here."""
    if f.C_super is None:
        return None, "no refined constant"
    if f.C_super == 0 and p >= f.c + 3:
        return Fraction(0), ""
    if f.C_super.denominator % p == 0:
        return None, f"{p} divides the denominator of C"
    s = f.c + 2 - p
    if s >= 0:
        return None, "p < c + 3"
    L = L_neg(f.D, s)
    if L.denominator % p == 0:
        return None, f"{p} divides the denominator of L(D, {s})"
    return f.C_super * L, ""


@dataclass
class RhsSuper:
    residue: PadicResidue
    refined: bool
    note: str = ""


def rhs_super(f: Formula, p: int, refined: bool = True) -> RhsSuper:
    reason = bad_prime_reason(f, p)
    if reason:
        raise BadPrime(f"{f.label}, p = {p}: {reason}")
    lead = leading_term(f, p)
    if refined:
        corr, note = correction_value(f, p)
        if corr is not None:
            value = lead + corr * p ** (2 * f.c + 1)
            return RhsSuper(reduce_mod(value, p, 2 * f.c + 2), True)
        return RhsSuper(reduce_mod(lead, p, 2 * f.c + 1), False, f"refined check skipped: {note}")
    return RhsSuper(reduce_mod(lead, p, 2 * f.c + 1), False)


@dataclass
class PrimeCheck:
    p: int
    status: str  # "pass", "fail" or "skipped"
    exponent: int = 0
    lhs: Optional[int] = None
    rhs: Optional[int] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {"p": self.p, "status": self.status, "exponent": self.exponent,
                "lhs": self.lhs, "rhs": self.rhs, "note": self.note}


@dataclass
class SuperReport:
    label: str
    c: int
    refined: bool
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ch.status != "fail" for ch in self.checks)

    @property
    def good_primes(self) -> list:
        return [ch.p for ch in self.checks if ch.status != "skipped"]

    @property
    def skipped(self) -> list:
        return [ch for ch in self.checks if ch.status == "skipped"]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        npass = sum(ch.status == "pass" for ch in self.checks)
        bad = ",".join(str(ch.p) for ch in self.skipped)
        fails = [ch.p for ch in self.checks if ch.status == "fail"]
        mode = "refined" if self.refined else "plain"
        text = f"{status} {self.label} supercongruence ({mode}): {npass} primes pass"
        if fails:
            text += f", failing at {fails}"
        if bad:
            text += f", skipped {bad}"
        return text

    def to_dict(self) -> dict:
        return {"label": self.label, "c": self.c, "refined": self.refined, "passed": self.passed,
                "checks": [ch.to_dict() for ch in self.checks]}


def verify_super(f: Formula, primes: Iterable[int] = DEFAULT_PRIMES, refined: bool = True) -> SuperReport:
    rep = SuperReport(f.label, f.c, refined)
    for p in primes:
        reason = bad_prime_reason(f, p)
        if reason:
            rep.checks.append(PrimeCheck(p, "skipped", note=reason))
            continue
        lhs = partial_sum_mod(f, p)
        rhs = rhs_super(f, p, refined)
        m = rhs.residue.m
        lhs_m = lhs.reduce(m)
        ok = lhs_m.r == rhs.residue.r
        rep.checks.append(PrimeCheck(p, "pass" if ok else "fail", m, lhs_m.signed(), rhs.residue.signed(), rhs.note))
    return rep


def divisibility_statistics(formulas: Iterable[Formula]) -> dict:
    """For each weight c in DIVISOR_OF_C: (modulus, rows with m | C, rows with C != 0, all rows).

    C = 0 rows are counted separately since 0 is trivially divisible.
    """
    out = {}
    for f in formulas:
        if f.C_super is None or f.c not in DIVISOR_OF_C:
            continue
        m = DIVISOR_OF_C[f.c]
        entry = out.setdefault(f.c, {"modulus": m, "divisible": 0, "nonzero": 0, "rows": 0, "exceptions": []})
        entry["rows"] += 1
        if f.C_super != 0:
            entry["nonzero"] += 1
            if f.C_super.numerator % m == 0:
                entry["divisible"] += 1
            else:
                entry["exceptions"].append(f.label)
    return out
