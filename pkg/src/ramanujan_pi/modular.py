"""Eisenstein series at complex points, level functions, G*, and CM specialization.

Normalization: E_2 = 1 - 24 sum sigma_1(n) q^n, E_4 = 1 + 240 sum sigma_3(n) q^n,
E_6 = 1 - 504 sum sigma_5(n) q^n with q = exp(2 pi i tau).

The master identity checked here is

    sum_{n>=0} (n - G*(tau)) u(n) h(tau)^n = k / (4 pi Im tau) * F / (D(h)/h)

for a weight-k form F with F = sum u(n) h^n, D = q d/dq.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import mpmath
from mpmath import mp

from . import numerics
from .catalog import CMPoint, LEVEL_CODING, poch_product, expand_d_coding

GUARD = 20
NTERMS_CAP = 200_000


class ModularError(ValueError):
    pass


@dataclass(frozen=True)
class LevelContext:
    N: int
    s_N: Fraction
    multiplier: int
    coding: tuple

    @property
    def H(self):
        return expand_d_coding(self.coding)


LEVELS = {
    1: LevelContext(1, Fraction(1, 6), 6, LEVEL_CODING[1]),
    2: LevelContext(2, Fraction(1, 4), 4, LEVEL_CODING[2]),
    3: LevelContext(3, Fraction(1, 3), 3, LEVEL_CODING[3]),
    4: LevelContext(4, Fraction(1, 2), 3, LEVEL_CODING[4]),
}

#: rhs constant c_N with  sum (mult n + 1 - X) H_N(n) / J_N^n = c_N / (pi Im tau) * Phi
RHS_CONSTANT = {1: Fraction(3), 2: Fraction(2), 3: Fraction(3, 2), 4: Fraction(3, 2)}


@dataclass
class ModularEval:
    tau: mpmath.mpc
    q: mpmath.mpc
    values: dict = field(default_factory=dict)
    prec: int = 0
    nterms: int = 0
    tail_bound: mpmath.mpf = mpmath.mpf(0)

    def __getitem__(self, key):
        return self.values[key]


def _tau_value(tau) -> mpmath.mpc:
    if isinstance(tau, CMPoint):
        return tau.to_complex()
    return mpmath.mpc(tau)


def default_nterms(im_tau, prec: int) -> int:
    """Smallest n with exp(-2 pi Im(tau) n) n^6 < 10^-prec."""
    c = 2 * math.pi * float(im_tau) / math.log(10)
    if c <= 0:
        raise ModularError("Im(tau) must be positive")
    n = 1
    while n * c - 6 * math.log10(n) < prec:
        n += 1
        if n > NTERMS_CAP:
            raise ModularError("q-series tail bound unreachable (Im tau too small)")
    return n


def _sigma_table(n: int, k: int) -> list:
    table = [0] * (n + 1)
    for d in range(1, n + 1):
        p = d ** k
        for m in range(d, n + 1, d):
            table[m] += p
    return table


def _eisenstein_triple(tau_c: mpmath.mpc, dps: int, nterms: Optional[int] = None):
    """(E2, E4, E6, q, nterms, tail) at the current working precision."""
    im = tau_c.imag
    if im <= 0:
        raise ModularError("tau must lie in the upper half plane")
    n = nterms or default_nterms(im, dps)
    q = mpmath.expjpi(2 * tau_c)
    s1 = _sigma_table(n, 1)
    s3 = _sigma_table(n, 3)
    s5 = _sigma_table(n, 5)
    a1 = a3 = a5 = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    for m in range(1, n + 1):
        qn *= q
        a1 += s1[m] * qn
        a3 += s3[m] * qn
        a5 += s5[m] * qn
    absq = abs(q)
    # sigma_5(m) <= zeta(5) m^5 < 1.04 m^6; geometric tail after term n
    tail = 504 * mpmath.mpf(1.04) * (n + 1) ** 6 * absq ** (n + 1) / (1 - absq) ** 7
    return 1 - 24 * a1, 1 + 240 * a3, 1 - 504 * a5, q, n, tail


def eisenstein(k: int, tau, prec: int, nterms: Optional[int] = None) -> mpmath.mpc:
    """E_k(tau) for k in {2, 4, 6}."""
    if k not in (2, 4, 6):
        raise ValueError("k must be 2, 4 or 6")
    numerics._check_prec(prec)
    dps = prec + GUARD
    with mp.workdps(dps):
        e2, e4, e6, _, n, tail = _eisenstein_triple(_tau_value(tau), dps, nterms)
        if nterms is not None and tail > mpmath.mpf(10) ** (-prec):
            raise ModularError(f"q-series tail {mpmath.nstr(tail, 3)} exceeds 10^-{prec} at nterms = {n}")
        value = {2: e2, 4: e4, 6: e6}[k]
    with mp.workdps(prec + 10):
        return +value


def _level_values(N: int, tau_c: mpmath.mpc, dps: int, nterms: Optional[int] = None) -> ModularEval:
    e2, e4, e6, q, n, tail = _eisenstein_triple(tau_c, dps, nterms)
    ev = ModularEval(tau_c, q, {"E2": e2, "E4": e4, "E6": e6}, dps, n, tail)
    v = ev.values
    if N == 1:
        v["J"] = e4 ** 3 / (e4 ** 3 - e6 ** 2)
    elif N in (2, 3):
        e2n, e4n, _, _, _, _ = _eisenstein_triple(N * tau_c, dps, None)
        v["F2"] = (N * e2n - e2) / (N - 1)
        v["F4"] = (N * N * e4n - e4) / (N * N - 1)
        v["P2"] = (N * e2n + e2) / (N + 1)
        v["J"] = v["F2"] ** 4 / (v["F2"] ** 4 - v["F4"] ** 2)
    elif N == 4:
        e2_2 = _eisenstein_triple(2 * tau_c, dps, None)[0]
        e2_4 = _eisenstein_triple(4 * tau_c, dps, None)[0]
        v["F2"] = (4 * e2_4 - e2) / 3
        v["G2"] = 4 * e2_4 - 4 * e2_2 + e2
        v["P2"] = e2_2
        v["J"] = v["F2"] ** 2 / (v["F2"] ** 2 - v["G2"] ** 2)
    else:
        raise ValueError("N must be 1, 2, 3 or 4")
    return ev


def level_functions(N: int, tau, prec: int) -> ModularEval:
    """J_N and the level data (E2, E4, E6, F2, F4, P2, G2 as applicable)."""
    numerics._check_prec(prec)
    dps = prec + GUARD
    with mp.workdps(dps):
        ev = _level_values(N, _tau_value(tau), dps)
    with mp.workdps(prec + 10):
        ev.values = {key: +val for key, val in ev.values.items()}
    ev.prec = prec
    return ev


def _ratio_X(N: int, ev: ModularEval, im) -> mpmath.mpc:
    """X with G* = -s (1 - X): E2* E4/E6, P2* F2/F4 or P2*/G2."""
    v = ev.values
    pi = +mp.pi
    if N == 1:
        e2s = v["E2"] - 3 / (pi * im)
        return e2s * v["E4"] / v["E6"]
    if N in (2, 3):
        p2s = v["P2"] - 6 / ((N + 1) * pi * im)
        return p2s * v["F2"] / v["F4"]
    p2s = v["P2"] - 3 / (2 * pi * im)
    return p2s / v["G2"]


def _denominator(N: int, ev: ModularEval):
    v = ev.values
    if N == 1:
        return v["E6"]
    return v["G2"] if N == 4 else v["F4"]


def gstar(N: int, tau, prec: int) -> mpmath.mpc:
    """G*(tau) = -(1/multiplier) (1 - X) for the level's X."""
    dps = prec + GUARD
    with mp.workdps(dps):
        tau_c = _tau_value(tau)
        ev = _level_values(N, tau_c, dps)
        if abs(_denominator(N, ev)) < mpmath.mpf(10) ** (-(prec // 2)):
            raise ModularError(f"denominator vanishes at tau = {mpmath.nstr(tau_c, 10)}")
        g = -(1 - _ratio_X(N, ev, tau_c.imag)) / LEVELS[N].multiplier
    with mp.workdps(prec + 10):
        return +g


# ---------------------------------------------------------------------------
# the master identity


@dataclass
class Prop1Report:
    spec: str
    tau: str
    lhs: mpmath.mpc
    rhs: mpmath.mpc
    residual: mpmath.mpf
    h: mpmath.mpc
    terms: int
    passed: bool
    branch: int = 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} prop1 {self.spec} tau={self.tau}: residual {mpmath.nstr(self.residual, 3)}, "
                f"|h| = {mpmath.nstr(abs(self.h), 5)}, {self.terms} terms")

    def to_dict(self) -> dict:
        return {"name": f"{self.spec} {self.tau}", "passed": self.passed,
                "residual": mpmath.nstr(self.residual, 5), "terms": self.terms,
                "abs_h": mpmath.nstr(abs(self.h), 10)}


def _prop1_pieces(spec, ev: ModularEval, im):
    """(u PochProduct, h, G*, weight, F candidates, D(h)/h)."""
    v = ev.values
    pi = +mp.pi
    if spec in (1, 2, 3, 4):
        N = spec
        g = -(1 - _ratio_X(N, ev, im)) / LEVELS[N].multiplier
        h = 1 / v["J"]
        if N == 1:
            F = [mpmath.sqrt(v["E4"]) * s for s in (1, -1)]
            dh = v["E6"] / v["E4"]
        elif N in (2, 3):
            F = [v["F2"]]
            dh = v["F4"] / v["F2"]
        else:
            F = [v["F2"]]
            dh = v["G2"]
        return LEVELS[N].H, h, g, 2, F, dh
    e2s = v["E2"] - 3 / (pi * im)
    if spec == "E4_quarter":
        u = poch_product([(Fraction(1, 12), 1), (Fraction(5, 12), 1)], 2)
        g = -(1 - e2s * v["E4"] / v["E6"]) / 12
        h = 1 / v["J"]
        root = mpmath.root(v["E4"], 4)
        F = [root * mpmath.expjpi(mpmath.mpf(j) / 2) for j in range(4)]
        dh = v["E6"] / v["E4"]
        return u, h, g, 1, F, dh
    if spec == "E6_sixth":
        u = poch_product([(Fraction(1, 12), 1), (Fraction(7, 12), 1)], 2)
        g = (e2s * v["E6"] / v["E4"] ** 2 - 1) / 12
        h = 1 / (1 - v["J"])
        root = mpmath.root(v["E6"], 6)
        F = [root * mpmath.expjpi(mpmath.mpf(j) / 3) for j in range(6)]
        dh = v["E4"] ** 2 / v["E6"]
        return u, h, g, 1, F, dh
    raise ValueError(f"unknown specification {spec!r}")


def _prop1_lhs(u, h, g, dps: int):
    """sum (n - G*) u(n) h^n with the geometric tail rule, or CVZ when h = -1."""
    from .hyperseries import ratio_ints, _sum_with_tail, _accelerated

    absh = abs(h)
    eps = mpmath.mpf(10) ** (-dps)

    def terms(hval, gval):
        w = mpmath.mpf(1)
        n = 0
        while True:
            yield (n - gval) * w
            num, den = ratio_ints(u, n)
            w = w * hval * num / den
            n += 1

    if absh < 1 - mpmath.mpf(10) ** (-(dps // 2)):
        r = (1 + absh) / 2
        return _sum_with_tail(terms(h, g), r, eps)
    if abs(h + 1) < mpmath.mpf(10) ** (-(dps // 2)) and abs(g.imag) < mpmath.mpf(10) ** (-(dps // 2)):
        return _accelerated(terms(mpmath.mpf(-1), g.real), dps - 2 * GUARD)
    raise ModularError(f"|h(tau)| = {mpmath.nstr(absh, 8)} >= 1: the series diverges")


def verify_prop1(spec, tau, prec: int, nterms: Optional[int] = None) -> Prop1Report:
    """Residual of the master identity at tau (CM or generic) for spec in {1,2,3,4,'E4_quarter','E6_sixth'}.

    F^(1/m) is multivalued; the branch closest to the series value is reported.
    """
    numerics._check_prec(prec)
    dps = prec + GUARD
    with mp.workdps(dps):
        tau_c = _tau_value(tau)
        N = spec if spec in (1, 2, 3, 4) else 1
        ev = _level_values(N, tau_c, dps, nterms)
        im = tau_c.imag
        u, h, g, weight, F, dh = _prop1_pieces(spec, ev, im)
        ev_lhs = _prop1_lhs(u, h, g, dps)
        lhs = ev_lhs.value
        pref = weight / (4 * mp.pi * im)
        candidates = [pref * f / dh for f in F]
        branch = min(range(len(candidates)), key=lambda j: abs(candidates[j] - lhs))
        rhs = candidates[branch]
        residual = abs(lhs - rhs)
        passed = residual < mpmath.mpf(10) ** (-(prec - 30))
    with mp.workdps(prec + 10):
        return Prop1Report(str(spec), str(tau) if isinstance(tau, CMPoint) else mpmath.nstr(tau_c, 8),
                           +lhs, +rhs, +residual, +h, ev_lhs.terms_used, bool(passed), branch)


# ---------------------------------------------------------------------------
# CM specialization


@dataclass
class CMResult:
    a: Fraction
    P: tuple  # ascending integer coefficients
    k: Fraction
    sign: int
    beta: Fraction  # 1 - X, the constant term before clearing denominators

    def to_dict(self) -> dict:
        return {"a": str(self.a), "P": list(self.P), "k": str(self.k), "sign": self.sign}


def cm_specialize(N: int, tau, prec: int, max_den: int = 10 ** 40) -> Optional[CMResult]:
    """Rational (a, P, k, sign) at a CM point, or None when some value is not rational.

    a = J_N(tau); P is multiplier * n + (1 - X) scaled to content 1; sqrt(k) is
    lambda * c_N * Phi / Im(tau) with lambda = lead(P) / multiplier.  The sign is
    taken against the principal square root of k.
    """
    numerics._check_prec(prec)
    dps = prec + GUARD
    with mp.workdps(dps):
        tau_c = _tau_value(tau)
        ev = _level_values(N, tau_c, dps)
        small = mpmath.mpf(10) ** (-(prec // 2))
        v = ev.values
        denom_J = v["E4"] ** 3 - v["E6"] ** 2 if N == 1 else None
        if abs(_denominator(N, ev)) < small or (denom_J is not None and abs(denom_J) < small):
            return None
        a = numerics.rationalize(v["J"], max_den, prec)
        if a is None or a == 0:
            return None
        im = tau_c.imag
        beta = numerics.rationalize(1 - _ratio_X(N, ev, im), max_den, prec)
        if beta is None:
            return None
        mult = LEVELS[N].multiplier
        lead = Fraction(mult)
        den = math.lcm(lead.denominator, beta.denominator)
        ints = [int(beta * den), int(lead * den)]
        g = math.gcd(*ints)
        P = tuple(c // g for c in ints)
        if P[-1] < 0:
            P = tuple(-c for c in P)
        lam = Fraction(P[-1], mult)
        cN = numerics.rat_to_mpf(RHS_CONSTANT[N])
        if N == 1:
            phi = v["E4"] * mpmath.sqrt(v["E4"]) / v["E6"]
        elif N in (2, 3):
            phi = v["F2"] ** 2 / v["F4"]
        else:
            phi = v["F2"] / v["G2"]
        V = numerics.rat_to_mpf(lam) * cN * phi / im
        k = numerics.rationalize(V * V, max_den, prec)
        if k is None or k == 0:
            return None
        if k > 0:
            sign = 1 if V.real > 0 else -1
        else:
            sign = 1 if V.imag > 0 else -1
    return CMResult(a, P, k, sign, beta)


# ---------------------------------------------------------------------------
# structural checks


def _D(fn, tau_c, step):
    """q d/dq f = (1 / 2 pi i) df/dtau by a central difference."""
    return (fn(tau_c + step) - fn(tau_c - step)) / (2 * step) / (2j * mp.pi)


def derivative_identities(tau, prec: int) -> dict:
    """Residuals of the three Ramanujan identities at tau, via finite differences in tau."""
    dps = prec + GUARD
    with mp.workdps(dps):
        tau_c = _tau_value(tau)
        step = mpmath.mpf(10) ** (-(prec // 3))
        e2, e4, e6, *_ = _eisenstein_triple(tau_c, dps)
        fk = lambda idx: (lambda t: _eisenstein_triple(t, dps)[idx])
        out = {
            "E2": abs(_D(fk(0), tau_c, step) - (e2 * e2 - e4) / 12),
            "E4": abs(_D(fk(1), tau_c, step) - (e4 * e2 - e6) / 3),
            "E6": abs(_D(fk(2), tau_c, step) - (e6 * e2 - e4 * e4) / 2),
        }
    with mp.workdps(prec + 10):
        return {key: +val for key, val in out.items()}


def modularity_residuals(tau, prec: int) -> dict:
    """|J_1(tau) - J_1(-1/tau)| and |J_1(tau) - J_1(tau + 1)|."""
    dps = prec + GUARD
    with mp.workdps(dps):
        tau_c = _tau_value(tau)
        J = lambda t: _level_values(1, t, dps)["J"]
        base = J(tau_c)
        out = {"S": abs(base - J(-1 / tau_c)), "T": abs(base - J(tau_c + 1))}
    with mp.workdps(prec + 10):
        return {key: +val for key, val in out.items()}
