"""Formula data model, the bundled catalog file, and structural validation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import jsonschema

from . import closedform
from .lfunc import fundamental_discriminant, is_fundamental

SUPPORTED_D = (2, 3, 4, 5, 6, 8)
#: H_N coding for the four levels
LEVEL_CODING = {1: ((2, 1), (6, 1)), 2: ((2, 1), (4, 1)), 3: ((2, 1), (3, 1)), 4: ((2, 3),)}


class CatalogError(ValueError):
    """Unreadable, schema-invalid or invariant-violating catalog data."""


def totient(n: int) -> int:
    return sum(1 for i in range(1, n + 1) if math.gcd(i, n) == 1)


@dataclass(frozen=True)
class PochProduct:
    """H_n = prod (alpha)_n^mult / n!^factorial_power."""

    factors: tuple  # ((Fraction alpha, int multiplicity), ...)
    factorial_power: int
    d_coding: Optional[tuple] = None  # ((d, v_d), ...)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    def coding_text(self) -> str:
        if not self.d_coding:
            return "*".join(f"({a})_n^{m}" if m > 1 else f"({a})_n" for a, m in self.factors)
        return ".".join(f"{d}^{v}" if v > 1 else str(d) for d, v in self.d_coding)

    def __str__(self) -> str:
        return self.coding_text()


def expand_d_coding(coding: Iterable) -> PochProduct:
    """PochProduct for prod_d R_n(d)^v_d."""
    coding = tuple((int(d), int(v)) for d, v in coding)
    factors: dict = {}
    power = 0
    for d, v in coding:
        if d not in SUPPORTED_D:
            raise ValueError(f"unsupported d = {d} (supported: {SUPPORTED_D})")
        if v < 1:
            raise ValueError("exponents v_d must be positive")
        for i in range(1, d):
            if math.gcd(i, d) == 1:
                alpha = Fraction(i, d)
                factors[alpha] = factors.get(alpha, 0) + v
        power += totient(d) * v
    return PochProduct(tuple(sorted(factors.items())), power, coding)


def coding_from_text(text: str) -> PochProduct:
    """Parse the tables' shorthand, e.g. ``"2^5.3.4"`` or ``"2*6"``."""
    coding = []
    for part in text.replace("*", ".").replace("·", ".").split("."):
        d, _, v = part.partition("^")
        coding.append((int(d), int(v) if v else 1))
    return expand_d_coding(coding)


def poch_product(factors: Sequence, factorial_power: int) -> PochProduct:
    """Free-form product (no d-coding), e.g. (1/12)_n (5/12)_n / n!^2."""
    return PochProduct(tuple((Fraction(a), int(m)) for a, m in factors), int(factorial_power))


@dataclass(frozen=True)
class CMPoint:
    """tau = (u + sqrt(disc)) / v with disc < 0."""

    u: int
    v: int
    disc: int

    def __post_init__(self):
        if self.disc >= 0 or self.v <= 0:
            raise ValueError("CM point needs disc < 0 and v > 0")

    @property
    def im_squared(self) -> Fraction:
        return Fraction(-self.disc, self.v * self.v)

    def to_complex(self):
        import mpmath

        return mpmath.mpc(mpmath.mpf(self.u) / self.v, mpmath.sqrt(-self.disc) / self.v)

    def __str__(self) -> str:
        return f"({self.u}+sqrt({self.disc}))/{self.v}"


@dataclass(frozen=True)
class UpDown:
    b: Fraction
    Q: tuple
    D: int
    A: Fraction


@dataclass(frozen=True)
class Formula:
    family: str  # "pi" (1/pi table, ids 1-44) or "pic" (1/pi^c table, ids 1-21)
    id: int
    c: int
    H: PochProduct
    a: Fraction
    P: tuple  # ascending integer coefficients
    k: Fraction
    sign_rhs: int
    convergent: bool
    D: int
    level: Optional[int] = None
    tau: Optional[CMPoint] = None
    taylor: Optional[dict] = None
    half_value: Optional[dict] = None
    C_super: Optional[Fraction] = None
    updown: Optional[UpDown] = None
    modular_errata: Optional[dict] = None  # {"k": Fraction, "sign": int} where the printed column is off
    a_text: str = ""
    k_text: str = ""

    @property
    def label(self) -> str:
        return f"{self.family}:{self.id}"

    @property
    def deg_P(self) -> int:
        return len(self.P) - 1

    @property
    def semi_convergent(self) -> bool:
        return self.convergent and abs(self.a) == 1

    def P_at(self, n):
        value = 0
        for coeff in reversed(self.P):
            value = value * n + coeff
        return value

    def cm_expected(self) -> tuple:
        """(a, P, k, sign) that the CM specialization should produce at tau."""
        err = self.modular_errata or {}
        return self.a, self.P, err.get("k", self.k), err.get("sign", self.sign_rhs)

    def rhs_closed_form(self) -> closedform.Node:
        """sign * sqrt(k) / pi^c."""
        node = closedform.Node("/", (
            closedform.Node("sqrt", (closedform.literal(self.k),)),
            closedform.Node("^", (closedform.PI, closedform.literal(self.c))),
        ))
        if self.sign_rhs < 0:
            node = closedform.Node("-", (node,))
        return node


# ---------------------------------------------------------------------------
# loading


def default_catalog_path() -> Path:
    return Path(str(resources.files("ramanujan_pi") / "data" / "catalog.json"))


def schema() -> dict:
    return json.loads((resources.files("ramanujan_pi") / "data" / "catalog.schema.json").read_text())


def validate_document(doc) -> None:
    """Raise CatalogError with the JSON path of the first schema violation."""
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        row = _row_hint(doc, exc.absolute_path)
        raise CatalogError(f"schema violation at {where}{row}: {exc.message}") from None


def _row_hint(doc, path) -> str:
    path = list(path)
    if len(path) >= 2 and path[0] == "formulas" and isinstance(path[1], int):
        try:
            rec = doc["formulas"][path[1]]
            return f" (row {rec.get('family')}:{rec.get('id')})"
        except (KeyError, IndexError, TypeError, AttributeError):
            return ""
    return ""


def formula_from_record(rec: dict) -> Formula:
    taylor = rec.get("taylor")
    tau = rec.get("tau")
    ud = rec.get("updown")
    return Formula(
        family=rec["family"],
        id=rec["id"],
        c=rec["c"],
        H=expand_d_coding(tuple(tuple(x) for x in rec["H"])),
        a=Fraction(rec["a"]),
        P=tuple(rec["P"]),
        k=Fraction(rec["k"]),
        sign_rhs=rec["sign"],
        convergent=rec["convergent"],
        D=rec["D"],
        level=rec.get("level"),
        tau=CMPoint(tau["u"], tau["v"], tau["disc"]) if tau else None,
        taylor=dict(taylor) if taylor else None,
        half_value=dict(rec["half_value"]) if rec.get("half_value") else None,
        C_super=Fraction(rec["C"]) if rec.get("C") is not None else None,
        updown=UpDown(Fraction(ud["b"]), tuple(ud["Q"]), ud["D"], Fraction(ud["A"])) if ud else None,
        modular_errata=_modular_errata(rec.get("modular_errata")),
        a_text=rec.get("a_text", ""),
        k_text=rec.get("k_text", ""),
    )


def _modular_errata(raw) -> Optional[dict]:
    if not raw:
        return None
    out = {}
    if "k" in raw:
        out["k"] = Fraction(raw["k"])
    if "sign" in raw:
        out["sign"] = int(raw["sign"])
    return out


def load_catalog(path=None, validate: bool = True) -> list:
    """Read, schema-check and invariant-check a catalog file; returns Formulas."""
    path = Path(path) if path is not None else default_catalog_path()
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read {path}: {exc}") from None
    if not text.strip():
        raise CatalogError(f"{path}: empty file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    validate_document(doc)
    formulas = []
    seen = set()
    for rec in doc["formulas"]:
        try:
            f = formula_from_record(rec)
        except (ValueError, ZeroDivisionError) as exc:
            raise CatalogError(f"row {rec.get('family')}:{rec.get('id')}: {exc}") from None
        if f.label in seen:
            raise CatalogError(f"duplicate row id {f.label}")
        seen.add(f.label)
        if validate:
            report = validate_formula(f)
            if not report.ok:
                raise CatalogError(f"row {f.label} violates {', '.join(report.failures)}")
        formulas.append(f)
    return formulas


def select(formulas: Iterable, family: str, ids: Iterable[int]) -> list:
    wanted = set(ids)
    return [f for f in formulas if f.family == family and f.id in wanted]


def get(formulas: Iterable, family: str, id: int) -> Formula:
    for f in formulas:
        if f.family == family and f.id == id:
            return f
    raise KeyError(f"{family}:{id}")


# ---------------------------------------------------------------------------
# validation


def discriminant_of(c: int, k, sign_rhs: int = 1) -> int:
    """Fundamental discriminant of Q(sqrt((-1)^c k)).

    ``sign_rhs`` only fixes which square root is meant and does not change
    the field, so it does not enter the result.
    """
    k = Fraction(k)
    if k == 0:
        raise ValueError("k must be nonzero")
    return fundamental_discriminant((-1) ** c * k)


def _is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


@dataclass
class ValidationReport:
    label: str
    checks: dict = field(default_factory=dict)
    semi_convergent: bool = False
    degree_H: int = 0
    degree_P: int = 0

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list:
        return [name for name, passed in self.checks.items() if not passed]


def validate_formula(f: Formula) -> ValidationReport:
    """Check every structural invariant of a catalogued formula."""
    rep = ValidationReport(f.label, degree_H=f.H.degree, degree_P=f.deg_P)
    P = f.P
    g = 0
    for coeff in P:
        g = math.gcd(g, coeff)
    rep.checks["content_one"] = g == 1 and P[-1] > 0
    deg_h = f.H.degree
    rep.checks["degree_relation"] = deg_h % 2 == 1 and 2 * f.deg_P == deg_h - 1
    rep.checks["h_degree"] = deg_h == sum(totient(d) * v for d, v in (f.H.d_coding or ()))
    if f.H.d_coding:
        rep.checks["d_coding_expansion"] = expand_d_coding(f.H.d_coding).factors == f.H.factors
    rep.checks["rational_closure"] = _rational_closure(f.H)
    abs_a = abs(f.a)
    if abs_a > 1:
        converges = True
    elif abs_a == 1:
        limit = Fraction(deg_h, 2) if f.a < 0 else Fraction(deg_h, 2) - 1
        converges = f.deg_P < limit
    else:
        converges = False
    rep.checks["convergence_flag"] = converges == f.convergent
    rep.semi_convergent = converges and abs_a == 1
    rep.checks["fundamental_D"] = is_fundamental(f.D)
    rep.checks["k_D_square"] = _is_rational_square((-1) ** f.c * f.k * f.D)
    rep.checks["discriminant_of"] = discriminant_of(f.c, f.k, f.sign_rhs) == f.D
    if f.level is not None:
        rep.checks["level_H"] = f.H.d_coding == LEVEL_CODING[f.level] and f.c == 1
    if f.updown is not None:
        rep.checks["updown_D"] = f.updown.D == f.D
    return rep


def _rational_closure(H: PochProduct) -> bool:
    mults = dict(H.factors)
    for alpha, m in mults.items():
        d = alpha.denominator
        for i in range(1, d):
            if math.gcd(i, d) == 1 and mults.get(Fraction(i, d)) != m:
                return False
    return True
