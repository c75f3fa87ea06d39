"""Exact constants as prefix s-expressions.

Grammar::

    expr  := atom | "(" op expr* ")"
    atom  := "pi" | rational            e.g. 3, -7, 3/5
    op    := + - * / ^ sqrt log asin zeta L gamma beta

``(zeta s)`` is zeta at an integer s >= 2, ``(L D m)`` the Dirichlet L-value
L(D, m) for m >= 1 (or the exact value for m <= 0), ``(gamma q)`` and
``(beta p q)`` take positive rationals.  ``^`` takes an integer exponent, or a
rational one when the base is positive.

Examples: ``(* 2 (asin 3/5))``, ``(/ (* 14 (zeta 3)) (^ pi 2))``,
``(log (/ (+ 88 (* 13 (sqrt 7))) 81))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mp

from . import lfunc, numerics

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_RATIONAL = re.compile(r"-?\d+(/\d+)?$")

OPERATORS = {"+", "-", "*", "/", "^", "sqrt", "log", "asin", "zeta", "L", "gamma", "beta"}
_ARITY = {"sqrt": 1, "log": 1, "asin": 1, "zeta": 1, "L": 2, "gamma": 1, "beta": 2, "^": 2, "/": 2}


class ClosedFormError(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple = ()
    value: Union[Fraction, None] = None

    def __str__(self) -> str:
        return to_sexpr(self)


def literal(q) -> Node:
    return Node("rat", value=Fraction(q))


PI = Node("pi")


def _tokenize(text: str) -> list:
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ClosedFormError(f"cannot tokenize {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse(text: str) -> Node:
    """Parse an s-expression into a :class:`Node` tree."""
    if not isinstance(text, str) or not text.strip():
        raise ClosedFormError("empty closed form")
    tokens = _tokenize(text)
    node, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise ClosedFormError(f"trailing tokens in {text!r}")
    return node


def _parse(tokens: list, pos: int):
    if pos >= len(tokens):
        raise ClosedFormError("unexpected end of expression")
    tok = tokens[pos]
    if tok == "(":
        if pos + 1 >= len(tokens):
            raise ClosedFormError("unexpected end after '('")
        op = tokens[pos + 1]
        if op not in OPERATORS:
            raise ClosedFormError(f"unknown operator {op!r}")
        pos += 2
        args = []
        while pos < len(tokens) and tokens[pos] != ")":
            arg, pos = _parse(tokens, pos)
            args.append(arg)
        if pos >= len(tokens):
            raise ClosedFormError("missing ')'")
        node = Node(op, tuple(args))
        _check_arity(node)
        return node, pos + 1
    if tok == ")":
        raise ClosedFormError("unexpected ')'")
    if tok == "pi":
        return PI, pos + 1
    if _RATIONAL.match(tok):
        return literal(tok), pos + 1
    raise ClosedFormError(f"bad atom {tok!r}")


def _check_arity(node: Node) -> None:
    n = len(node.args)
    want = _ARITY.get(node.op)
    if want is not None and n != want:
        raise ClosedFormError(f"{node.op} takes {want} argument(s), got {n}")
    if node.op in ("+", "*") and n < 1:
        raise ClosedFormError(f"{node.op} needs arguments")
    if node.op == "-" and n not in (1, 2):
        raise ClosedFormError("- takes 1 or 2 arguments")
    if node.op in ("zeta", "L", "gamma", "beta"):
        for a in node.args:
            if a.op != "rat":
                raise ClosedFormError(f"{node.op} needs literal arguments")


def to_sexpr(node: Node) -> str:
    if node.op == "rat":
        return str(node.value)
    if node.op == "pi":
        return "pi"
    return "(" + " ".join([node.op] + [to_sexpr(a) for a in node.args]) + ")"


def evaluate(node, prec: int):
    """Numerical value at ``prec`` digits (returns an mpf; complex asin/log raise)."""
    if isinstance(node, str):
        node = parse(node)
    dps = prec + 15
    with mp.workdps(dps):
        value = _eval(node, prec + 10)
        if isinstance(value, mpmath.mpc):
            raise ClosedFormError(f"{to_sexpr(node)} is not real")
    with mp.workdps(prec + 10):
        return +value


def _eval(node: Node, prec: int):
    op = node.op
    if op == "rat":
        return numerics.rat_to_mpf(node.value)
    if op == "pi":
        return +mp.pi
    if op == "zeta":
        s = node.args[0].value
        if s.denominator != 1 or s < 2:
            raise ClosedFormError("zeta needs an integer >= 2")
        return numerics.zeta(int(s), prec)
    if op == "L":
        D, m = (int(a.value) for a in node.args)
        if m <= 0:
            return numerics.rat_to_mpf(lfunc.L_neg(D, m))
        return lfunc.L_value(D, m, prec)
    if op == "gamma":
        return numerics.gamma_rational(node.args[0].value, prec)
    if op == "beta":
        return numerics.beta_rational(node.args[0].value, node.args[1].value, prec)
    vals = [_eval(a, prec) for a in node.args]
    if op == "+":
        return mpmath.fsum(vals)
    if op == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - vals[1]
    if op == "*":
        out = vals[0]
        for v in vals[1:]:
            out *= v
        return out
    if op == "/":
        return vals[0] / vals[1]
    if op == "^":
        exponent = node.args[1]
        if exponent.op == "rat" and exponent.value.denominator == 1:
            return vals[0] ** int(exponent.value)
        if vals[0] <= 0:
            raise ClosedFormError("fractional power of a nonpositive base")
        return vals[0] ** vals[1]
    if op == "sqrt":
        if vals[0] < 0:
            raise ClosedFormError("square root of a negative number")
        return mpmath.sqrt(vals[0])
    if op == "log":
        if vals[0] <= 0:
            raise ClosedFormError("log of a nonpositive number")
        return mpmath.log(vals[0])
    if op == "asin":
        if abs(vals[0]) > 1:
            raise ClosedFormError(f"asin argument {mpmath.nstr(vals[0], 8)} outside [-1, 1]")
        return mpmath.asin(vals[0])
    raise ClosedFormError(f"unknown operator {op}")
