"""Verification and discovery of rational hypergeometric 1/pi^c formulas.

Modules:
    numerics     precision-controlled pi, gamma, Hurwitz zeta, polygamma, acceleration
    lfunc        Kronecker characters, L(D, s) at positive and non-positive integers
    closedform   small s-expression language for closed-form right-hand sides
    catalog      formula data model, bundled catalog, structural validation
    hyperseries  exact-ratio summation of S(H, a, P) and side identities
    taylor       expansion of S(H, a, P; x) at x = 0 and the value at x = 1/2
    modular      Eisenstein series, level functions, CM specialization
    congruence   supercongruences of the truncated sums
    discovery    PSLQ and rediscovery of (P, k)
    cli          command-line front end
"""

from .catalog import CatalogError, Formula, PochProduct, coding_from_text, get, load_catalog
from .congruence import PadicResidue, reduce_mod, verify_super
from .discovery import find_formula, pslq
from .hyperseries import sum_series, verify_formula
from .modular import cm_specialize, verify_prop1
from .taylor import half_value, match_taylor_row

__version__ = "0.1.0"

__all__ = [
    "CatalogError", "Formula", "PochProduct", "PadicResidue",
    "coding_from_text", "get", "load_catalog",
    "sum_series", "verify_formula", "match_taylor_row", "half_value",
    "cm_specialize", "verify_prop1", "reduce_mod", "verify_super",
    "pslq", "find_formula",
]
