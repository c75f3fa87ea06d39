"""Regenerate (a, P, k) of a row from its CM point.

Run: python3 demos/03_modular.py
"""

import mpmath

from ramanujan_pi import get, load_catalog, modular

catalog = load_catalog()

for ident in (7, 30, 38, 39):
    f = get(catalog, "pi", ident)
    res = modular.cm_specialize(f.level, f.tau, 120)
    print(f"{f.label} tau = {f.tau}, level {f.level}: a = {res.a}, P = {list(res.P)}, k = {res.k}, sign = {res.sign:+d}")
    if f.modular_errata:
        print(f"    printed k = {f.k}, sign = {f.sign_rhs:+d}; correction on file: {f.modular_errata}")

# The same identity away from CM points, where nothing is rational.
print(modular.verify_prop1(2, mpmath.mpc(0.2, 1.6), 80).line())
