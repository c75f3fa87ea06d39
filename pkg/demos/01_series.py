"""Sum a few rows of the catalog and compare with sign * sqrt(k) / pi^c.

Run: python3 demos/01_series.py
"""

import mpmath

from ramanujan_pi import hyperseries, load_catalog, get

catalog = load_catalog()

# The fastest row: fourteen digits per term.
rep = hyperseries.verify_formula(get(catalog, "pi", 7), 300)
print(rep.line())

# Row 33 sits on |a| = 1, so the alternating sum needs acceleration.
rep = hyperseries.verify_formula(get(catalog, "pi", 33), 200)
print(rep.line())

# A 1/pi^2 row.
f = get(catalog, "pic", 1)
ev = hyperseries.evaluate_series(f, 100)
print(f.label, mpmath.nstr(ev.value, 40), f"({ev.terms_used} terms)")
