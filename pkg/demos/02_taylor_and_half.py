"""Deform n -> n + x and read off the Taylor coefficients at x = 0 and x = 1/2.

Run: python3 demos/02_taylor_and_half.py
"""

from ramanujan_pi import get, load_catalog, taylor

catalog = load_catalog()

for label in (("pi", 1), ("pi", 7), ("pic", 7)):
    rep = taylor.match_taylor_row(get(catalog, *label), 120)
    print(rep.line())
    for check in rep.checks:
        if check.note and check.note != "vanishing":
            print("   ", f"a{check.index}:", check.note)

for label in (("pi", 8), ("pi", 22), ("pic", 12)):
    print(taylor.half_value(get(catalog, *label), 120).line())
