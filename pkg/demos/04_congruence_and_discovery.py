"""Truncate at n < p and reduce mod p^(2c+2); then find a formula from scratch.

Run: python3 demos/04_congruence_and_discovery.py
"""

from ramanujan_pi import congruence, discovery, get, load_catalog
from ramanujan_pi.catalog import coding_from_text

catalog = load_catalog()

f = get(catalog, "pi", 2)
print(congruence.verify_super(f).line())
print("  S_7 =", congruence.partial_sum_mod(f, 7), "  rhs =", congruence.rhs_super(f, 7).residue)

stats = congruence.divisibility_statistics(catalog)
for c, s in sorted(stats.items()):
    print(f"  c = {c}: {s['divisible']}/{s['nonzero']} nonzero C divisible by {s['modulus']}")

# Given only H = R(2)^3 and a = 64, PSLQ recovers P = 42n + 5 and k = 256.
found = discovery.find_formula(coding_from_text("2^3"), 64, 1, 1, 120)
print(f"discovered P = {list(found.P)}, k = {found.k}, sign = {found.sign:+d}")
