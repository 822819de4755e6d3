"""
Multiplicative dependences among consecutive integers
=====================================================

A window ``n+1, ..., n+k`` is dependent when some nonzero integer vector
``m`` gives ``prod (n+j)^{m_j} = 1``. This script scans small windows,
prints the largest dependent ``n`` per window length and checks one
certificate by hand.
"""

from fractions import Fraction

from rmflab.dependence import (
    dubickas_witness,
    find_dependence_roots,
    find_dependence_uniform,
    scan_dependences_uniform,
)

# The kernel of the prime-valuation matrix holds every relation.
basis = find_dependence_uniform(1, 3)
print("n=1, k=3 kernel:", basis.vectors)  # 2^2 = 4, so (2, 0, -1)

# Largest dependent n below 1000 for each window length.
for k in range(3, 14):
    found = [n for n, _ in scan_dependences_uniform(k, 1000)]
    print(f"k={k:2d}: largest dependent n = {max(found)}")

# The long relation at n = 239 is small enough to check with fractions.
w = find_dependence_uniform(239, 13).witnesses(239)[0]
value = 1
for j, e in enumerate(w.m, start=1):
    value *= Fraction(239 + j) ** e
print("n=239 witness:", w.m, "product =", value)

# A polynomial identity produces dependent windows of width 4t+1.
w = dubickas_witness(5)
print("t=5 window starts at", w.n + 1, "and verifies:", w.verify())

# Relations up to squares decide when a product of Rademacher values is forced to be 1.
w = find_dependence_roots(239, 6, 2)
print("X_240 X_243 X_245 = 1 at n=239:", [239 + j for j, x in enumerate(w.m, 1) if x])
