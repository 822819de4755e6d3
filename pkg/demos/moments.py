"""
Exact moments from Diophantine counts
=====================================

Second moments of sums of products of shifted values reduce to counting
pairs ``(n1, n2)`` whose windows give the same rational number. The fourth
moment of ``sum X_n X_{n+1}`` reduces to ``a(a+1)d(d+1) = b(b+1)c(c+1)``.
"""

import numpy as np

from rmflab.counting import (
    fourth_moment_counts,
    moment_2q_nontrivial,
    ratio_property_check,
    second_moment_exact_uniform,
    u_family,
)
from rmflab.simulate import UniformContinuous, partial_sum_products, replica_seeds, sample_function

# The vector (2, 1, -4) has exactly one nontrivial coincidence: n = 2 and n = 7.
for N in (5, 10, 100, 1000):
    r = second_moment_exact_uniform((2, 1, -4), 0, N)
    print(f"N={N:5d}: total={r.total}  nontrivial={r.nontrivial}  pairs={r.witness_pairs}")

# Monte-Carlo agrees with the exact count.
N, m = 1000, (2, 1, -4)
vals = np.array([abs(partial_sum_products(sample_function(N + 3, UniformContinuous(), s), m, 0, N)) ** 2
                 for s in replica_seeds(1, 200)])
print(f"Monte-Carlo E|S|^2 = {vals.mean():.1f} +- {vals.std(ddof=1) / np.sqrt(200):.1f}")

# Fourth moment: strict and equal-middle solutions.
for N in (8, 9, 100, 1000):
    fm = fourth_moment_counts(N)
    print(f"N={N:5d}: strict={fm.strict} equal_middle={fm.equal_middle} moment={fm.moment}")

sols = fourth_moment_counts(60, return_solutions=True).solutions
print("solutions up to 60:", [s.as_tuple() for s in sols])
print("smallest d/a up to 2000:", ratio_property_check(2000))

_, quads = u_family(12)
print("equal-middle family:", [q.as_tuple() for q in quads])

# The 2q-tuple count for q = 2 equals 8 strict + 4 equal-middle.
print("q=2, N=100 nontrivial:", moment_2q_nontrivial(2, 100))
