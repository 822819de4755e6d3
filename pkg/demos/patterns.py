"""
Sign patterns of a random multiplicative function
=================================================

For Rademacher values (uniform on {1, -1} at primes) every pattern of
three consecutive signs should appear with frequency close to 1/8.
"""

from fractions import Fraction

import numpy as np

from rmflab.simulate import UniformRoots, pattern_counts, sample_function

N = 10**5
sample = sample_function(N + 3, UniformRoots(2), seed=7)

counts = pattern_counts(sample, 3, N)
for pattern, c in sorted(counts.items()):
    signs = "".join("+" if a == 0 else "-" for a in pattern)
    print(f"{signs}: {c / N:.4f}  (deviation {abs(c / N - 1 / 8) * np.sqrt(N):.2f} / sqrt N)")

# Squares are forced to 1: X_4 = X_2^2, so its angle is always 0.
assert sample.theta(4) == Fraction(0)
print("angle of X_4:", sample.theta(4))
