"""
The Halasz functional and decay of the mean
===========================================

``M(N, T)`` measures how far the prime values stay from every twist
``p^{i lam}``. A large ``M`` forces the mean ``N^{-1} sum X_n`` to be small.
"""

from fractions import Fraction

from rmflab.halasz import classify_limit, halasz_M, rate_fit
from rmflab.simulate import FiniteAtoms, UniformRoots, empirical_mean, sample_function

# Y = 1 everywhere: nothing to gain from twisting.
one = sample_function(10**4, UniformRoots(1), 0)
print("constant:", halasz_M(one, 10).to_record())

rademacher = sample_function(10**5, UniformRoots(2), 3)
report = halasz_M(rademacher, 10)
print(f"Rademacher: M={report.M:.6f} at lambda={report.lambda_star:.4f}, ratio={report.ratio:.5f}")

# A biased law still equidistributes on the square roots of unity, just slowly.
skewed = FiniteAtoms(((Fraction(0), 0.9), (Fraction(1, 2), 0.1)))
print("classification:", classify_limit(skewed))
s = sample_function(10**6, skewed, 5)
points = [(N, abs(empirical_mean(s, N))) for N in (10**3, 10**4, 10**5, 10**6)]
for N, v in points:
    print(f"N={N:8d}: |mean| = {v:.4f}")
print("fitted exponent:", round(rate_fit(points), 3))
