"""
Mean absolute partial sums
==========================

Sample mean and standard error of ``N^{-1/2} |sum_{n<=N} X_n|`` for values
uniform on the circle, at a few sizes. Nothing is asserted here; the CLI
``helson`` subcommand prints the same numbers next to two reference values.
"""

from rmflab.simulate import UniformContinuous, mean_abs_partial_sum

for N in (10**3, 10**4, 10**5):
    mean, se = mean_abs_partial_sum(UniformContinuous(), N, reps=100, seed=20240607)
    print(f"N={N:7d}: {mean:.4f} +- {se:.4f}")
