"""
Random completely multiplicative functions on the unit circle.

Values are stored as angles in turns (``X_n = exp(2 pi i theta_n)``). Laws
supported on roots of unity keep exact integer numerators over a common
denominator, so products of values never drift; other laws use float64.

Prime ``p`` always takes its value from position ``p`` of a Philox stream
keyed by the seed, which makes samples prefix-stable in ``N``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence, Union

import numpy as np

from rmflab.arith import shared_table
from rmflab.errors import UnsupportedDistributionError

Angle = Union[Fraction, float]

#: Denominators up to this size use a root table + bincount for exact phase sums.
_ROOT_TABLE_MAX = 1 << 14


@dataclass(frozen=True)
class UniformContinuous:
    """Haar measure on the circle."""

    def spec(self) -> str:
        return "uniform"


@dataclass(frozen=True)
class UniformRoots:
    """Uniform law on the ``q``-th roots of unity."""

    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")

    def spec(self) -> str:
        return f"roots:{self.q}"


@dataclass(frozen=True)
class FiniteAtoms:
    """
    Finitely supported law: ``atoms`` is a tuple of ``(angle, weight)``.

    A :class:`~fractions.Fraction` angle is an exact rational turn; a float
    angle is treated as a real (generic, irrational) turn.
    """

    atoms: tuple[tuple[Angle, float], ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("need at least one atom")
        seen = set()
        for angle, w in self.atoms:
            if not 0 <= angle < 1:
                raise ValueError(f"angle {angle} outside [0, 1)")
            if w <= 0:
                raise ValueError("atom weights must be positive")
            if angle in seen:
                raise ValueError(f"duplicate atom {angle}")
            seen.add(angle)
        if abs(sum(w for _, w in self.atoms) - 1) > 1e-12:
            raise ValueError("atom weights must sum to 1")

    @property
    def rational(self) -> bool:
        return all(isinstance(a, Fraction) for a, _ in self.atoms)

    def spec(self) -> str:
        parts = [f"{a.numerator}/{a.denominator}" if isinstance(a, Fraction) else repr(a) for a, _ in self.atoms]
        return "atoms:" + ",".join(f"{p}@{w!r}" for p, (_, w) in zip(parts, self.atoms))


CircleDistribution = Union[UniformContinuous, UniformRoots, FiniteAtoms]


def exact_denominator(dist: CircleDistribution) -> int | None:
    """Common denominator of all values, or ``None`` for float-valued laws."""
    if isinstance(dist, UniformRoots):
        return dist.q
    if isinstance(dist, FiniteAtoms) and dist.rational:
        return lcm(*(a.denominator for a, _ in dist.atoms))
    return None


@dataclass(frozen=True, eq=False)
class MultSample:
    """
    Realization of ``X_1..X_N``; index arrays by ``n`` directly (slot 0 unused).

    Exactly one of ``numerators`` (with ``denominator``) or ``turns`` is set.
    """

    N: int
    dist: CircleDistribution
    seed: int
    numerators: np.ndarray | None = None
    denominator: int | None = None
    turns: np.ndarray | None = None

    @property
    def exact(self) -> bool:
        return self.numerators is not None

    def theta(self, n: int) -> Angle:
        if not 1 <= n <= self.N:
            raise IndexError(n)
        if self.exact:
            return Fraction(int(self.numerators[n]), self.denominator)
        return float(self.turns[n])

    def angles(self) -> np.ndarray:
        """Float turns in ``[0, 1)``, including the unused slot 0."""
        if self.exact:
            return self.numerators / self.denominator
        return self.turns

    def values(self, lo: int = 1, hi: int | None = None) -> np.ndarray:
        """Complex values ``X_lo..X_hi``."""
        hi = self.N if hi is None else hi
        return np.exp(2j * np.pi * self.angles()[lo : hi + 1])


def _root_table(D: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(D) / D)
    if D % 4 == 0:
        roots[:: D // 4] = (1, 1j, -1, -1j)
    elif D % 2 == 0:
        roots[:: D // 2] = (1, -1)
    else:
        roots[0] = 1
    return roots


def _prime_draws(N: int, seed: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    return gen.random(N + 1)


def sample_function(N: int, dist: CircleDistribution, seed: int) -> MultSample:
    """
    Draw ``X_p`` i.i.d. from ``dist`` at primes and extend completely multiplicatively.

    Deterministic in ``(N, dist, seed)``; a larger ``N`` with the same seed
    reproduces every earlier value.
    """
    if N < 1:
        raise ValueError("N must be positive")
    u = _prime_draws(N, seed)
    den = exact_denominator(dist)
    if isinstance(dist, UniformContinuous):
        vals = u
    elif isinstance(dist, UniformRoots):
        vals = np.floor(u * dist.q).astype(np.int64)
    else:
        cum = np.cumsum([w for _, w in dist.atoms])
        idx = np.minimum(np.searchsorted(cum, u * cum[-1], side="right"), len(cum) - 1)
        if den is not None:
            vals = np.array([a.numerator * (den // a.denominator) for a, _ in dist.atoms], dtype=np.int64)[idx]
        else:
            vals = np.array([float(a) for a, _ in dist.atoms])[idx]

    theta = np.zeros(N + 1, dtype=np.int64 if den is not None else np.float64)
    if N >= 2:
        spf = shared_table(N).spf[: N + 1]
        idx = np.arange(N + 1)
        is_prime = (spf == idx) & (idx >= 2)
        theta[is_prime] = vals[is_prime]
        # n / spf(n) < lo for every composite n in [lo, 2 lo), so each block
        # only reads values that are already final
        lo = 4
        while lo <= N:
            hi = min(2 * lo, N + 1)
            block = np.arange(lo, hi)
            p = spf[lo:hi]
            comp = p != block
            n, p = block[comp], p[comp].astype(np.int64)
            if den is not None:
                theta[n] = (theta[p] + theta[n // p]) % den
            else:
                theta[n] = (theta[p] + theta[n // p]) % 1.0
            lo = hi
    theta.setflags(write=False)
    if den is not None:
        return MultSample(N, dist, seed, numerators=theta, denominator=den)
    return MultSample(N, dist, seed, turns=theta)


def replica_seeds(seed: int, reps: int) -> list[int]:
    """Independent 64-bit seeds for ``reps`` replicas derived from ``seed``."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(reps, dtype=np.uint64)]


def _need(sample: MultSample, top: int):
    if top > sample.N:
        raise ValueError(f"sample covers n <= {sample.N}, need {top}")


def _phase_sum(sample: MultSample, m: Sequence[int], lo: int, hi: int) -> complex:
    """``sum_{n=lo}^{hi} prod_j X_{n+j}^{m_j}`` with exact phases when possible."""
    k = len(m)
    _need(sample, hi + k)
    count = hi - lo + 1
    if sample.exact:
        D = sample.denominator
        phase = np.zeros(count, dtype=np.int64)
        for j, mj in enumerate(m, start=1):
            if mj % D:
                phase = (phase + (mj % D) * sample.numerators[lo + j : hi + j + 1]) % D
        if D <= _ROOT_TABLE_MAX:
            counts = np.bincount(phase, minlength=D)
            if counts[0] == count:
                return complex(count)
            return complex(np.sum(counts * _root_table(D)))
        return complex(np.sum(np.exp(2j * np.pi * phase / D)))
    phase = np.zeros(count)
    for j, mj in enumerate(m, start=1):
        if mj:
            phase = (phase + mj * sample.turns[lo + j : hi + j + 1]) % 1.0
    return complex(np.sum(np.exp(2j * np.pi * phase)))


def pattern_counts(sample: MultSample, k: int, N: int) -> dict[tuple[Fraction, ...], int]:
    """
    Occurrences of each value pattern ``(theta_{n+1}, ..., theta_{n+k})`` for ``n = 1..N``.

    Only observed patterns are keys. Needs an exactly valued sample.
    """
    if not sample.exact:
        raise UnsupportedDistributionError("pattern counts need a root-of-unity valued law")
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    _need(sample, N + k)
    windows = np.stack([sample.numerators[1 + j : N + 1 + j] for j in range(1, k + 1)], axis=1)
    pats, counts = np.unique(windows, axis=0, return_counts=True)
    D = sample.denominator
    return {tuple(Fraction(int(a), D) for a in row): int(c) for row, c in zip(pats, counts)}


def empirical_fourier(sample: MultSample, k: int, m: Sequence[int], N: int) -> complex:
    """Fourier coefficient at ``m`` of the empirical law of the first ``N`` ``k``-windows."""
    if len(m) != k:
        raise ValueError("len(m) must equal k")
    return _phase_sum(sample, m, 1, N) / N


def partial_sum_products(sample: MultSample, m: Sequence[int], N_lo: int, N: int) -> complex:
    """``sum_{n=N_lo+1}^{N} prod_j X_{n+j}^{m_j}``."""
    if not any(m):
        raise ValueError("m must not be all zero")
    if not 0 <= N_lo < N:
        raise ValueError("need 0 <= N_lo < N")
    return _phase_sum(sample, m, N_lo + 1, N)


def empirical_mean(sample: MultSample, N: int | None = None, power: int = 1) -> complex:
    """``N^{-1} sum_{n <= N} X_n^power``, the Fourier coefficient of the one-point empirical law."""
    N = sample.N if N is None else N
    return _phase_sum(sample, (power,), 0, N - 1) / N


def mean_abs_partial_sum(
    dist: CircleDistribution, N: int, reps: int, seed: int
) -> tuple[float, float]:
    """Mean and standard error of ``N^{-1/2} |sum_{n<=N} X_n|`` over ``reps`` samples."""
    if reps < 2:
        raise ValueError("reps must be at least 2")
    vals = np.array([
        abs(_phase_sum(sample_function(N, dist, s), (1,), 0, N - 1)) / np.sqrt(N)
        for s in replica_seeds(seed, reps)
    ])
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(reps))


def write_sample_csv(sample: MultSample, fh) -> None:
    """Rows ``n,numerator,denominator`` (exact laws) or ``n,angle`` (float laws)."""
    w = csv.writer(fh, lineterminator="\n")
    if sample.exact:
        w.writerow(["n", "numerator", "denominator"])
        for n in range(1, sample.N + 1):
            w.writerow([n, int(sample.numerators[n]), sample.denominator])
    else:
        w.writerow(["n", "angle"])
        for n in range(1, sample.N + 1):
            w.writerow([n, repr(float(sample.turns[n]))])


def experiment_record(dist: CircleDistribution, N: int, k: int | None, seed: int, observable: str, value) -> dict:
    if isinstance(value, complex):
        value = [value.real, value.imag]
    return {"dist": dist.spec(), "N": N, "k": k, "seed": seed, "observable": observable, "value": value}
