"""
The Halasz-Montgomery-Tenenbaum functional and limit-law classification.

``M(N, T) = min_{|lam| <= 2T} sum_{p <= N} (1 - Re(Y_p p^{-i lam})) / p``
is evaluated on a lambda grid and refined by golden-section search. The
associated mean-value inequality carries an unknown absolute constant, so
reports record the observed ratio instead of asserting anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import cos, exp, inf, lcm, log, pi, sqrt

import numpy as np

from rmflab.arith import shared_table
from rmflab.simulate import (
    CircleDistribution,
    FiniteAtoms,
    MultSample,
    UniformContinuous,
    UniformRoots,
    empirical_mean,
)

_GOLDEN = (sqrt(5) - 1) / 2
_CHUNK = 1 << 22


@dataclass(frozen=True)
class HalaszReport:
    N: int
    T: float
    lambda_star: float
    M: float
    lhs: float
    rhs_kernel: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_kernel

    def to_record(self) -> dict:
        return {"N": self.N, "T": self.T, "lambda_star": self.lambda_star, "M": self.M,
                "lhs": self.lhs, "rhs_kernel": self.rhs_kernel, "ratio": self.ratio}


@dataclass(frozen=True)
class LimitClassification:
    """``kind`` is ``"UniformCircle"`` or ``"UniformRoots"`` (then ``q`` is set)."""

    kind: str
    q: int | None
    c_bound: float


class PrimeTwist:
    """``lam -> sum_{p<=N} (1 - cos(phi_p - lam log p)) / p`` for fixed prime phases ``phi_p``."""

    def __init__(self, primes: np.ndarray, phases: np.ndarray):
        self.log_p = np.log(primes.astype(np.float64))
        self.inv_p = 1.0 / primes
        self.phases = np.asarray(phases, dtype=np.float64)
        self.base = float(self.inv_p.sum())
        self.lipschitz = float((self.log_p * self.inv_p).sum())
        self.curvature = float((self.log_p**2 * self.inv_p).sum())

    @classmethod
    def from_sample(cls, sample: MultSample, N: int | None = None, power: int = 1) -> PrimeTwist:
        N = sample.N if N is None else N
        primes = shared_table(N).primes(N)
        if sample.exact:
            D = sample.denominator
            phases = 2 * np.pi * ((power * sample.numerators[primes]) % D) / D
        else:
            phases = 2 * np.pi * ((power * sample.turns[primes]) % 1.0)
        return cls(primes, phases)

    def __call__(self, lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
        out = np.empty(lam.shape)
        step = max(1, _CHUNK // max(1, len(self.log_p)))
        for i in range(0, len(lam), step):
            arg = self.phases[None, :] - lam[i : i + step, None] * self.log_p[None, :]
            out[i : i + step] = self.base - np.cos(arg) @ self.inv_p
        return out


def _golden_min(f, a: float, b: float, rtol: float) -> tuple[float, float]:
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * max(1.0, abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def minimize_twist(twist: PrimeTwist, T: float, grid_step: float, rtol: float = 1e-6) -> tuple[float, float]:
    """
    Global minimum of ``twist`` on ``[-2T, 2T]``: grid, then local refinement.

    A grid point within ``h/2`` of an interior minimizer exceeds the minimum by
    at most ``curvature * h^2 / 8``, so every grid point within that margin of
    the best grid value is refined on its own ``[-h, h]`` window.
    """
    # symmetric lattice through 0, so lam = 0 is always examined exactly
    K = int(np.ceil(2 * T / grid_step))
    h = 2 * T / K
    grid = h * np.arange(-K, K + 1)
    vals = twist(grid)
    margin = twist.curvature * h * h / 8
    best_lam, best = float(grid[np.argmin(vals)]), float(vals.min())
    f = lambda x: float(twist(x)[0])
    for i in np.flatnonzero(vals <= best + margin):
        lo, hi = max(-2 * T, grid[i] - h), min(2 * T, grid[i] + h)
        if hi <= lo:
            continue
        lam, val = _golden_min(f, lo, hi, rtol)
        if val < best:
            best_lam, best = float(lam), val
    return best_lam, max(best, 0.0)


def halasz_M(sample: MultSample, T: float, grid_step: float | None = None,
             N: int | None = None, power: int = 1) -> HalaszReport:
    """
    Evaluate ``M(N, T)`` for ``Y_n = X_n^power`` together with
    ``lhs = |N^{-1} sum_{n<=N} Y_n|`` and ``(1 + M) e^{-M} + T^{-1/2}``.

    ``grid_step`` defaults to ``1 / log N`` and may not exceed it.
    """
    N = sample.N if N is None else N
    if N < 3 or N > sample.N:
        raise ValueError("need 3 <= N <= sample.N")
    if T <= 0:
        raise ValueError("T must be positive")
    max_step = 1 / log(N)
    grid_step = max_step if grid_step is None else grid_step
    if grid_step > max_step * (1 + 1e-12):
        raise ValueError(f"grid_step must be at most 1/log N = {max_step:.6g}")
    twist = PrimeTwist.from_sample(sample, N, power)
    lam, M = minimize_twist(twist, T, grid_step)
    lhs = abs(empirical_mean(sample, N, power))
    return HalaszReport(N, float(T), lam, M, lhs, (1 + M) * exp(-M) + T**-0.5)


def _cos_turn(t: Fraction) -> float:
    t = t % 1
    exact = {Fraction(0): 1.0, Fraction(1, 4): 0.0, Fraction(1, 2): -1.0, Fraction(3, 4): 0.0,
             Fraction(1, 6): 0.5, Fraction(5, 6): 0.5, Fraction(1, 3): -0.5, Fraction(2, 3): -0.5}
    return exact[t] if t in exact else cos(2 * pi * t)


def classify_limit(dist: CircleDistribution) -> LimitClassification:
    """
    Limit of the empirical law of ``X_1..X_N`` for i.i.d. prime values.

    Rational atoms: uniform on ``U_q`` with ``q`` the lcm of the reduced
    denominators, and ``c_bound = min_{1<=m<q} (1 - E Re X_2^m)``. For
    ``q = 1`` every ``X_n`` is 1 and ``c_bound`` is ``inf``. Float atoms
    count as irrational and give the uniform circle; ``c_bound`` is then
    ``inf_m (1 - E Re X_2^m)`` which is reported as 0, and 1 for the Haar law.
    """
    if isinstance(dist, UniformContinuous):
        return LimitClassification("UniformCircle", None, 1.0)
    if isinstance(dist, UniformRoots):
        q = dist.q
        return LimitClassification("UniformRoots", q, 1.0 if q > 1 else inf)
    if not isinstance(dist, FiniteAtoms):
        raise TypeError(f"unknown distribution {dist!r}")
    if not dist.rational:
        return LimitClassification("UniformCircle", None, 0.0)
    q = lcm(*(a.denominator for a, _ in dist.atoms))
    if q == 1:
        return LimitClassification("UniformRoots", 1, inf)
    c = min(1 - sum(w * _cos_turn(m * a) for a, w in dist.atoms) for m in range(1, q))
    return LimitClassification("UniformRoots", q, c)


def rate_fit(points) -> float:
    """
    Negated least-squares slope of ``log |mu_hat|`` against ``log log N``.

    ``points`` are ``(N_i, |mu_hat_{N_i}|)`` with at least four strictly
    increasing ``N_i >= 100`` and positive values.
    """
    pts = [(float(N), float(v)) for N, v in points]
    if len(pts) < 4:
        raise ValueError("need at least 4 points")
    Ns = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(np.diff(Ns) <= 0):
        raise ValueError("N values must be strictly increasing")
    if Ns[0] < 100:
        raise ValueError("N values must be at least 100")
    if np.any(vs <= 0):
        raise ValueError("values must be positive")
    slope = np.polyfit(np.log(np.log(Ns)), np.log(vs), 1)[0]
    return float(-slope)
