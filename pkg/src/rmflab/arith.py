"""
Exact integer arithmetic: sieve, factorization and valuations.

All factorizations go through a smallest-prime-factor table. Integers above
the table limit are rejected, never trial-divided.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, prod
from typing import Iterable, Mapping

import numpy as np

from rmflab.errors import ResourceLimitError

#: Largest sieve limit accepted by :func:`build_spf` (int32 entries, ~4 bytes each).
SIEVE_LIMIT_CAP = int(os.environ.get("RMFLAB_SIEVE_LIMIT", 10**8))


@dataclass(frozen=True)
class ExponentVector:
    """
    Factored positive rational ``prod(p**e for p, e in entries)``.

    ``entries`` is a tuple of ``(prime, exponent)`` pairs with strictly
    increasing primes and nonzero exponents. The empty vector is 1.
    Instances are hashable and compare by canonical form, so they serve as
    exact dictionary keys for huge rationals.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        last = 0
        for p, e in self.entries:
            if p <= last or e == 0:
                raise ValueError(f"non-canonical exponent vector: {self.entries!r}")
            last = p

    @classmethod
    def from_mapping(cls, exps: Mapping[int, int]) -> ExponentVector:
        return cls(tuple((p, e) for p, e in sorted(exps.items()) if e != 0))

    @classmethod
    def combine(cls, terms: Iterable[tuple[ExponentVector, int]]) -> ExponentVector:
        """Vector of ``prod(v**c for v, c in terms)``."""
        acc: dict[int, int] = {}
        for vec, c in terms:
            if c == 0:
                continue
            for p, e in vec.entries:
                acc[p] = acc.get(p, 0) + c * e
        return cls.from_mapping(acc)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def valuation(self, p: int) -> int:
        for r, e in self.entries:
            if r == p:
                return e
            if r > p:
                break
        return 0

    def is_one(self) -> bool:
        return not self.entries

    def __add__(self, other: ExponentVector) -> ExponentVector:
        return ExponentVector.combine(((self, 1), (other, 1)))

    def __sub__(self, other: ExponentVector) -> ExponentVector:
        return ExponentVector.combine(((self, 1), (other, -1)))

    def __neg__(self) -> ExponentVector:
        return ExponentVector(tuple((p, -e) for p, e in self.entries))

    def scale(self, c: int) -> ExponentVector:
        if c == 0:
            return ExponentVector()
        return ExponentVector(tuple((p, c * e) for p, e in self.entries))

    def reduce_mod(self, q: int) -> ExponentVector:
        """Exponents reduced into ``[0, q)``; signed exponents allowed."""
        if q < 1:
            raise ValueError("q must be positive")
        return ExponentVector(tuple((p, e % q) for p, e in self.entries if e % q))

    def value(self) -> Fraction:
        num = prod(p**e for p, e in self.entries if e > 0)
        den = prod(p**-e for p, e in self.entries if e < 0)
        return Fraction(num, den)

    def __repr__(self):
        return f"ExponentVector({dict(self.entries)!r})"


@dataclass(frozen=True, eq=False)
class SpfTable:
    """Smallest prime factor of every ``2 <= n <= limit`` (``spf[0] = spf[1] = 0``)."""

    limit: int
    spf: np.ndarray

    def __contains__(self, n: int) -> bool:
        return 1 <= n <= self.limit

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else min(upto, self.limit)
        idx = np.arange(upto + 1)
        return np.flatnonzero((self.spf[: upto + 1] == idx) & (idx >= 2))


def _check_cap(limit: int):
    if limit > SIEVE_LIMIT_CAP:
        raise ResourceLimitError(
            f"sieve limit {limit} exceeds cap {SIEVE_LIMIT_CAP} "
            "(raise RMFLAB_SIEVE_LIMIT to allow it)"
        )


def build_spf(limit: int) -> SpfTable:
    """
    Smallest-prime-factor sieve up to ``limit`` inclusive.

    Raises
    ------
    ValueError
        if ``limit < 2``.
    ResourceLimitError
        if ``limit`` exceeds :data:`SIEVE_LIMIT_CAP`.
    """
    if limit < 2:
        raise ValueError("sieve limit must be at least 2")
    _check_cap(limit)
    spf = np.zeros(limit + 1, dtype=np.int32 if limit < 2**31 else np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    spf.setflags(write=False)
    return SpfTable(limit, spf)


_shared: SpfTable | None = None


def shared_table(limit: int) -> SpfTable:
    """Process-wide table covering at least ``limit``, grown by doubling."""
    global _shared
    # checked even when the cached table is already large enough
    _check_cap(limit)
    if _shared is None or _shared.limit < limit:
        size = max(limit, 2 * _shared.limit if _shared else 1 << 16)
        if size > SIEVE_LIMIT_CAP >= limit:
            size = limit
        _shared = build_spf(size)
    return _shared


def factorize(n: int, table: SpfTable | None = None) -> ExponentVector:
    """
    Prime factorization of ``n`` as an :class:`ExponentVector`.

    Without a table the shared one is grown as needed.
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    if n == 1:
        return ExponentVector()
    if table is None:
        table = shared_table(n)
    elif n > table.limit:
        raise ValueError(f"{n} exceeds sieve limit {table.limit}")
    spf = table.spf
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return ExponentVector(tuple(out))


def rough_part(n: int, k: int, table: SpfTable | None = None) -> int:
    """Largest divisor of ``n`` whose prime factors are all ``>= k``."""
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    return prod(p**e for p, e in factorize(n, table).entries if p >= k)


def power_free_part(v: ExponentVector, q: int) -> ExponentVector:
    """
    Strip the largest ``q``-th power from a factored integer.

    Every surviving exponent lies in ``[1, q - 1]``. Negative exponents are
    rejected; use :meth:`ExponentVector.reduce_mod` for rationals.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if any(e < 0 for _, e in v.entries):
        raise ValueError("power_free_part needs nonnegative exponents")
    return v.reduce_mod(q)


def mu_power_divisor(s: int, q: int, table: SpfTable | None = None) -> int:
    """Largest divisor ``d`` of ``q`` such that ``s`` is a perfect ``d``-th power."""
    if s < 2 or q < 1:
        raise ValueError("need s >= 2 and q >= 1")
    g = 0
    for _, e in factorize(s, table).entries:
        g = gcd(g, e)
    return gcd(q, g)


def multiplicative_stats(n: int, table: SpfTable | None = None) -> tuple[int, int, int]:
    """Return ``(radical, number of divisors, number of distinct primes)`` of ``n``."""
    entries = factorize(n, table).entries
    return (
        prod(p for p, _ in entries),
        prod(e + 1 for _, e in entries),
        len(entries),
    )
