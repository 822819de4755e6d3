"""
Exact Diophantine counts that equal moments of random multiplicative sums.

``E|sum_n prod_j X_{n+j}^{m_j}|^2`` is the number of pairs ``(n1, n2)`` for
which the two rationals ``prod_j (n+j)^{m_j}`` agree (uniform-circle law) or
agree up to a q-th power (roots-of-unity law). The fourth moment of
``sum X_n X_{n+1}`` counts solutions of ``a(a+1)d(d+1) = b(b+1)c(c+1)``.

Grouping is always by an exact key: an :class:`ExponentVector`, or a pair of
residues of the integer product (mod 2**64 and mod 2**31 - 1) whose moduli
multiply to more than the largest product allowed, so equal residues mean
equal products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from rmflab.arith import ExponentVector, factorize
from rmflab.errors import ResourceLimitError

FOURTH_MOMENT_CAP = 2 * 10**4
MOMENT_2Q_CAPS = {1: 10**6, 2: 2 * 10**4, 3: 300}

#: Tuples held in memory at once while grouping; larger runs are sharded by key.
SHARD_TARGET = 2 * 10**7

_P_LO = 2**31 - 1
_KEY_BOUND = 2**64 * _P_LO


@dataclass(frozen=True)
class MomentCountReport:
    m: tuple[int, ...]
    q: int | None
    N_lo: int
    N: int
    diagonal: int
    nontrivial: int
    witness_pairs: tuple[tuple[int, int], ...] = ()

    @property
    def total(self) -> int:
        return self.diagonal + self.nontrivial

    def to_record(self) -> dict:
        rec = {"m": list(self.m), "q": self.q, "N_lo": self.N_lo, "N": self.N,
               "diagonal": self.diagonal, "nontrivial": self.nontrivial, "total": self.total,
               "witnesses": [list(p) for p in self.witness_pairs]}
        if self.q is None:
            del rec["q"]
        return rec


@dataclass(frozen=True, order=True)
class QuadrupleSolution:
    """``a(a+1)d(d+1) = b(b+1)c(c+1)`` with ``a < b <= c < d``; checked on construction."""

    a: int
    b: int
    c: int
    d: int
    kind: str = field(init=False, compare=False)

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if not 0 < a < b <= c < d:
            raise ValueError(f"bad ordering {(a, b, c, d)}")
        if a * (a + 1) * d * (d + 1) != b * (b + 1) * c * (c + 1):
            raise ValueError(f"{(a, b, c, d)} does not solve the equation")
        object.__setattr__(self, "kind", "equal_middle" if b == c else "strict")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d


class FourthMoment(NamedTuple):
    strict: int
    equal_middle: int
    moment: int
    solutions: list[QuadrupleSolution] | None = None


def _check_range(m: Sequence[int], N_lo: int, N: int):
    if not any(m):
        raise ValueError("m must not be all zero")
    if not 0 <= N_lo < N:
        raise ValueError("need 0 <= N_lo < N")


def _group_and_report(keys, m, q, N_lo, N, witness_cap) -> MomentCountReport:
    groups: dict = {}
    for n, key in zip(range(N_lo + 1, N + 1), keys):
        groups.setdefault(key, []).append(n)
    total = sum(len(g) ** 2 for g in groups.values())
    pairs = []
    for g in groups.values():
        if len(g) > 1:
            pairs.extend((x, y) for x in g for y in g if x != y)
    pairs.sort()
    return MomentCountReport(tuple(m), q, N_lo, N, N - N_lo, total - (N - N_lo),
                             tuple(pairs[:witness_cap]))


def _window_vectors(m: Sequence[int], N_lo: int, N: int) -> Iterator[ExponentVector]:
    k = len(m)
    facs = {x: factorize(x) for x in range(N_lo + 2, N + k + 1)}
    for n in range(N_lo + 1, N + 1):
        yield ExponentVector.combine((facs[n + j], mj) for j, mj in enumerate(m, start=1))


def second_moment_exact_uniform(m: Sequence[int], N_lo: int, N: int, witness_cap: int = 50) -> MomentCountReport:
    """
    ``E|sum_{n=N_lo+1}^{N} prod_j X_{n+j}^{m_j}|^2`` for the uniform-circle law.

    Each ``n`` is keyed by the exact factorization of ``prod_j (n+j)^{m_j}``;
    the moment is the sum of squared group sizes.
    """
    _check_range(m, N_lo, N)
    return _group_and_report(_window_vectors(m, N_lo, N), m, None, N_lo, N, witness_cap)


def second_moment_exact_roots(m: Sequence[int], q: int, N_lo: int, N: int, witness_cap: int = 50) -> MomentCountReport:
    """Same moment for the uniform law on q-th roots of unity; keys are q-th-power-free parts."""
    if q < 1:
        raise ValueError("q must be positive")
    if all(mj % q == 0 for mj in m):
        raise ValueError(f"m is identically 0 mod {q}")
    _check_range(m, N_lo, N)
    keys = (v.reduce_mod(q) for v in _window_vectors(m, N_lo, N))
    return _group_and_report(keys, m, q, N_lo, N, witness_cap)


# -- collision groups of prod n_i(n_i+1) over nondecreasing tuples ----------

def _tuple_chunks(q: int, N: int) -> Iterator[np.ndarray]:
    """All nondecreasing ``q``-tuples from ``1..N`` as ``(rows, q)`` arrays, lexicographic."""
    if q == 1:
        yield np.arange(1, N + 1, dtype=np.int64)[:, None]
    elif q == 2:
        step = max(1, SHARD_TARGET // (4 * N))
        y = np.arange(1, N + 1, dtype=np.int64)
        for lo in range(1, N + 1, step):
            x = np.arange(lo, min(lo + step, N + 1), dtype=np.int64)
            X, Y = np.meshgrid(x, y, indexing="ij")
            keep = Y >= X
            yield np.stack([X[keep], Y[keep]], axis=1)
    elif q == 3:
        iy, iz = np.triu_indices(N)
        for x in range(1, N + 1):
            sel = iy >= x - 1
            yield np.stack([np.full(sel.sum(), x), iy[sel] + 1, iz[sel] + 1], axis=1)
    else:
        raise ValueError("only q in {1, 2, 3} is supported")


def _keys(tuples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A = (tuples * (tuples + 1)).astype(np.uint64)
    hi = np.ones(len(tuples), dtype=np.uint64)
    lo = np.ones(len(tuples), dtype=np.uint64)
    for col in A.T:
        hi = hi * col  # wraps mod 2**64
        lo = lo * (col % np.uint64(_P_LO)) % np.uint64(_P_LO)
    return hi, lo


def collision_groups(q: int, N: int) -> Iterator[np.ndarray]:
    """
    Yield every set of at least two nondecreasing ``q``-tuples in ``1..N``
    sharing the same value of ``prod n_i (n_i + 1)``, as an array sorted by rows.
    """
    if (N * (N + 1)) ** q >= _KEY_BOUND:
        raise ResourceLimitError(f"products for q={q}, N={N} exceed the exact key range")
    n_tuples = comb(N + q - 1, q)
    shards = max(1, -(-n_tuples // SHARD_TARGET))
    for s in range(shards):
        parts_t, parts_hi, parts_lo = [], [], []
        for chunk in _tuple_chunks(q, N):
            hi, lo = _keys(chunk)
            if shards > 1:
                sel = lo % np.uint64(shards) == s
                chunk, hi, lo = chunk[sel], hi[sel], lo[sel]
            parts_t.append(chunk)
            parts_hi.append(hi)
            parts_lo.append(lo)
        tup = np.concatenate(parts_t)
        hi = np.concatenate(parts_hi)
        lo = np.concatenate(parts_lo)
        order = np.lexsort((lo, hi))
        tup, hi, lo = tup[order], hi[order], lo[order]
        same = (hi[1:] == hi[:-1]) & (lo[1:] == lo[:-1])
        if not same.any():
            continue
        starts = np.flatnonzero(np.concatenate(([True], ~same)))
        ends = np.append(starts[1:], len(tup))
        for a, b in zip(starts, ends):
            if b - a > 1:
                grp = tup[a:b]
                yield grp[np.lexsort(grp.T[::-1])]


def _perm_count(t) -> int:
    out = factorial(len(t))
    for v in set(t):
        out //= factorial(list(t).count(v))
    return out


def fourth_moment_counts(N: int, cap: int = FOURTH_MOMENT_CAP, return_solutions: bool = False) -> FourthMoment:
    """
    Counts of strict (``a<b<c<d``) and equal-middle (``a<b=c<d``) solutions
    with ``d <= N``, and the fourth moment ``2N^2 - N + 8 strict + 4 equal``.

    Two pairs ``x1<=y1``, ``x2<=y2`` with equal ``x(x+1)y(y+1)`` and ``x1<x2``
    are always nested (``x1<x2<=y2<y1``), so each collision group of size
    ``g`` contributes ``C(g,2)`` solutions; the one with ``x2 = y2`` (at most
    one per group) is equal-middle.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if N > cap:
        raise ResourceLimitError(f"N={N} above fourth-moment cap {cap}")
    strict = equal = 0
    sols = [] if return_solutions else None
    for grp in collision_groups(2, N):
        pairs = [tuple(map(int, r)) for r in grp]
        for i, (x1, y1) in enumerate(pairs):
            for x2, y2 in pairs[i + 1 :]:
                sol = QuadrupleSolution(x1, x2, y2, y1)
                if sol.kind == "strict":
                    strict += 1
                else:
                    equal += 1
                if sols is not None:
                    sols.append(sol)
    if sols is not None:
        sols.sort(key=lambda s: (s.d, s.a, s.b))
    return FourthMoment(strict, equal, 2 * N * N - N + 8 * strict + 4 * equal, sols)


def family_quadruples(N: int) -> list[QuadrupleSolution]:
    """The sporadic solutions (1,3,3,8), (1,2,5,9) and the family (n, 2n+1, 3n, 6n+2) up to ``N``."""
    if N < 8:
        raise ValueError("N must be at least 8")
    found = {(1, 3, 3, 8), (1, 2, 5, 9)}
    found |= {(n, 2 * n + 1, 3 * n, 6 * n + 2) for n in range(1, (N - 2) // 6 + 1)}
    sols = [QuadrupleSolution(*t) for t in found if t[3] <= N]
    return sorted(sols, key=lambda s: (s.d, s.a, s.b))


def ratio_property_check(N: int) -> Fraction:
    """
    Smallest ``d/a`` over all solutions up to ``N``.

    Every solution is also checked against ``d^2 - 6ad + a^2 > 0``, the
    integer form of ``d/a > 3 + 2 sqrt 2``; a violation raises ``ArithmeticError``.
    """
    if N < 8:
        raise ValueError("N must be at least 8")
    best = None
    for s in fourth_moment_counts(N, cap=max(N, FOURTH_MOMENT_CAP), return_solutions=True).solutions:
        if s.d * s.d - 6 * s.a * s.d + s.a * s.a <= 0:
            raise ArithmeticError(f"{s.as_tuple()} has d/a <= 3 + 2 sqrt 2")
        r = Fraction(s.d, s.a)
        best = r if best is None or r < best else best
    return best


def u_sequence(r_max: int) -> list[int]:
    """``u_0..u_{r_max}`` from ``u_{r+1} = 2 u_r + u_{r-1} + 1``, ``u_0 = u_1 = 0``."""
    u = [0, 0]
    while len(u) <= r_max:
        u.append(2 * u[-1] + u[-2] + 1)
    return u[: r_max + 1]


def u_family(r_max: int) -> tuple[list[tuple[int, int]], list[QuadrupleSolution]]:
    """
    The sequence ``(r, u_r)`` and the equal-middle solutions
    ``(u_{2k}, u_{2k+1}, u_{2k+1}, u_{2k+2})`` for ``k >= 1``, ``2k + 2 <= r_max``.
    """
    if r_max < 2:
        raise ValueError("r_max must be at least 2")
    u = u_sequence(r_max)
    quads = [QuadrupleSolution(u[2 * k], u[2 * k + 1], u[2 * k + 1], u[2 * k + 2])
             for k in range(1, r_max // 2)]
    return list(enumerate(u)), quads


def moment_2q_nontrivial(q: int, N: int, caps: dict[int, int] | None = None) -> int:
    """
    Ordered solutions in ``1..N`` of ``prod_{r<=q} n_r(n_r+1) = prod_{r<=q} n_{q+r}(n_{q+r}+1)``
    whose two sides are not the same multiset.

    A group of unordered tuples with a common product contributes
    ``(sum of orderings)^2 - sum of orderings^2``.
    """
    caps = MOMENT_2Q_CAPS if caps is None else caps
    if q not in (1, 2, 3):
        raise ValueError("only q in {1, 2, 3} is supported")
    if N < 1:
        raise ValueError("N must be positive")
    if N > caps[q]:
        raise ResourceLimitError(f"N={N} above cap {caps[q]} for q={q}")
    total = 0
    for grp in collision_groups(q, N):
        perms = [_perm_count(tuple(r)) for r in grp]
        total += sum(perms) ** 2 - sum(p * p for p in perms)
    return total


def solutions_csv_rows(solutions: Sequence[QuadrupleSolution]) -> list[list]:
    return [["a", "b", "c", "d", "class"]] + [[*s.as_tuple(), s.kind] for s in solutions]
