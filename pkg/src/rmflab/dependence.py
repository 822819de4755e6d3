"""
Multiplicative dependence among consecutive integers.

``X_{n+1}, ..., X_{n+k}`` are dependent under the uniform-circle law exactly
when some nonzero integer vector ``m`` gives ``prod (n+j)**m_j == 1``, i.e.
when the matrix of p-adic valuations of the window has a nontrivial kernel.
Under the law uniform on the q-th roots of unity the same holds with the
exponent sums taken mod q and ``m_j`` restricted to ``[0, q / mu_{n+j,q})``.

Everything here is exact integer arithmetic.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from math import gcd, lcm, prod
from typing import Iterator, Sequence

import numpy as np

from rmflab.arith import ExponentVector, SpfTable, factorize, mu_power_divisor, shared_table
from rmflab.errors import ResourceLimitError

#: Largest box (number of candidate vectors) the mod-q enumerator will walk.
ENUMERATION_CAP = 10**8

SCAN_CHUNK = 2000


def canonical(vec: Sequence[int]) -> tuple[int, ...]:
    """Divide by the content and make the first nonzero entry positive."""
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g == 0:
        return tuple(int(x) for x in vec)
    first = next(x for x in vec if x)
    if first < 0:
        g = -g
    return tuple(int(x) // g for x in vec)


@dataclass(frozen=True)
class DependenceWitness:
    """Nonzero ``m`` with ``prod_j (n+j)**m_j == 1``, in canonical form."""

    n: int
    k: int
    m: tuple[int, ...]

    def __post_init__(self):
        if len(self.m) != self.k:
            raise ValueError("witness length must equal k")
        if not any(self.m):
            raise ValueError("zero vector is not a witness")
        if canonical(self.m) != tuple(self.m):
            raise ValueError(f"witness {self.m} is not canonical")

    def verify(self) -> bool:
        return verify_witness(self.n, self.k, self.m)

    def to_record(self) -> dict:
        return {"n": self.n, "k": self.k, "m": list(self.m)}


@dataclass(frozen=True)
class WitnessModQ:
    """Nonzero ``m`` in the box ``0 <= m_j < q / mu_{n+j,q}`` annihilating all valuations mod q."""

    n: int
    k: int
    q: int
    m: tuple[int, ...]

    def __post_init__(self):
        if len(self.m) != self.k:
            raise ValueError("witness length must equal k")
        if not any(self.m):
            raise ValueError("zero vector is not a witness")
        for j, mj in enumerate(self.m, start=1):
            if not 0 <= mj < value_order(self.n + j, self.q):
                raise ValueError(f"m_{j} = {mj} outside its range")

    def verify(self) -> bool:
        return verify_witness(self.n, self.k, self.m, self.q)

    def to_record(self) -> dict:
        return {"n": self.n, "k": self.k, "q": self.q, "m": list(self.m)}


@dataclass(frozen=True)
class KernelBasis:
    """Integer basis of a rational kernel; ``rank`` is its dimension."""

    vectors: tuple[tuple[int, ...], ...] = field(default_factory=tuple)
    rank: int = 0

    def witnesses(self, n: int) -> list[DependenceWitness]:
        return [DependenceWitness(n, len(v), v) for v in self.vectors]


def witness_from_record(rec: dict) -> DependenceWitness | WitnessModQ:
    """Inverse of ``to_record`` for both witness kinds."""
    m = tuple(int(x) for x in rec["m"])
    if rec.get("q") is not None:
        return WitnessModQ(int(rec["n"]), int(rec["k"]), int(rec["q"]), m)
    return DependenceWitness(int(rec["n"]), int(rec["k"]), m)


def value_order(s: int, q: int, table: SpfTable | None = None) -> int:
    """Order of ``X_s`` under the uniform law on q-th roots of unity."""
    if s == 1:
        return 1
    return q // mu_power_divisor(s, q, table)


def valuation_matrix(
    n: int, k: int, table: SpfTable | None = None
) -> tuple[tuple[int, ...], np.ndarray]:
    """
    Valuations ``v_p(n + j)`` for the window ``n+1..n+k``.

    Returns the row primes (ascending, only primes dividing some entry of the
    window) and the ``len(primes) x k`` matrix.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    facs = [factorize(n + j, table).as_dict() for j in range(1, k + 1)]
    primes = tuple(sorted(set().union(*facs)))
    mat = np.array([[f.get(p, 0) for f in facs] for p in primes], dtype=np.int64)
    return primes, mat.reshape(len(primes), k)


def _as_rows(M) -> tuple[list[list[int]], int]:
    arr = np.asarray(M, dtype=object)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError("matrix must be 2-D with at least one column")
    return [[int(x) for x in row] for row in arr], arr.shape[1]


def _reduced_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    # fraction-free Gauss-Jordan; rows are kept primitive to bound growth
    rows = [r[:] for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        cand = [i for i in range(r, len(rows)) if rows[i][c]]
        if not cand:
            continue
        piv = min(cand, key=lambda i: abs(rows[i][c]))
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            a = rows[i][c]
            if i == r or not a:
                continue
            b = pr[c]
            g = gcd(a, b)
            new = [(b // g) * x - (a // g) * y for x, y in zip(rows[i], pr)]
            cont = 0
            for x in new:
                cont = gcd(cont, x)
            rows[i] = [x // cont for x in new] if cont > 1 else new
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def integer_kernel(M) -> KernelBasis:
    """
    Integer basis of the rational kernel of ``M``.

    Each vector has content 1 and a positive leading entry. The basis is
    read off the reduced row echelon form, so it is deterministic.
    """
    rows, ncols = _as_rows(M)
    red, pivots = _reduced_echelon(rows, ncols)
    vectors = []
    for f in range(ncols):
        if f in pivots:
            continue
        scale = 1
        for row, pc in zip(red, pivots):
            if row[f]:
                scale = lcm(scale, abs(row[pc]))
        v = [0] * ncols
        v[f] = scale
        for row, pc in zip(red, pivots):
            v[pc] = -row[f] * scale // row[pc]
        vectors.append(canonical(v))
    return KernelBasis(tuple(vectors), len(vectors))


def find_dependence_uniform(
    n: int, k: int, table: SpfTable | None = None, preeliminate: bool = True
) -> KernelBasis | None:
    """
    Kernel of the window's valuation matrix, or ``None`` when independent.

    With ``preeliminate`` the columns ``j`` with ``n + j`` divisible by a prime
    larger than ``k`` are fixed to zero first: such a prime divides only one
    entry of the window, so its row forces ``m_j = 0``.
    """
    primes, mat = valuation_matrix(n, k, table)
    cols = list(range(k))
    if preeliminate:
        big = [i for i, p in enumerate(primes) if p > k]
        cols = [j for j in cols if not mat[big, j].any()]
        if not cols:
            return None
        sub = mat[:, cols]
        sub = sub[sub.any(axis=1)]
    else:
        sub = mat
    if sub.shape[0] == 0:
        sub = np.zeros((1, len(cols)), dtype=np.int64)
    basis = integer_kernel(sub)
    if basis.rank == 0:
        return None
    full = []
    for v in basis.vectors:
        w = [0] * k
        for j, x in zip(cols, v):
            w[j] = x
        full.append(tuple(w))
    return KernelBasis(tuple(full), basis.rank)


def _enumerate_modq(cols: list[dict[int, int]], orders: list[int], q: int) -> tuple[int, ...] | None:
    # lexicographically first nonzero m in the box; a prime's congruence is
    # checked as soon as the last column it touches has been assigned
    k = len(cols)
    last: dict[int, int] = {}
    for j, f in enumerate(cols):
        for p in f:
            last[p] = j
    closing = [[p for p, lj in last.items() if lj == j] for j in range(k)]
    sums = dict.fromkeys(last, 0)
    m = [0] * k

    def rec(j: int, nonzero: bool) -> bool:
        if j == k:
            return nonzero
        f = cols[j]
        for mj in range(orders[j]):
            for p, e in f.items():
                sums[p] += mj * e
            if all(sums[p] % q == 0 for p in closing[j]):
                m[j] = mj
                if rec(j + 1, nonzero or mj != 0):
                    return True
            for p, e in f.items():
                sums[p] -= mj * e
        m[j] = 0
        return False

    return tuple(m) if rec(0, False) else None


def _diagonalize_columns(rows: list[list[int]], ncols: int) -> tuple[list[int], list[list[int]]]:
    """
    Unimodular row/column reduction of an integer matrix to diagonal form.

    Returns the diagonal entries ``d_0..d_{r-1}`` and the column transform
    ``C`` (``ncols x ncols``, det +-1) with ``U @ A @ C = diag(d)`` for some
    unimodular ``U``. No divisibility chain is enforced.
    """
    A = [r[:] for r in rows]
    C = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    nrows = len(A)

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in C:
            row[a], row[b] = row[b], row[a]

    def add_col(dst, src, c):
        # col_dst -= c * col_src
        for row in A:
            row[dst] -= c * row[src]
        for row in C:
            row[dst] -= c * row[src]

    diag = []
    t = 0
    while t < min(nrows, ncols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if A[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        A[t], A[i0] = A[i0], A[t]
        swap_cols(t, j0)
        while True:
            piv = A[t][t]
            for i in range(t + 1, nrows):
                c = A[i][t] // piv
                if c:
                    A[i] = [x - c * y for x, y in zip(A[i], A[t])]
            for j in range(t + 1, ncols):
                c = A[t][j] // piv
                if c:
                    add_col(j, t, c)
            rest_col = [(abs(A[i][t]), i) for i in range(t + 1, nrows) if A[i][t]]
            rest_row = [(abs(A[t][j]), j) for j in range(t + 1, ncols) if A[t][j]]
            if not rest_col and not rest_row:
                break
            if rest_col and (not rest_row or rest_col[0] <= rest_row[0]):
                _, i = min(rest_col)
                A[t], A[i] = A[i], A[t]
            else:
                _, j = min(rest_row)
                swap_cols(t, j)
        diag.append(A[t][t])
        t += 1
    return diag, C


def modq_kernel_generators(M, q: int) -> list[tuple[int, ...]]:
    """Generators of ``{m in Z^k : M m = 0 mod q}`` modulo ``q Z^k``."""
    rows, ncols = _as_rows(M)
    rows = [r for r in rows if any(x % q for x in r)]
    diag, C = _diagonalize_columns(rows, ncols) if rows else ([], [[int(i == j) for j in range(ncols)] for i in range(ncols)])
    gens = []
    for i in range(ncols):
        mult = q // gcd(diag[i], q) if i < len(diag) else 1
        gens.append(tuple((C[j][i] * mult) % q for j in range(ncols)))
    return gens


def find_dependence_roots(
    n: int,
    k: int,
    q: int,
    table: SpfTable | None = None,
    method: str = "auto",
    cap: int = ENUMERATION_CAP,
) -> WitnessModQ | None:
    """
    Dependence witness for the window under the uniform law on ``U_q``.

    ``method`` is ``"enumerate"`` (walk the box, lexicographically first
    witness; raises :class:`ResourceLimitError` above ``cap``),
    ``"structured"`` (kernel of the valuation matrix over ``Z/q`` via
    diagonalization, then reduced into the box) or ``"auto"``: decide with
    the structured solver and, if dependent and the box is small enough,
    return the enumerated canonical witness.
    """
    if n < 1 or k < 1 or q < 1:
        raise ValueError("need n, k, q >= 1")
    facs = [factorize(n + j, table).as_dict() for j in range(1, k + 1)]
    orders = [value_order(n + j, q, table) for j in range(1, k + 1)]
    box = prod(orders) - 1

    if method == "enumerate":
        if box > cap:
            raise ResourceLimitError(
                f"mod-{q} search box has {box} candidates (cap {cap}); "
                "use method='structured'"
            )
        m = _enumerate_modq(facs, orders, q)
        return None if m is None else WitnessModQ(n, k, q, m)
    if method not in ("auto", "structured"):
        raise ValueError(f"unknown method {method!r}")

    if box == 0:
        return None
    primes = sorted(set().union(*facs))
    mat = [[f.get(p, 0) for f in facs] for p in primes] or [[0] * k]
    found = None
    for g in modq_kernel_generators(mat, q):
        red = tuple(x % o for x, o in zip(g, orders))
        if any(red):
            found = red
            break
    if found is None:
        return None
    if method == "auto" and box <= cap:
        found = _enumerate_modq(facs, orders, q)
    return WitnessModQ(n, k, q, found)


def verify_witness(n: int, k: int, m: Sequence[int], q: int | None = None) -> bool:
    """
    Exact certificate check.

    Over the integers: ``prod (n+j)**m_j == 1``. With ``q``: every exponent
    sum is divisible by ``q``; ``m`` must then lie in the witness box.
    An all-zero ``m`` is never a witness.
    """
    if len(m) != k:
        raise ValueError("len(m) must equal k")
    if q is not None:
        for j, mj in enumerate(m, start=1):
            if not 0 <= mj < value_order(n + j, q):
                raise ValueError(f"m_{j} = {mj} outside [0, {value_order(n + j, q)})")
    if not any(m):
        return False
    total = ExponentVector.combine((factorize(n + j), int(mj)) for j, mj in enumerate(m, start=1))
    if q is None:
        return total.is_one()
    return total.reduce_mod(q).is_one()


def dubickas_witness(t: int) -> DependenceWitness:
    """
    Witness from ``(t^3-3t-2)(t^3-3t+2) t^3 = (t^3-4t)(t^3-t)^2``.

    The five factors lie in the window ``t^3-4t .. t^3``, i.e. ``n = t^3-4t-1``
    and ``k = 4t + 1``. Requires ``t >= 3``.
    """
    if t < 3:
        raise ValueError("need t >= 3")
    c = t**3
    n = c - 4 * t - 1
    m = [0] * (4 * t + 1)
    for value, e in ((c - 3 * t - 2, 1), (c - 3 * t + 2, 1), (c, 1), (c - 4 * t, -1), (c - t, -2)):
        m[value - n - 1] += e
    return DependenceWitness(n, 4 * t + 1, canonical(m))


def independence_bound(k: int) -> int:
    """Threshold above which windows of width ``k`` are provably independent (very loose)."""
    return (100 * k) ** (k + 1)


def iter_dependences_uniform(k: int, n_lo: int, n_hi: int) -> Iterator[tuple[int, KernelBasis]]:
    """Yield ``(n, kernel)`` for dependent windows with ``n_lo <= n <= n_hi``."""
    table = shared_table(n_hi + k)
    for n in range(n_lo, n_hi + 1):
        basis = find_dependence_uniform(n, k, table)
        if basis is not None:
            yield n, basis


def iter_dependences_roots(
    k: int, q: int, n_lo: int, n_hi: int, cap: int = ENUMERATION_CAP
) -> Iterator[tuple[int, WitnessModQ]]:
    table = shared_table(n_hi + k)
    for n in range(n_lo, n_hi + 1):
        w = find_dependence_roots(n, k, q, table, cap=cap)
        if w is not None:
            yield n, w


def _uniform_chunk(k, bounds):
    return list(iter_dependences_uniform(k, *bounds))


def _roots_chunk(k, q, cap, bounds):
    return list(iter_dependences_roots(k, q, *bounds, cap=cap))


def _run_scan(worker, params: dict, n_min: int, n_max: int, workers: int, checkpoint, decode, encode):
    results: list = []
    start = n_min
    if checkpoint is not None and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            state = json.load(fh)
        if state["params"] != params or state["n_min"] != n_min:
            raise ValueError(f"checkpoint {checkpoint} belongs to a different scan")
        results = [decode(r) for r in state["results"]]
        start = state["next_n"]

    chunks = [(lo, min(lo + SCAN_CHUNK - 1, n_max)) for lo in range(start, n_max + 1, SCAN_CHUNK)]

    def save(next_n):
        if checkpoint is None:
            return
        state = {"params": params, "n_min": n_min, "next_n": next_n,
                 "results": [encode(r) for r in results]}
        d = os.path.dirname(os.path.abspath(checkpoint))
        with tempfile.NamedTemporaryFile("w", dir=d, delete=False) as fh:
            json.dump(state, fh)
        os.replace(fh.name, checkpoint)

    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            for (lo, hi), part in zip(chunks, pool.map(worker, chunks)):
                results.extend(part)
                save(hi + 1)
    else:
        for lo, hi in chunks:
            results.extend(worker((lo, hi)))
            save(hi + 1)
    return results


def scan_dependences_uniform(
    k: int, n_max: int, n_min: int = 1, workers: int = 1, checkpoint: str | None = None
) -> list[tuple[int, KernelBasis]]:
    """
    All dependent windows of width ``k`` with ``n_min <= n <= n_max``, ascending.

    The range is cut into chunks that may run in worker processes; results
    are merged in order, so output does not depend on ``workers``. With
    ``checkpoint`` progress is saved after each chunk and a rerun resumes.
    """
    if k < 1 or n_max < 1:
        raise ValueError("need k >= 1 and n_max >= 1")
    return _run_scan(
        partial(_uniform_chunk, k), {"kind": "uniform", "k": k}, n_min, n_max, workers, checkpoint,
        decode=lambda r: (r["n"], KernelBasis(tuple(map(tuple, r["basis"])), len(r["basis"]))),
        encode=lambda r: {"n": r[0], "basis": [list(v) for v in r[1].vectors]},
    )


def scan_dependences_roots(
    k: int, q: int, n_max: int, n_min: int = 1, workers: int = 1,
    checkpoint: str | None = None, cap: int = ENUMERATION_CAP,
) -> list[tuple[int, WitnessModQ]]:
    """Mod-q counterpart of :func:`scan_dependences_uniform`."""
    if k < 1 or q < 1 or n_max < 1:
        raise ValueError("need k, q, n_max >= 1")
    return _run_scan(
        partial(_roots_chunk, k, q, cap), {"kind": "roots", "k": k, "q": q}, n_min, n_max, workers,
        checkpoint,
        decode=lambda r: (r["n"], witness_from_record(r)),
        encode=lambda r: r[1].to_record(),
    )
