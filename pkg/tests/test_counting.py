import itertools
import json
from collections import Counter
from fractions import Fraction
from math import isqrt, prod

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from rmflab import counting
from rmflab.counting import (
    QuadrupleSolution,
    collision_groups,
    family_quadruples,
    fourth_moment_counts,
    moment_2q_nontrivial,
    ratio_property_check,
    second_moment_exact_roots,
    second_moment_exact_uniform,
    solutions_csv_rows,
    u_family,
    u_sequence,
)
from rmflab.errors import ResourceLimitError


# -- oracles -----------------------------------------------------------------

def window_value(m, n):
    return prod((Fraction(n + j) ** mj for j, mj in enumerate(m, 1)), start=Fraction(1))


def is_qth_power(fr, q):
    return all(sympy.integer_nthroot(x, q)[1] for x in (fr.numerator, fr.denominator))


def brute_pairs(m, N_lo, N, q=None):
    """Ordered pairs (n1, n2) in (N_lo, N] with equal window values (or equal up to q-th powers)."""
    vals = {n: window_value(m, n) for n in range(N_lo + 1, N + 1)}
    same = (lambda a, b: a == b) if q is None else (lambda a, b: is_qth_power(a / b, q))
    return [(x, y) for x in vals for y in vals if same(vals[x], vals[y])]


def pronic(n):
    return n * (n + 1)


def brute_fourth_moment(N):
    """Number of ordered (n1..n4) with n1(n1+1)n2(n2+1) = n3(n3+1)n4(n4+1)."""
    c = Counter(pronic(x) * pronic(y) for x in range(1, N + 1) for y in range(1, N + 1))
    return sum(v * v for v in c.values())


def brute_quadruples(N):
    out = []
    for a, b, c, d in itertools.combinations_with_replacement(range(1, N + 1), 4):
        if a < b and c < d and pronic(a) * pronic(d) == pronic(b) * pronic(c):
            out.append((a, b, c, d))
    return out


def brute_2q_nontrivial(q, N):
    c = {}
    for t in itertools.product(range(1, N + 1), repeat=q):
        c.setdefault(prod(map(pronic, t)), Counter())[tuple(sorted(t))] += 1
    total = 0
    for groups in c.values():
        s = sum(groups.values())
        total += s * s - sum(v * v for v in groups.values())
    return total


# -- second moments ----------------------------------------------------------------

def test_second_moment_uniform_examples():
    r = second_moment_exact_uniform((1,), 0, 10)
    assert (r.total, r.nontrivial) == (10, 0)
    r = second_moment_exact_uniform((2, 1, -4), 0, 10)
    assert r.total == 12 and r.witness_pairs == ((2, 7), (7, 2))
    assert second_moment_exact_uniform((1, -1), 0, 100).total == 100
    assert len(brute_pairs((1, -1), 0, 100)) == 100


def test_second_moment_roots_examples():
    assert second_moment_exact_roots((1,), 2, 0, 3).total == 3
    r = second_moment_exact_roots((1,), 2, 0, 8)
    assert r.total == 12
    assert set(r.witness_pairs) == {(1, 7), (7, 1), (3, 8), (8, 3)}
    with pytest.raises(ValueError):
        second_moment_exact_roots((1, 2), 1, 0, 5)
    with pytest.raises(ValueError):
        second_moment_exact_roots((2, 4), 2, 0, 5)


MATRIX = [((1,), 0, 60), ((1, 1), 5, 80), ((1, -1), 0, 80), ((2, 1, -4), 0, 60), ((1, 2, 3), 10, 70),
          ((3, -1, 0, 2), 0, 50), ((1, 0, -2, 1), 3, 60), ((2, -2, 1), 0, 60)]


@pytest.mark.parametrize("m,N_lo,N", MATRIX)
def test_uniform_pairs_match_brute_force(m, N_lo, N):
    r = second_moment_exact_uniform(m, N_lo, N, witness_cap=10**6)
    pairs = brute_pairs(m, N_lo, N)
    assert r.total == len(pairs)
    assert set(r.witness_pairs) == {p for p in pairs if p[0] != p[1]}
    assert r.diagonal == N - N_lo
    assert N - N_lo <= r.total <= len(m) * (N - N_lo)


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("m,N_lo,N", MATRIX[:6])
def test_roots_pairs_match_brute_force(m, N_lo, N, q):
    if all(x % q == 0 for x in m):
        pytest.skip("m vanishes mod q")
    r = second_moment_exact_roots(m, q, N_lo, N, witness_cap=10**6)
    pairs = brute_pairs(m, N_lo, N, q)
    assert r.total == len(pairs)
    for x, y in r.witness_pairs:
        assert is_qth_power(window_value(m, x) / window_value(m, y), q)


@settings(max_examples=40, deadline=None)
@given(m=st.lists(st.integers(-4, 4), min_size=1, max_size=4).filter(any),
       N_lo=st.integers(0, 100), length=st.integers(1, 150))
def test_second_moment_bounds(m, N_lo, length):
    r = second_moment_exact_uniform(m, N_lo, N_lo + length)
    assert length <= r.total <= len(m) * length
    if len(m) <= 2:
        assert r.nontrivial == 0
    for x, y in r.witness_pairs:
        assert x != y and window_value(m, x) == window_value(m, y)


def test_saturation_for_2_1_minus4():
    counts = [second_moment_exact_uniform((2, 1, -4), 0, N).nontrivial for N in range(1, 400, 9)]
    assert counts == sorted(counts)
    assert counts[-1] == 2
    r = second_moment_exact_uniform((4, 2, -8), 0, 300)
    assert r.nontrivial == 2


def test_second_moment_errors():
    with pytest.raises(ValueError):
        second_moment_exact_uniform((0, 0), 0, 10)
    with pytest.raises(ValueError):
        second_moment_exact_uniform((1,), 10, 10)
    with pytest.raises(ValueError):
        second_moment_exact_roots((1,), 0, 0, 10)


def test_report_record_is_json():
    rec = json.loads(json.dumps(second_moment_exact_uniform((2, 1, -4), 0, 10).to_record()))
    assert rec["total"] == 12 and rec["witnesses"] == [[2, 7], [7, 2]] and "q" not in rec
    assert second_moment_exact_roots((1,), 2, 0, 8).to_record()["q"] == 2


# -- fourth moment -------------------------------------------------------------------

@pytest.mark.parametrize("N,expected", [(3, (0, 0, 15)), (8, (0, 1, 124)), (9, (1, 1, 165))])
def test_fourth_moment_examples(N, expected):
    assert fourth_moment_counts(N)[:3] == expected


def test_fourth_moment_named_solutions():
    sols = fourth_moment_counts(9, return_solutions=True).solutions
    assert [s.as_tuple() for s in sols] == [(1, 3, 3, 8), (1, 2, 5, 9)]
    assert [s.kind for s in sols] == ["equal_middle", "strict"]


@pytest.mark.parametrize("N", [1, 2, 8, 9, 20, 33, 45, 60])
def test_fourth_moment_against_brute_force(N):
    fm = fourth_moment_counts(N, return_solutions=True)
    quads = brute_quadruples(N)
    assert sorted(s.as_tuple() for s in fm.solutions) == sorted(quads)
    assert fm.strict == sum(b < c for _, b, c, _ in quads)
    assert fm.equal_middle == sum(b == c for _, b, c, _ in quads)
    assert fm.moment == brute_fourth_moment(N) == 2 * N * N - N + 8 * fm.strict + 4 * fm.equal_middle


def test_fourth_moment_monotone():
    prev = (0, 0)
    for N in range(1, 200, 7):
        fm = fourth_moment_counts(N)
        assert fm.strict >= prev[0] and fm.equal_middle >= prev[1]
        prev = fm[:2]


def test_fourth_moment_sharding_is_invisible(monkeypatch):
    full = fourth_moment_counts(300, return_solutions=True)
    monkeypatch.setattr(counting, "SHARD_TARGET", 1000)
    sharded = fourth_moment_counts(300, return_solutions=True)
    assert full == sharded


def test_fourth_moment_errors():
    with pytest.raises(ValueError):
        fourth_moment_counts(0)
    with pytest.raises(ResourceLimitError):
        fourth_moment_counts(101, cap=100)


def test_quadruple_solution_validates():
    assert QuadrupleSolution(8, 20, 20, 49).kind == "equal_middle"
    with pytest.raises(ValueError):
        QuadrupleSolution(1, 2, 5, 10)
    with pytest.raises(ValueError):
        QuadrupleSolution(2, 1, 5, 9)


def test_collision_groups_small():
    groups = [g.tolist() for g in collision_groups(2, 9)]
    assert sorted(groups) == [[[1, 8], [3, 3]], [[1, 9], [2, 5]]]
    with pytest.raises(ResourceLimitError):
        next(collision_groups(3, 10**5))


# -- family and ratio property ------------------------------------------------------------

def test_family_examples():
    assert [s.as_tuple() for s in family_quadruples(8)] == [(1, 3, 3, 8)]
    assert [s.as_tuple() for s in family_quadruples(9)] == [(1, 3, 3, 8), (1, 2, 5, 9)]
    assert (3, 7, 9, 20) in [s.as_tuple() for s in family_quadruples(20)]
    assert 3 * 4 * 20 * 21 == 7 * 8 * 9 * 10 == 5040
    with pytest.raises(ValueError):
        family_quadruples(7)


@given(st.integers(1, 10**12))
def test_family_identity(n):
    assert n * (n + 1) * (6 * n + 2) * (6 * n + 3) == (2 * n + 1) * (2 * n + 2) * (3 * n) * (3 * n + 1)


def test_family_is_subset_of_all_solutions():
    every = {s.as_tuple() for s in fourth_moment_counts(2000, return_solutions=True).solutions}
    assert {s.as_tuple() for s in family_quadruples(2000)} <= every


def brute_min_ratio(N):
    return min(Fraction(d, a) for a, b, c, d in brute_quadruples(N))


def test_ratio_examples():
    assert ratio_property_check(8) == 8
    assert ratio_property_check(50) == Fraction(49, 8) == brute_min_ratio(50)
    assert 49 * 49 - 6 * 8 * 49 + 64 > 0
    with pytest.raises(ValueError):
        ratio_property_check(7)


def test_ratio_bound_on_all_solutions():
    bound = 3 + 2 * 2**0.5
    for s in fourth_moment_counts(1500, return_solutions=True).solutions:
        assert s.d * s.d - 6 * s.a * s.d + s.a * s.a > 0
        assert s.d / s.a > bound


# -- u-family --------------------------------------------------------------------

def closed_form_u(r):
    # (1 + sqrt 2)^r = x + y sqrt 2 with integers; the conjugate term cancels y
    x, y = 1, 0
    for _ in range(r):
        x, y = x + 2 * y, x + y
    return (2 * x - 2) // 4


def test_u_examples():
    assert u_sequence(5) == [0, 0, 1, 3, 8, 20]
    pairs, quads = u_family(6)
    assert pairs[:6] == list(enumerate([0, 0, 1, 3, 8, 20]))
    assert [q.as_tuple() for q in quads] == [(1, 3, 3, 8), (8, 20, 20, 49)]
    assert 8 * 9 * 49 * 50 == 20 * 21 * 20 * 21 == 176400
    with pytest.raises(ValueError):
        u_family(1)


def test_u_matches_closed_form():
    u = u_sequence(60)
    assert u == [closed_form_u(r) for r in range(61)]
    r = 7
    approx = ((1 + 2**0.5) ** r + (1 - 2**0.5) ** r - 2) / 4
    assert u[r] == round(approx)


def test_u_family_quadruples_verify():
    _, quads = u_family(40)
    for q in quads:
        assert pronic(q.a) * pronic(q.d) == pronic(q.b) ** 2
    small = {q.as_tuple() for q in u_family(10)[1] if q.d <= 2000}
    every = {s.as_tuple() for s in fourth_moment_counts(2000, return_solutions=True).solutions}
    assert small <= every


# -- 2q-tuples ---------------------------------------------------------------------

@pytest.mark.parametrize("q,N,expected", [(1, 50, 0), (2, 8, 4), (2, 9, 12)])
def test_moment_2q_examples(q, N, expected):
    assert moment_2q_nontrivial(q, N) == expected


@pytest.mark.parametrize("q,N", [(1, 200), (2, 25), (2, 40), (3, 12)])
def test_moment_2q_brute_force(q, N):
    assert moment_2q_nontrivial(q, N) == brute_2q_nontrivial(q, N)


@pytest.mark.parametrize("N", [9, 30, 100, 250])
def test_moment_2q_identity_q2(N):
    fm = fourth_moment_counts(N)
    assert moment_2q_nontrivial(2, N) == 8 * fm.strict + 4 * fm.equal_middle


def test_moment_2q_errors():
    with pytest.raises(ValueError):
        moment_2q_nontrivial(4, 5)
    with pytest.raises(ValueError):
        moment_2q_nontrivial(2, 0)
    with pytest.raises(ResourceLimitError):
        moment_2q_nontrivial(3, 301)
    with pytest.raises(ResourceLimitError):
        moment_2q_nontrivial(2, 50, caps={2: 40})


def test_solution_csv_rows():
    rows = solutions_csv_rows(fourth_moment_counts(9, return_solutions=True).solutions)
    assert rows == [["a", "b", "c", "d", "class"], [1, 3, 3, 8, "equal_middle"], [1, 2, 5, 9, "strict"]]


def test_square_root_helper_sanity():
    # guards the closed-form oracle against an off-by-one in the Pell recursion
    x, y = 1, 0
    for _ in range(10):
        x, y = x + 2 * y, x + y
        assert x * x - 2 * y * y in (1, -1) and isqrt(2 * y * y) <= x
