from fractions import Fraction
from math import gcd, isqrt, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmflab.arith import (
    ExponentVector,
    build_spf,
    factorize,
    mu_power_divisor,
    multiplicative_stats,
    power_free_part,
    rough_part,
)
from rmflab.errors import ResourceLimitError

TABLE = build_spf(10**5)


def trial_division(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_spf_examples():
    t = build_spf(10)
    assert t.spf[9] == 3
    assert t.spf[7] == 7
    assert t.spf[6] == 2


def test_spf_invariant_small_range():
    t = build_spf(5000)
    for n in range(2, 5001):
        p = int(t.spf[n])
        assert n % p == 0
        assert all(p % d for d in range(2, isqrt(p) + 1))
        assert all(n % d for d in range(2, p))


def test_spf_rejects_bad_limits(monkeypatch):
    with pytest.raises(ValueError):
        build_spf(1)
    monkeypatch.setattr("rmflab.arith.SIEVE_LIMIT_CAP", 1000)
    with pytest.raises(ResourceLimitError):
        build_spf(1001)


def test_primes_listing():
    assert list(build_spf(30).primes()) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("n,expected", [(1, {}), (12, {2: 2, 3: 1}), (252, {2: 2, 3: 2, 7: 1})])
def test_factorize_examples(n, expected):
    assert factorize(n, TABLE).as_dict() == expected


def test_factorize_above_table_limit():
    with pytest.raises(ValueError):
        factorize(11, build_spf(10))


def test_factorize_matches_trial_division():
    for n in range(1, 3000):
        assert factorize(n, TABLE).as_dict() == trial_division(n)


@pytest.fixture(scope="module")
def big_table():
    return build_spf(10**8)


@settings(max_examples=300, deadline=None)
@given(n=st.integers(1, 10**4), m=st.integers(1, 10**4))
def test_factorize_is_additive(big_table, n, m):
    assert factorize(n * m, big_table) == factorize(n, TABLE) + factorize(m, TABLE)


def test_exponent_vector_arithmetic():
    a = ExponentVector.from_mapping({2: 3, 5: -1})
    b = ExponentVector.from_mapping({2: -3, 3: 2})
    assert (a + b).value() == Fraction(8, 5) * Fraction(9, 8)
    assert (a - a).is_one()
    assert (-a).value() == Fraction(5, 8)
    assert a.scale(2).value() == Fraction(64, 25)
    assert a.reduce_mod(2) == ExponentVector.from_mapping({2: 1, 5: 1})
    assert ExponentVector().value() == 1
    with pytest.raises(ValueError):
        ExponentVector(((3, 1), (2, 1)))
    with pytest.raises(ValueError):
        ExponentVector(((2, 0),))


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.sampled_from([2, 3, 5, 7, 11]), st.integers(-6, 6)),
       st.dictionaries(st.sampled_from([2, 3, 5, 7, 11]), st.integers(-6, 6)))
def test_vector_addition_is_multiplication(d1, d2):
    a, b = ExponentVector.from_mapping(d1), ExponentVector.from_mapping(d2)
    assert (a + b).value() == a.value() * b.value()


@pytest.mark.parametrize("n,k,expected", [(240, 5, 5), (2673, 7, 11), (97, 2, 97), (1, 3, 1)])
def test_rough_part_examples(n, k, expected):
    assert rough_part(n, k, TABLE) == expected


@pytest.mark.parametrize("k", [2, 3, 5, 11])
def test_rough_part_splits_n(k):
    for n in range(1, 10**5 + 1, 7):
        r = rough_part(n, k, TABLE)
        s = n // r
        assert r * s == n and gcd(r, s) == 1
        assert all(p >= k for p in factorize(r, TABLE).primes())
        assert all(p < k for p in factorize(s, TABLE).primes())


def test_rough_part_k2_is_identity():
    assert all(rough_part(n, 2, TABLE) == n for n in range(1, 500))


def test_power_free_part_examples():
    v = ExponentVector.from_mapping({2: 5, 3: 2})
    assert power_free_part(v, 2) == ExponentVector.from_mapping({2: 1})
    assert power_free_part(v, 1).is_one()
    assert power_free_part(ExponentVector.from_mapping({2: 4}), 2).is_one()
    with pytest.raises(ValueError):
        power_free_part(ExponentVector.from_mapping({2: -1}), 2)


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.sampled_from([2, 3, 5, 7, 13]), st.integers(1, 40)), st.integers(1, 12))
def test_power_free_part_complement_is_qth_power(d, q):
    v = ExponentVector.from_mapping(d)
    g = power_free_part(v, q)
    rest = v - g
    assert g + rest == v
    assert all(e % q == 0 for _, e in rest.entries)
    assert all(1 <= e <= q - 1 for _, e in g.entries)


@pytest.mark.parametrize("s,q,expected", [(4, 2, 2), (8, 6, 3), (12, 4, 1)])
def test_mu_examples(s, q, expected):
    assert mu_power_divisor(s, q, TABLE) == expected


def is_perfect_power(s, d):
    r = round(s ** (1 / d))
    return any((r + e) ** d == s for e in (-1, 0, 1) if r + e > 0)


def test_mu_is_largest_power_divisor_of_q():
    for s in range(2, 10**4 + 1):
        for q in range(1, 13):
            mu = mu_power_divisor(s, q, TABLE)
            assert q % mu == 0 and is_perfect_power(s, mu)
            assert not any(is_perfect_power(s, d) for d in range(mu + 1, q + 1) if q % d == 0)


@pytest.mark.parametrize("n,expected", [(12, (6, 6, 2)), (1, (1, 1, 0)), (360, (30, 24, 3))])
def test_multiplicative_stats_examples(n, expected):
    assert multiplicative_stats(n, TABLE) == expected


def test_multiplicative_stats_against_definitions():
    for n in range(1, 2000):
        rad, tau, omega = multiplicative_stats(n, TABLE)
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        primes = [d for d in divisors if d > 1 and all(d % e for e in range(2, d))]
        assert (rad, tau, omega) == (prod(primes), len(divisors), len(primes))
