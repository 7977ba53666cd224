"""
Integer Arithmetic Tests
"""
import math

import pytest

from app.models import FactoredInt, ResidueClass
from core.arith import (
    R_violations,
    a_weight,
    check_level,
    crt_pair,
    divisors,
    factorize,
    find_R,
    is_probable_prime,
    minimal_R,
    mobius,
    odd_primes_below,
    radical,
    reflect_index,
    require_squarefree_odd,
    sigma_div,
    squarefree_divisors,
    squarefree_odd_array,
)
from core.exceptions import PreconditionError


def _brute_mobius(n: int) -> int:
    sign, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            sign = -sign
        p += 1
    return -sign if m > 1 else sign


def test_factorize_known_values():
    assert factorize(1).factors == ()
    assert factorize(360).factors == ((2, 3), (3, 2), (5, 1))
    big = 1_000_000_007 * 998_244_353
    assert factorize(big).factors == ((998_244_353, 1), (1_000_000_007, 1))


def test_factored_int_validates_product():
    with pytest.raises(ValueError):
        FactoredInt(n=12, factors=((2, 1), (3, 1)))


def test_primality():
    assert is_probable_prime(2_147_483_647)
    assert not is_probable_prime(3_215_031_751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_mobius_matches_brute_force():
    for n in range(1, 400):
        assert mobius(n) == _brute_mobius(n), n


def test_a_weight_and_divisors():
    assert a_weight(1) == 1
    assert a_weight(15) == (1 - 3) * (1 - 5)
    assert a_weight(6, omit_two=True) == -2
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert squarefree_divisors(12) == [1, 2, 3, 6]
    assert radical(72) == 6 and radical(72, omit_two=True) == 3
    assert sigma_div(6, 1.0) == pytest.approx(1 + 1 / 2 + 1 / 3 + 1 / 6)


def test_squarefree_odd_array():
    assert squarefree_odd_array(30).tolist() == [1, 3, 5, 7, 11, 13, 15, 17, 19, 21, 23, 29]
    assert squarefree_odd_array(0).size == 0


def test_require_squarefree_odd_rejects():
    with pytest.raises(PreconditionError):
        require_squarefree_odd(9)
    with pytest.raises(PreconditionError):
        require_squarefree_odd(6)
    assert require_squarefree_odd(105).primes == [3, 5, 7]


def test_check_level():
    assert check_level(5, 3).n == 15
    with pytest.raises(PreconditionError):
        check_level(3, 3)


def test_crt_and_reflection():
    r = crt_pair(ResidueClass.reduce(2, 5), ResidueClass.reduce(3, 7))
    assert r.modulus == 35 and r.value % 5 == 2 and r.value % 7 == 3
    with pytest.raises(PreconditionError):
        crt_pair(ResidueClass.reduce(1, 4), ResidueClass.reduce(1, 6))
    R, Q = 19, 3
    for n in range(0, 2 * (R * Q) ** 2, 97):
        n_check = reflect_index(n, R, Q)
        assert (n_check.value - n) % (R * R) == 0
        assert (n_check.value + n) % (2 * Q * Q) == 0


def test_odd_primes_below():
    assert odd_primes_below(1.9) == []
    assert odd_primes_below(12) == [3, 5, 7, 11]


def test_minimal_R():
    beta = (1 + 2 ** 1.5) / 2
    assert minimal_R(1, beta) == 1
    assert minimal_R(3, beta) == 5
    assert minimal_R(15, beta) == 7 * 11 * 13 * 17 * 19 * 23


def test_find_R():
    assert find_R(1) == 1
    R = find_R(3)
    assert R == 55
    assert R_violations(R, 3, (1 + 2 ** 1.5) / 2) == []


def test_find_R_small_beta():
    R = find_R(3, beta=0.9)
    assert R % 18 == 1
    assert math.gcd(R, 3) == 1
    assert R == 19


def test_R_violations_reports_each_problem():
    problems = R_violations(9, 3, 2.0)
    assert any("squarefree" in p for p in problems)
    assert any("coprime" in p for p in problems)
