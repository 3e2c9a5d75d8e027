from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from etaq.arith import (Residue, euler_phi, factorize, gamma0_index, is_prime, kronecker,
                        mod_inverse, primes_in_progression, squarefree_kernel)

from oracles import kronecker_by_definition, legendre


def small_primes(limit):
    return [n for n in range(2, limit) if all(n % d for d in range(2, int(n**0.5) + 1))]


def test_is_prime_matches_trial_division():
    expected = set(small_primes(5000))
    assert {n for n in range(-5, 5000) if is_prime(n)} == expected


def test_is_prime_large():
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_mod_inverse(a, n):
    from math import gcd
    if gcd(a, n) != 1:
        with pytest.raises(ValueError):
            mod_inverse(a, n)
    else:
        x = mod_inverse(a, n)
        assert 0 <= x < n and (a * x - 1) % n == 0


def test_mod_inverse_examples():
    assert mod_inverse(11, 24) == 11
    assert mod_inverse(5, 1) == 0
    with pytest.raises(ValueError):
        mod_inverse(4, 24)


@pytest.mark.parametrize("p", small_primes(60)[1:])
def test_kronecker_is_euler_criterion_at_odd_primes(p):
    for a in range(-3 * p, 3 * p):
        assert kronecker(a, p) == legendre(a, p)


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_kronecker_matches_definition(a, n):
    assert kronecker(a, n) == kronecker_by_definition(a, n)


def test_kronecker_examples():
    assert kronecker(5, 11) == 1
    assert kronecker(2, 7) == 1
    assert kronecker(3, 7) == -1
    assert kronecker(-1, -1) == -1
    assert kronecker(3, 0) == 0 and kronecker(-1, 0) == 1
    assert kronecker(5, 8) == -1


@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(1, 200))
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


def test_primes_in_progression():
    assert primes_in_progression(-1, 1980, 2000) == [1979]
    assert primes_in_progression(-1, 1980, 1978) == []
    assert primes_in_progression(1, 4, 50) == [5, 13, 17, 29, 37, 41]
    # sieve path agrees with the Miller-Rabin path
    sieve = primes_in_progression(7, 12, 10**6)
    assert sieve == [x for x in range(7, 10**6 + 1, 12) if is_prime(x)]


def test_residue():
    r = Residue(-1, 24)
    assert r.value == 23
    assert Residue(5, 12).representatives(1, 24) == [5, 17]
    with pytest.raises(ValueError):
        Residue(1, 0)


def test_factorize_phi_index():
    assert factorize(720) == {2: 4, 3: 2, 5: 1}
    assert factorize(-7) == {7: 1}
    assert euler_phi(1) == 1 and euler_phi(36) == 12
    assert gamma0_index(1) == 1
    assert gamma0_index(5) == 6
    assert gamma0_index(180) == 432


def test_squarefree_kernel():
    assert squarefree_kernel(-12) == -3
    assert squarefree_kernel(Fraction(1, 5)) == 5
    assert squarefree_kernel(5**43) == 5
    assert squarefree_kernel(Fraction(5, 5**44)) == 5
    with pytest.raises(ValueError):
        squarefree_kernel(0)
