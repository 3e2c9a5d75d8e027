"""Elementary number theory used throughout the package.

Everything here works on plain Python integers and is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Residue",
    "mod_inverse",
    "kronecker",
    "is_prime",
    "primes_in_progression",
    "factorize",
    "euler_phi",
    "gamma0_index",
    "squarefree_kernel",
]


@dataclass(frozen=True)
class Residue:
    """An integer class ``value mod modulus`` kept in canonical form."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def representatives(self, lo: int, hi: int) -> list[int]:
        """All integers x in [lo, hi] with x == value (mod modulus)."""
        first = lo + (self.value - lo) % self.modulus
        return list(range(first, hi + 1, self.modulus))


def mod_inverse(a: int, n: int) -> int:
    """Return x in [0, n) with a*x == 1 (mod n).

    Raises ValueError when gcd(a, n) != 1.
    """
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    if n == 1:
        return 0
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not invertible modulo {n}")
    return pow(a, -1, n)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for every pair of integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    twos = (n & -n).bit_length() - 1
    if twos:
        if a % 2 == 0:
            return 0
        n >>= twos
        if twos % 2 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol by reciprocity
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# Deterministic for n < 3.3e24, which covers all 64-bit inputs.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_SIEVE_LIMIT = 20_000_000


def _sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return flags


def primes_in_progression(residue: int, modulus: int, limit: int) -> list[int]:
    """Primes l <= limit with l == residue (mod modulus), ascending."""
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    if limit < 2:
        return []
    start = residue % modulus
    if start == 0:
        start = modulus
    if limit // modulus <= 4096 or limit > _SIEVE_LIMIT:
        return [x for x in range(start, limit + 1, modulus) if is_prime(x)]
    flags = _sieve(limit)
    candidates = np.arange(start, limit + 1, modulus)
    return [int(x) for x in candidates[flags[candidates]]]


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| by trial division (n != 0)."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def gamma0_index(level: int) -> int:
    """Index of Gamma_0(N) in SL_2(Z): N * prod_{p | N} (1 + 1/p)."""
    index = Fraction(level)
    for p in factorize(level):
        index *= Fraction(p + 1, p)
    assert index.denominator == 1
    return int(index)


def squarefree_kernel(x: Fraction | int) -> int:
    """The squarefree integer in the same square class as the nonzero rational x.

    The sign is kept, so ``squarefree_kernel(-12) == -3`` and
    ``squarefree_kernel(Fraction(1, 5)) == 5``.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("0 has no square class")
    kernel = 1
    exps: dict[int, int] = {}
    for part, sign in ((x.numerator, 1), (x.denominator, -1)):
        for p, e in factorize(part).items():
            exps[p] = exps.get(p, 0) + sign * e
    for p, e in exps.items():
        if e % 2:
            kernel *= p
    return -kernel if x < 0 else kernel
