"""k-regular and weighted k-regular partition counts.

``c_series`` expands prod (1 - q^{kn})^{r1} / (1 - q^n)^{r2}; with
r1 = r2 = 1 this is the k-regular generating function.  ``brute_force_count``
enumerates coloured partitions directly and shares no code with the series
engine, so it serves as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from . import qseries as qs

__all__ = ["PartitionSpec", "c_series", "bk_series", "brute_force_count", "partitions"]


@dataclass(frozen=True)
class PartitionSpec:
    k: int
    r1: int = 1
    r2: int = 1

    def __post_init__(self):
        if self.k < 1 or self.r1 < 1 or self.r2 < 1:
            raise ValueError(f"need k, r1, r2 >= 1, got {self}")

    def colors(self, part: int) -> int:
        """Number of colours a part may carry."""
        return self.r2 - self.r1 if part % self.k == 0 else self.r2


def c_series(spec: PartitionSpec, precision: int, modulus: Optional[int] = None) -> qs.QSeries:
    """Generating series of c_{k,r1,r2}(n) for 0 <= n < precision."""
    if precision < 1:
        raise ValueError(f"precision must be positive, got {precision}")
    euler = qs.euler_product(precision, modulus)
    numer = qs.truncate(
        qs.dilate(qs.power(qs.euler_product(-(-precision // spec.k), modulus), spec.r1), spec.k),
        precision)
    denom = qs.power(euler, spec.r2)
    return numer * qs.invert(denom)


def bk_series(k: int, precision: int, modulus: Optional[int] = None) -> qs.QSeries:
    """Generating series of the k-regular partition counts b_k(n)."""
    return c_series(PartitionSpec(k, 1, 1), precision, modulus)


def partitions(n: int, largest: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """All partitions of n as non-increasing tuples."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=64)
def _multiplicity_profiles(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    profiles = []
    for lam in partitions(n):
        counts: dict[int, int] = {}
        for part in lam:
            counts[part] = counts.get(part, 0) + 1
        profiles.append(tuple(sorted(counts.items())))
    return tuple(profiles)


def brute_force_count(spec: PartitionSpec, n: int) -> int:
    """Number of coloured partitions of n.

    Parts divisible by k come in r2 - r1 colours, the others in r2 colours.
    Equal parts are unordered, so j copies of a part with c colours can be
    coloured in C(j + c - 1, j) ways.
    """
    if spec.r2 < spec.r1:
        raise ValueError(f"colour interpretation needs r2 >= r1, got {spec}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    total = 0
    for profile in _multiplicity_profiles(n):
        ways = 1
        for part, mult in profile:
            c = spec.colors(part)
            if c == 0:
                ways = 0
                break
            ways *= math.comb(mult + c - 1, mult)
        total += ways
    return total
