"""Eta-quotients prod_{delta | N} eta(delta*tau)^{r_delta}.

Modularity (Gordon-Hughes-Newman), weight, Nebentypus, Ligozat cusp orders,
and q-expansions.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import qseries as qs
from .arith import euler_phi, gamma0_index, kronecker, squarefree_kernel

__all__ = [
    "EtaQuotient",
    "CuspOrderReport",
    "validate_ghn",
    "weight",
    "character_at",
    "cusp_order",
    "cusp_orders",
    "is_cusp_form",
    "expand",
    "parse",
]


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@dataclass(frozen=True, init=False)
class EtaQuotient:
    level: int
    exponents: tuple[tuple[int, int], ...]

    def __init__(self, level: int, exponents: Optional[dict[int, int]] = None):
        if level < 1:
            raise ValueError(f"level must be positive, got {level}")
        exps = {}
        for delta, r in (exponents or {}).items():
            if delta < 1 or level % delta:
                raise ValueError(f"{delta} is not a positive divisor of the level {level}")
            if r:
                exps[int(delta)] = int(r)
        object.__setattr__(self, "level", int(level))
        object.__setattr__(self, "exponents", tuple(sorted(exps.items())))

    def r(self, delta: int) -> int:
        return dict(self.exponents).get(delta, 0)

    @property
    def prefactor(self) -> Fraction:
        """Exponent of the leading q-power, sum(delta * r_delta) / 24."""
        return Fraction(sum(d * r for d, r in self.exponents), 24)

    def __str__(self):
        body = " * ".join(f"{d}^{r}" for d, r in sorted(self.exponents, reverse=True))
        return f"N={self.level}; {body}" if body else f"N={self.level}; 1"


_TERM = re.compile(r"^\s*(\d+)\s*\^\s*([+-]?\d+)\s*$")


def parse(text: str) -> EtaQuotient:
    """Parse ``"N=5; 5^1 * 1^43"`` style notation."""
    head, sep, rest = text.partition(";")
    m = re.fullmatch(r"\s*N\s*=\s*(\d+)\s*", head)
    if not m or not sep:
        raise ValueError(f"expected 'N=<level>; <delta>^<exp> * ...', got {text!r}")
    exps: dict[int, int] = {}
    rest = rest.strip()
    if rest and rest != "1":
        for term in rest.split("*"):
            t = _TERM.match(term)
            if not t:
                raise ValueError(f"bad factor {term.strip()!r} in {text!r}")
            delta, r = int(t.group(1)), int(t.group(2))
            exps[delta] = exps.get(delta, 0) + r
    return EtaQuotient(int(m.group(1)), exps)


def validate_ghn(E: EtaQuotient) -> bool:
    """Both Gordon-Hughes-Newman sums vanish modulo 24."""
    N = E.level
    return (sum(d * r for d, r in E.exponents) % 24 == 0
            and sum((N // d) * r for d, r in E.exponents) % 24 == 0)


def weight(E: EtaQuotient) -> Fraction:
    return Fraction(sum(r for _, r in E.exponents), 2)


def _integral_weight(E: EtaQuotient) -> int:
    k = weight(E)
    if k.denominator != 1:
        raise ValueError(f"weight {k} is half-integral; only integral weight is supported here")
    return int(k)


def character_at(E: EtaQuotient, d: int) -> int:
    """Nebentypus value ((-1)^k s / d) with s = prod delta^r_delta."""
    k = _integral_weight(E)
    s = Fraction(1)
    for delta, r in E.exponents:
        s *= Fraction(delta) ** r
    return kronecker((-1) ** k * squarefree_kernel(s), d)


def cusp_order(E: EtaQuotient, d: int) -> Fraction:
    """Ligozat's order of vanishing at a cusp c/d, d | N."""
    N = E.level
    if d < 1 or N % d:
        raise ValueError(f"{d} does not divide the level {N}")
    g = math.gcd(d, N // d)
    total = sum(Fraction(r * math.gcd(d, delta) ** 2, delta) for delta, r in E.exponents)
    return Fraction(N, 24 * d * g) * total


@dataclass(frozen=True)
class CuspOrderReport:
    entries: tuple[tuple[int, Fraction], ...]
    total_valence: Fraction

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.entries)


def cusp_orders(E: EtaQuotient) -> CuspOrderReport:
    N = E.level
    entries = tuple((d, cusp_order(E, d)) for d in divisors(N))
    total = sum((euler_phi(math.gcd(d, N // d)) * o for d, o in entries), Fraction(0))
    return CuspOrderReport(entries, total)


def is_cusp_form(E: EtaQuotient) -> tuple[bool, CuspOrderReport]:
    """Whether E is a holomorphic cusp form of positive integral weight on Gamma_0(N)."""
    report = cusp_orders(E)
    k = weight(E)
    ok = (validate_ghn(E) and k.denominator == 1 and k > 0
          and all(o > 0 for _, o in report.entries))
    return ok, report


def valence_expected(E: EtaQuotient) -> Fraction:
    """weight * [SL2(Z) : Gamma_0(N)] / 12."""
    return weight(E) * gamma0_index(E.level) / 12


def product_part(E: EtaQuotient, n_terms: int, modulus) -> qs.QSeries:
    """E without its q-power prefactor: prod_delta prod_n (1 - q^{delta n})^{r_delta}.

    Integer graded, offset 0, n_terms coefficients.
    """
    num = qs.QSeries.one(n_terms, 1, modulus)
    den = qs.QSeries.one(n_terms, 1, modulus)
    for delta, r in E.exponents:
        base = qs.euler_product(-(-n_terms // delta), modulus)
        factor = qs.truncate(qs.dilate(qs.power(base, abs(r)), delta), n_terms)
        if r > 0:
            num = num * factor
        else:
            den = den * factor
    if any(r < 0 for _, r in E.exponents):
        return num * qs.invert(den)
    return num


def expand(E: EtaQuotient, precision, modulus: Optional[int] = None, denom: int = 24) -> qs.QSeries:
    """q-expansion of E, known for all exponents below ``precision``.

    The result uses grading ``denom`` (24 by default).  ``denom=1`` is
    allowed when the leading exponent is an integer.
    """
    precision = Fraction(precision)
    lead = E.prefactor
    if precision <= lead:
        raise qs.PrecisionError(f"precision {precision} must exceed the leading exponent {lead}")
    if (lead * denom).denominator != 1:
        raise qs.GradingError(f"leading exponent {lead} is not on the 1/{denom} grading")
    n_terms = math.ceil(precision - lead)
    body = qs.regrade(product_part(E, n_terms, modulus), denom)
    out = qs.shift(body, int(lead * denom))
    return qs.truncate(out, math.ceil(precision * denom))
