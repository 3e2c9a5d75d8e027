"""
Truncated q-series and eta-quotients
====================================

Expand a few classical products and look at their coefficients.
"""
from fractions import Fraction

from etaq import etaquot as eq
from etaq import qseries as qs
from etaq.etaquot import EtaQuotient

# the Euler product prod (1 - q^n): only pentagonal exponents survive
euler = qs.euler_product(40)
print("Euler product:", euler.nonzero())

# its inverse generates the partition numbers
p = qs.invert(euler)
print("p(0..15):", p.to_list(0, 16))

# the discriminant function eta(tau)^24 has integer exponents
delta = eq.expand(EtaQuotient(1, {1: 24}), 8, denom=1)
print("tau(1..7):", delta.to_list(1, 8))

# eta(5 tau) / eta(tau) carries a q^(1/6) prefactor, so keep grading 24
b5 = eq.expand(eq.parse("N=5; 5^1 * 1^-1"), Fraction(1, 6) + 12)
print("b_5(0..11):", [qs.coeff_at(b5, Fraction(1, 6) + n) for n in range(12)])

# the same series modulo 11, stored as int64
print(eq.expand(eq.parse("N=5; 5^1 * 1^-1"), 3, modulus=11))
