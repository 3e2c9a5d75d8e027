"""
Hecke operators on q-expansions
===============================

T(p) acts on a weight k form by a(pn) + chi(p) p^(k-1) a(n/p).
"""
from etaq import qseries as qs
from etaq.qseries import FormContext

delta = qs.shift(qs.power(qs.euler_product(60), 24), 1)
ctx = FormContext(weight=12, level=1)

# Delta is an eigenform, so T(2) Delta = tau(2) Delta
t2 = qs.hecke_t(delta, 2, ctx)
print("T(2) Delta:", t2.to_list(1, 8))
print("-24 Delta: ", [-24 * c for c in delta.to_list(1, 8)])
print("tau(4) + 2^11 =", delta[4] + 2**11)

# modulo p the second term disappears and T(p) is just U(p)
for p in (5, 7, 11):
    f = qs.reduce_mod(delta, p)
    print(p, qs.hecke_t(f, p, ctx) == qs.u_op(f, p))
