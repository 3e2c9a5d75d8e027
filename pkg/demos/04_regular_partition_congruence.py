"""
From a cusp form to a congruence for 5-regular partitions
=========================================================

Walk through the pipeline for (p, M, r, m) = (5, 1, 1, 11).
"""
from etaq import congruence as cg
from etaq.partitions import bk_series

P = cg.derive_params(5, 1, 1, 11)
print(P.as_dict())

# the cusp form eta(5 tau)^(am + r) eta(tau)^(bm - Mr)
F = cg.build_form(P)
print("form:", F, " sturm bound for g:", cg.sturm_bound(P.g_weight, P.g_level))

# (1 - x^5)^11 == 1 - x^55 mod 11 turns the partition product into F
print("lift holds:", cg.verify_lift(P, 500))

# g = F | T(11) / (eta(5 tau)^a eta(tau)^b); its coefficients are b_5 values
g = cg.compute_g(P, 30)
u = cg.u_series(g, P)
b5 = bk_series(5, 200, 11)
for n in range(1, 12):
    num = P.d * P.m * n - P.r * (P.p - P.M)
    arg = num // 24 if num % 24 == 0 else None
    print(f"u({n}) = {u[n]}", f"b_5({arg}) = {b5[arg]}" if arg is not None else "(no partition index)")

# primes l == -1 mod 1980 are the candidates; not all of them annihilate g
rep = cg.search_serre_primes(P, 20000, 10)
print("rejected (l, first failing n):", rep.rejected)
print("certificates:", [c.to_json() for c in rep.certificates])

final = cg.verify_final(P, 1979, 40)
print("checked n:", final.checked)
print("violations (n, argument, b_5 mod 11):", final.violations)
