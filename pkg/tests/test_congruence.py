import dataclasses
import itertools
import math

import pytest

from etaq import congruence as cg
from etaq import etaquot as eq
from etaq.arith import is_prime

GRID = [t for t in itertools.product([5, 7, 11, 13, 17, 19, 23], [1, 3], [1, 2, 3], [11, 13, 17, 19])
        if t[1] <= t[0]]


def family_oracle(p, M, r, m):
    """Minimal (a+b, a) over the m' family by exhaustive search of shifts."""
    s = math.gcd(r, 24)
    v = r // s
    d = math.gcd(24 // s, p - M)
    step = 24 // (d * s)
    best = None
    for mp in range(1, 24 // s + 1):
        if (m * mp - v) % step:
            continue
        for j, jj in itertools.product(range(-10, 11), repeat=2):
            a, b = s * (p - mp) + 24 * j, s * (M * mp - 1) + 24 * jj
            if a < 0 or b * m - M * r < 1 or (a + b) % 2:
                continue
            if (a + b) * m + r * (1 - M) <= 0:
                continue
            if (m * (p * a + b) - (M * r - p * r)) % 24 or (m * (a + p * b) - (p * M * r - r)) % 24:
                continue
            if best is None or (a + b, a) < best[:2]:
                best = (a + b, a, b, mp)
    return best


def derivable():
    out = []
    for t in GRID:
        try:
            out.append(cg.derive_params(*t))
        except (cg.HypothesisError, cg.DerivationError):
            pass
    return out


DERIVED = derivable()


def test_derive_examples():
    P = cg.derive_params(5, 1, 1, 11)
    assert (P.s, P.v, P.d, P.m_prime, P.a, P.b, P.kappa) == (1, 1, 4, 5, 0, 4, 22)
    assert (P.g_weight, P.g_level, P.ell_modulus) == (20, 180, 1980)
    assert 11 * (5 * 0 + 4) == 44 and 44 % 24 == (-4) % 24
    assert 11 * (0 + 5 * 4) == 220 and 220 % 24 == 4
    P = cg.derive_params(5, 1, 1, 13)
    assert (P.a, P.b, P.kappa) == (4, 24, 182)
    P = cg.derive_params(7, 1, 1, 13)
    assert (P.m_prime, P.a, P.b) == (5, 2, 4)
    assert (13 * 18) % 24 == (-6) % 24 and (13 * 30) % 24 == 6


def test_grid_invariants():
    assert len(GRID) == 168
    assert len(DERIVED) > 60
    for P in DERIVED:
        assert P.congruence_residuals() == (0, 0)
        assert P.a >= 0 and P.b >= 0
        assert P.a * P.m + P.r >= 1 and P.b * P.m - P.M * P.r >= 1
        assert (P.a + P.b) % 2 == 0
        assert P.kappa == ((P.a + P.b) * P.m + P.r * (1 - P.M)) // 2 > 0
        assert P.g_weight == P.kappa - (P.a + P.b) // 2
        assert P.g_level == (24 // P.d) ** 2 * P.p
        assert ((P.p - 1) * (P.m - 1) // 4) % 2 == 0
        assert P.r % P.m and P.m != P.p and (P.p * P.M - 1) % P.m


def test_grid_matches_family_oracle():
    for P in DERIVED:
        total, a, b, _ = family_oracle(P.p, P.M, P.r, P.m)
        assert (P.a, P.b) == (a, b), P


def test_grid_failures_are_hypotheses():
    for t in GRID:
        violations = cg.check_hypotheses(*t)
        if violations:
            with pytest.raises(cg.HypothesisError) as info:
                cg.derive_params(*t)
            assert info.value.violations == violations
        else:
            cg.derive_params(*t)


@pytest.mark.parametrize("args,fragment", [
    ((4, 1, 1, 11), "odd prime"),
    ((5, 2, 1, 11), "M=2"),
    ((5, 7, 1, 11), "M=7"),
    ((5, 1, 0, 11), "r=0"),
    ((5, 1, 1, 9), "m=9"),
    ((5, 1, 1, 3), "m=3"),
    ((5, 1, 11, 11), "gcd(m, r1)"),
    ((5, 3, 13, 13), "gcd(m, r1)"),
    ((7, 5, 1, 7), "differ from p"),
    ((23, 1, 1, 11), "pM == 1"),
    ((7, 1, 1, 11), "not even"),
])
def test_individual_hypotheses(args, fragment):
    with pytest.raises(cg.HypothesisError) as info:
        cg.derive_params(*args)
    assert any(fragment in v for v in info.value.violations)


def test_gcd_r2_hypothesis():
    assert any("r2" in v for v in cg.check_hypotheses(13, 11, 1, 11))


def test_warnings_when_d_definitions_differ():
    P = cg.derive_params(7, 1, 2, 13)
    assert P.d == math.gcd(12, 6) == 6
    P = cg.derive_params(5, 1, 3, 11)
    assert P.d == math.gcd(8, 4) == 4 and math.gcd(4, 24) == 4
    for P in DERIVED:
        differs = math.gcd(P.p - P.M, 24) != P.d
        assert differs == any("gcd(p - M, 24)" in w for w in P.warnings)


def test_build_form():
    P = cg.derive_params(5, 1, 1, 11)
    assert cg.build_form(P) == eq.EtaQuotient(5, {5: 1, 1: 43})
    P = cg.derive_params(5, 1, 1, 13)
    assert cg.build_form(P) == eq.EtaQuotient(5, {5: 53, 1: 311})
    for Q in DERIVED:
        E = cg.build_form(Q)
        assert eq.is_cusp_form(E)[0] and eq.weight(E) == Q.kappa
    with pytest.raises(cg.DerivationError):
        cg.build_form(dataclasses.replace(P, b=0))


def test_verify_lift_grid():
    for P in DERIVED:
        assert cg.verify_lift(P, 300), P


def test_verify_lift_mutation():
    P = cg.derive_params(5, 1, 1, 11)
    assert cg.verify_lift(P, 500)
    # the identity is formal in (a, b), so a corrupted a still lifts consistently
    assert cg.verify_lift(dataclasses.replace(P, a=1), 500)
    assert not cg.verify_lift(P, 500, form=eq.EtaQuotient(5, {5: 12, 1: 43}))
    assert not cg.verify_lift(P, 500, form=eq.EtaQuotient(5, {5: 1, 1: 67}))


@pytest.mark.parametrize("P", DERIVED[::7], ids=lambda P: f"{P.p}-{P.M}-{P.r}-{P.m}")
def test_extraction_sample(P):
    rep = cg.verify_extraction(P, 150)
    assert rep.ok, (rep.off_lattice[:5], rep.mismatches[:5])


def test_extraction_detects_wrong_form():
    P = cg.derive_params(5, 1, 1, 11)
    g = cg.compute_g(P, 300, form=eq.EtaQuotient(5, {5: 2, 1: 14}))
    assert not cg.verify_extraction(P, 300, g=g).ok


def test_compute_g_support_and_u_series():
    P = cg.derive_params(5, 1, 1, 11)
    g = cg.compute_g(P, 500)
    assert g.prec_index == 500 * P.d + 1 and g.denom == 24
    assert all(i % P.d == 0 for i, _ in g.nonzero())
    u = cg.u_series(g, P)
    assert u.prec_index == 501 and all(u[n] == g[n * P.d] for n in range(501))


def test_sturm_bound():
    assert cg.sturm_bound(12, 1) == 2
    assert cg.sturm_bound(20, 180) == 721
    assert cg.sturm_bound(1, 1) == 1
    with pytest.raises(ValueError):
        cg.sturm_bound(0, 5)


def test_search_first_candidate():
    P = cg.derive_params(5, 1, 1, 11)
    assert cg.search_serre_primes(P, 1978, 5).certificates == []
    rep = cg.search_serre_primes(P, 2000, 50)
    tested = [ell for ell, _ in rep.rejected] + [c.ell for c in rep.certificates]
    assert tested == [1979]


def test_search_agrees_with_verify_final():
    # for gcd(n, l) = 1 the Hecke test at n is exactly the final congruence at n
    P = cg.derive_params(5, 1, 1, 11)
    rep = cg.search_serre_primes(P, 30000, 20)
    assert not rep.budget_exceeded
    for ell, n in rep.rejected:
        fin = cg.verify_final(P, ell, n)
        assert [v[0] for v in fin.violations] == [n]
    for cert in rep.certificates:
        assert cg.verify_final(P, cert.ell, cert.check_depth).ok


def test_search_budget_and_validation():
    P = cg.derive_params(5, 1, 1, 11)
    rep = cg.search_serre_primes(P, 10000, 50, budget=1000)
    assert rep.budget_exceeded and rep.over_budget[0] == 1979 and not rep.certificates
    with pytest.raises(ValueError):
        cg.search_serre_primes(P, 2000, 0)


def test_search_deterministic_across_workers():
    P = cg.derive_params(7, 1, 1, 13)
    one = cg.search_serre_primes(P, 20000, 6, workers=1)
    four = cg.search_serre_primes(P, 20000, 6, workers=4)
    assert one == four


def test_certificate_json():
    P = cg.derive_params(5, 1, 1, 11)
    cert = cg.SerreCertificate(P, 1979, True, 50, 721)
    data = cert.to_json()
    assert set(data) == {"p", "M", "r", "m", "s", "d", "m_prime", "a", "b", "kappa", "g_weight",
                         "g_level", "ell", "check_depth", "sturm_bound", "fully_certified"}
    assert data["fully_certified"] is False
    assert cg.SerreCertificate(P, 1979, True, 721, 721).fully_certified


def test_verify_final_skips():
    P = cg.derive_params(5, 1, 1, 11)
    ell = 1979
    rep = cg.verify_final(P, ell, 30)
    assert rep.checked == [n for n in range(1, 31) if n % 6 == 1]
    assert rep.skipped_nonintegral == 30 - len(rep.checked)
    assert rep.skipped_gcd == []
    # l = 1979 is not a Serre prime: b_5(3628) = 1 mod 11
    assert rep.violations[0] == (1, 3628, 1)
    assert cg.verify_final(P, ell, 2 * ell).skipped_gcd == [ell, 2 * ell]
    with pytest.raises(ValueError):
        cg.verify_final(P, 1981, 10)
    with pytest.raises(ValueError):
        cg.verify_final(P, 11, 10)
    assert is_prime(1979)


def test_full_sturm_depth_search_runs():
    P = cg.derive_params(5, 1, 1, 11)
    bound = cg.sturm_bound(P.g_weight, P.g_level)
    rep = cg.search_serre_primes(P, 2000, bound)
    assert not rep.budget_exceeded
    assert rep.rejected == [(1979, 1)] and rep.certificates == []


def test_deep_extraction():
    P = cg.derive_params(5, 1, 1, 11)
    rep = cg.verify_extraction(P, 200_000)
    assert rep.ok
