"""Congruences for c_{p, r, Mr}(n) modulo a prime m.

Pipeline:

1. :func:`derive_params` picks a, b so that
   eta(p tau)^{am+r} eta(tau)^{bm-Mr} satisfies the Gordon-Hughes-Newman
   conditions on Gamma_0(p).
2. :func:`build_form` returns that cusp form F.
3. :func:`verify_lift` checks F == eta(p tau)^r eta(tau)^{-Mr} eta(pm tau)^a
   eta(m tau)^b (mod m) coefficientwise.
4. :func:`compute_g` forms g = (F | T(m)) / (eta(p tau)^a eta(tau)^b) mod m.
   Its coefficients u(n) (g in the variable q^{d/24}) agree with
   c_{p,r,Mr}((d m n - r(p-M))/24) modulo m.
5. :func:`search_serre_primes` looks for primes l == -1 (mod level * m) with
   u | T(l) == 0 (mod m) up to a chosen depth, and :func:`verify_final`
   checks the resulting congruence directly on partition values.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import etaquot as eq
from . import qseries as qs
from .arith import Residue, gamma0_index, is_prime, mod_inverse, primes_in_progression
from .cache import SeriesCache, cached
from .partitions import PartitionSpec, c_series

__all__ = [
    "CongruenceParams",
    "HypothesisError",
    "DerivationError",
    "SerreCertificate",
    "SearchReport",
    "ExtractionReport",
    "FinalReport",
    "check_hypotheses",
    "derive_params",
    "build_form",
    "lift_quotient",
    "verify_lift",
    "compute_g",
    "u_series",
    "verify_extraction",
    "sturm_bound",
    "search_serre_primes",
    "verify_final",
]

SHIFT_BOUND = 10


class HypothesisError(ValueError):
    """Raised when (p, M, r, m) violates a hypothesis of the construction."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DerivationError(ValueError):
    pass


@dataclass(frozen=True)
class CongruenceParams:
    p: int
    M: int
    r: int
    m: int
    s: int
    v: int
    d: int
    m_prime: int
    a: int
    b: int
    kappa: int
    g_weight: int
    g_level: int
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def r1(self) -> int:
        return self.r

    @property
    def r2(self) -> int:
        return self.M * self.r

    @property
    def ell_modulus(self) -> int:
        """Serre primes are sought in the class -1 modulo this number."""
        return self.g_level * self.m

    def congruence_residuals(self) -> tuple[int, int]:
        """Both GHN congruences as residues mod 24 (zero when satisfied)."""
        p, m, a, b = self.p, self.m, self.a, self.b
        first = (m * (p * a + b) - (self.r2 - p * self.r1)) % 24
        second = (m * (a + p * b) - (p * self.r2 - self.r1)) % 24
        return first, second

    def as_dict(self) -> dict:
        out = asdict(self)
        out["warnings"] = list(self.warnings)
        return out


def check_hypotheses(p: int, M: int, r: int, m: int) -> list[str]:
    """Every violated hypothesis, as a readable message (empty if all hold)."""
    bad = []
    if p < 3 or not is_prime(p):
        bad.append(f"p={p} must be an odd prime")
    if M < 1 or M % 2 == 0 or M > p:
        bad.append(f"M={M} must be odd with 1 <= M <= p")
    if r < 1:
        bad.append(f"r={r} must be >= 1")
    if m < 5 or not is_prime(m):
        bad.append(f"m={m} must be a prime >= 5")
    if bad:
        return bad
    if r % m == 0:
        bad.append(f"gcd(m, r1) != 1 (m={m}, r1={r})")
    if (M * r) % m == 0:
        bad.append(f"gcd(m, r2) != 1 (m={m}, r2={M * r})")
    if m == p:
        bad.append(f"m must differ from p (both {p})")
    if (p * M - 1) % m == 0:
        bad.append(f"pM == 1 (mod m) (pM={p * M}, m={m})")
    if ((p - 1) * (m - 1)) % 8:
        bad.append(f"(p-1)(m-1)/4 = {Fraction((p - 1) * (m - 1), 4)} is not even")
    return bad


def derive_params(p: int, M: int, r: int, m: int) -> CongruenceParams:
    """Choose (m', a, b) and the derived weights and levels.

    Representatives m' == m^{-1} v (mod 24/(ds)) in [1, 24/s] are tried;
    a = s(p - m') and b = s(Mm' - 1) are moved by multiples of 24 to the
    smallest values with a >= 0 and bm - Mr >= 1.  The candidate with the
    smallest a + b wins, ties going to the smaller a.
    """
    violations = check_hypotheses(p, M, r, m)
    if violations:
        raise HypothesisError(violations)
    s = math.gcd(r, 24)
    v = r // s
    d = math.gcd(24 // s, p - M)
    step = 24 // (d * s)
    target = Residue(mod_inverse(m, step) * v, step)
    b_min = -(-(M * r + 1) // m)

    best = None
    rejected = []
    for mp in target.representatives(1, 24 // s):
        a0, b0 = s * (p - mp), s * (M * mp - 1)
        a = a0 % 24
        b = b_min + (b0 - b_min) % 24
        ja, jb = (a - a0) // 24, (b - b0) // 24
        if max(abs(ja), abs(jb)) > SHIFT_BOUND:
            rejected.append(f"m'={mp}: shift beyond {SHIFT_BOUND}")
            continue
        if (a + b) % 2:
            rejected.append(f"m'={mp}: a + b = {a + b} is odd")
            continue
        kappa2 = (a + b) * m + r * (1 - M)
        if kappa2 <= 0:
            rejected.append(f"m'={mp}: weight {Fraction(kappa2, 2)} is not positive")
            continue
        cand = CongruenceParams(p, M, r, m, s, v, d, mp, a, b, kappa2 // 2,
                                kappa2 // 2 - (a + b) // 2, (24 // d) ** 2 * p)
        if cand.congruence_residuals() != (0, 0):
            rejected.append(f"m'={mp}: (a, b) = ({a}, {b}) fails the GHN congruences "
                            f"(residuals {cand.congruence_residuals()})")
            continue
        if best is None or (a + b, a) < (best.a + best.b, best.a):
            best = cand
    if best is None:
        raise DerivationError(f"no valid (a, b) for (p, M, r, m) = ({p}, {M}, {r}, {m}): "
                              + "; ".join(rejected))

    warnings = []
    d_body = math.gcd(p - M, 24)
    if d_body != d:
        warnings.append(f"gcd(p - M, 24) = {d_body} differs from d = gcd(24/s, p - M) = {d}")
    if math.gcd(p * M - 1, 24 // s) != d:
        warnings.append(f"gcd(pM - 1, 24/s) = {math.gcd(p * M - 1, 24 // s)} differs from d = {d}")
    return CongruenceParams(**{**asdict(best), "warnings": tuple(warnings)})


def build_form(params: CongruenceParams) -> eq.EtaQuotient:
    """eta(p tau)^{am + r} eta(tau)^{bm - Mr}, checked to be a cusp form of weight kappa."""
    p, m = params.p, params.m
    top, bottom = params.a * m + params.r1, params.b * m - params.r2
    if top < 1 or bottom < 1:
        raise DerivationError(f"exponents am + r = {top} and bm - Mr = {bottom} must be >= 1")
    E = eq.EtaQuotient(p, {p: top, 1: bottom})
    ok, report = eq.is_cusp_form(E)
    if not ok:
        raise DerivationError(f"{E} is not a cusp form on Gamma_0({p}): ghn={eq.validate_ghn(E)}, "
                              f"orders={dict(report.entries)}")
    if eq.weight(E) != params.kappa:
        raise DerivationError(f"weight {eq.weight(E)} of {E} differs from kappa = {params.kappa}")
    return E


def lift_quotient(params: CongruenceParams) -> eq.EtaQuotient:
    """eta(p tau)^r / eta(tau)^{Mr} * eta(pm tau)^a * eta(m tau)^b on level pm."""
    p, m = params.p, params.m
    return eq.EtaQuotient(p * m, {p: params.r1, 1: -params.r2, p * m: params.a, m: params.b})


def _expand(E, precision, modulus, cache, denom):
    return cached(cache, ("eta", str(E), Fraction(precision), modulus, denom),
                  lambda: eq.expand(E, precision, modulus, denom))


def verify_lift(params: CongruenceParams, precision, cache: Optional[SeriesCache] = None,
                form: Optional[eq.EtaQuotient] = None) -> bool:
    """Whether the lifted product agrees with the cusp form mod m below ``precision``.

    Both sides are built from the same (a, b), so the identity holds for any
    a, b; ``form`` replaces the right-hand side (used by mutation tests).
    """
    m = params.m
    F = form if form is not None else eq.EtaQuotient(
        params.p, {params.p: params.a * m + params.r1, 1: params.b * m - params.r2})
    f = lift_quotient(params)
    denom = 1 if F.prefactor.denominator == 1 and f.prefactor.denominator == 1 else 24
    if F.prefactor != f.prefactor:
        return False
    return _expand(F, precision, m, cache, denom) == _expand(f, precision, m, cache, denom)


def compute_g(params: CongruenceParams, n_max: int, cache: Optional[SeriesCache] = None,
              form: Optional[eq.EtaQuotient] = None) -> qs.QSeries:
    """g = (F | T(m)) / (eta(p tau)^a eta(tau)^b) over Z/m, in grading 24.

    The result determines u(n) for 0 <= n <= n_max, where u(n) is the
    coefficient of q^{nd/24}.  ``form`` overrides F (used by mutation tests).
    """
    p, m, a, b, d = params.p, params.m, params.a, params.b, params.d
    F_quot = build_form(params) if form is None else form
    if F_quot.prefactor.denominator != 1:
        raise qs.GradingError(f"{F_quot} has non-integral leading exponent {F_quot.prefactor}")
    g_stop = n_max * d + 1
    shift24 = p * a + b
    h_terms = -(-(g_stop + shift24) // 24)
    F = _expand(F_quot, m * h_terms, m, cache, 1)
    ctx = qs.FormContext(int(eq.weight(F_quot)), F_quot.level,
                         lambda x: eq.character_at(F_quot, x))
    H = qs.hecke_t(F, m, ctx)
    denom_quot = eq.EtaQuotient(p, {p: a, 1: b})
    P = cached(cache, ("product", str(denom_quot), h_terms, m),
               lambda: eq.product_part(denom_quot, h_terms, m))
    quotient = H * qs.invert(P)
    g = qs.shift(qs.regrade(quotient, 24), -shift24)
    return qs.truncate(g, g_stop)


def u_series(g: qs.QSeries, params: CongruenceParams) -> qs.QSeries:
    """g(q^{24/d}) as an integer-graded series: coefficient n is u(n).

    Raises GradingError if g has a nonzero coefficient off the q^{d/24} lattice.
    """
    lattice = qs.regrade(g, 24 // params.d)
    return qs.QSeries(lattice.coeffs, lattice.offset, 1, lattice.modulus)


def off_lattice(g: qs.QSeries, d: int) -> list[int]:
    """Grading-24 indices where g is nonzero although d does not divide them."""
    return [i for i, _ in g.nonzero() if i % d]


@dataclass
class ExtractionReport:
    n_max: int
    checked: int
    off_lattice: list[int]
    mismatches: list[tuple[int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.off_lattice and not self.mismatches


def verify_extraction(params: CongruenceParams, n_max: int, cache: Optional[SeriesCache] = None,
                      g: Optional[qs.QSeries] = None) -> ExtractionReport:
    """Compare u(n) with c_{p,r,Mr}((d m n - r(p-M))/24) mod m for 0 <= n <= n_max.

    u(n) must vanish when the argument is not a nonnegative integer.
    """
    p, M, r, m, d = params.p, params.M, params.r, params.m, params.d
    if g is None:
        g = compute_g(params, n_max, cache)
    bad_support = off_lattice(g, d)
    shift = r * (p - M)
    top = (d * m * n_max - shift) // 24
    c = c_series(PartitionSpec(p, params.r1, params.r2), max(top, 0) + 1, m)
    mismatches = []
    for n in range(n_max + 1):
        u = g[n * d]
        num = d * m * n - shift
        expected = c[num // 24] if num >= 0 and num % 24 == 0 else 0
        if (u - expected) % m:
            mismatches.append((n, u, expected))
    return ExtractionReport(n_max, n_max + 1, bad_support, mismatches)


def sturm_bound(weight: int, level: int) -> int:
    """floor(k [SL2(Z) : Gamma_0(N)] / 12) + 1."""
    if weight < 1 or level < 1:
        raise ValueError(f"need weight, level >= 1, got {weight}, {level}")
    return weight * gamma0_index(level) // 12 + 1


@dataclass(frozen=True)
class SerreCertificate:
    params: CongruenceParams
    ell: int
    residue_check: bool
    check_depth: int
    sturm_bound: int

    @property
    def fully_certified(self) -> bool:
        return self.check_depth >= self.sturm_bound

    def to_json(self) -> dict:
        P = self.params
        return {
            "p": P.p, "M": P.M, "r": P.r, "m": P.m, "s": P.s, "d": P.d,
            "m_prime": P.m_prime, "a": P.a, "b": P.b, "kappa": P.kappa,
            "g_weight": P.g_weight, "g_level": P.g_level, "ell": self.ell,
            "check_depth": self.check_depth, "sturm_bound": self.sturm_bound,
            "fully_certified": self.fully_certified,
        }


@dataclass
class SearchReport:
    certificates: list[SerreCertificate]
    rejected: list[tuple[int, int]]
    over_budget: list[int]

    @property
    def budget_exceeded(self) -> bool:
        return bool(self.over_budget)


def search_serre_primes(params: CongruenceParams, ell_limit: int, check_depth: int,
                        budget: int = 2_000_000, cache: Optional[SeriesCache] = None,
                        workers: int = 1) -> SearchReport:
    """Test primes l == -1 (mod g_level * m), l <= ell_limit.

    A prime passes when u(l n) + chi(l) l^{w-1} u(n/l) == 0 (mod m) for every
    1 <= n <= check_depth, w being the weight of g.  ``budget`` caps the
    number of u-coefficients computed; primes needing more are reported in
    ``over_budget``.  Rejected primes come with the first failing n.
    """
    if check_depth < 1:
        raise ValueError(f"check_depth must be >= 1, got {check_depth}")
    m = params.m
    candidates = primes_in_progression(-1, params.ell_modulus, ell_limit)
    feasible = [ell for ell in candidates if ell * check_depth <= budget]
    over = [ell for ell in candidates if ell * check_depth > budget]
    if not feasible:
        return SearchReport([], [], over)
    F_quot = build_form(params)
    u = u_series(compute_g(params, max(feasible) * check_depth, cache), params)
    bound = sturm_bound(params.g_weight, params.g_level)

    def first_failure(ell: int) -> Optional[int]:
        c = eq.character_at(F_quot, ell) * pow(ell, params.g_weight - 1, m)
        for n in range(1, check_depth + 1):
            value = u[ell * n]
            if n % ell == 0:
                value += c * u[n // ell]
            if value % m:
                return n
        return None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            failures = list(pool.map(first_failure, feasible))
    else:
        failures = [first_failure(ell) for ell in feasible]
    certs, rejected = [], []
    for ell, fail in zip(feasible, failures):
        if fail is None:
            residue_ok = ell % params.ell_modulus == params.ell_modulus - 1
            certs.append(SerreCertificate(params, ell, residue_ok, check_depth, bound))
        else:
            rejected.append((ell, fail))
    return SearchReport(certs, rejected, over)


@dataclass
class FinalReport:
    ell: int
    n_max: int
    checked: list[int]
    violations: list[tuple[int, int, int]]
    skipped_gcd: list[int]
    skipped_nonintegral: int

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_final(params: CongruenceParams, ell: int, n_max: int,
                 cache: Optional[SeriesCache] = None) -> FinalReport:
    """Check c_{p,r,Mr}((d m n l - r(p-M))/24) == 0 (mod m) for 1 <= n <= n_max, gcd(n, l) = 1.

    n with a non-integral or negative argument are skipped and counted.
    Violations are (n, argument, value mod m).
    """
    if not is_prime(ell):
        raise ValueError(f"ell={ell} is not prime")
    if math.gcd(ell, params.ell_modulus) != 1:
        raise ValueError(f"ell={ell} is not coprime to {params.ell_modulus}")
    p, M, r, m, d = params.p, params.M, params.r, params.m, params.d
    shift = r * (p - M)
    checked, skipped_gcd, skipped_frac, args = [], [], 0, {}
    for n in range(1, n_max + 1):
        if n % ell == 0:
            skipped_gcd.append(n)
            continue
        num = d * m * n * ell - shift
        if num < 0 or num % 24:
            skipped_frac += 1
            continue
        args[n] = num // 24
    violations = []
    if args:
        top = max(args.values()) + 1
        spec = PartitionSpec(p, params.r1, params.r2)
        c = cached(cache, ("c_series", spec.k, spec.r1, spec.r2, top, m),
                   lambda: c_series(spec, top, m))
        for n, arg in args.items():
            checked.append(n)
            value = c[arg]
            if value % m:
                violations.append((n, arg, value))
    return FinalReport(ell, n_max, checked, violations, skipped_gcd, skipped_frac)
