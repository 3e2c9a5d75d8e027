"""Truncated q-series with rational exponent grading.

A :class:`QSeries` stores ``sum_j coeffs[j] * q**((offset + j) / denom)`` and
knows its coefficients for every exponent strictly below
``(offset + len(coeffs)) / denom``.  Coefficients live either in the integers
(``modulus=None``, arbitrary precision) or in Z/mZ (``modulus=m``).

Leading zeros are always stripped, so ``offset`` is the true valuation of the
stored part.  A series with no stored coefficients is ``O(q**precision)``.

Products use three kernels: a sparse kernel when one factor has few nonzero
terms (powers of the Euler product are built this way), ``numpy.convolve``
for short inputs, and Kronecker substitution through GMP integers otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional

import gmpy2
import numpy as np

__all__ = [
    "QSeries",
    "FormContext",
    "SeriesError",
    "RingMismatch",
    "GradingError",
    "PrecisionError",
    "NotInvertible",
    "mul",
    "add",
    "sub",
    "scale",
    "shift",
    "truncate",
    "reduce_mod",
    "invert",
    "power",
    "dilate",
    "u_op",
    "hecke_t",
    "regrade",
    "coeff_at",
    "euler_product",
    "dumps",
    "loads",
    "THRESHOLDS",
]

MAX_MODULUS = 2**31


class SeriesError(ValueError):
    pass


class RingMismatch(SeriesError):
    pass


class GradingError(SeriesError):
    pass


class PrecisionError(SeriesError):
    pass


class NotInvertible(SeriesError, ZeroDivisionError):
    pass


# Kernel selection; mutate to tune.  ``sparse_terms``: a factor with at most
# this many nonzero terms always takes the sparse kernel.  ``sparse_density``:
# it also does when nnz <= density * length.  ``schoolbook``: lengths up to
# this use numpy.convolve.
THRESHOLDS = {"sparse_terms": 64, "sparse_density": 1e-4, "schoolbook": 64}


def _dtype(modulus):
    return object if modulus is None else np.int64


def _coerce(values, modulus) -> np.ndarray:
    if modulus is None:
        arr = np.empty(len(values), dtype=object)
        arr[:] = [int(v) for v in values]
        return arr
    if isinstance(values, np.ndarray) and values.dtype == object:
        values = [int(v) % modulus for v in values]
    arr = np.asarray(values)
    if arr.dtype == object or arr.dtype.kind not in "iu":
        arr = np.array([int(v) % modulus for v in arr], dtype=np.int64)
    return np.mod(arr, modulus).astype(np.int64, copy=False)


class QSeries:
    """Immutable truncated series; see the module docstring for semantics."""

    __slots__ = ("coeffs", "offset", "denom", "modulus")

    def __init__(self, coeffs: Iterable[int], offset: int = 0, denom: int = 1,
                 modulus: Optional[int] = None):
        if denom < 1:
            raise GradingError(f"denom must be positive, got {denom}")
        if modulus is not None and not 1 < modulus < MAX_MODULUS:
            raise SeriesError(f"modulus must be in (1, 2**31), got {modulus}")
        if not isinstance(coeffs, np.ndarray):
            coeffs = list(coeffs)
        arr = _coerce(coeffs, modulus)
        nz = np.flatnonzero(arr)
        if len(nz) == 0:
            offset += len(arr)
            arr = arr[:0]
        elif nz[0]:
            offset += int(nz[0])
            arr = arr[int(nz[0]):]
        arr = arr.copy()
        arr.flags.writeable = False
        self.coeffs = arr
        self.offset = int(offset)
        self.denom = int(denom)
        self.modulus = modulus

    # ------------------------------------------------------------------ basics
    @classmethod
    def from_list(cls, values, offset=0, denom=1, modulus=None, precision=None):
        """Series with the given leading coefficients.

        ``precision`` is a grading index; by default the series is known
        exactly up to the last listed coefficient.
        """
        values = list(values)
        if precision is not None:
            need = precision - offset
            if need < len(values):
                values = values[:max(need, 0)]
            else:
                values += [0] * (need - len(values))
        return cls(values, offset, denom, modulus)

    @classmethod
    def one(cls, length, denom=1, modulus=None):
        return cls([1] + [0] * (length - 1), 0, denom, modulus) if length > 0 \
            else cls([], 0, denom, modulus)

    @classmethod
    def zero(cls, prec_index, denom=1, modulus=None):
        return cls([], prec_index, denom, modulus)

    @property
    def prec_index(self) -> int:
        """Exclusive bound on known grading indices."""
        return self.offset + len(self.coeffs)

    @property
    def precision(self) -> Fraction:
        return Fraction(self.prec_index, self.denom)

    @property
    def valuation(self) -> Optional[Fraction]:
        """Lowest exponent with nonzero coefficient, None if all known ones vanish."""
        return Fraction(self.offset, self.denom) if len(self.coeffs) else None

    @property
    def ring(self) -> str:
        return "int" if self.modulus is None else f"mod:{self.modulus}"

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, index: int):
        """Coefficient at grading index ``index`` (exponent index/denom)."""
        if index >= self.prec_index:
            raise PrecisionError(f"index {index} is at or beyond precision {self.prec_index}")
        if index < self.offset:
            return 0
        return int(self.coeffs[index - self.offset])

    def coefficients(self, start: int, stop: int) -> np.ndarray:
        """Dense coefficient array for grading indices start <= i < stop."""
        if stop > self.prec_index:
            raise PrecisionError(f"index {stop - 1} is at or beyond precision {self.prec_index}")
        out = np.zeros(max(stop - start, 0), dtype=_dtype(self.modulus))
        lo, hi = max(start, self.offset), stop
        if hi > lo:
            out[lo - start:hi - start] = self.coeffs[lo - self.offset:hi - self.offset]
        return out

    def to_list(self, start: int = 0, stop: Optional[int] = None) -> list[int]:
        stop = self.prec_index if stop is None else stop
        return [int(c) for c in self.coefficients(start, stop)]

    def nonzero(self) -> list[tuple[int, int]]:
        """(grading index, coefficient) pairs of the stored nonzero terms."""
        return [(self.offset + int(i), int(self.coeffs[i])) for i in np.flatnonzero(self.coeffs)]

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.modulus == other.modulus and self.denom == other.denom
                and self.offset == other.offset
                and len(self.coeffs) == len(other.coeffs)
                and bool(np.all(self.coeffs == other.coeffs)))

    def __hash__(self):
        return hash((self.modulus, self.denom, self.offset, tuple(self.coeffs[:16].tolist())))

    def __repr__(self):
        terms = []
        for i, c in self.nonzero()[:6]:
            e = Fraction(i, self.denom)
            terms.append(f"{c}*q^{e}" if e != 0 else f"{c}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.precision}), ring={self.ring})"

    # ------------------------------------------------------------- operators
    def __add__(self, other):
        return add(self, other) if isinstance(other, QSeries) else NotImplemented

    def __sub__(self, other):
        return sub(self, other) if isinstance(other, QSeries) else NotImplemented

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        if isinstance(other, (int, np.integer)):
            return scale(self, int(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return scale(self, int(other))
        return NotImplemented

    def __pow__(self, e):
        return power(self, e)


@dataclass(frozen=True)
class FormContext:
    """Weight, level and Nebentypus needed by the Hecke operator."""

    weight: Optional[int]
    level: int
    character: Optional[Callable[[int], int]] = None

    def chi(self, d: int) -> int:
        if self.character is None:
            return 1 if math.gcd(d, self.level) == 1 else 0
        return self.character(d)


# ---------------------------------------------------------------- helpers
def _check_compatible(f: QSeries, g: QSeries):
    if f.modulus != g.modulus:
        raise RingMismatch(f"ring mismatch: {f.ring} vs {g.ring}")
    if f.denom != g.denom:
        raise GradingError(f"grading mismatch: denom {f.denom} vs {g.denom}; regrade first")


def _reduce(arr, modulus):
    return arr if modulus is None else np.mod(arr, modulus)


def _kron_small_mod(a: np.ndarray, b: np.ndarray, n: int, wb: int) -> np.ndarray:
    """Low n coefficients of a*b via packing into wb-byte slots (wb <= 8)."""
    def pack(x):
        x = np.ascontiguousarray(x, dtype="<u8")
        return gmpy2.mpz.from_bytes(x.view(np.uint8).reshape(-1, 8)[:, :wb].tobytes(), "little")

    prod = gmpy2.f_mod_2exp(pack(a) * pack(b), 8 * wb * n)
    raw = np.frombuffer(prod.to_bytes(wb * n, "little"), dtype=np.uint8).reshape(n, wb)
    if wb == 8:
        return raw.copy().view("<u8").reshape(n).astype(np.int64)
    wide = np.zeros((n, 8), dtype=np.uint8)
    wide[:, :wb] = raw
    return wide.view("<u8").reshape(n).astype(np.int64)


def _kron_signed(a: list, b: list, n: int) -> list:
    """Low n coefficients of a*b for arbitrary signed integers."""
    amax = max((abs(x) for x in a), default=0)
    bmax = max((abs(x) for x in b), default=0)
    if amax == 0 or bmax == 0:
        return [0] * n
    bound = amax * bmax * min(len(a), len(b))
    wb = (bound.bit_length() + 2 + 7) // 8
    w = 8 * wb

    def pack(seq):
        pos = b"".join((x if x > 0 else 0).to_bytes(wb, "little") for x in seq)
        neg = b"".join((-x if x < 0 else 0).to_bytes(wb, "little") for x in seq)
        return gmpy2.mpz.from_bytes(pos, "little") - gmpy2.mpz.from_bytes(neg, "little")

    half = 1 << (w - 1)
    bias = gmpy2.mpz.from_bytes(half.to_bytes(wb, "little") * n, "little")
    # every slot of prod lies in (-half, half); the bias makes all slots
    # nonnegative so they can be read off without borrows
    low = gmpy2.f_mod_2exp(pack(a) * pack(b) + bias, w * n)
    raw = low.to_bytes(wb * n, "little")
    return [int.from_bytes(raw[i * wb:(i + 1) * wb], "little") - half for i in range(n)]


def _sparse_conv(sparse: np.ndarray, dense: np.ndarray, n: int, modulus) -> np.ndarray:
    out = np.zeros(n, dtype=_dtype(modulus))
    if modulus is None:
        for i in np.flatnonzero(sparse[:n]):
            k = min(len(dense), n - i)
            out[i:i + k] += sparse[i] * dense[:k]
        return out
    limit = max(1, (2**62) // max((modulus - 1) ** 2, 1))
    pending = 0
    for i in np.flatnonzero(sparse[:n]):
        k = min(len(dense), n - i)
        out[i:i + k] += int(sparse[i]) * dense[:k]
        pending += 1
        if pending >= limit:
            np.mod(out, modulus, out=out)
            pending = 0
    return np.mod(out, modulus, out=out)


def _convolve(a: np.ndarray, b: np.ndarray, n: int, modulus) -> np.ndarray:
    """First n coefficients of the product of coefficient arrays a and b."""
    a, b = a[:n], b[:n]
    if n <= 0 or len(a) == 0 or len(b) == 0:
        return np.zeros(max(n, 0), dtype=_dtype(modulus))
    nza, nzb = np.count_nonzero(a), np.count_nonzero(b)
    small = min(nza, nzb)
    if small <= THRESHOLDS["sparse_terms"] or small <= THRESHOLDS["sparse_density"] * n:
        return _sparse_conv(a, b, n, modulus) if nza <= nzb else _sparse_conv(b, a, n, modulus)

    if modulus is not None:
        bound = min(len(a), len(b)) * (modulus - 1) ** 2
        if n <= THRESHOLDS["schoolbook"] and bound < 2**62:
            out = np.convolve(a, b)[:n]
        else:
            wb = max(1, (bound.bit_length() + 7) // 8)
            if wb <= 8:
                out = _kron_small_mod(a, b, n, wb)
            else:
                wide = _kron_signed(a.tolist(), b.tolist(), n)
                out = np.array([x % modulus for x in wide], dtype=np.int64)
        out = np.mod(out, modulus)
    elif n <= THRESHOLDS["schoolbook"]:
        out = np.convolve(a, b)[:n]
    else:
        out = np.empty(n, dtype=object)
        out[:] = _kron_signed(a.tolist(), b.tolist(), n)
    if len(out) < n:
        pad = np.zeros(n - len(out), dtype=_dtype(modulus))
        out = np.concatenate([out, pad])
    return out


def _unit_inverse(c: int, modulus) -> int:
    c = int(c)
    if modulus is None:
        if c not in (1, -1):
            raise NotInvertible(f"leading coefficient {c} is not a unit in Z")
        return c
    if math.gcd(c, modulus) != 1:
        raise NotInvertible(f"leading coefficient {c} is not a unit mod {modulus}")
    return pow(c, -1, modulus)


def _inverse_array(h: np.ndarray, n: int, modulus) -> np.ndarray:
    """First n coefficients of 1/h for h with unit constant term (Newton iteration)."""
    g = np.zeros(1, dtype=_dtype(modulus))
    g[0] = _unit_inverse(h[0], modulus)
    k = 1
    while k < n:
        k2 = min(2 * k, n)
        e = _convolve(h[:k2], g, k2, modulus)
        t = _reduce(-e[k:k2], modulus)
        corr = _convolve(g[:k2 - k], t, k2 - k, modulus)
        g = np.concatenate([g, _reduce(corr, modulus)])
        k = k2
    return g[:n]


# ----------------------------------------------------------- arithmetic
def add(f: QSeries, g: QSeries) -> QSeries:
    _check_compatible(f, g)
    lo = min(f.offset, g.offset)
    hi = min(f.prec_index, g.prec_index)
    if hi <= lo:
        return QSeries.zero(hi, f.denom, f.modulus)
    out = f.coefficients(lo, hi) + g.coefficients(lo, hi)
    return QSeries(_reduce(out, f.modulus), lo, f.denom, f.modulus)


def sub(f: QSeries, g: QSeries) -> QSeries:
    return add(f, scale(g, -1))


def scale(f: QSeries, c: int) -> QSeries:
    c = int(c)
    if f.modulus is not None:
        c %= f.modulus
    return QSeries(_reduce(f.coeffs * c, f.modulus), f.offset, f.denom, f.modulus)


def shift(f: QSeries, k: int) -> QSeries:
    """Multiply by q^(k/denom)."""
    return QSeries(f.coeffs, f.offset + k, f.denom, f.modulus)


def truncate(f: QSeries, prec_index: int) -> QSeries:
    """Forget coefficients at grading indices >= prec_index."""
    if prec_index >= f.prec_index:
        return f
    if prec_index <= f.offset:
        return QSeries.zero(prec_index, f.denom, f.modulus)
    return QSeries(f.coeffs[:prec_index - f.offset], f.offset, f.denom, f.modulus)


def reduce_mod(f: QSeries, m: int) -> QSeries:
    """Image of an integer series in Z/mZ."""
    if f.modulus is not None:
        if f.modulus % m:
            raise RingMismatch(f"cannot reduce {f.ring} modulo {m}")
        if f.modulus == m:
            return f
    return QSeries([int(c) % m for c in f.coeffs], f.offset, f.denom, m)


def mul(f: QSeries, g: QSeries) -> QSeries:
    """Truncated Cauchy product.

    The result is known up to ``min(prec_f + val_g, prec_g + val_f)``,
    which in grading units is a length of ``min(len(f), len(g))``.
    """
    _check_compatible(f, g)
    n = min(len(f.coeffs), len(g.coeffs))
    out = _convolve(f.coeffs, g.coeffs, n, f.modulus)
    return QSeries(out, f.offset + g.offset, f.denom, f.modulus)


def invert(f: QSeries) -> QSeries:
    """Multiplicative inverse; the leading coefficient must be a unit."""
    if len(f.coeffs) == 0:
        raise NotInvertible("series has no known nonzero coefficient")
    out = _inverse_array(f.coeffs, len(f.coeffs), f.modulus)
    return QSeries(out, -f.offset, f.denom, f.modulus)


def power(f: QSeries, e: int) -> QSeries:
    """f**e by left-to-right binary powering.

    Each multiply step uses the original factor, so powers of a sparse
    series (the Euler product) go through the sparse kernel.
    """
    e = int(e)
    if e < 0:
        f, e = invert(f), -e
    if e == 0:
        return QSeries.one(len(f.coeffs), f.denom, f.modulus)
    result = f
    for bit in bin(e)[3:]:
        result = mul(result, result)
        if bit == "1":
            result = mul(result, f)
    return result


def dilate(f: QSeries, t: int) -> QSeries:
    """The series f(q^t)."""
    if t < 1:
        raise ValueError(f"dilation factor must be positive, got {t}")
    if t == 1:
        return f
    out = np.zeros(t * len(f.coeffs), dtype=_dtype(f.modulus))
    out[::t] = f.coeffs
    return QSeries(out, t * f.offset, f.denom, f.modulus)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def u_op(f: QSeries, p: int) -> QSeries:
    """U(p): sum a(n) q^n  ->  sum a(p n) q^n."""
    if f.denom != 1:
        raise GradingError("U(p) needs integer exponents; regrade to denom 1 first")
    if p < 1:
        raise ValueError(f"U(p) needs p >= 1, got {p}")
    lo = _ceil_div(f.offset, p)
    hi = _ceil_div(f.prec_index, p)
    if hi <= lo:
        return QSeries.zero(hi, 1, f.modulus)
    return QSeries(f.coeffs[p * lo - f.offset::p], lo, 1, f.modulus)


def hecke_t(f: QSeries, p: int, ctx: FormContext) -> QSeries:
    """T(p) on q-expansions: coefficient a(pn) + chi(p) p^(k-1) a(n/p)."""
    if f.denom != 1:
        raise GradingError("T(p) needs integer exponents; regrade to denom 1 first")
    if ctx.weight is None:
        raise ValueError("T(p) needs the weight in its FormContext")
    if ctx.weight < 1:
        raise ValueError(f"T(p) is implemented for weight >= 1, got {ctx.weight}")
    chi = ctx.chi(p)
    if f.modulus is None:
        c = chi * p ** (ctx.weight - 1)
    else:
        c = chi * pow(p, ctx.weight - 1, f.modulus)
    up = u_op(f, p)
    if c == 0 or (f.modulus is not None and c % f.modulus == 0):
        return up
    return truncate(add(up, scale(dilate(f, p), c)), up.prec_index)


def regrade(f: QSeries, new_denom: int) -> QSeries:
    """Re-express the exponents of f over ``new_denom``."""
    if new_denom < 1:
        raise GradingError(f"denom must be positive, got {new_denom}")
    if new_denom == f.denom:
        return f
    D = f.denom
    prec = _ceil_div(f.prec_index * new_denom, D)
    if len(f.coeffs) == 0:
        return QSeries.zero(prec, new_denom, f.modulus)
    idx = np.flatnonzero(f.coeffs) + f.offset
    scaled = idx * new_denom
    if np.any(scaled % D):
        bad = int(idx[np.flatnonzero(scaled % D)[0]])
        raise GradingError(f"exponent {Fraction(bad, D)} is not representable over denom {new_denom}")
    new_idx = scaled // D
    lo = int(new_idx[0])
    out = np.zeros(prec - lo, dtype=_dtype(f.modulus))
    out[new_idx - lo] = f.coeffs[idx - f.offset]
    return QSeries(out, lo, new_denom, f.modulus)


def coeff_at(f: QSeries, exponent) -> int:
    """Coefficient of q^exponent; 0 when the exponent is not on the grading."""
    x = Fraction(exponent) * f.denom
    if x >= f.prec_index:
        raise PrecisionError(f"exponent {Fraction(exponent)} is at or beyond precision {f.precision}")
    if x.denominator != 1:
        return 0
    return f[int(x)]


@lru_cache(maxsize=16)
def euler_product(n_terms: int, modulus: Optional[int] = None) -> QSeries:
    """prod_{n>=1} (1 - q^n) to n_terms coefficients, from the pentagonal numbers."""
    out = np.zeros(n_terms, dtype=_dtype(modulus))
    k = 0
    while True:
        sign = -1 if k % 2 else 1
        e1 = k * (3 * k - 1) // 2
        if e1 >= n_terms:
            break
        out[e1] = sign
        e2 = k * (3 * k + 1) // 2
        if k and e2 < n_terms:
            out[e2] = sign
        k += 1
    return QSeries(_reduce(out, modulus), 0, 1, modulus)


# -------------------------------------------------------------- file format
def dumps(f: QSeries) -> str:
    """Serialise to the QS1 text format (header line + one coefficient per line)."""
    header = f"QS1 denom={f.denom} offset={f.offset} len={len(f.coeffs)} ring={f.ring}"
    body = "".join(f"{c}\n" for c in f.coeffs.tolist())
    return header + "\n" + body


def loads(text: str) -> QSeries:
    lines = text.split("\n")
    head = lines[0].split()
    if not head or head[0] != "QS1":
        raise ValueError("not a QS1 series file")
    fields = dict(item.split("=", 1) for item in head[1:])
    try:
        denom, offset, length = int(fields["denom"]), int(fields["offset"]), int(fields["len"])
        ring = fields["ring"]
    except KeyError as exc:
        raise ValueError(f"QS1 header is missing {exc}") from None
    if ring == "int":
        modulus = None
    elif ring.startswith("mod:"):
        modulus = int(ring[4:])
    else:
        raise ValueError(f"unknown ring {ring!r}")
    body = lines[1:1 + length]
    if len(body) != length or any(not line for line in body):
        raise ValueError(f"QS1 body has fewer than {length} coefficients")
    if modulus is None:
        values = [int(x) for x in body]
    else:
        values = np.array(body, dtype=np.int64)
    return QSeries(values, offset, denom, modulus)
