"""Dirichlet coefficients of elliptic-curve L-series and truncated evaluation.

Frobenius traces come from finite-field point counts: a naive O(p^2)
enumeration (kept as the reference path) and an O(p) quadratic-character
count for odd p.  Coefficients extend to all n <= M through the Hecke
recursion at prime powers plus multiplicativity.  The truncated series
is evaluated as sum a_n * exp(-s * ln n) in complex float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, NumericError

GOOD = "good"
SPLIT = "split"
NONSPLIT = "nonsplit"
ADDITIVE = "additive"

_BAD_KINDS = {1: SPLIT, -1: NONSPLIT, 0: ADDITIVE}


@dataclass(frozen=True)
class ReductionInfo:
    p: int
    a_p: int
    kind: str


@dataclass(frozen=True)
class AnTable:
    label: str
    conductor: int
    m: int
    coefficients: tuple[int, ...]  # coefficients[i] is a_{i+1}

    def __post_init__(self):
        if self.m < 1 or len(self.coefficients) != self.m:
            raise ValueError("coefficient table length must equal m >= 1")
        if self.coefficients[0] != 1:
            raise ValueError("a_1 must be 1")


def count_points(a: tuple[int, int, int, int, int], p: int) -> tuple[int, list[tuple[int, int]]]:
    """Naive affine point count over F_p.

    Returns (number of smooth affine points, list of singular points).
    A point is singular when it lies on the curve and both partial
    derivatives of y^2 + a1*x*y + a3*y - x^3 - a2*x^2 - a4*x - a6 vanish.
    """
    a1, a2, a3, a4, a6 = (ai % p for ai in a)
    smooth = 0
    singular: list[tuple[int, int]] = []
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        dx = (-(3 * x * x + 2 * a2 * x + a4)) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p:
                continue
            fy = (2 * y + a1 * x + a3) % p
            fx = (a1 * y + dx) % p
            if fx == 0 and fy == 0:
                singular.append((x, y))
            else:
                smooth += 1
    return smooth, singular


def count_points_fast(a: tuple[int, int, int, int, int], p: int) -> tuple[int, list[tuple[int, int]]]:
    """Quadratic-character point count for odd p, O(p).

    Completing the square gives (2y + a1*x + a3)^2 = 4x^3 + b2*x^2 + 2*b4*x + b6,
    so each x contributes 1 + chi(g(x)) points, with singular candidates
    only at roots of g.
    """
    if p == 2:
        return count_points(a, p)
    a1, a2, a3, a4, a6 = (ai % p for ai in a)
    b2 = (a1 * a1 + 4 * a2) % p
    b4 = (2 * a4 + a1 * a3) % p
    b6 = (a3 * a3 + 4 * a6) % p

    x = np.arange(p, dtype=np.int64)
    g = (4 * pow_mod(x, 3, p) + b2 * pow_mod(x, 2, p) + 2 * b4 * x + b6) % p
    qr = np.zeros(p, dtype=bool)
    qr[(x * x) % p] = True

    nonzero = g != 0
    total = int(p + np.count_nonzero(qr[g] & nonzero) - np.count_nonzero(~qr[g] & nonzero))

    singular: list[tuple[int, int]] = []
    inv2 = pow(2, -1, p)
    for x0 in np.flatnonzero(g == 0).tolist():
        y0 = (-(a1 * x0 + a3) * inv2) % p
        fx = (a1 * y0 - (3 * x0 * x0 + 2 * a2 * x0 + a4)) % p
        if fx == 0:
            singular.append((x0, y0))
    return total - len(singular), singular


def pow_mod(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = x % p
    for _ in range(e - 1):
        out = (out * x) % p
    return out


def trace_of_frobenius(a: tuple[int, int, int, int, int], p: int, conductor: int) -> ReductionInfo:
    """Frobenius trace a_p with the reduction kind at p.

    Good p: a_p = p - #smooth affine points, checked against the Hasse
    bound.  Bad p (p | conductor): a_p = p - (#smooth affine + 1) and
    must land in {1, -1, 0} (split / nonsplit / additive).
    """
    smooth, singular = count_points_fast(a, p)
    if conductor % p:
        if singular:
            raise ConsistencyError(
                f"p={p} does not divide the conductor but the reduction is singular; "
                "model is not minimal or the conductor is wrong"
            )
        a_p = p - smooth
        if a_p * a_p > 4 * p:
            raise ConsistencyError(f"a_{p} = {a_p} violates the Hasse bound")
        return ReductionInfo(p, a_p, GOOD)
    a_p = p - (smooth + 1)
    kind = _BAD_KINDS.get(a_p)
    if kind is None:
        raise ConsistencyError(
            f"bad prime p={p} gave a_p = {a_p}, expected one of 1, -1, 0; "
            "model is not minimal or the conductor is wrong"
        )
    return ReductionInfo(p, a_p, kind)


def _primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n ** 0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).tolist()


def build_an_table(
    a: tuple[int, int, int, int, int], conductor: int, m: int, label: str = ""
) -> AnTable:
    """Coefficients a_1 .. a_m: traces at primes, Hecke recursion at prime
    powers (the p*a_{p^{k-1}} term dropped at bad primes), multiplicative
    across coprime factors."""
    if m < 1:
        raise ValueError("m must be >= 1")
    coeffs = [0] * (m + 1)
    coeffs[1] = 1
    spf = list(range(m + 1))  # smallest prime factor
    for p in _primes_up_to(m):
        for multiple in range(p, m + 1, p):
            if spf[multiple] == multiple and multiple != p:
                spf[multiple] = p
        ap = trace_of_frobenius(a, p, conductor).a_p
        good = conductor % p != 0
        prev, cur = 1, ap  # a_{p^0}, a_{p^1}
        q = p
        while q <= m:
            coeffs[q] = cur
            prev, cur = cur, ap * cur - (p * prev if good else 0)
            q *= p
    for n in range(2, m + 1):
        p = spf[n]
        q = p
        rest = n // p
        while rest % p == 0:
            q *= p
            rest //= p
        if rest > 1:
            coeffs[n] = coeffs[q] * coeffs[rest]
    return AnTable(label, conductor, m, tuple(coeffs[1:]))


def sigma0_sqrt_bound(n: int) -> float:
    """sigma_0(n) * sqrt(n), the coefficient size bound."""
    divisors = sum(1 for d in range(1, n + 1) if n % d == 0)
    return divisors * math.sqrt(n)


_EVAL_CACHE: dict[int, np.ndarray] = {}


def log_n_vector(m: int) -> np.ndarray:
    """ln 1 .. ln m as float64, cached (shared by evaluation and maps)."""
    vec = _EVAL_CACHE.get(m)
    if vec is None:
        vec = np.log(np.arange(1, m + 1, dtype=np.float64))
        vec.setflags(write=False)
        _EVAL_CACHE[m] = vec
    return vec


def eval_truncated_l_many(table: AnTable, s: np.ndarray) -> np.ndarray:
    """Vector evaluation of sum_{n<=m} a_n exp(-s ln n); non-finite results
    mean the point escaped, they are passed through untouched."""
    ln_n = log_n_vector(table.m)
    coeffs = np.asarray(table.coefficients, dtype=np.float64)
    s = np.asarray(s, dtype=np.complex128)
    out = np.empty(s.shape, dtype=np.complex128)
    flat = s.ravel()
    res = out.ravel()
    chunk = 2048  # fixed block size keeps memory flat and results thread-independent
    with np.errstate(all="ignore"):
        for start in range(0, flat.size, chunk):
            block = flat[start : start + chunk]
            terms = np.exp(np.multiply.outer(-block, ln_n))
            terms *= coeffs
            res[start : start + chunk] = terms.sum(axis=1)
    return out


def eval_truncated_l(table: AnTable, s: complex) -> complex:
    return complex(eval_truncated_l_many(table, np.array([s]))[0])


def l_at_one(table: AnTable) -> float:
    """Truncated L(1).  The imaginary part must vanish to 1e-12."""
    value = eval_truncated_l(table, 1.0 + 0.0j)
    if not (abs(value.imag) <= 1e-12):
        raise NumericError(f"L(1) of a real coefficient table came out complex: {value!r}")
    return value.real


def smoothed_l_at_one(table: AnTable, conductor: int | None = None) -> float:
    """Exponentially smoothed estimator sum 2 a_n / n * exp(-2 pi n / sqrt(N))."""
    n_cond = table.conductor if conductor is None else conductor
    if n_cond < 1:
        raise ValueError("conductor must be positive")
    n = np.arange(1, table.m + 1, dtype=np.float64)
    coeffs = np.asarray(table.coefficients, dtype=np.float64)
    weights = np.exp(-2.0 * math.pi * n / math.sqrt(n_cond))
    return float(np.sum(2.0 * coeffs / n * weights))
