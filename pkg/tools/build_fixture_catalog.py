#!/usr/bin/env python3
"""Builds data/fixture_allcurves.txt, the test catalog shipped with the repo.

The file follows the Cremona "allcurves" layout (conductor, class code,
index, a-invariants, rank, torsion) but is generated locally, so class
letters are assigned by this script and only the hand-curated famous
curves carry their standard labels.  Every generated entry is a genuine
elliptic curve over Q whose listed data is provably correct:

* Models are enumerated with small coefficients and kept only when every
  prime dividing the discriminant is coprime to c4.  By the Kraus
  minimality criterion (v_p(c4) = 0 < 4) such a model is globally
  minimal with multiplicative reduction at every bad prime, hence
  semi-stable with conductor exactly rad(|disc|).  No Tate algorithm
  is needed.
* Curves sharing a conductor are grouped into isogeny classes by
  comparing Frobenius traces up to the Sturm bound ceil(mu(N)/6) + 1
  (Faltings + Sturm make the comparison rigorous in both directions);
  one curve represents each generated class.
* Torsion is computed exactly: gcd of #E(F_p) over good odd primes as
  an upper bound, then rational division-polynomial roots count each
  l-primary part (Mazur's theorem caps the ladder at 8/9/5/7).
* Rank is the certified analytic rank.  For semi-stable curves the root
  number is w = -(-1)^{#split bad primes}.  w = -1 with N <= 1000 means
  rank 1 (Gross-Zagier-Kolyvagin; the least rank-3 conductor is 5077).
  For w = +1 the rapidly convergent series L(1) = 2 sum a_n/n e^(-2 pi
  n/sqrt(N)) is exact up to a negligible tail: L(1) > 1e-3 means rank 0
  (Kolyvagin), L(1) ~ 0 means analytic rank >= 2 and the candidate is
  excluded rather than guessed.  The single hand-curated exception is
  389a1, whose rank 2 is a classical result; the script still verifies
  that its root number is even and its L(1) vanishes.

Usage: python3 tools/build_fixture_catalog.py [output-path]
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from pathlib import Path

from sympy import Poly, Symbol

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from lflow.catalog import (
    CurveRecord,
    b_invariants,
    c_invariants,
    class_code_to_int,
    discriminant,
    int_to_class_code,
    serialize_catalog,
    split_label,
)
from lflow.lseries import build_an_table, trace_of_frobenius

X = Symbol("x")

# label -> (conductor, a-invariants, rank, torsion); ranks/torsions are
# classical table values, re-verified below wherever our certificates reach.
HAND_CURVES = {
    "11a1": (11, (0, -1, 1, -10, -20), 0, 5),
    "11a2": (11, (0, -1, 1, -7820, -263580), 0, 1),
    "11a3": (11, (0, -1, 1, 0, 0), 0, 5),
    "14a1": (14, (1, 0, 1, 4, -6), 0, 6),
    "15a1": (15, (1, 1, 1, -10, -10), 0, 8),
    "17a1": (17, (1, -1, 1, -1, -14), 0, 4),
    "19a1": (19, (0, 1, 1, -9, -15), 0, 3),
    "20a1": (20, (0, 1, 0, 4, 4), 0, 6),       # additive at 2, N from the tables
    "21a1": (21, (1, 0, 0, -4, -1), 0, 8),
    "27a1": (27, (0, 0, 1, 0, -7), 0, 3),      # additive at 3, N from the tables
    "37a1": (37, (0, 0, 1, -1, 0), 1, 1),
    "389a1": (389, (0, 1, 1, -2, 0), 2, 1),    # rank 2 is classical, not re-derived here
}

A4_RANGE = range(-12, 13)
A6_RANGE = range(-16, 17)
CONDUCTOR_LO, CONDUCTOR_HI = 11, 1000
BAD_PRIME = 3
MAX_OFF_RESIDUE = 60  # cap on kept classes with conductor not divisible by 3
SMOOTH_M = 600


def primes_up_to(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\0\0"
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = b"\0" * len(range(q * q, n + 1, q))
    return [i for i in range(n + 1) if sieve[i]]


SMALL_PRIMES = primes_up_to(CONDUCTOR_HI)


def small_radical(n: int) -> tuple[int, list[int]] | None:
    """(rad, prime list) if every prime factor is <= CONDUCTOR_HI, else None."""
    n = abs(n)
    primes = []
    for p in SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
    if n > 1:
        if n > CONDUCTOR_HI:
            return None
        primes.append(n)
    rad = 1
    for p in primes:
        rad *= p
    return rad, primes


def factor_trial(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def sturm_bound(conductor: int) -> int:
    mu = Fraction(conductor)
    for p in factor_trial(conductor):
        mu *= Fraction(p + 1, p)
    return int(math.ceil(mu / 6)) + 1


# --- exact torsion via division polynomials --------------------------------


class DivisionPolys:
    """g_n with psi_n = g_n (n odd) or psi_2 * g_n (n even), psi_2^2 = F."""

    def __init__(self, a):
        b2, b4, b6, b8 = b_invariants(a)
        self.F = Poly(4 * X**3 + b2 * X**2 + 2 * b4 * X + b6, X)
        self.g = {
            0: Poly(0, X),
            1: Poly(1, X),
            2: Poly(1, X),
            3: Poly(3 * X**4 + b2 * X**3 + 3 * b4 * X**2 + 3 * b6 * X + b8, X),
            4: Poly(
                2 * X**6 + b2 * X**5 + 5 * b4 * X**4 + 10 * b6 * X**3 + 10 * b8 * X**2
                + (b2 * b8 - b4 * b6) * X + (b4 * b8 - b6 * b6),
                X,
            ),
        }

    def __getitem__(self, n: int) -> Poly:
        if n not in self.g:
            if n % 2:
                m = (n - 1) // 2
                t1 = self[m + 2] * self[m] ** 3
                t2 = self[m - 1] * self[m + 1] ** 3
                self.g[n] = self.F**2 * t1 - t2 if m % 2 == 0 else t1 - self.F**2 * t2
            else:
                m = n // 2
                self.g[n] = self[m] * (self[m + 2] * self[m - 1] ** 2 - self[m - 2] * self[m + 1] ** 2)
        return self.g[n]


def rational_roots(poly: Poly) -> set[Fraction]:
    if poly.degree() <= 0:
        return set()
    roots = set()
    for factor, _mult in poly.factor_list()[1]:
        if factor.degree() == 1:
            c1, c0 = factor.all_coeffs()
            roots.add(Fraction(-c0, c1))
    return roots


def _is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    return rn * rn == q.numerator and rd * rd == q.denominator


def _points_killed_by(a, n: int, polys: DivisionPolys) -> int:
    """#{P in E(Q) : nP = O}, identity included."""
    b2, b4, b6, _ = b_invariants(a)

    def F_at(x: Fraction) -> Fraction:
        return 4 * x**3 + b2 * x**2 + 2 * b4 * x + b6

    xs = rational_roots(polys[n])
    if n % 2 == 0:
        xs |= rational_roots(polys.F)
    total = 1
    for x0 in xs:
        d = F_at(x0)
        if d == 0:
            total += 1
        elif _is_square(d):
            total += 2
    return total


def exact_torsion(a, conductor: int, trace) -> int:
    """Order of the rational torsion subgroup, exactly."""
    disc = discriminant(a)
    bound = 0
    used = 0
    for p in SMALL_PRIMES:
        if p == 2 or disc % p == 0:
            continue
        bound = math.gcd(bound, p + 1 - trace(p))
        used += 1
        if used >= 18:
            break
    if bound == 1:
        return 1
    polys = DivisionPolys(a)
    order = 1
    for ell, cap in ((2, 8), (3, 9), (5, 5), (7, 7)):
        if bound % ell:
            continue
        primary = 1
        n = ell
        while n <= cap:
            count = _points_killed_by(a, n, polys)
            if count == primary:
                break
            primary = count
            n *= ell
        order *= primary
    if order > 16:
        raise AssertionError(f"torsion {order} exceeds Mazur's bound for {a}")
    return order


# --- certified analytic rank ------------------------------------------------


def smoothed_l1(a, conductor: int) -> float:
    table = build_an_table(a, conductor, SMOOTH_M)
    c = -2.0 * math.pi / math.sqrt(conductor)
    return sum(2.0 * an / n * math.exp(c * n) for n, an in enumerate(table.coefficients, 1))


def certified_rank(a, conductor: int, bad_primes, trace):
    """(rank, note); rank is None when no certificate applies."""
    splits = sum(1 for p in bad_primes if trace(p) == 1)
    w = -((-1) ** splits)
    if w == -1:
        return 1, "w=-1, N<=1000"
    l1 = smoothed_l1(a, conductor)
    if l1 > 1e-3:
        return 0, f"w=+1, L(1)={l1:.6f}"
    if abs(l1) < 1e-8:
        return None, "analytic rank >= 2"
    return None, f"ambiguous L(1)={l1:.2e}"


# --- enumeration -------------------------------------------------------------


def enumerate_semistable():
    """Genuine semi-stable minimal models with N = rad(|disc|) in range."""
    found = []
    for a1 in (0, 1):
        for a2 in (-1, 0, 1):
            for a3 in (0, 1):
                for a4 in A4_RANGE:
                    for a6 in A6_RANGE:
                        a = (a1, a2, a3, a4, a6)
                        disc = discriminant(a)
                        if disc == 0:
                            continue
                        rad = small_radical(disc)
                        if rad is None:
                            continue
                        conductor, bad = rad
                        if not CONDUCTOR_LO <= conductor <= CONDUCTOR_HI:
                            continue
                        c4, _ = c_invariants(a)
                        if any(c4 % p == 0 for p in bad):
                            continue
                        found.append((conductor, a, tuple(bad)))
    return found


def main(out_path: Path) -> None:
    candidates = enumerate_semistable()
    print(f"enumeration kept {len(candidates)} semi-stable models in N range")

    by_n: dict[int, list] = {}
    for conductor, a, bad in candidates:
        by_n.setdefault(conductor, []).append((a, bad))

    hand_by_n: dict[int, list] = {}
    for label, (conductor, a, rank, torsion) in HAND_CURVES.items():
        hand_by_n.setdefault(conductor, []).append((label, a, rank, torsion))

    trace_memo: dict[tuple, dict[int, int]] = {}

    def tracer(a, conductor):
        cache = trace_memo.setdefault(a, {})

        def trace(p: int) -> int:
            if p not in cache:
                cache[p] = trace_of_frobenius(a, p, conductor).a_p
            return cache[p]

        return trace

    records: list[CurveRecord] = []
    off_residue_kept = 0
    excluded_rank = 0

    for conductor in sorted(set(by_n) | set(hand_by_n)):
        probe_primes = primes_up_to(sturm_bound(conductor))

        def profile(a):
            trace = tracer(a, conductor)
            return tuple(trace(p) for p in probe_primes)

        seen_profiles: list[tuple] = []
        used_letters: set[int] = set()

        for label, a, rank, torsion in sorted(hand_by_n.get(conductor, [])):
            n_, cls, idx = split_label(label)
            assert n_ == conductor
            used_letters.add(class_code_to_int(cls))
            prof = profile(a)
            if idx == 1:
                seen_profiles.append(prof)
            else:
                assert prof in seen_profiles, f"{label} not isogenous to its class"
            # machine checks on the hand data
            tors = exact_torsion(a, conductor, tracer(a, conductor))
            assert tors == torsion, f"{label}: computed torsion {tors} != {torsion}"
            sf = all(conductor % (p * p) for p in factor_trial(conductor))
            if sf:
                got_rank, note = certified_rank(a, conductor, factor_trial(conductor), tracer(a, conductor))
                if label == "389a1":
                    assert got_rank is None and note == "analytic rank >= 2", note
                else:
                    assert got_rank == rank, f"{label}: certified rank {got_rank} != {rank} ({note})"
            records.append(CurveRecord(conductor, cls, idx, a, rank, torsion))

        models = sorted(by_n.get(conductor, []), key=lambda t: (c_invariants(t[0]), t[0]))
        next_letter = 0
        for a, bad in models:
            prof = profile(a)
            if prof in seen_profiles:
                continue
            seen_profiles.append(prof)
            if conductor % BAD_PRIME and off_residue_kept >= MAX_OFF_RESIDUE:
                continue
            trace = tracer(a, conductor)
            rank, note = certified_rank(a, conductor, bad, trace)
            if rank is None:
                excluded_rank += 1
                continue
            torsion = exact_torsion(a, conductor, trace)
            while next_letter in used_letters:
                next_letter += 1
            used_letters.add(next_letter)
            records.append(CurveRecord(conductor, int_to_class_code(next_letter), 1, a, rank, torsion))
            if conductor % BAD_PRIME:
                off_residue_kept += 1

    records.sort(key=lambda r: (r.conductor, class_code_to_int(r.isogeny_class), r.curve_index))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(serialize_catalog(records), encoding="ascii")

    eligible = {
        (r.conductor, r.isogeny_class)
        for r in records
        if r.conductor % BAD_PRIME == 0 and all(r.conductor % (p * p) for p in factor_trial(r.conductor))
    }
    print(f"wrote {len(records)} curves to {out_path}")
    print(f"isogeny classes with 3 | N (squarefree): {len(eligible)}")
    print(f"generated classes excluded for missing rank certificate: {excluded_rank}")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixture_allcurves.txt"
    main(out)
