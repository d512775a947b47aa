"""Point counting, Frobenius traces, coefficient tables, series evaluation.

The oracle here is deliberately primitive: an independent O(p^2) point count
written inline plus the definitional Euler-product recursion, sharing no code
with src/.  Everything else must agree with it.
"""

import cmath
import math
import random

import numpy as np
import pytest

from lflow.errors import ConsistencyError, NumericError
from lflow.lseries import (
    ADDITIVE,
    GOOD,
    NONSPLIT,
    SPLIT,
    AnTable,
    build_an_table,
    count_points,
    count_points_fast,
    eval_truncated_l,
    eval_truncated_l_many,
    l_at_one,
    sigma0_sqrt_bound,
    smoothed_l_at_one,
    trace_of_frobenius,
)

from conftest import CURVE_11A1, CURVE_14A1, CURVE_15A1, CURVE_17A1, CURVE_21A1, CURVE_37A1


# ----------------------------------------------------------------- the oracle


def oracle_counts(a, p):
    """Independent enumeration of smooth/singular affine points mod p."""
    a1, a2, a3, a4, a6 = (x % p for x in a)
    smooth = 0
    singular = []
    for x in range(p):
        for y in range(p):
            lhs = (y * y + a1 * x * y + a3 * y) % p
            rhs = (x**3 + a2 * x * x + a4 * x + a6) % p
            if lhs != rhs:
                continue
            dy = (2 * y + a1 * x + a3) % p
            dx = (3 * x * x + 2 * a2 * x + a4 - a1 * y) % p
            if dy == 0 and dx == 0:
                singular.append((x, y))
            else:
                smooth += 1
    return smooth, singular


def oracle_ap(a, p, conductor):
    smooth, singular = oracle_counts(a, p)
    if conductor % p:
        assert not singular
        return p + 1 - (smooth + 1)
    return p - (smooth + 1)


def oracle_an(a, conductor, m):
    """Definitional coefficients: a_p by counting, Hecke recursion at prime
    powers, multiplicativity elsewhere. No sieves, no sharing with src/."""
    coeffs = [0] * (m + 1)
    coeffs[1] = 1

    def factorize(n):
        out = {}
        d = 2
        while d * d <= n:
            while n % d == 0:
                out[d] = out.get(d, 0) + 1
                n //= d
            d += 1
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out

    ap_cache = {}
    for n in range(2, m + 1):
        fac = factorize(n)
        val = 1
        for p, e in fac.items():
            if p not in ap_cache:
                ap_cache[p] = oracle_ap(a, p, conductor)
            ap = ap_cache[p]
            powers = [1, ap]
            good = conductor % p != 0
            while len(powers) <= e:
                nxt = ap * powers[-1] - (p * powers[-2] if good else 0)
                powers.append(nxt)
            val *= powers[e]
        coeffs[n] = val
    return tuple(coeffs[1:])


# -------------------------------------------------------------- point counts


def test_count_points_four_case_hand_enumeration():
    # y^2 = x^3 + 1 over F_2: (0,1) has dy = 2y = 0 and dx = 3x^2 = 0,
    # so it is singular; (1,0): lhs 0 rhs 0, dy = 0 but dx = 3 = 1 != 0
    smooth, singular = count_points((0, 0, 0, 0, 1), 2)
    assert smooth == 1
    assert singular == [(0, 1)]


def test_count_points_good_reduction_has_no_singular_point():
    for p in (3, 5, 7, 13):
        smooth, singular = count_points(CURVE_11A1, p)
        assert singular == []


def test_count_points_11a1_at_11():
    _, singular = count_points(CURVE_11A1, 11)
    assert len(singular) == 1


def test_count_points_matches_oracle():
    rng = random.Random(11)
    for p in (2, 3, 5, 7, 11, 13):
        for _ in range(12):
            a = tuple(rng.randint(-9, 9) for _ in range(5))
            assert count_points(a, p) == oracle_counts(a, p)


def test_fast_count_agrees_with_naive_through_97():
    primes = [p for p in range(3, 98) if all(p % q for q in range(2, p))]
    curves = [CURVE_11A1, CURVE_14A1, CURVE_15A1, CURVE_37A1, (2, -3, 4, -5, 6)]
    rng = random.Random(97)
    curves += [tuple(rng.randint(-20, 20) for _ in range(5)) for _ in range(10)]
    for a in curves:
        for p in primes:
            ns, nsing = count_points(a, p)
            fs, fsing = count_points_fast(a, p)
            assert ns == fs, (a, p)
            assert sorted(nsing) == sorted(fsing), (a, p)


# ------------------------------------------------------------------- traces


def test_trace_known_values_11a1():
    assert trace_of_frobenius(CURVE_11A1, 2, 11).a_p == -2
    assert trace_of_frobenius(CURVE_11A1, 3, 11).a_p == -1
    assert trace_of_frobenius(CURVE_11A1, 2, 11).kind == GOOD
    info = trace_of_frobenius(CURVE_11A1, 11, 11)
    assert info.a_p == 1 and info.kind == SPLIT


def test_trace_reduction_kinds():
    # 14a1 = [1,0,1,4,-6], disc = -2^6 * 7^3 wait: conductor 14 = 2 * 7
    assert trace_of_frobenius(CURVE_14A1, 2, 14).kind == NONSPLIT
    assert trace_of_frobenius(CURVE_14A1, 7, 14).kind == SPLIT
    assert trace_of_frobenius(CURVE_21A1, 3, 21).kind == SPLIT
    assert trace_of_frobenius(CURVE_21A1, 7, 21).kind == NONSPLIT
    # 20a1 has additive reduction at 2 (conductor 20 = 2^2 * 5)
    assert trace_of_frobenius((0, 1, 0, 4, 4), 2, 20).kind == ADDITIVE
    assert trace_of_frobenius((0, 1, 0, 4, 4), 2, 20).a_p == 0


def test_trace_matches_oracle_across_fixture(fixture_records):
    rng = random.Random(5)
    picks = rng.sample(fixture_records, 15)
    primes = (2, 3, 5, 7, 11, 13)
    for rec in picks:
        for p in primes:
            info = trace_of_frobenius(rec.a_invariants, p, rec.conductor)
            assert info.a_p == oracle_ap(rec.a_invariants, p, rec.conductor)
            assert abs(info.a_p) <= 2 * math.sqrt(p) or rec.conductor % p == 0


def test_trace_hasse_bound_good_primes():
    for p in (2, 3, 5, 7, 13, 17, 19, 23):
        info = trace_of_frobenius(CURVE_37A1, p, 37)
        assert info.kind == GOOD
        assert info.a_p * info.a_p <= 4 * p


def test_trace_rejects_non_minimal_model():
    # 11a1 rescaled by u=2: same curve over Q, but the model is divisible
    # junk at 2, so claiming conductor 11 must trip the consistency check
    scaled = (0, -4, 8, -160, -1280)
    with pytest.raises(ConsistencyError):
        trace_of_frobenius(scaled, 2, 11)


def test_trace_semistable_fixture_never_additive(fixture_records):
    rng = random.Random(31)
    for rec in rng.sample([r for r in fixture_records if r.conductor % 3 == 0], 10):
        from lflow.catalog import is_squarefree

        if not is_squarefree(rec.conductor):
            continue
        n = rec.conductor
        for p in (2, 3, 5, 7, 11, 13):
            if n % p == 0:
                assert trace_of_frobenius(rec.a_invariants, p, n).kind != ADDITIVE


# ----------------------------------------------------------------- a_n table


def test_an_table_11a1_first_ten():
    t = build_an_table(CURVE_11A1, 11, 10, "11a1")
    assert t.coefficients == (1, -2, -1, 2, 1, 2, -2, 0, -2, -2)


def test_an_table_validation():
    with pytest.raises(ValueError):
        AnTable("x", 11, 3, (1, 2))  # length mismatch
    with pytest.raises(ValueError):
        AnTable("x", 11, 2, (2, 1))  # a_1 != 1
    t = AnTable("x", 11, 1, (1,))
    assert t.m == 1


def test_an_table_matches_definitional_oracle():
    cases = [
        (CURVE_11A1, 11),
        (CURVE_15A1, 15),
        (CURVE_21A1, 21),
        (CURVE_37A1, 37),
    ]
    for a, n in cases:
        t = build_an_table(a, n, 60)
        assert t.coefficients == oracle_an(a, n, 60), (a, n)


def test_an_table_multiplicativity_and_hecke(fixture_records):
    rng = random.Random(23)
    for rec in rng.sample(fixture_records, 6):
        t = build_an_table(rec.a_invariants, rec.conductor, 200, rec.label)
        c = (0,) + t.coefficients  # 1-indexed view
        for m, n in ((2, 3), (3, 4), (5, 7), (4, 9), (6, 25), (8, 9)):
            if math.gcd(m, n) == 1 and m * n <= 200:
                assert c[m * n] == c[m] * c[n], (rec.label, m, n)
        for p in (2, 3, 5):
            good = rec.conductor % p != 0
            k = p * p
            while k * p <= 200:
                expected = c[p] * c[k] - (p * c[k // p] if good else 0)
                assert c[k * p] == expected, (rec.label, p, k)
                k *= p


def test_an_table_divisor_bound(fixture_records):
    t = build_an_table(CURVE_37A1, 37, 200)
    for n, an in enumerate(t.coefficients, start=1):
        assert abs(an) <= sigma0_sqrt_bound(n) + 1e-9


def test_sigma0_sqrt_bound_values():
    assert sigma0_sqrt_bound(1) == 1.0
    assert sigma0_sqrt_bound(6) == pytest.approx(4 * math.sqrt(6))
    assert sigma0_sqrt_bound(12) == pytest.approx(6 * math.sqrt(12))


# --------------------------------------------------------------- evaluation


def zeta_table(m):
    return AnTable("zeta", 1, m, (1,) * m)


def delta_table(m):
    return AnTable("delta", 1, m, (1,) + (0,) * (m - 1))


def test_eval_delta_series_is_constant_one():
    t = delta_table(50)
    for s in (0j, 2 + 0j, -3 + 4j, 1.5 - 2.5j):
        assert eval_truncated_l(t, s) == 1 + 0j


def test_eval_zeta_reference_sums():
    t = zeta_table(1000)
    # partial zeta(2) and the 1000th harmonic number, both via math.fsum
    assert eval_truncated_l(t, 2 + 0j).real == pytest.approx(
        math.fsum(1 / n**2 for n in range(1, 1001)), abs=1e-12
    )
    assert l_at_one(t) == pytest.approx(7.485470860550345, abs=1e-12)


def test_eval_matches_direct_cmath_sum():
    t = build_an_table(CURVE_11A1, 11, 120, "11a1")
    rng = random.Random(3)
    for _ in range(20):
        s = complex(rng.uniform(-2, 4), rng.uniform(-6, 6))
        direct = sum(
            an * cmath.exp(-s * math.log(n))
            for n, an in enumerate(t.coefficients, start=1)
        )
        got = eval_truncated_l(t, s)
        assert got == pytest.approx(direct, rel=1e-10, abs=1e-9)


def test_eval_linearity_in_coefficients():
    m = 40
    rng = random.Random(8)
    c1 = (1,) + tuple(rng.randint(-5, 5) for _ in range(m - 1))
    c2 = (1,) + tuple(rng.randint(-5, 5) for _ in range(m - 1))
    # a_1 must stay 1 in both tables, so compare against v1 + v2 - 1
    t1, t2 = AnTable("u", 1, m, c1), AnTable("v", 1, m, c2)
    s = 1.25 - 3j
    v1, v2 = eval_truncated_l(t1, s), eval_truncated_l(t2, s)
    tsum = AnTable("w", 1, m, (1,) + tuple(x + y for x, y in zip(c1[1:], c2[1:])))
    vsum = eval_truncated_l(tsum, s)
    assert vsum == pytest.approx(v1 + v2 - 1, rel=1e-12, abs=1e-12)


def test_eval_conjugate_symmetry_is_exact():
    # real coefficients: L(conj s) == conj L(s) bit for bit
    t = build_an_table(CURVE_15A1, 15, 300, "15a1")
    for s in (0.5 + 3j, -1 + 7j, 2.25 - 0.5j):
        assert eval_truncated_l(t, s.conjugate()) == eval_truncated_l(t, s).conjugate()


def test_eval_many_matches_scalar_bitwise():
    t = build_an_table(CURVE_17A1, 17, 500, "17a1")
    rng = random.Random(14)
    pts = np.array(
        [complex(rng.uniform(-2, 4), rng.uniform(0, 12)) for _ in range(4097)]
    )
    vec = eval_truncated_l_many(t, pts)
    assert vec.shape == pts.shape
    for i in (0, 1, 2047, 2048, 2049, 4096):
        assert vec[i] == eval_truncated_l(t, complex(pts[i]))


def test_eval_many_batch_size_invariance():
    t = build_an_table(CURVE_11A1, 11, 200, "11a1")
    rng = random.Random(6)
    pts = np.array([complex(rng.uniform(-2, 4), rng.uniform(0, 12)) for _ in range(513)])
    whole = eval_truncated_l_many(t, pts)
    pieces = np.concatenate(
        [eval_truncated_l_many(t, pts[i : i + 17]) for i in range(0, 513, 17)]
    )
    assert np.array_equal(whole, pieces)


def test_l_at_one_known_snapshot():
    t = build_an_table(CURVE_11A1, 11, 1000, "11a1")
    assert l_at_one(t) == pytest.approx(0.2617803834102429, abs=1e-13)


def test_l_at_one_is_real_output():
    t = build_an_table(CURVE_37A1, 37, 500, "37a1")
    assert isinstance(l_at_one(t), float)


def test_smoothed_value_matches_classical_constant():
    # for 11a1 the even functional equation makes the smoothed estimator
    # converge to L(1) = 0.253841860855911... with a sub-1e-12 tail at M=1000
    t = build_an_table(CURVE_11A1, 11, 1000, "11a1")
    assert smoothed_l_at_one(t) == pytest.approx(0.2538418608559107, abs=1e-10)


def test_smoothed_matches_inline_formula():
    t = build_an_table(CURVE_15A1, 15, 400, "15a1")
    x = 2 * math.pi / math.sqrt(15)
    direct = math.fsum(
        2 * an / n * math.exp(-x * n) for n, an in enumerate(t.coefficients, 1)
    )
    assert smoothed_l_at_one(t) == pytest.approx(direct, rel=1e-12)
