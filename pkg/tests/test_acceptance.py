"""End-to-end acceptance checks, one per headline property, each with an
explicit runtime budget and a single printed pass line."""

import random
import time
from fractions import Fraction

import pytest

from qfrob.arith import IntPoly, RatFunc
from qfrob.congruence import (
    check_cyclotomic_congruence,
    check_dwork_conclusion,
    check_dwork_condition1,
    check_truncation_congruence,
    ev_mod_p_series,
    find_relation,
    recover_p_lucas,
    run_dwork_checks,
)
from qfrob.frobenius import (
    SeriesMatrix,
    check_confluence_order1,
    check_frobenius_structure,
    check_semilinear_action,
    hypergeometric_system_matrix,
    order1_transition_matrix,
)
from qfrob.madic import (
    MAdicContext,
    check_mod_m_power,
    is_in_localization,
    product_identity_check,
    valuation_poly,
)
from qfrob.qseries import f_alpha_cleared, f_alpha_frobenius_image, pochhammer_ratio
from qfrob.zqp import padic_digits, q_power_beta, reduce, zqp_ev, zqp_frobenius

PAIRS = [(5, Fraction(1, 2)), (7, Fraction(1, 3)), (7, Fraction(2, 3))]


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, *rest):
        dt = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        print(f"{self.name}: {status} ({dt:.2f}s, budget {self.seconds}s)", flush=True)
        if exc_type is None:
            assert dt < self.seconds, f"{self.name} exceeded {self.seconds}s ({dt:.2f}s)"


def oracle_valuation(P, p):
    """Independent (1-q)-expansion by Horner substitution q = 1 - x."""
    acc = [0]
    for c in reversed(P.coeffs):
        nxt = [0] * (len(acc) + 1)
        for i, a in enumerate(acc):
            nxt[i] += a
            nxt[i + 1] -= a
        nxt[0] += c
        acc = nxt
    best = None
    for i, b in enumerate(acc):
        if b:
            v = i
            while b % p == 0:
                b //= p
                v += 1
            best = v if best is None else min(best, v)
    return best


def test_01_valuation_engine():
    rng = random.Random(20260823)
    primes = [2, 3, 5, 7]
    with Budget("valuation engine (500 random pairs)", 5):
        for k in range(500):
            p = primes[k % 4]
            ctx = MAdicContext(p)
            P = IntPoly(
                tuple(rng.randint(-(10**6), 10**6) for _ in range(rng.randint(1, 31))),
                "q",
            )
            Q = IntPoly(
                tuple(rng.randint(-(10**6), 10**6) for _ in range(rng.randint(1, 31))),
                "q",
            )
            vP, vQ = valuation_poly(P, ctx), valuation_poly(Q, ctx)
            assert valuation_poly(P * Q, ctx) == vP + vQ
            vS = valuation_poly(P + Q, ctx)
            assert vS >= min(vP, vQ)
            if vP != vQ:
                assert vS == min(vP, vQ)
            if k % 10 == 0:
                want = oracle_valuation(P, p)
                for n in range(1, 7):
                    member = want is None or want >= n
                    assert check_mod_m_power(RatFunc.from_poly(P), n, ctx) == member


def test_02_product_identity():
    with Budget("cyclotomic product identity", 1):
        for p in (2, 3, 5):
            ctx = MAdicContext(p)
            for j in (1, 2, 3):
                assert product_identity_check(j, ctx)
                one_minus = IntPoly((1,) + (0,) * (p**j - 1) + (-1,), "q")
                assert valuation_poly(one_minus, ctx) == j + 1


def test_03_digit_series_power():
    N = 6
    with Budget("q^beta digit series at N=6", 2):
        for p, alpha in PAIRS:
            ctx = MAdicContext.for_alpha(p, alpha)
            beta = padic_digits(ctx.a, ctx.b, p, N + 1)
            x = q_power_beta(beta, N, ctx)
            assert x**ctx.b == reduce(IntPoly.monomial(1, ctx.b * ctx.a), N, ctx)
            assert zqp_ev(x) == 1
            assert zqp_frobenius(x) == q_power_beta(beta.times_p(), N, ctx)


def test_04_pochhammer_localization():
    with Budget("pochhammer coefficients lie in the local ring", 10):
        for p, alpha in PAIRS:
            ctx = MAdicContext.for_alpha(p, alpha)
            for n in range(3 * p + 1):
                assert is_in_localization(pochhammer_ratio(-1, n, ctx).value, ctx)
                # ratio to the Frobenius image of the floor(n/p) coefficient
                assert check_dwork_condition1(ctx, -1, n)


def test_05_frobenius_structure():
    with Budget("strong Frobenius structure, exact, D=2p^2", 30):
        for p, alpha in PAIRS:
            ctx = MAdicContext.for_alpha(p, alpha)
            D = 2 * p * p
            A = hypergeometric_system_matrix(ctx, D)
            H = SeriesMatrix.scalar(order1_transition_matrix(ctx, D))
            cert = check_frobenius_structure(A, H, 1, "exact")
            assert cert.passed, (p, alpha, cert.residual_valuations)
            ok = check_semilinear_action(
                A,
                H,
                [f_alpha_cleared(D, ctx)],
                1,
                frob_fvec=[f_alpha_frobenius_image(D, ctx)],
            )
            assert ok, (p, alpha)


def test_06_truncation_congruence():
    p, alpha = 5, Fraction(1, 2)
    ctx = MAdicContext.for_alpha(p, alpha)
    D = min(2 * p * p, 120)
    with Budget("truncation congruence s in {0,1,2}", 30):
        for s in (0, 1, 2):
            assert check_truncation_congruence(ctx, s, D).passed, s
        neg = check_truncation_congruence(ctx, 1, D, rhs_truncation=5)
        assert not neg.passed
        bad = [v for _, _, v in neg.certificates if v is not None]
        assert bad and min(bad) < 2


def test_07_cyclotomic_congruence():
    ctx = MAdicContext.for_alpha(5, Fraction(1, 2))
    with Budget("cyclotomic congruence, exact certificates", 60):
        rep = check_cyclotomic_congruence(ctx, 50)
        assert rep.passed
        fallbacks = [
            (ix, kind) for ix, kind, _ in rep.certificates if kind == "valuation-bound"
        ]
        assert fallbacks == [], f"valuation-only certificates at {fallbacks}"
        assert all(kind != "failed" for _, kind, _ in rep.certificates)


def test_08_dwork_conditions_and_conclusion():
    ctx = MAdicContext.for_alpha(5, Fraction(1, 2))
    with Budget("dwork conditions and conclusion", 60):
        rep = run_dwork_checks(ctx, n_max=10, m_max=5, s_max=2, i_max=1)
        assert rep.passed, rep.failing
        for r in (0, 1, 2):
            for s in (0, 1):
                assert check_dwork_conclusion(ctx, r, s, 50).passed, (r, s)


def test_09_confluence():
    with Budget("confluence to q=1 at D=40", 5):
        for p, alpha in PAIRS:
            ctx = MAdicContext.for_alpha(p, alpha)
            assert check_confluence_order1(ctx, 40, with_ev_functoriality=True)


def test_10_p_lucas_relations():
    with Budget("p-Lucas recovery and relation search", 5):
        for p, alpha in PAIRS:
            ctx = MAdicContext.for_alpha(p, alpha)
            rel = recover_p_lucas(ctx, 2 * p * p)
            assert rel.verified
        ctx = MAdicContext.for_alpha(5, Fraction(1, 2))
        r, d = 1, 4
        window = 2 * (r + 1) * (d + 1)
        g = ev_mod_p_series(ctx, 2 * window)
        rel = find_relation(g, 1, r, d, window)
        assert rel is not None and rel.verified
        # the relation keeps holding on a window twice as long
        assert rel.apply(g).is_zero()
