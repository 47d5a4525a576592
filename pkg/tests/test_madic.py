"""Valuation for the ideal (p, 1-q): norm axioms, membership predicates,
and the product factorization of 1 - q^(p^j)."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfrob.arith import IntPoly, RatFunc
from qfrob.madic import (
    INFINITY,
    HypothesisError,
    MAdicContext,
    Valuation,
    check_mod_cyclotomic,
    check_mod_m_power,
    is_in_localization,
    product_identity_check,
    valuation_below_bound,
    valuation_poly,
    valuation_ratfunc,
    valuation_ratfunc_int,
    vp_fraction,
)
from qfrob.qseries import pochhammer_ratio

polys = st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=31).map(
    lambda cs: IntPoly(tuple(cs), "q")
)
primes = st.sampled_from([2, 3, 5, 7])


def oracle_valuation(P, p):
    """Independent route: substitute q = 1 - x, then min(v_p(b_i) + i)."""
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


@given(polys, primes)
@settings(max_examples=100)
def test_valuation_matches_substitution_oracle(P, p):
    ctx = MAdicContext(p)
    v = valuation_poly(P, ctx)
    want = oracle_valuation(P, p)
    if want is None:
        assert v.is_infinite
    else:
        assert v == want


@given(polys, polys, primes)
@settings(max_examples=100)
def test_valuation_multiplicative_and_ultrametric(P, Q, p):
    ctx = MAdicContext(p)
    vP, vQ = valuation_poly(P, ctx), valuation_poly(Q, ctx)
    assert valuation_poly(P * Q, ctx) == vP + vQ
    vS = valuation_poly(P + Q, ctx)
    assert vS >= min(vP, vQ)
    if vP != vQ:
        assert vS == min(vP, vQ)


@given(polys, primes, st.integers(1, 6))
@settings(max_examples=60)
def test_membership_agrees_with_valuation(P, p, n):
    ctx = MAdicContext(p)
    want = oracle_valuation(P, p)
    member = want is None or want >= n
    assert check_mod_m_power(RatFunc.from_poly(P), n, ctx) == member


def test_known_valuations():
    ctx = MAdicContext(5)
    one_minus_q25 = IntPoly((1,) + (0,) * 24 + (-1,), "q")
    assert valuation_poly(one_minus_q25, ctx) == 3
    assert valuation_poly(IntPoly((5,), "q"), ctx) == 1
    assert valuation_poly(IntPoly((), "q"), ctx) is INFINITY
    fourth = IntPoly((1, -1), "q")
    for _ in range(3):
        fourth = fourth * IntPoly((1, -1), "q")
    assert valuation_poly(fourth, ctx) == 4


def test_valuation_object():
    assert INFINITY.is_infinite
    assert INFINITY > Valuation(10**9)
    assert Valuation(2) + Valuation(3) == 5
    assert (INFINITY + Valuation(1)).is_infinite
    with pytest.raises(ValueError):
        INFINITY.value
    with pytest.raises(ValueError):
        Valuation(-1)


def test_context_validation():
    with pytest.raises(ValueError):
        MAdicContext(6)
    with pytest.raises(ValueError):
        MAdicContext.for_alpha(5, Fraction(1, 5))  # gcd(p, b) != 1
    ctx = MAdicContext.for_alpha(5, Fraction(1, 3))
    assert not ctx.hyp_ok
    with pytest.raises(HypothesisError):
        ctx.require_hyp()
    assert MAdicContext.for_alpha(7, Fraction(2, 3)).hyp_ok
    assert MAdicContext.for_alpha(5, 1).hyp_ok  # integer exponent


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("j", [1, 2, 3])
def test_product_identity(p, j):
    ctx = MAdicContext(p)
    assert product_identity_check(j, ctx)
    one_minus = IntPoly((1,) + (0,) * (p**j - 1) + (-1,), "q")
    assert valuation_poly(one_minus, ctx) == j + 1


def test_vp_fraction():
    assert vp_fraction(Fraction(50, 3), 5) == 2
    assert vp_fraction(Fraction(3, 25), 5) == -2
    assert vp_fraction(0, 5) is None


def test_localization_membership(ctx5):
    one_minus_t = RatFunc.from_one_minus_powers([1], [])
    assert is_in_localization(one_minus_t, ctx5)
    assert not is_in_localization(one_minus_t.inverse(), ctx5)
    assert not is_in_localization(RatFunc.from_fraction(Fraction(1, 5)), ctx5)
    assert is_in_localization(RatFunc.from_fraction(Fraction(1, 3)), ctx5)
    # denominators that are units at t = 1 stay invertible
    unit_den = RatFunc(Fraction(1), IntPoly((1,)), None, IntPoly((2, -1)))
    assert is_in_localization(unit_den, ctx5)
    # unreduced: (1-t) present on both sides
    both = one_minus_t * one_minus_t.inverse()
    assert is_in_localization(both, ctx5)


def test_mod_cyclotomic(ctx5):
    phi = ctx5.phi_p_ratfunc()
    assert check_mod_cyclotomic(phi, ctx5)
    assert check_mod_cyclotomic(phi * RatFunc.from_poly(IntPoly((1, 2))), ctx5)
    assert not check_mod_cyclotomic(RatFunc.from_one_minus_powers([1], []), ctx5)
    assert check_mod_cyclotomic(RatFunc.zero(), ctx5)


@given(st.integers(0, 12), st.integers(0, 12), st.sampled_from([-1, 0]))
@settings(max_examples=40, deadline=None)
def test_valuation_below_bound_consistency(n1, n2, i):
    ctx = MAdicContext.for_alpha(5, Fraction(1, 2))
    x = pochhammer_ratio(i, n1, ctx).value - pochhammer_ratio(i, n2, ctx).value
    v = valuation_ratfunc_int(x, ctx)
    for bound in range(1, 5):
        got = valuation_below_bound(x, bound, ctx)
        if v is None or v >= bound:
            assert got is None
        else:
            assert got == v


def test_valuation_ratfunc_rejects_negative(ctx5):
    with pytest.raises(ValueError):
        valuation_ratfunc(RatFunc.from_fraction(Fraction(1, 5)), ctx5)
    assert valuation_ratfunc(RatFunc.from_fraction(Fraction(25, 2)), ctx5) == 2
    assert valuation_ratfunc_int(RatFunc.from_fraction(Fraction(1, 5)), ctx5) == -1
