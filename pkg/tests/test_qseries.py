"""Truncated series layer: convolution against a naive oracle, the
q-dilation/derivation operators, Frobenius, ev, and the hypergeometric
coefficient family."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfrob.arith import IntPoly, RatFunc
from qfrob.madic import MAdicContext
from qfrob.qseries import (
    DomainMismatchError,
    PrimeFieldDomain,
    RatFuncDomain,
    RationalDomain,
    TruncSeries,
    clear_denominators,
    delta_q,
    delta_z,
    ev_series,
    f_alpha_cleared,
    f_alpha_frobenius_image,
    f_alpha_series,
    frobenius_series,
    gauss_valuation,
    invert_series,
    partial_sum_F_s,
    pochhammer_ratio,
    sigma_q,
    substitute_z_power,
)

rational_series = st.lists(
    st.fractions(min_value=-9, max_value=9, max_denominator=5),
    min_size=1,
    max_size=10,
).map(lambda cs: TruncSeries(RationalDomain(), cs))


def naive_mul(f, g):
    d = f.domain
    D = min(f.degree_bound, g.degree_bound)
    out = [d.zero] * D
    for i in range(D):
        for j in range(D - i):
            out[i + j] = d.add(out[i + j], d.mul(f.coeffs[i], g.coeffs[j]))
    return TruncSeries(d, out)


@given(rational_series, rational_series)
@settings(max_examples=50)
def test_mul_matches_naive(f, g):
    assert (f * g - naive_mul(f, g)).is_zero()


def test_packed_mul_matches_naive(ctx5):
    """The packed fast path over rational-function coefficients."""
    dom = RatFuncDomain(ctx5)
    rng = random.Random(7)
    den = RatFunc.from_one_minus_powers([], [2, 4])
    f = TruncSeries(
        dom,
        [RatFunc.from_poly(IntPoly(tuple(rng.randint(-9, 9) for _ in range(4)))) * den
         for _ in range(12)],
    )
    g = TruncSeries(
        dom,
        [RatFunc.from_poly(IntPoly(tuple(rng.randint(-9, 9) for _ in range(3)))) * den
         for _ in range(12)],
    )
    fast = f * g
    slow = naive_mul(f, g)
    assert all((a - b).is_zero() for a, b in zip(fast.coeffs, slow.coeffs))


def test_domain_mismatch():
    a = TruncSeries(RationalDomain(), [Fraction(1)])
    b = TruncSeries(PrimeFieldDomain(5), [1])
    with pytest.raises(DomainMismatchError):
        a + b


@given(rational_series)
@settings(max_examples=30)
def test_invert_series(f):
    if f.domain.is_zero(f.coeffs[0]):
        with pytest.raises(ZeroDivisionError):
            invert_series(f)
    else:
        one = TruncSeries.one(f.domain, f.degree_bound)
        assert (f * invert_series(f) - one).is_zero()


def test_sigma_delta_relation(ctx5):
    """delta_q = (sigma_q - id)/(q - 1) coefficientwise."""
    dom = RatFuncDomain(ctx5)
    rng = random.Random(3)
    f = TruncSeries(
        dom,
        [RatFunc.from_poly(IntPoly(tuple(rng.randint(-5, 5) for _ in range(3))))
         for _ in range(8)],
    )
    qm1 = dom.q_power(1) + (-dom.one)
    lhs = sigma_q(f) - f
    rhs = delta_q(f).scale_coeff(qm1)
    assert (lhs - rhs).is_zero()


def test_sigma_q_on_monomials(ctx5):
    dom = RatFuncDomain(ctx5)
    z3 = TruncSeries(dom, [RatFunc.zero()] * 3 + [RatFunc.one()], 6)
    got = sigma_q(z3)
    assert (got - z3.scale_coeff(dom.q_power(3))).is_zero()


def test_frobenius_series_substitutes(ctx5):
    dom = RatFuncDomain(ctx5)
    c = RatFunc.from_poly(IntPoly((1, 1)))  # 1 + t
    f = TruncSeries(dom, [RatFunc.one(), c], 12)
    F = frobenius_series(f, 1)
    assert (F.coeffs[0] - RatFunc.one()).is_zero()
    assert (F.coeffs[5] - c.substitute_power(5)).is_zero()
    assert all(F.coeffs[n].is_zero() for n in (1, 2, 3, 4, 6, 7))


def test_substitute_z_power():
    dom = RationalDomain()
    f = TruncSeries(dom, [Fraction(1), Fraction(2), Fraction(3)], 7)
    g = substitute_z_power(f, 3)
    assert g.coeffs == [1, 0, 0, 2, 0, 0, 3]


def test_delta_z():
    dom = RationalDomain()
    f = TruncSeries(dom, [Fraction(5), Fraction(2), Fraction(3)], 3)
    assert delta_z(f).coeffs == [0, 2, 6]  # z d/dz


def hypergeometric_coefficient(n, ctx):
    """(q^alpha; q)_n / (q; q)_n assembled factor by factor."""
    c = RatFunc.one()
    for j in range(n):
        c = c * RatFunc.from_one_minus_powers([ctx.a + ctx.b * j], [ctx.b * (j + 1)])
    return c


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 8])
def test_f_alpha_coefficients(n, ctx_pair):
    f = f_alpha_series(n + 1, ctx_pair)
    want = hypergeometric_coefficient(n, ctx_pair)
    assert (f.coeffs[n] - want).is_zero()


def test_f_alpha_cleared_equals_plain(ctx5):
    D = 12
    cleared = f_alpha_cleared(D, ctx5)
    plain = f_alpha_series(D, ctx5)
    assert all((a - b).is_zero() for a, b in zip(cleared.coeffs, plain.coeffs))


def test_clear_denominators_preserves_values(ctx5):
    f = f_alpha_series(8, ctx5)
    g = clear_denominators(f)
    assert all((a - b).is_zero() for a, b in zip(f.coeffs, g.coeffs))


def test_f_alpha_frobenius_image(ctx5):
    D = 26
    img = f_alpha_frobenius_image(D, ctx5)
    direct = frobenius_series(f_alpha_series((D - 1) // ctx5.p + 1, ctx5).truncate(D), 1)
    assert all((a - b).is_zero() for a, b in zip(img.coeffs, direct.coeffs))


def test_ev_of_f_alpha(ctx5):
    """q -> 1 sends the q-hypergeometric series to the classical one."""
    D = 10
    bar = ev_series(f_alpha_cleared(D, ctx5))
    alpha = ctx5.alpha
    c = Fraction(1)
    for n in range(D):
        assert bar.coeffs[n] == c
        c *= Fraction(alpha + n, 1 + n)


def test_gauss_valuation(ctx5):
    dom = RatFuncDomain(ctx5)
    five = RatFunc.from_int(5)
    one_minus_t = RatFunc.from_one_minus_powers([1], [])
    f = TruncSeries(dom, [five * five, one_minus_t, five * one_minus_t])
    assert gauss_valuation(f) == 1
    assert gauss_valuation(TruncSeries.zero(dom, 4)).is_infinite


def test_partial_sums(ctx5):
    F0 = partial_sum_F_s(0, ctx5)
    assert F0.degree_bound >= 1 and (F0.coeffs[0] - RatFunc.one()).is_zero()
    assert all(c.is_zero() for c in F0.coeffs[1:])
    F1 = partial_sum_F_s(1, ctx5)
    f = f_alpha_series(5, ctx5)
    for n in range(5):
        assert (F1.coeffs[n] - f.coeffs[n]).is_zero()
    assert all(c.is_zero() for c in F1.coeffs[5:])


@pytest.mark.parametrize("i,n", [(-1, 0), (-1, 3), (-1, 7), (0, 4), (1, 2)])
def test_pochhammer_ratio_value(i, n, ctx5):
    """B^(i)(n) is the i+1-fold Frobenius image of the base coefficient."""
    r = pochhammer_ratio(i, n, ctx5)
    base = hypergeometric_coefficient(n, ctx5)
    for _ in range(i + 1):
        base = base.substitute_power(ctx5.p)
    assert (r.value - base).is_zero()
