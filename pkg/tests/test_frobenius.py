"""Frobenius-structure checkers: the order-1 hypergeometric system, the
semilinear action on solutions, operator conversions, and confluence."""

from fractions import Fraction

import pytest

from qfrob.arith import IntPoly, RatFunc
from qfrob.frobenius import (
    FrobeniusCertificate,
    PreconditionError,
    QDiffOperatorDelta,
    QDiffOperatorSigma,
    SeriesMatrix,
    associated_matrix,
    check_confluence_order1,
    check_frobenius_structure,
    check_semilinear_action,
    companion_matrix,
    delta_to_sigma,
    ev_confluence_matrix,
    hypergeometric_system_matrix,
    order1_transition_matrix,
    sigma_to_delta,
)
from qfrob.madic import HypothesisError, MAdicContext
from qfrob.qseries import (
    RatFuncDomain,
    RationalDomain,
    TruncSeries,
    delta_z,
    ev_series,
    f_alpha_cleared,
    f_alpha_frobenius_image,
    substitute_z_power,
)

D_SMALL = 24


def test_system_matrix_is_geometric(ctx5):
    """(1-z)/(1 - q^alpha z) = 1 + (q^alpha - 1) sum_{n>=1} q^(alpha(n-1)) z^n."""
    A = hypergeometric_system_matrix(ctx5, 8)[0, 0]
    t_a = RatFunc.monomial(ctx5.a)
    lead = t_a + RatFunc.from_int(-1)
    assert (A.coeffs[0] - RatFunc.one()).is_zero()
    for n in range(1, 8):
        assert (A.coeffs[n] - lead * t_a ** (n - 1)).is_zero()


def test_structure_exact(ctx_pair):
    ctx = ctx_pair
    A = hypergeometric_system_matrix(ctx, D_SMALL)
    H = SeriesMatrix.scalar(order1_transition_matrix(ctx, D_SMALL))
    cert = check_frobenius_structure(A, H, 1, "exact")
    assert cert.passed
    assert all(v is None for v in cert.residual_valuations)
    assert cert.degree == D_SMALL and cert.dimension == 1 and cert.period == 1
    d = cert.to_dict()
    assert d["pass"] and d["kind"] == "frobenius_structure"


def test_structure_transport_by_unit(ctx5):
    """c * H is again a transition matrix for any constant unit c."""
    A = hypergeometric_system_matrix(ctx5, D_SMALL)
    H = order1_transition_matrix(ctx5, D_SMALL)
    for c in (RatFunc.from_int(3), RatFunc.from_fraction(Fraction(-2, 7))):
        cert = check_frobenius_structure(A, SeriesMatrix.scalar(H.scale_coeff(c)))
        assert cert.passed


def test_structure_negative_control(ctx5):
    """H = identity only works when A is Frobenius-invariant; here it is not."""
    A = hypergeometric_system_matrix(ctx5, D_SMALL)
    dom = RatFuncDomain(ctx5)
    H = SeriesMatrix.identity(dom, 1, D_SMALL)
    cert = check_frobenius_structure(A, H, 1, "exact")
    assert not cert.passed
    assert any(v is not None for v in cert.residual_valuations)


def test_structure_requires_invertible_constant_term(ctx5):
    A = hypergeometric_system_matrix(ctx5, D_SMALL)
    dom = RatFuncDomain(ctx5)
    zero = SeriesMatrix.scalar(TruncSeries.zero(dom, D_SMALL))
    with pytest.raises(PreconditionError):
        check_frobenius_structure(A, zero)


def test_semilinear_action(ctx5):
    D = D_SMALL
    A = hypergeometric_system_matrix(ctx5, D)
    H = SeriesMatrix.scalar(order1_transition_matrix(ctx5, D))
    f = f_alpha_cleared(D, ctx5)
    assert check_semilinear_action(A, H, [f], 1)
    assert check_semilinear_action(
        A, H, [f], 1, frob_fvec=[f_alpha_frobenius_image(D, ctx5)]
    )


def test_semilinear_rejects_non_solutions(ctx5):
    D = D_SMALL
    A = hypergeometric_system_matrix(ctx5, D)
    H = SeriesMatrix.scalar(order1_transition_matrix(ctx5, D))
    dom = RatFuncDomain(ctx5)
    not_solution = TruncSeries.one(dom, D)
    with pytest.raises(PreconditionError):
        check_semilinear_action(A, H, [not_solution], 1)
    f = f_alpha_cleared(D, ctx5)
    with pytest.raises(PreconditionError):
        check_semilinear_action(A, H, [f], 1, frob_fvec=[not_solution])


def _random_sigma_operator(ctx, order, D, seed=1):
    import random

    rng = random.Random(seed)
    dom = RatFuncDomain(ctx)
    coeffs = []
    for _ in range(order):
        cs = [
            RatFunc.from_poly(IntPoly(tuple(rng.randint(-4, 4) for _ in range(3))))
            for _ in range(D)
        ]
        coeffs.append(TruncSeries(dom, cs))
    return QDiffOperatorSigma(coeffs)


def test_operator_conversion_round_trip(ctx5):
    L = _random_sigma_operator(ctx5, 2, 6)
    back = delta_to_sigma(sigma_to_delta(L))
    assert all(
        (a - b).is_zero() for a, b in zip(back.coeffs, L.coeffs)
    )
    assert back.order == L.order == 2


def test_companion_and_associated(ctx5):
    """B_q = (q-1) C_q + Id links the two matrix forms of one operator."""
    Ls = _random_sigma_operator(ctx5, 3, 5, seed=2)
    Ld = sigma_to_delta(Ls)
    dom = Ls.coeffs[0].domain
    D = Ls.coeffs[0].degree_bound
    C = companion_matrix(QDiffOperatorSigma([c for c in Ld.coeffs]))
    B = associated_matrix(Ld)
    qm1 = dom.q_power(1) + (-dom.one)
    lhs = B - SeriesMatrix.identity(dom, 3, D)
    rhs = C.map(lambda e: e.scale_coeff(qm1))
    assert (lhs - rhs).is_zero()


def test_companion_requires_order():
    with pytest.raises(ValueError):
        companion_matrix(QDiffOperatorSigma([]))


def test_series_matrix_shape_checks(ctx5):
    dom = RatFuncDomain(ctx5)
    with pytest.raises(ValueError):
        SeriesMatrix([[TruncSeries.one(dom, 2)], []])
    a = SeriesMatrix.identity(dom, 2, 3)
    b = SeriesMatrix.identity(dom, 3, 3)
    with pytest.raises(ValueError):
        a * b


def test_confluence(ctx_pair):
    assert check_confluence_order1(ctx_pair, 20)


def test_confluence_requires_hypothesis():
    ctx = MAdicContext.for_alpha(5, Fraction(1, 3))
    with pytest.raises(HypothesisError):
        check_confluence_order1(ctx, 10)


def test_confluence_negative_control(ctx5):
    """Perturbing the differential system matrix breaks the identity."""
    D = 16
    H = order1_transition_matrix(ctx5, D)
    Hbar = ev_series(H)
    B = ev_confluence_matrix(ctx5, D)
    dom = RationalDomain()
    Bbad = B + TruncSeries(dom, [Fraction(0), Fraction(1)], D)
    residual = (
        delta_z(Hbar)
        - Bbad * Hbar
        + (Hbar * substitute_z_power(Bbad, ctx5.p)).scale_coeff(Fraction(ctx5.p))
    )
    assert not residual.is_zero()


def test_certificate_serialization():
    cert = FrobeniusCertificate("demo", 1, 1, 8, "exact", [None], True)
    d = cert.to_dict()
    assert d["normalization"] == "H(0) = identity"
    assert list(d)[0] == "kind"
