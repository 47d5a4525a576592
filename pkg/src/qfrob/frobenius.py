"""q-difference operators, companion/associated matrices, and the
strong-Frobenius-structure checkers.

The order-1 transition matrix H = f_alpha / F_q(f_alpha) intertwines the
hypergeometric system with its Frobenius pullback:

    sigma_q(H) * A^(F^h) = A * H       (checked to O(z^D), exactly)

and specializes at q = 1 to the differential Frobenius equation

    delta(ev H) = B * (ev H) - p * (ev H) * B(z^p),   B(z) = alpha*z/(1-z).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import RatFunc
from .madic import INFINITY, Valuation
from .qseries import (
    RatFuncDomain,
    RationalDomain,
    TruncSeries,
    clear_denominators,
    delta_q,
    delta_z,
    ev_series,
    f_alpha_cleared,
    f_alpha_series,
    frobenius_series,
    gauss_valuation,
    invert_series,
    sigma_q,
    substitute_z_power,
)


class PreconditionError(ValueError):
    """An input failed the documented precondition of a checker."""


@dataclass
class QDiffOperatorSigma:
    """sigma_q^n + a_1 sigma_q^(n-1) + ... + a_n, coefficients as series."""

    coeffs: list  # a_1..a_n, each a TruncSeries

    @property
    def order(self):
        return len(self.coeffs)


@dataclass
class QDiffOperatorDelta:
    """delta_q^n + b_1 delta_q^(n-1) + ... + b_n."""

    coeffs: list

    @property
    def order(self):
        return len(self.coeffs)


class SeriesMatrix:
    """Square matrix of truncated series sharing one domain and bound."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.rows = [list(r) for r in rows]

    @property
    def dim(self):
        return len(self.rows)

    @classmethod
    def scalar(cls, entry):
        return cls([[entry]])

    @classmethod
    def identity(cls, domain, n, D):
        return cls(
            [
                [
                    TruncSeries.one(domain, D)
                    if i == j
                    else TruncSeries.zero(domain, D)
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, fn):
        return SeriesMatrix([[fn(e) for e in row] for row in self.rows])

    def __mul__(self, other):
        n = self.dim
        if isinstance(other, SeriesMatrix):
            if other.dim != n:
                raise ValueError("dimension mismatch")
            out = []
            for i in range(n):
                row = []
                for j in range(n):
                    acc = self.rows[i][0] * other.rows[0][j]
                    for k in range(1, n):
                        acc = acc + self.rows[i][k] * other.rows[k][j]
                    row.append(acc)
                out.append(row)
            return SeriesMatrix(out)
        # vector (list of series)
        if len(other) != n:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(n):
            acc = self.rows[i][0] * other[0]
            for k in range(1, n):
                acc = acc + self.rows[i][k] * other[k]
            out.append(acc)
        return out

    def __sub__(self, other):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return SeriesMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def is_zero(self):
        return all(e.is_zero() for row in self.rows for e in row)


def companion_matrix(L):
    """Companion form of a sigma_q operator: ones below the diagonal,
    last row -a_n .. -a_1."""
    n = L.order
    if n == 0:
        raise ValueError("operator must have positive order")
    domain = L.coeffs[0].domain
    D = L.coeffs[0].degree_bound
    rows = []
    for i in range(n - 1):
        rows.append(
            [
                TruncSeries.one(domain, D)
                if j == i + 1
                else TruncSeries.zero(domain, D)
                for j in range(n)
            ]
        )
    rows.append([-L.coeffs[n - 1 - j] for j in range(n)])
    return SeriesMatrix(rows)


def associated_matrix(L):
    """B_q = (q-1) C_q + Id for a delta_q operator: diagonal 1,
    superdiagonal (q-1), last row -(q-1)b_n .. -(q-1)b_1 + 1."""
    n = L.order
    domain = L.coeffs[0].domain
    D = L.coeffs[0].degree_bound
    qm1 = domain.q_power(1) + (-domain.one)
    rows = []
    for i in range(n - 1):
        row = []
        for j in range(n):
            if j == i:
                row.append(TruncSeries.one(domain, D))
            elif j == i + 1:
                row.append(TruncSeries.constant(domain, qm1, D))
            else:
                row.append(TruncSeries.zero(domain, D))
        rows.append(row)
    last = []
    for j in range(n):
        e = (-L.coeffs[n - 1 - j]).scale_coeff(qm1)
        if j == n - 1:
            e = e + TruncSeries.one(domain, D)
        last.append(e)
    rows.append(last)
    return SeriesMatrix(rows)


def delta_to_sigma(L):
    """Rewrite delta_q^n + sum b_i delta_q^(n-i) in sigma_q powers.

    Uses delta_q^j = (q-1)^(-j) (sigma_q - 1)^j; constants commute with
    the z-coefficients, so the change of basis is a triangular linear map.
    """
    n = L.order
    domain = L.coeffs[0].domain
    D = L.coeffs[0].degree_bound
    qm1_inv = _q_minus_one(domain).inverse()
    # c_j = coefficient of delta^j (c_n = 1)
    cs = [L.coeffs[n - 1 - j] if j < n else TruncSeries.one(domain, D) for j in range(n + 1)]
    sig = [TruncSeries.zero(domain, D) for _ in range(n + 1)]
    for j in range(n + 1):
        scale = qm1_inv**j if j else RatFunc.one()
        for l in range(j + 1):
            term = cs[j].scale_coeff(scale * _binom(j, l) * (-1) ** (j - l))
            sig[l] = sig[l] + term
    # normalize leading coefficient of sigma^n to 1: it is (q-1)^(-n)
    lead = _q_minus_one(domain) ** n
    a = [sig[n - i].scale_coeff(lead) for i in range(1, n + 1)]
    return QDiffOperatorSigma(a)


def sigma_to_delta(L):
    """Inverse conversion via sigma_q^i = sum_j binom(i,j) (q-1)^j delta_q^j."""
    n = L.order
    domain = L.coeffs[0].domain
    D = L.coeffs[0].degree_bound
    qm1 = _q_minus_one(domain)
    a = [L.coeffs[n - 1 - i] if i < n else TruncSeries.one(domain, D) for i in range(n + 1)]
    dl = [TruncSeries.zero(domain, D) for _ in range(n + 1)]
    for i in range(n + 1):
        for j in range(i + 1):
            term = a[i].scale_coeff((qm1**j if j else RatFunc.one()) * _binom(i, j))
            dl[j] = dl[j] + term
    lead_inv = (qm1**n).inverse()
    b = [dl[n - i].scale_coeff(lead_inv) for i in range(1, n + 1)]
    return QDiffOperatorDelta(b)


def _q_minus_one(domain):
    return domain.q_power(1) + (-domain.one)


def _binom(n, k):
    import math

    return math.comb(n, k)


@dataclass
class FrobeniusCertificate:
    """Evidence for sigma_q(H) A^(F^h) = A H to O(z^D)."""

    description: str
    period: int
    dimension: int
    degree: int
    mode: str
    residual_valuations: list  # per entry: None for an exactly-zero residual
    passed: bool
    normalization: str = "H(0) = identity"

    def to_dict(self):
        return {
            "kind": "frobenius_structure",
            "description": self.description,
            "period": self.period,
            "dimension": self.dimension,
            "degree": self.degree,
            "mode": self.mode,
            "residual_valuations": self.residual_valuations,
            "normalization": self.normalization,
            "pass": self.passed,
        }


def hypergeometric_system_matrix(ctx, D, frob_power=0):
    """A = (1-z)/(1 - q^alpha z) as a 1x1 matrix of series (t^a = q^alpha);
    frob_power h replaces (z, t) by (z^(p^h), t^(p^h))."""
    dom = RatFuncDomain(ctx)
    one = TruncSeries.one(dom, D)
    z = TruncSeries(dom, [RatFunc.zero(), RatFunc.one()], D)
    t_a = RatFunc.monomial(ctx.a)
    A = (one - z) * invert_series(one - z.scale_coeff(t_a))
    if frob_power:
        A = frobenius_series(A, frob_power)
    return SeriesMatrix.scalar(A)


def order1_transition_matrix(ctx, D):
    """H = f_alpha * (F_q f_alpha)^(-1) to O(z^D), H(0) = 1."""
    ctx.require_hyp()
    dom = RatFuncDomain(ctx)
    f = f_alpha_cleared(D, ctx)
    need = (D - 1) // ctx.p + 1
    Ff = frobenius_series(f_alpha_series(need + 1, ctx, dom).truncate(D), 1)
    inv = invert_series(TruncSeries(dom, [c._reduce() for c in Ff.coeffs]))
    inv = clear_denominators(
        TruncSeries(dom, [c._reduce() for c in inv.coeffs])
    )
    return f * inv


def check_frobenius_structure(A, H, h=1, mode="exact", threshold=1, description=""):
    """Certificate for sigma_q(H) A^(F^h) - A H = 0 entrywise to O(z^D).

    mode="exact" demands the residual vanish identically; mode="valuation"
    accepts entries of Gauss valuation >= threshold.
    """
    if A.dim != H.dim:
        raise ValueError("dimension mismatch")
    n = A.dim
    D = A[0, 0].degree_bound
    _require_invertible_constant_term(H)
    AF = A.map(lambda e: frobenius_series(e, h))
    R = H.map(sigma_q) * AF - A * H
    vals = []
    passed = True
    for i in range(n):
        for j in range(n):
            entry = R[i, j]
            if entry.is_zero():
                vals.append(None)
                continue
            v = gauss_valuation(entry)
            vals.append(None if v.is_infinite else v.value)
            if mode == "exact":
                passed = False
            else:
                if not v >= threshold:
                    passed = False
    return FrobeniusCertificate(
        description=description or f"{n}x{n} system",
        period=h,
        dimension=n,
        degree=D,
        mode=mode,
        residual_valuations=vals,
        passed=passed,
    )


def _require_invertible_constant_term(H):
    n = H.dim
    const = [[H[i, j].coeffs[0] for j in range(n)] for i in range(n)]
    det = _det_ratfunc(const)
    if det.is_zero():
        raise PreconditionError("H(0) is not invertible")


def _det_ratfunc(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    det = RatFunc.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = M[0][j] * _det_ratfunc(minor)
        det = det + (term if j % 2 == 0 else -term)
    return det


def check_semilinear_action(A, H, fvec, h=1, frob_fvec=None):
    """True iff psi(f) = H * F^h(f) is again a solution of sigma_q(Y) = A Y.

    Raises PreconditionError when fvec is not a solution to begin with.

    frob_fvec, when given, stands in for F^h(fvec); because sigma_q and F
    commute, the image is characterized as a solution of the conjugate
    system sigma_q(Y) = A^(F^h) Y, and that is verified exactly.  Callers
    use this to supply the image over a small common denominator instead
    of the blown-up one a direct coefficientwise F would produce.
    """
    if A.dim != H.dim or len(fvec) != A.dim:
        raise ValueError("dimension mismatch")
    lhs = [sigma_q(f) for f in fvec]
    rhs = A * fvec
    if any(not (a - b).is_zero() for a, b in zip(lhs, rhs)):
        raise PreconditionError("fvec does not solve sigma_q(Y) = A Y")
    if frob_fvec is None:
        frob_fvec = [frobenius_series(f, h) for f in fvec]
    else:
        if len(frob_fvec) != A.dim:
            raise ValueError("dimension mismatch")
        AF = A.map(lambda e: frobenius_series(e, h))
        lhs = [sigma_q(g) for g in frob_fvec]
        rhs = AF * frob_fvec
        if any(not (a - b).is_zero() for a, b in zip(lhs, rhs)):
            raise PreconditionError(
                "frob_fvec does not solve the conjugate system"
            )
    psi = H * frob_fvec
    lhs = [sigma_q(g) for g in psi]
    rhs = A * psi
    return all((a - b).is_zero() for a, b in zip(lhs, rhs))


def ev_confluence_matrix(ctx, D):
    """B(z) = alpha * z/(1-z) as a series over exact rationals."""
    dom = RationalDomain()
    al = ctx.alpha
    return TruncSeries(dom, [Fraction(0)] + [al] * (D - 1), D)


def check_confluence_order1(ctx, D, with_ev_functoriality=True):
    """delta(ev H) = B (ev H) - p (ev H) B(z^p), with B = alpha z/(1-z).

    When with_ev_functoriality is set, additionally verifies that ev of
    the exact q-residual delta_q(H) B_q^F - C H + [p]_q H C^F equals the
    differential residual coefficientwise (both are zero on pass; the
    comparison is meaningful for perturbed inputs too).
    """
    ctx.require_hyp()
    H = order1_transition_matrix(ctx, D)
    Hbar = ev_series(H)
    B = ev_confluence_matrix(ctx, D)
    diff_residual = delta_z(Hbar) - B * Hbar + (Hbar * substitute_z_power(B, ctx.p)).scale_coeff(Fraction(ctx.p))
    ok = diff_residual.is_zero()
    if not with_ev_functoriality:
        return ok
    q_res = _order1_delta_residual(ctx, D, H)
    ev_q_res = ev_series(q_res)
    same = (ev_q_res - diff_residual).is_zero()
    return ok and same


def _order1_delta_residual(ctx, D, H):
    """delta_q(H) B^F - C H + [p]_q H C^F for the order-1 system.

    C = z (q^alpha - 1)/((q-1)(1 - q^alpha z)) is the delta_q companion
    entry; its ev is alpha z/(1-z).
    """
    dom = RatFuncDomain(ctx)
    one = TruncSeries.one(dom, D)
    z = TruncSeries(dom, [RatFunc.zero(), RatFunc.one()], D)
    t_a = RatFunc.monomial(ctx.a)
    ratio = RatFunc.from_one_minus_powers([ctx.a], [ctx.b])  # (1-t^a)/(1-t^b)
    C = z.scale_coeff(ratio) * invert_series(one - z.scale_coeff(t_a))
    CF = frobenius_series(C, 1)
    BF = hypergeometric_system_matrix(ctx, D, frob_power=1)[0, 0]
    p_bracket = RatFunc.from_one_minus_powers([ctx.b * ctx.p], [ctx.b])
    return delta_q(H) * BF - C * H + (H * CF).scale_coeff(p_bracket)
