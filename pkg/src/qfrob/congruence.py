"""Congruence checkers for the basic hypergeometric coefficient family.

Covers the Dwork-style conditions on the ratios B^(i)(n), the truncation
congruence f_alpha F_q(F_s) = F_q(f_alpha) F_{s+1} mod m^(s+1), the
cyclotomic congruence mod phi_p(q), the mod-p Lucas recovery, and a
bounded-degree relation finder over F_p.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import (
    RatFunc,
    _divisors,
    _moebius,
    psi_madic_valuation,
)
from .madic import (
    check_mod_cyclotomic,
    check_mod_m_power,
    is_in_localization,
    valuation_below_bound,
    valuation_ratfunc_int,
    vp_fraction,
)
from .qseries import (
    PrimeFieldDomain,
    RatFuncDomain,
    TruncSeries,
    f_alpha_cleared,
    f_alpha_frobenius_image,
    f_alpha_series,
    frobenius_series,
    partial_sum_F_s,
    pochhammer_ratio,
    substitute_z_power,
)


# ---------------------------------------------------------------------------
# report types


@dataclass
class DworkReport:
    ctx: object
    ranges: dict
    cells: dict  # condition name -> {index tuple: bool}
    failing: list

    @property
    def passed(self):
        return not self.failing

    def to_dict(self):
        return {
            "kind": "dwork",
            "p": self.ctx.p,
            "alpha": f"{self.ctx.a}/{self.ctx.b}",
            "ranges": self.ranges,
            "conditions": {
                name: {
                    "checked": len(cells),
                    "failures": sorted(
                        str(ix) for ix, ok in cells.items() if not ok
                    ),
                }
                for name, cells in self.cells.items()
            },
            "pass": self.passed,
        }


@dataclass
class CongruenceReport:
    name: str
    parameters: dict
    certificates: list  # per coefficient: (index, kind, residual valuation)
    passed: bool

    def to_dict(self):
        return {
            "kind": "congruence",
            "name": self.name,
            "parameters": self.parameters,
            "coefficients": [
                {"index": ix, "certificate": kind, "residual_valuation": v}
                for ix, kind, v in self.certificates
            ],
            "pass": self.passed,
        }


@dataclass
class LucasRelation:
    """Coefficients a_0..a_r over F_p with sum_i a_i(z) g(z^(p^(i h))) = 0
    mod (p, z^D)."""

    p: int
    h: int
    polys: list  # each a list of F_p coefficients, length <= d+1
    degree_bound: int
    degree: int  # the verified truncation degree D
    verified: bool = True

    @property
    def terms(self):
        return len(self.polys)

    def to_dict(self):
        return {
            "kind": "lucas_relation",
            "p": self.p,
            "h": self.h,
            "terms": self.terms,
            "degree_bound": self.degree_bound,
            "polys": [list(a) for a in self.polys],
            "verified_degree": self.degree,
            "verified": self.verified,
        }

    def apply(self, g):
        """sum_i a_i(z) g(z^(p^(i h))) over F_p to g's length."""
        D = len(g.coeffs)
        dom = g.domain
        acc = TruncSeries.zero(dom, D)
        for i, a in enumerate(self.polys):
            gi = substitute_z_power(g, self.p ** (i * self.h))
            for j, c in enumerate(a):
                if c % self.p:
                    acc = acc + gi.shift_z(j).scale_coeff(c)
        return acc


# ---------------------------------------------------------------------------
# fast valuation lower bounds for differences of factored values
#
# For factored x, y the difference is p^v0 * Psi^common * (T - U) with T, U
# products of the leftover Psi factors.  v(x - y) >= bound reduces to the
# first k = bound - v(common part) digits of T - U in the (1-t)-expansion,
# and those digits are products of per-factor digit prefixes taken mod p^k.


@lru_cache(maxsize=None)
def _psi_digit_prefix(d, k):
    """First k digits of Psi_d(1 - s) as exact integers.

    Built from 1 - t^j = s(j - C(j,2)s + C(j,3)s^2 - ...) and Moebius
    inversion on the divisor lattice; the s-powers cancel for d > 1.
    """
    if d == 1:
        return tuple(1 if i == 1 else 0 for i in range(k))

    def unit(j):
        # (1 - (1-s)^j)/s mod s^k
        out = []
        c = j
        for i in range(k):
            out.append(Fraction(c))
            c = -c * (j - i - 1) // (i + 2)
        return out

    num = [Fraction(1)] + [Fraction(0)] * (k - 1)
    for e in _divisors(d):
        mu = _moebius(e)
        if mu == 0:
            continue
        u = unit(d // e)
        if mu == 1:
            num = _trunc_mul(num, u, k)
        else:
            num = _trunc_mul(num, _trunc_inv(u, k), k)
    assert all(x.denominator == 1 for x in num)
    return tuple(int(x) for x in num)


def _trunc_mul(a, b, k):
    out = [Fraction(0)] * k
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if i + j >= k:
                break
            out[i + j] += x * y
    return out


def _trunc_inv(a, k):
    inv0 = 1 / a[0]
    out = [inv0]
    for n in range(1, k):
        acc = Fraction(0)
        for i in range(1, n + 1):
            if i < len(a):
                acc += a[i] * out[n - i]
        out.append(-inv0 * acc)
    return out


def _leftover_digits(scale, leftover, k, modulus, p):
    """Digits mod p^k of scale * prod Psi_d^e (1-s) truncated at s^k."""
    shift = leftover.pop(1, 0)
    if shift >= k:
        return [0] * k
    s = Fraction(scale)
    poly = [s.numerator * pow(s.denominator, -1, modulus) % modulus] + [0] * (
        k - 1 - shift
    )
    width = k - shift
    for d, e in leftover.items():
        if e == 0:
            continue
        digits = [x % modulus for x in _psi_digit_prefix(d, width)]
        for _ in range(e):
            new = [0] * width
            for i, x in enumerate(poly):
                if x == 0:
                    continue
                for j in range(width - i):
                    y = digits[j]
                    if y:
                        new[i + j] = (new[i + j] + x * y) % modulus
            poly = new
    return [0] * shift + poly


def factored_difference_val_at_least(x, y, bound, ctx):
    """True iff v(x - y) >= bound, without expanding the difference.

    Falls back to the exact subtraction when either side is not in the
    factored (pure cyclotomic multiset) form.
    """
    if x.is_zero() or y.is_zero():
        other = y if x.is_zero() else x
        v = valuation_ratfunc_int(other, ctx)
        return v is None or v >= bound
    if not (x.is_factored() and y.is_factored()):
        return check_mod_m_power(x - y, bound, ctx)
    p = ctx.p
    v0 = min(vp_fraction(x.scale, p), vp_fraction(y.scale, p))
    common = {}
    for d in set(x.cyc) | set(y.cyc):
        common[d] = min(x.cyc.get(d, 0), y.cyc.get(d, 0))
    vcommon = v0 + sum(
        e * psi_madic_valuation(d, p) for d, e in common.items() if e
    )
    k = bound - vcommon
    if k <= 0:
        return True
    modulus = p**k
    pk = p**v0
    tx = _leftover_digits(
        x.scale / pk if v0 else x.scale,
        {d: x.cyc.get(d, 0) - e for d, e in common.items()},
        k,
        modulus,
        p,
    )
    ty = _leftover_digits(
        y.scale / pk if v0 else y.scale,
        {d: y.cyc.get(d, 0) - e for d, e in common.items()},
        k,
        modulus,
        p,
    )
    return all((a - b) % p ** (k - i) == 0 for i, (a, b) in enumerate(zip(tx, ty)))


# ---------------------------------------------------------------------------
# Dwork-style conditions on the ratio family


def _ratio(cache, ctx, i, n):
    key = (i, n)
    if key not in cache:
        cache[key] = pochhammer_ratio(i, n, ctx).value
    return cache[key]


def check_dwork_condition1(ctx, i, n, _cache=None):
    """B^(i)(n) / B^(i+1)(floor(n/p)) lies in the localization."""
    ctx.require_hyp()
    cache = _cache if _cache is not None else {}
    ratio = _ratio(cache, ctx, i, n) / _ratio(cache, ctx, i + 1, n // ctx.p)
    return is_in_localization(ratio, ctx)


def check_dwork_condition2(ctx, i, n, m, s, _cache=None):
    """The ratio of condition (1) is m^(s+1)-stable under n -> n + m p^(s+1)."""
    ctx.require_hyp()
    if m == 0:
        return True
    p = ctx.p
    cache = _cache if _cache is not None else {}
    x = _ratio(cache, ctx, i, n + m * p ** (s + 1)) / _ratio(
        cache, ctx, i + 1, n // p + m * p**s
    )
    y = _ratio(cache, ctx, i, n) / _ratio(cache, ctx, i + 1, n // p)
    return factored_difference_val_at_least(x, y, s + 1, ctx)


def check_dwork_condition3(ctx, i, n, _cache=None):
    """B^(i)(n) itself lies in the localization."""
    cache = _cache if _cache is not None else {}
    return is_in_localization(_ratio(cache, ctx, i, n), ctx)


def check_dwork_condition4(ctx, i, _cache=None):
    """B^(i)(0) is a unit (it equals 1)."""
    cache = _cache if _cache is not None else {}
    v = _ratio(cache, ctx, i, 0)
    return v == RatFunc.one() and valuation_ratfunc_int(v, ctx) == 0


def run_dwork_checks(ctx, n_max=10, m_max=5, s_max=2, i_max=1):
    """All four conditions over the requested index box, as one report."""
    ctx.require_hyp()
    cache = {}
    cells = {"condition1": {}, "condition2": {}, "condition3": {}, "condition4": {}}
    for i in range(-1, i_max + 1):
        cells["condition4"][(i,)] = check_dwork_condition4(ctx, i, cache)
        for n in range(n_max + 1):
            cells["condition1"][(i, n)] = check_dwork_condition1(ctx, i, n, cache)
            cells["condition3"][(i, n)] = check_dwork_condition3(ctx, i, n, cache)
            for s in range(s_max + 1):
                for m in range(1, m_max + 1):
                    cells["condition2"][(i, n, m, s)] = check_dwork_condition2(
                        ctx, i, n, m, s, cache
                    )
    failing = [
        (name, ix)
        for name, cs in cells.items()
        for ix, ok in cs.items()
        if not ok
    ]
    return DworkReport(
        ctx=ctx,
        ranges={"n_max": n_max, "m_max": m_max, "s_max": s_max, "i_max": i_max},
        cells=cells,
        failing=failing,
    )


def check_dwork_conclusion(ctx, r, s, D):
    """F(z) sum_{k=rp^s}^{(r+1)p^s-1} B^(0)(k) z^(pk) matches
    G(z^p) sum_{k=rp^(s+1)}^{(r+1)p^(s+1)-1} B^(-1)(k) z^k
    modulo B^(s)(r) m^(s+1), coefficientwise to O(z^D)."""
    ctx.require_hyp()
    p = ctx.p
    dom = RatFuncDomain(ctx)
    pivot = pochhammer_ratio(s, r, ctx).value
    if pivot.is_zero():
        raise ValueError("pivot ratio is zero")
    v_pivot = valuation_ratfunc_int(pivot, ctx)
    f = f_alpha_cleared(D, ctx)
    G_zp = f_alpha_frobenius_image(D, ctx)
    # both window sums are masks of the cleared series: B^(0)(k) z^(pk)
    # is the z^(pk) coefficient of G(z^p), B^(-1)(k) z^k one of f
    lo1, hi1 = p * r * p**s, p * (r + 1) * p**s
    S1 = [
        c if lo1 <= n < hi1 else RatFunc.zero()
        for n, c in enumerate(G_zp.coeffs)
    ]
    lo2, hi2 = r * p ** (s + 1), (r + 1) * p ** (s + 1)
    S2 = [
        c if lo2 <= n < hi2 else RatFunc.zero()
        for n, c in enumerate(f.coeffs)
    ]
    diff = f * TruncSeries(dom, S1) - G_zp * TruncSeries(dom, S2)
    certs = []
    passed = True
    for ix, c in enumerate(diff.coeffs):
        if c.is_zero():
            certs.append((ix, "zero", None))
            continue
        v = valuation_below_bound(c, s + 1 + v_pivot, ctx)
        if v is None:
            certs.append((ix, "valuation-bound", None))
        else:
            certs.append((ix, "valuation-bound", v - v_pivot))
            passed = False
    return CongruenceReport(
        name="dwork-conclusion",
        parameters={"p": p, "alpha": f"{ctx.a}/{ctx.b}", "r": r, "s": s, "D": D},
        certificates=certs,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# truncation and cyclotomic congruences


def check_truncation_congruence(ctx, s, D, rhs_truncation=None):
    """f_alpha F_q(F_s) - F_q(f_alpha) F_(s+1) = 0 mod m^(s+1), O(z^D).

    The partial sums carry p^s and p^(s+1) terms respectively.
    rhs_truncation overrides the right-hand partial-sum length (the
    negative control in the tests shortens it and must fail).
    """
    ctx.require_hyp()
    p = ctx.p
    dom = RatFuncDomain(ctx)
    f = f_alpha_cleared(D, ctx)
    Ff = f_alpha_frobenius_image(D, ctx)
    # the partial sums are truncations of f_alpha and F_q(f_alpha), so
    # masking the already-cleared series keeps every convolution and the
    # final subtraction on shared-denominator coefficients
    m_lhs = min(p**s, (D - 1) // p + 1)
    lhs_factor = TruncSeries(
        dom,
        [c if n < m_lhs * p else RatFunc.zero() for n, c in enumerate(Ff.coeffs)],
    )
    n_rhs = p ** (s + 1) if rhs_truncation is None else rhs_truncation
    n_rhs = min(n_rhs, D)
    rhs_factor = TruncSeries(
        dom,
        [c if n < n_rhs else RatFunc.zero() for n, c in enumerate(f.coeffs)],
    )
    diff = f * lhs_factor - Ff * rhs_factor
    certs = []
    passed = True
    for ix, c in enumerate(diff.coeffs):
        if c.is_zero():
            certs.append((ix, "zero", None))
            continue
        v = valuation_below_bound(c, s + 1, ctx)
        certs.append((ix, "valuation-bound", v))
        if v is not None:
            passed = False
    return CongruenceReport(
        name="truncation",
        parameters={"p": p, "alpha": f"{ctx.a}/{ctx.b}", "s": s, "D": D},
        certificates=certs,
        passed=passed,
    )


def check_cyclotomic_congruence(ctx, D):
    """B^(-1)(np+r) - B^(0)(n) B^(-1)(r) lies in phi_p(q) Z_(q,p) for every
    index below D; each coefficient records which certificate applied."""
    ctx.require_hyp()
    p = ctx.p
    certs = []
    passed = True
    for N in range(D):
        n, r = divmod(N, p)
        if n == 0:
            certs.append((N, "zero", None))
            continue
        X = (
            pochhammer_ratio(-1, N, ctx).value
            - pochhammer_ratio(0, n, ctx).value * pochhammer_ratio(-1, r, ctx).value
        )
        if X.is_zero():
            certs.append((N, "zero", None))
            continue
        if check_mod_cyclotomic(X, ctx):
            certs.append((N, "exact-divisibility", None))
            continue
        v = valuation_ratfunc_int(X, ctx)
        if v is not None and v >= 1:
            certs.append((N, "valuation-bound", v))
        else:
            certs.append((N, "failed", v))
            passed = False
    return CongruenceReport(
        name="cyclotomic",
        parameters={"p": p, "alpha": f"{ctx.a}/{ctx.b}", "D": D},
        certificates=certs,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# mod-p recovery and the relation finder


def ev_mod_p_series(ctx, D):
    """g = ev(f_alpha) mod p: coefficients (alpha)_n / n! reduced mod p."""
    dom = PrimeFieldDomain(ctx.p)
    out = []
    c = Fraction(1)
    for n in range(D):
        if n:
            c *= Fraction(ctx.a + ctx.b * (n - 1), ctx.b * n)
        out.append(_frac_mod_p(c, ctx.p))
    return TruncSeries(dom, out)


def _frac_mod_p(x, p):
    if x.denominator % p == 0:
        raise ValueError(f"denominator of {x} not invertible mod {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


def recover_p_lucas(ctx, D):
    """The mod-p shadow of the cyclotomic congruence:
    g(z) = A_p(1,z) g(z^p) mod (p, z^D) with A_p(1,z) of degree < p."""
    ctx.require_hyp()
    p = ctx.p
    g = ev_mod_p_series(ctx, D)
    A = [g.coeffs[n] for n in range(min(p, D))]
    rel = LucasRelation(
        p=p,
        h=1,
        polys=[[1], [(-c) % p for c in A]],
        degree_bound=p - 1,
        degree=D,
    )
    rel.verified = rel.apply(g).is_zero()
    return rel


def find_relation(g, h, r, d, D=None):
    """Search for nonzero a_0..a_r over F_p, deg a_i <= d, with
    sum_i a_i(z) g(z^(p^(ih))) = 0 mod (p, z^D); None when no relation
    survives verification.

    The solving window defaults to 2 (r+1)(d+1) so truncation artifacts
    cannot masquerade as relations; among the nullspace basis the vector
    with lexicographically smallest support is returned.
    """
    p = g.domain.p
    unknowns = (r + 1) * (d + 1)
    if D is None:
        D = 2 * unknowns
    if len(g.coeffs) < D:
        raise ValueError(
            f"series too short: need {D} coefficients, got {len(g.coeffs)}"
        )
    cols = []
    for i in range(r + 1):
        step = p ** (i * h)
        base = [0] * D
        for n, c in enumerate(g.coeffs):
            if n * step >= D:
                break
            base[n * step] = c % p
        for j in range(d + 1):
            cols.append([0] * j + base[: D - j])
    basis = _nullspace_mod_p([[col[row] for col in cols] for row in range(D)], p)
    if not basis:
        return None
    best = min(basis, key=lambda v: tuple(i for i, x in enumerate(v) if x))
    lead = next(x for x in best if x)
    inv = pow(lead, -1, p)
    best = [x * inv % p for x in best]
    polys = [best[i * (d + 1) : (i + 1) * (d + 1)] for i in range(r + 1)]
    polys = [_rstrip_zeros(a) for a in polys]
    rel = LucasRelation(p=p, h=h, polys=polys, degree_bound=d, degree=D)
    rel.verified = rel.apply(TruncSeries(g.domain, g.coeffs[:D])).is_zero()
    return rel if rel.verified else None


def _rstrip_zeros(a):
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _nullspace_mod_p(rows, p):
    """Basis of the right nullspace of the matrix over F_p."""
    if not rows:
        return []
    ncols = len(rows[0])
    M = [[x % p for x in row] for row in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        sel = None
        for i in range(rank, len(M)):
            if M[i][col]:
                sel = i
                break
        if sel is None:
            continue
        M[rank], M[sel] = M[sel], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(M):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-M[i][fc]) % p
        basis.append(v)
    return basis
