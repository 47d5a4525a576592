"""Truncated power series in z over exact coefficient domains.

A TruncSeries stores exactly D coefficients (implicit O(z^D)); the
coefficient domain is a small strategy object supplying the ring
operations plus the q-specific actions: multiplication by q^n and by
[n]_q = 1 + q + ... + q^(n-1), the endomorphism t -> t^p, and the
specialization at t = 1.

Coefficient sequences of the basic hypergeometric series
f_alpha = sum_n (q^alpha; q)_n / (q; q)_n z^n are produced directly in
factored cyclotomic form (alpha = a/b, q^alpha = t^a), so building them
costs no polynomial arithmetic at all.
"""

import math
from fractions import Fraction

from .arith import (
    _HAVE_GMPY2,
    IntPoly,
    RatFunc,
    _divisors,
    _raw_divexact_one_minus_power,
    _raw_mul_sparse_binomial,
    _unpack_balanced,
    apply_psi_multiset,
)

if _HAVE_GMPY2:
    import gmpy2
from .madic import (
    INFINITY,
    MAdicContext,
    Valuation,
    is_in_localization,
    valuation_ratfunc_int,
)
from . import zqp as zqp_mod
from .zqp import ZqpElement, zqp_ev, zqp_frobenius, zqp_from_ratfunc, zqp_invert


class DomainMismatchError(ValueError):
    """Raised when combining series over different coefficient domains."""


class RatFuncDomain:
    """Exact rational functions of the root variable t (q = t^b)."""

    name = "ratfunc"

    def __init__(self, ctx):
        self.ctx = ctx

    def __eq__(self, other):
        return type(other) is RatFuncDomain and other.ctx == self.ctx

    def __hash__(self):
        return hash((self.name, self.ctx))

    @property
    def zero(self):
        return RatFunc.zero()

    @property
    def one(self):
        return RatFunc.one()

    def is_zero(self, c):
        return c.is_zero()

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def q_power(self, n):
        """q^n = t^(bn)."""
        return RatFunc.monomial(self.ctx.b * n)

    def q_bracket(self, n):
        """[n]_q = (1 - t^(bn)) / (1 - t^b), kept factored."""
        if n == 0:
            return RatFunc.zero()
        return RatFunc.from_one_minus_powers([self.ctx.b * n], [self.ctx.b])

    def frob(self, c, h=1):
        return c.substitute_power(self.ctx.p**h)

    def ev(self, c):
        return c.eval_at_one()

    def ev_domain(self):
        return RationalDomain()


class ZqpDomain:
    """Digit-truncated completion coefficients at a fixed precision."""

    name = "zqp"

    def __init__(self, ctx, N):
        self.ctx = ctx
        self.N = N

    def __eq__(self, other):
        return (
            type(other) is ZqpDomain
            and other.ctx == self.ctx
            and other.N == self.N
        )

    def __hash__(self):
        return hash((self.name, self.ctx, self.N))

    @property
    def zero(self):
        return ZqpElement.zero(self.ctx, self.N)

    @property
    def one(self):
        return ZqpElement.one(self.ctx, self.N)

    def is_zero(self, c):
        return c.is_zero()

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return zqp_invert(a)

    def q_power(self, n):
        return zqp_mod.reduce(IntPoly.monomial(1, self.ctx.b * n), self.N, self.ctx)

    def q_bracket(self, n):
        coeffs = [0] * (self.ctx.b * (n - 1) + 1) if n else []
        for k in range(n):
            coeffs[self.ctx.b * k] = 1
        return zqp_mod.reduce(IntPoly(coeffs), self.N, self.ctx)

    def frob(self, c, h=1):
        for _ in range(h):
            c = zqp_frobenius(c)
        return c

    def ev(self, c):
        return zqp_ev(c)

    def ev_domain(self):
        return ResidueDomain(self.ctx.p, self.N)


class RationalDomain:
    """Exact rational coefficients (the q -> 1 specialization target)."""

    name = "rational"
    zero = Fraction(0)
    one = Fraction(1)

    def __eq__(self, other):
        return type(other) is RationalDomain

    def __hash__(self):
        return hash(self.name)

    def is_zero(self, c):
        return c == 0

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def frob(self, c, h=1):
        return c


class ResidueDomain:
    """Integers modulo p^M."""

    name = "residue"

    def __init__(self, p, M):
        self.p = p
        self.M = M
        self.modulus = p**M

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other.p == self.p
            and other.M == self.M
        )

    def __hash__(self):
        return hash((self.name, self.p, self.M))

    zero = 0
    one = 1

    def is_zero(self, c):
        return c % self.modulus == 0

    def add(self, a, b):
        return (a + b) % self.modulus

    def neg(self, a):
        return -a % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def inv(self, a):
        return pow(a, -1, self.modulus)

    def frob(self, c, h=1):
        return c


class PrimeFieldDomain(ResidueDomain):
    """Integers modulo p (the relation-finder coefficient field)."""

    name = "primefield"

    def __init__(self, p):
        super().__init__(p, 1)


class TruncSeries:
    """Exactly D coefficients c_0..c_{D-1} over one coefficient domain."""

    __slots__ = ("domain", "coeffs")

    def __init__(self, domain, coeffs, D=None):
        coeffs = list(coeffs)
        if D is not None:
            coeffs = coeffs[:D]
            coeffs += [domain.zero] * (D - len(coeffs))
        self.domain = domain
        self.coeffs = coeffs

    @classmethod
    def constant(cls, domain, c, D):
        return cls(domain, [c], D)

    @classmethod
    def one(cls, domain, D):
        return cls(domain, [domain.one], D)

    @classmethod
    def zero(cls, domain, D):
        return cls(domain, [], D)

    @property
    def degree_bound(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def _check(self, other):
        if self.domain != other.domain:
            raise DomainMismatchError("coefficient domains differ")

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        D = min(len(self.coeffs), len(other.coeffs))
        d = self.domain
        return all(
            d.is_zero(d.add(a, d.neg(b)))
            for a, b in zip(self.coeffs[:D], other.coeffs[:D])
        )

    def is_zero(self):
        return all(self.domain.is_zero(c) for c in self.coeffs)

    def __add__(self, other):
        self._check(other)
        D = min(len(self.coeffs), len(other.coeffs))
        d = self.domain
        return TruncSeries(
            d, [d.add(a, b) for a, b in zip(self.coeffs[:D], other.coeffs[:D])]
        )

    def __neg__(self):
        return TruncSeries(self.domain, [self.domain.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        d = self.domain
        if isinstance(d, RatFuncDomain):
            fast = _uniform_packed_mul(self, other)
            if fast is not None:
                return fast
        D = min(len(self.coeffs), len(other.coeffs))
        out = [d.zero] * D
        for i, a in enumerate(self.coeffs[:D]):
            if d.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs[: D - i]):
                if not d.is_zero(b):
                    out[i + j] = d.add(out[i + j], d.mul(a, b))
        return TruncSeries(d, out)

    def scale_coeff(self, c):
        d = self.domain
        return TruncSeries(d, [d.mul(c, x) for x in self.coeffs])

    def shift_z(self, k):
        """Multiply by z^k (coefficients beyond the bound drop)."""
        D = len(self.coeffs)
        return TruncSeries(self.domain, [self.domain.zero] * k + self.coeffs, D)

    def truncate(self, D):
        return TruncSeries(self.domain, self.coeffs, D)

    def __repr__(self):
        return f"TruncSeries({self.domain.name}, D={len(self.coeffs)})"


def _uniform_cyc_profile(f):
    """The shared cyclotomic multiset if all nonzero coefficients agree."""
    cyc = None
    for c in f.coeffs:
        if c.is_zero():
            continue
        if c.dpoly.coeffs != (1,):
            return None
        key = tuple(sorted(c.cyc.items()))
        if cyc is None:
            cyc = key
        elif key != cyc:
            return None
    return () if cyc is None else cyc


def _uniform_packed_mul(f, g):
    """Convolution with one GMP multiply per term when each factor series
    keeps all its coefficients over a single shared denominator.

    Every coefficient is packed once (numerator times the integer that
    aligns its scale to the series-wide common denominator L); the limb
    width is sized from L1-norm bounds so balanced unpacking is exact.
    """
    if not _HAVE_GMPY2:
        return None
    prof_f = _uniform_cyc_profile(f)
    prof_g = _uniform_cyc_profile(g)
    if prof_f is None or prof_g is None:
        return None
    D = min(len(f.coeffs), len(g.coeffs))
    dom = f.domain
    if D == 0:
        return TruncSeries(dom, [])
    packed = []
    for s in (f, g):
        L = math.lcm(*(c.scale.denominator for c in s.coeffs[:D] if not c.is_zero()), 1)
        xs, l1max, degmax = [], 1, 0
        for c in s.coeffs[:D]:
            if c.is_zero():
                xs.append(None)
                continue
            k = c.scale.numerator * (L // c.scale.denominator)
            l1 = sum(abs(x) for x in c.num.coeffs) * abs(k)
            l1max = max(l1max, l1)
            degmax = max(degmax, c.num.degree)
            xs.append((c.num.coeffs, k))
        packed.append((L, xs, l1max, degmax))
    (Lf, xf, l1f, df), (Lg, xg, l1g, dg) = packed
    B = l1f.bit_length() + l1g.bit_length() + D.bit_length() + 2
    def pack_all(xs):
        out = []
        for item in xs:
            if item is None:
                out.append(None)
            else:
                coeffs, k = item
                out.append(
                    (
                        gmpy2.pack([c if c >= 0 else 0 for c in coeffs], B)
                        - gmpy2.pack([-c if c < 0 else 0 for c in coeffs], B)
                    )
                    * k
                )
        return out
    def sparse_terms(xs):
        # coefficients with very few terms multiply faster as shift-adds
        out = []
        for item in xs:
            if item is None:
                out.append(None)
                continue
            coeffs, k = item
            terms = [(e, c) for e, c in enumerate(coeffs) if c]
            out.append(
                [(e * B, c * k) for e, c in terms] if len(terms) <= 3 else None
            )
        return out
    Xf, Xg = pack_all(xf), pack_all(xg)
    Sf, Sg = sparse_terms(xf), sparse_terms(xg)
    cyc = {}
    for d_, e in list(prof_f) + list(prof_g):
        cyc[d_] = cyc.get(d_, 0) + e
    scale = Fraction(1, Lf * Lg)
    nlimbs = df + dg + 1
    zero = gmpy2.mpz(0)
    out = []
    for k in range(D):
        acc = zero
        for i in range(k + 1):
            a = Xf[i]
            b = Xg[k - i]
            if a is None or b is None:
                continue
            sb = Sg[k - i]
            if sb is not None:
                for shift, c in sb:
                    acc += (a << shift) * c
                continue
            sa = Sf[i]
            if sa is not None:
                for shift, c in sa:
                    acc += (b << shift) * c
                continue
            acc += a * b
        if acc == 0:
            out.append(RatFunc.zero())
        else:
            num = IntPoly(_unpack_balanced(acc, B, nlimbs))
            out.append(RatFunc(scale, num, cyc))
    return TruncSeries(dom, out)


def f_alpha_cleared(D, ctx):
    """f_alpha with every coefficient over the one common denominator
    prod_{k=1}^{D-1} (1 - t^(bk)).

    Numerators follow the one-step recurrence
    P_n = P_{n-1} (1 - t^(a+b(n-1))) / (1 - t^(bn)), so the whole series
    costs O(D * deg) integer operations and all later additions against
    these coefficients are plain polynomial additions.
    """
    ctx.require_hyp()
    a, b = ctx.a, ctx.b
    if D < 1:
        raise ValueError("D must be >= 1")
    den = {}
    for k in range(1, D):
        for d in _divisors(b * k):
            den[d] = den.get(d, 0) + 1
    cur = (1,)
    for k in range(1, D):
        cur = _raw_mul_sparse_binomial(cur, -1, b * k)
    neg = {d: -e for d, e in den.items()}
    out = [RatFunc(Fraction(1), IntPoly(cur), neg)]
    for n in range(1, D):
        cur = _raw_mul_sparse_binomial(cur, -1, a + b * (n - 1))
        cur = _raw_divexact_one_minus_power(cur, b * n)
        out.append(RatFunc(Fraction(1), IntPoly(cur), neg))
    return TruncSeries(RatFuncDomain(ctx), out)


def f_alpha_frobenius_image(D, ctx, h=1):
    """F_q^h(f_alpha) to O(z^D) over the smallest cleared denominator.

    Only the first ceil(D / p^h) coefficients of f_alpha survive the
    index map n -> n p^h, so the common denominator is built for that
    prefix instead of inheriting the full-D one (whose Frobenius image
    would blow coefficient degrees up by a factor p^h).
    """
    step = ctx.p**h
    m = (D - 1) // step + 1
    fm = f_alpha_cleared(m, ctx)
    padded = TruncSeries(
        fm.domain, list(fm.coeffs) + [RatFunc.zero()] * (D - m)
    )
    return frobenius_series(padded, h)


def clear_denominators(f):
    """Rewrite every coefficient over one shared factored denominator.

    After this pass additions inside convolutions become plain integer
    polynomial additions (no per-term expansion), which is what makes
    the degree-2p^2 residual checks tractable.
    """
    if not isinstance(f.domain, RatFuncDomain):
        return f
    M = {}
    for c in f.coeffs:
        for d, e in c.cyc.items():
            if e < 0:
                M[d] = max(M.get(d, 0), -e)
    if not M:
        return f
    neg = {d: -e for d, e in M.items()}
    out = []
    for c in f.coeffs:
        if c.is_zero():
            out.append(c)
            continue
        add = {d: M[d] + c.cyc.get(d, 0) for d in M}
        for d, e in c.cyc.items():
            if d not in M:
                add[d] = e
        num = apply_psi_multiset(c.num, add.items())
        out.append(RatFunc(c.scale, num, neg, c.dpoly, c.var))
    return TruncSeries(f.domain, out)


def series_add(f, g):
    return f + g


def series_mul(f, g):
    return f * g


def invert_series(f):
    """g with fg = 1 + O(z^D); requires an invertible constant term."""
    d = f.domain
    D = len(f.coeffs)
    c0_inv = d.inv(f.coeffs[0])
    out = [c0_inv]
    support = [k for k in range(1, D) if not d.is_zero(f.coeffs[k])]
    for n in range(1, D):
        acc = d.zero
        for k in support:
            if k > n:
                break
            acc = d.add(acc, d.mul(f.coeffs[k], out[n - k]))
        out.append(d.neg(d.mul(c0_inv, acc)) if not d.is_zero(acc) else d.zero)
    return TruncSeries(d, out)


def sigma_q(f):
    """f(z) -> f(qz): c_n multiplied by q^n."""
    d = f.domain
    if not hasattr(d, "q_power"):
        raise DomainMismatchError(f"domain {d.name} has no q action")
    return TruncSeries(
        d,
        [
            c if i == 0 or d.is_zero(c) else d.mul(d.q_power(i), c)
            for i, c in enumerate(f.coeffs)
        ],
    )


def delta_q(f):
    """(sigma_q - id)/(q - 1): c_n multiplied by [n]_q."""
    d = f.domain
    if not hasattr(d, "q_bracket"):
        raise DomainMismatchError(f"domain {d.name} has no q action")
    return TruncSeries(
        d,
        [
            d.zero if i == 0 or d.is_zero(c) else d.mul(d.q_bracket(i), c)
            for i, c in enumerate(f.coeffs)
        ],
    )


def delta_z(f):
    """z d/dz on series over exact rationals (the q = 1 limit of delta_q)."""
    return TruncSeries(f.domain, [c * n for n, c in enumerate(f.coeffs)])


def frobenius_series(f, h=1):
    """Coefficient n (with F_q^h applied) lands at z^(n p^h)."""
    d = f.domain
    D = len(f.coeffs)
    step = d.ctx.p**h if hasattr(d, "ctx") else None
    if step is None:
        raise DomainMismatchError(f"domain {d.name} has no Frobenius")
    out = [d.zero] * D
    for n, c in enumerate(f.coeffs):
        if n * step >= D:
            break
        if not d.is_zero(c):
            out[n * step] = d.frob(c, h)
    return TruncSeries(d, out)


def substitute_z_power(f, k):
    """z -> z^k without touching coefficients (used for G(z^p) style sums)."""
    d = f.domain
    D = len(f.coeffs)
    out = [d.zero] * D
    for n, c in enumerate(f.coeffs):
        if n * k >= D:
            break
        out[n * k] = c
    return TruncSeries(d, out)


def ev_series(f):
    """Coefficientwise specialization t -> 1 (or constant-digit extraction)."""
    d = f.domain
    if isinstance(d, RationalDomain):
        return f
    if not hasattr(d, "ev"):
        raise DomainMismatchError(f"domain {d.name} has no ev")
    target = d.ev_domain()
    return TruncSeries(target, [d.ev(c) for c in f.coeffs])


def gauss_valuation(f):
    """min over stored coefficients of the m-adic valuation (of the truncation)."""
    d = f.domain
    best = None
    if isinstance(d, ZqpDomain):
        for c in f.coeffs:
            v = c.valuation()
            if not v.is_infinite and (best is None or v.value < best):
                best = v.value
    elif isinstance(d, RatFuncDomain):
        for c in f.coeffs:
            v = valuation_ratfunc_int(c, d.ctx)
            if v is not None and (best is None or v < best):
                best = v
    else:
        raise DomainMismatchError(f"domain {d.name} has no m-adic valuation")
    if best is None:
        return INFINITY
    if best < 0:
        raise ValueError(f"series has a coefficient of negative valuation {best}")
    return Valuation(best)


# ---------------------------------------------------------------------------
# the basic hypergeometric coefficient family


class PochhammerRatio:
    """B^(i)(n) = F_q^(i+1) of (q^alpha; q)_n / (q; q)_n, alpha = a/b."""

    __slots__ = ("ctx", "level", "index", "value")

    def __init__(self, ctx, level, index, value):
        self.ctx = ctx
        self.level = level
        self.index = index
        self.value = value

    def __repr__(self):
        return f"PochhammerRatio(i={self.level}, n={self.index})"


def pochhammer_ratio(i, n, ctx):
    """Exact factored value of B^(i)(n); requires p = 1 (mod b), i >= -1."""
    ctx.require_hyp()
    if i < -1:
        raise ValueError("level must be >= -1")
    if n < 0:
        raise ValueError("index must be >= 0")
    mult = ctx.p ** (i + 1)
    a, b = ctx.a, ctx.b
    value = RatFunc.from_one_minus_powers(
        [mult * (a + b * k) for k in range(n)],
        [mult * b * k for k in range(1, n + 1)],
    )
    assert is_in_localization(value, ctx)
    return PochhammerRatio(ctx, i, n, value)


def f_alpha_series(D, ctx, domain=None):
    """The series sum_n B^(-1)(n) z^n to degree D in the requested domain."""
    ctx.require_hyp()
    values = [pochhammer_ratio(-1, n, ctx).value for n in range(D)]
    if domain is None or isinstance(domain, RatFuncDomain):
        return TruncSeries(domain or RatFuncDomain(ctx), values)
    if isinstance(domain, ZqpDomain):
        return TruncSeries(
            domain, [zqp_from_ratfunc(v, domain.N, ctx) for v in values]
        )
    raise DomainMismatchError(f"unsupported domain {domain.name}")


def partial_sum_F_s(s, ctx, cap=4096):
    """F_s = sum_{n < p^s} B^(-1)(n) z^n as an exact series of length p^s."""
    ctx.require_hyp()
    if ctx.p**s > cap:
        raise ValueError(f"p^s = {ctx.p ** s} exceeds the degree cap {cap}")
    return f_alpha_series(ctx.p**s, ctx)
