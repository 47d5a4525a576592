"""Exact dense polynomial and rational-function arithmetic over Z and Q.

Polynomials in one variable (by convention "t", with q = t^b) are kept as
ascending coefficient tuples of Python ints; the zero polynomial is the
empty tuple.  Rational functions are held in a partially factored form:

    value = scale * num * prod_d Psi_d(t)^e_d / dpoly

where scale is an exact Fraction, num and dpoly are primitive integer
polynomials, and Psi_1 = 1 - t, Psi_d = Phi_d (the d-th cyclotomic
polynomial) for d > 1, so that 1 - t^m = prod_{d | m} Psi_d(t).  Keeping
the cyclotomic part as an exponent multiset makes the cancellations that
dominate q-Pochhammer arithmetic exact and cheap: they become integer
bookkeeping instead of polynomial gcds.

Dense products are computed by Kronecker substitution (pack coefficients
into one big integer, multiply with GMP, unpack with balanced digits),
which is exact for any signed integer coefficients.
"""

import math
from fractions import Fraction
from functools import lru_cache

try:
    import gmpy2

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover
    _HAVE_GMPY2 = False

_PACK_THRESHOLD = 24  # below this, schoolbook beats packing overhead


class VariableMismatchError(ValueError):
    """Raised when combining polynomials in different variables."""


# ---------------------------------------------------------------------------
# raw coefficient-tuple helpers


def _trim(coeffs):
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _raw_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _raw_neg(a):
    return tuple(-c for c in a)


def _raw_mul_schoolbook(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim(out)


def _raw_mul_packed(a, b):
    # Kronecker substitution t -> 2^B.  B is chosen so that every product
    # coefficient fits in a balanced digit, making the decoding unique.
    abits = max(c.bit_length() for c in a)
    bbits = max(c.bit_length() for c in b)
    B = abits + bbits + min(len(a), len(b)).bit_length() + 2
    A = gmpy2.pack([c if c >= 0 else 0 for c in a], B) - gmpy2.pack(
        [-c if c < 0 else 0 for c in a], B
    )
    Bv = gmpy2.pack([c if c >= 0 else 0 for c in b], B) - gmpy2.pack(
        [-c if c < 0 else 0 for c in b], B
    )
    return _unpack_balanced(A * Bv, B, len(a) + len(b) - 1)


def _unpack_balanced(P, B, n):
    neg = P < 0
    if neg:
        P = -P
    limbs = list(gmpy2.unpack(gmpy2.mpz(P), B))
    half = 1 << (B - 1)
    full = 1 << B
    out = []
    carry = 0
    for limb in limbs:
        v = int(limb) + carry
        if v >= half:
            out.append(v - full)
            carry = 1
        else:
            out.append(v)
            carry = 0
    if carry:
        out.append(carry)
    if neg:
        out = [-c for c in out]
    del out[n:]
    return _trim(out)


def _raw_mul(a, b):
    if not a or not b:
        return ()
    if len(a) < len(b):
        a, b = b, a
    if not any(b[:-1]):  # monomial: a shift and a scalar multiply
        c = b[-1]
        shifted = (0,) * (len(b) - 1) + a
        if c == 1:
            return shifted
        return (0,) * (len(b) - 1) + tuple(x * c for x in a)
    if _HAVE_GMPY2 and len(a) >= _PACK_THRESHOLD:
        return _raw_mul_packed(a, b)
    return _raw_mul_schoolbook(a, b)


def _raw_mul_sparse_binomial(a, c, m):
    """a * (1 + c*t^m) for c = +-1, in O(len(a))."""
    out = [0] * (len(a) + m)
    for i, ai in enumerate(a):
        out[i] += ai
        out[i + m] += c * ai
    return _trim(out)


def _raw_divexact_one_minus_power(a, m):
    """Exact quotient a / (1 - t^m) in O(len(a)): q_i = a_i + q_{i-m}."""
    if not a:
        return ()
    n = len(a) - m
    if n <= 0:
        raise ValueError("inexact polynomial division")
    q = [0] * n
    for i in range(n):
        q[i] = a[i] + (q[i - m] if i >= m else 0)
    for i in range(n, len(a)):
        if a[i] != (-q[i - m] if i >= m else 0):
            raise ValueError("inexact polynomial division")
    return _trim(q)


def _raw_divexact(a, b):
    """Exact quotient a / b in Z[t]; raises if the division is not exact."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return ()
    if len(a) < len(b):
        raise ValueError("inexact polynomial division")
    if len(b) == 1:
        c = b[0]
        if any(x % c for x in a):
            raise ValueError("inexact polynomial division")
        return tuple(x // c for x in a)
    if _HAVE_GMPY2 and len(a) >= _PACK_THRESHOLD:
        q = _divexact_packed(a, b)
        if q is not None:
            return q
    return _divexact_classical(a, b)


def _divexact_packed(a, b):
    abits = max(c.bit_length() for c in a)
    B = abits + 64
    while B < (abits + 64) * 16:
        A = gmpy2.pack([c if c >= 0 else 0 for c in a], B) - gmpy2.pack(
            [-c if c < 0 else 0 for c in a], B
        )
        Bv = gmpy2.pack([c if c >= 0 else 0 for c in b], B) - gmpy2.pack(
            [-c if c < 0 else 0 for c in b], B
        )
        if Bv == 0 or A % Bv:
            return None
        q = _unpack_balanced(A // Bv, B, len(a) - len(b) + 1)
        if _raw_mul(q, b) == tuple(a):
            return q
        B *= 2  # quotient coefficients overflowed the digit width
    return None


def _divexact_classical(a, b):
    rem = list(a)
    lead = b[-1]
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        if rem[i] == 0:
            continue
        if rem[i] % lead:
            raise ValueError("inexact polynomial division")
        c = rem[i] // lead
        q[i - db] = c
        for j, bj in enumerate(b):
            rem[i - db + j] -= c * bj
    if any(rem):
        raise ValueError("inexact polynomial division")
    return _trim(q)


def _raw_mod(a, b):
    """Remainder of a modulo b (b monic up to sign)."""
    lead = b[-1]
    assert lead in (1, -1)
    rem = list(a)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        if rem[i] == 0:
            continue
        c = rem[i] * lead  # lead is +-1
        for j, bj in enumerate(b):
            rem[i - db + j] -= c * bj
    return _trim(rem[:db])


def _raw_content(a):
    g = 0
    for c in a:
        g = math.gcd(g, c)
        if g == 1:
            return 1
    return g


def _raw_eval_int(a, x):
    v = 0
    for c in reversed(a):
        v = v * x + c
    return v


# ---------------------------------------------------------------------------
# cyclotomic polynomials


@lru_cache(maxsize=None)
def _divisors(n):
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


@lru_cache(maxsize=None)
def psi_coeffs(d):
    """Coefficients of Psi_d: 1 - t for d = 1, else the cyclotomic Phi_d.

    The product prod_{d | m} Psi_d(t) equals 1 - t^m for every m >= 1.
    """
    if d == 1:
        return (1, -1)
    # Phi_d = (t^d - 1) / prod_{e | d, e < d} Phi_e, peeled as
    # (t^d - 1)/(t^(d/p) - 1) substitutions; direct Moebius quotient:
    num = tuple([-1] + [0] * (d - 1) + [1])  # t^d - 1
    for e in _divisors(d):
        if e < d and e > 1:
            num = _raw_divexact(num, psi_coeffs(e))
    # divide off Phi_1 = t - 1
    num = _raw_divexact(num, (-1, 1))
    return num


def one_minus_power_factors(m):
    """Multiset of Psi-indices whose product is 1 - t^m (each divisor once)."""
    return _divisors(m)


@lru_cache(maxsize=None)
def psi_at_one(d):
    """Psi_d(1): 0 for d = 1, ell for prime powers ell^j, else 1."""
    if d == 1:
        return 0
    for ell in range(2, d + 1):
        if d % ell == 0:
            k = d
            while k % ell == 0:
                k //= ell
            return ell if k == 1 else 1
    return 1


def psi_madic_valuation(d, p):
    """Valuation of Psi_d in the ideal (p, 1 - t): 1 for d = 1 or d = p^j."""
    if d == 1:
        return 1
    k = d
    while k % p == 0:
        k //= p
    return 1 if k == 1 else 0


# ---------------------------------------------------------------------------
# IntPoly


class IntPoly:
    """Dense univariate polynomial over Z, ascending coefficients."""

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs=(), var="t"):
        self.var = var
        self.coeffs = _trim(tuple(coeffs))

    @classmethod
    def const(cls, c, var="t"):
        return cls((c,) if c else (), var)

    @classmethod
    def monomial(cls, c, k, var="t"):
        if c == 0:
            return cls((), var)
        return cls((0,) * k + (c,), var)

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def _check(self, other):
        if self.var != other.var:
            raise VariableMismatchError(
                f"cannot combine polynomials in {self.var!r} and {other.var!r}"
            )

    def __eq__(self, other):
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __add__(self, other):
        self._check(other)
        return IntPoly(_raw_add(self.coeffs, other.coeffs), self.var)

    def __sub__(self, other):
        self._check(other)
        return IntPoly(_raw_add(self.coeffs, _raw_neg(other.coeffs)), self.var)

    def __neg__(self):
        return IntPoly(_raw_neg(self.coeffs), self.var)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(tuple(c * other for c in self.coeffs), self.var)
        self._check(other)
        return IntPoly(_raw_mul(self.coeffs, other.coeffs), self.var)

    __rmul__ = __mul__

    def divexact(self, other):
        self._check(other)
        return IntPoly(_raw_divexact(self.coeffs, other.coeffs), self.var)

    def __call__(self, x):
        return _raw_eval_int(self.coeffs, x)

    def content(self):
        return _raw_content(self.coeffs)

    def substitute_power(self, k):
        """P(t) -> P(t^k)."""
        if k < 1:
            raise ValueError("exponent must be >= 1")
        if not self.coeffs:
            return self
        out = [0] * ((len(self.coeffs) - 1) * k + 1)
        for i, c in enumerate(self.coeffs):
            out[i * k] = c
        return IntPoly(out, self.var)

    def shift(self, k):
        """P(t) -> t^k P(t)."""
        if not self.coeffs:
            return self
        return IntPoly((0,) * k + self.coeffs, self.var)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*{self.var}" if c != 1 else self.var)
            else:
                terms.append(
                    f"{c}*{self.var}^{i}" if c != 1 else f"{self.var}^{i}"
                )
        return " + ".join(terms).replace("+ -", "- ")


def poly_add(a, b):
    return a + b


def poly_mul(a, b):
    return a * b


def poly_neg(a):
    return -a


def poly_substitute(P, k):
    """P(u) -> P(u^k), a ring homomorphism for each k >= 1."""
    return P.substitute_power(k)


def one_minus_power(m, var="t"):
    """1 - t^m."""
    return IntPoly((1,) + (0,) * (m - 1) + (-1,), var)


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def cyclotomic(p, var="q"):
    """phi_p = 1 + u + ... + u^(p-1) for p prime."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return IntPoly((1,) * p, var)


def q_bracket(n, var="q"):
    """[n]_q = 1 + q + ... + q^(n-1), with [0]_q = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return IntPoly((1,) * n, var)


def taylor_at_one(P):
    """Integers a_0..a_deg with P = sum_i a_i (1-u)^i, exactly."""
    coeffs = list(P.coeffs)
    out = []
    while coeffs:
        a = _raw_eval_int(coeffs, 1)
        out.append(a)
        # (P - P(1)) / (1 - u) by synthetic division from the top
        coeffs[0] -= a
        quot = [0] * (len(coeffs) - 1)
        acc = 0
        for i in range(len(coeffs) - 1, 0, -1):
            acc += coeffs[i]
            quot[i - 1] = -acc
        coeffs = list(_trim(quot))
    return out


def taylor_at_one_prefix(P, limit):
    """First min(limit, deg+1) coefficients of the (1-u)-expansion, lazily.

    Enough for valuation queries, which only need the expansion until the
    running minimum of v_p(a_i) + i can no longer decrease.
    """
    coeffs = list(P.coeffs)
    i = 0
    while coeffs and i < limit:
        a = _raw_eval_int(coeffs, 1)
        yield a
        coeffs[0] -= a
        quot = [0] * (len(coeffs) - 1)
        acc = 0
        for k in range(len(coeffs) - 1, 0, -1):
            acc += coeffs[k]
            quot[k - 1] = -acc
        coeffs = list(_trim(quot))
        i += 1


# ---------------------------------------------------------------------------
# generic gcd over Q[t] (primitive subresultant PRS); only used for inputs
# whose denominators are not already in factored cyclotomic form


def poly_gcd(a, b):
    """Monic-up-to-content gcd of integer polynomials (primitive part)."""
    A, B = a.coeffs, b.coeffs
    var = a.var
    if not A:
        return _primitive_positive(IntPoly(B, var))
    if not B:
        return _primitive_positive(IntPoly(A, var))
    while B:
        A, B = B, _pseudo_rem(A, B)
        if B:
            c = _raw_content(B)
            if c > 1:
                B = tuple(x // c for x in B)
    return _primitive_positive(IntPoly(A, var))


def _pseudo_rem(a, b):
    lead = b[-1]
    db = len(b) - 1
    rem = list(a)
    for i in range(len(a) - 1, db - 1, -1):
        if rem[i] == 0:
            continue
        c = rem[i]
        for k in range(i):
            rem[k] *= lead
        for j in range(db):
            rem[i - db + j] -= c * b[j]
        rem[i] = 0
    return _trim(rem[: max(db, 0)])


def _primitive_positive(P):
    if P.is_zero():
        return P
    c = P.content()
    if P.coeffs[-1] < 0:
        c = -c
    return IntPoly(tuple(x // c for x in P.coeffs), P.var)


# ---------------------------------------------------------------------------
# RatFunc


def _frac_gcd(a, b):
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    return Fraction(
        math.gcd(a.numerator, b.numerator),
        (a.denominator * b.denominator) // math.gcd(a.denominator, b.denominator),
    )


def _multiset_peel(items):
    """Split prod Psi_d^e (e >= 0) into sparse (1 - t^m) factors + a rest.

    A divisor-closed subset {d : d | m} of the multiset is exactly the
    factorization of 1 - t^m, which multiplies in O(deg) as a binomial.
    Greedy peeling from the largest index is exact for sums of such sets
    (the largest remaining index must be the top of some divisor set) and
    safely leaves a dense remainder otherwise.
    """
    counts = {}
    for d, e in items:
        if e:
            counts[d] = counts.get(d, 0) + e
    sparse = []
    dense = []
    for d in sorted(counts, reverse=True):
        while counts.get(d, 0) > 0:
            divs = _divisors(d)
            if all(counts.get(x, 0) > 0 for x in divs):
                for x in divs:
                    counts[x] -= 1
                sparse.append(d)
            else:
                dense.append((d, counts[d]))
                counts[d] = 0
    return sparse, dense


def apply_psi_multiset(P, items):
    """P * prod Psi_d^e_d for nonnegative exponents, via packed integers.

    Sparse binomial factors become shift-and-subtract on the packed
    value; the limb width is sized from L1-norm bounds so the balanced
    unpacking is provably exact.
    """
    items = [(d, e) for d, e in items if e]
    if not items:
        return P
    if P.is_zero():
        return P
    sparse, dense = _multiset_peel(items)
    deg = P.degree + sum(sparse)
    l1_bits = sum(abs(c) for c in P.coeffs).bit_length() + len(sparse)
    dense_polys = []
    for d, e in dense:
        base = psi_coeffs(d)
        deg += (len(base) - 1) * e
        l1_bits += e * sum(abs(c) for c in base).bit_length()
    if not _HAVE_GMPY2 or deg < _PACK_THRESHOLD:
        out = P.coeffs
        for m in sparse:
            out = _raw_mul_sparse_binomial(out, -1, m)
        for d, e in dense:
            base = psi_coeffs(d)
            for _ in range(e):
                out = _raw_mul(out, base)
        return IntPoly(out, P.var)
    B = l1_bits + 2
    X = gmpy2.pack([c if c >= 0 else 0 for c in P.coeffs], B) - gmpy2.pack(
        [-c if c < 0 else 0 for c in P.coeffs], B
    )
    for m in sparse:
        X -= X << (m * B)
    for d, e in dense:
        base = psi_coeffs(d)
        Y = gmpy2.pack([c if c >= 0 else 0 for c in base], B) - gmpy2.pack(
            [-c if c < 0 else 0 for c in base], B
        )
        for _ in range(e):
            X *= Y
    return IntPoly(_unpack_balanced(X, B, deg + 1), P.var)


def _psi_deg(d):
    return len(psi_coeffs(d)) - 1


_EXPAND_CACHE = {}


def expand_psi_multiset(items, var="t"):
    """Expanded product prod Psi_d^e for a tuple of (d, e>=0) pairs."""
    items = tuple(sorted((d, e) for d, e in items if e))
    if not items:
        return IntPoly((1,), var)
    cached = _EXPAND_CACHE.get((items, var))
    if cached is not None:
        return cached
    out = (1,)
    for d, e in items:
        base = psi_coeffs(d)
        for _ in range(e):
            out = _raw_mul(out, base)
    poly = IntPoly(out, var)
    if len(_EXPAND_CACHE) > 4096:
        _EXPAND_CACHE.clear()
    _EXPAND_CACHE[(items, var)] = poly
    return poly


class RatFunc:
    """Element of Q(t) as scale * num * prod Psi_d^e_d / dpoly.

    scale is an exact Fraction; num and dpoly are primitive integer
    polynomials with positive leading coefficient; cyc maps a Psi index d
    to a (possibly negative) integer exponent.  Zero is scale == 0.
    dpoly collects denominator factors of unknown factorization (user
    input); it stays 1 on every internally generated value.
    """

    __slots__ = ("scale", "num", "cyc", "dpoly", "var")

    def __init__(self, scale=Fraction(1), num=None, cyc=None, dpoly=None, var="t"):
        self.var = var
        if num is None:
            num = IntPoly((1,), var)
        if dpoly is None:
            dpoly = IntPoly((1,), var)
        if scale == 0 or num.is_zero():
            self.scale = Fraction(0)
            self.num = IntPoly((), var)
            self.cyc = {}
            self.dpoly = IntPoly((1,), var)
            return
        c = num.content()
        if scale < 0:
            c = -c  # keep scale positive; the sign lives in num
        if c != 1:
            num = IntPoly(tuple(x // c for x in num.coeffs), var)
            scale = scale * c
        self.scale = Fraction(scale)
        self.num = num
        self.cyc = {d: e for d, e in (cyc or {}).items() if e}
        self.dpoly = dpoly

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, var="t"):
        return cls(Fraction(0), IntPoly((), var), var=var)

    @classmethod
    def one(cls, var="t"):
        return cls(Fraction(1), var=var)

    @classmethod
    def from_int(cls, c, var="t"):
        return cls(Fraction(c), var=var)

    @classmethod
    def from_fraction(cls, f, var="t"):
        return cls(Fraction(f), var=var)

    @classmethod
    def from_poly(cls, P):
        return cls(Fraction(1), P, var=P.var)

    @classmethod
    def monomial(cls, k, var="t"):
        """t^k."""
        return cls(Fraction(1), IntPoly.monomial(1, k, var), var=var)

    @classmethod
    def from_one_minus_powers(cls, num_exponents, den_exponents, var="t"):
        """prod (1 - t^m), m in num_exponents / prod (1 - t^m), m in den_exponents.

        Cancellation is exact divisor counting on the Psi factorization of
        1 - t^m, so the result is fully reduced with num = dpoly = 1.
        """
        cyc = {}
        for m in num_exponents:
            if m <= 0:
                raise ValueError("exponents must be positive")
            for d in _divisors(m):
                cyc[d] = cyc.get(d, 0) + 1
        for m in den_exponents:
            if m <= 0:
                raise ValueError("exponents must be positive")
            for d in _divisors(m):
                cyc[d] = cyc.get(d, 0) - 1
        return cls(Fraction(1), cyc=cyc, var=var)

    # -- predicates --------------------------------------------------------

    def is_zero(self):
        return self.scale == 0

    def is_factored(self):
        """True when num and dpoly are trivial (pure cyclotomic monomial)."""
        return self.num.coeffs == (1,) and self.dpoly.coeffs == (1,)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):  # pragma: no cover - not used as dict keys in bulk
        return hash((self.scale, self.num, tuple(sorted(self.cyc.items()))))

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0 or self.is_zero():
                return RatFunc.zero(self.var)
            return RatFunc(
                self.scale * other, self.num, self.cyc, self.dpoly, self.var
            )
        if self.is_zero() or other.is_zero():
            return RatFunc.zero(self.var)
        cyc = dict(self.cyc)
        for d, e in other.cyc.items():
            cyc[d] = cyc.get(d, 0) + e
        out = RatFunc(
            self.scale * other.scale,
            self.num * other.num,
            cyc,
            self.dpoly * other.dpoly,
            self.var,
        )
        return out._reduce_if_small()

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * other.inverse()

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        cyc = {d: -e for d, e in self.cyc.items()}
        if self.num.coeffs == (1,):
            return RatFunc(1 / self.scale, self.dpoly, cyc, var=self.var)
        return RatFunc(
            1 / self.scale, self.dpoly, cyc, self.num, self.var
        )

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFunc.one(self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __neg__(self):
        if self.is_zero():
            return self
        return RatFunc(-self.scale, self.num, self.cyc, self.dpoly, self.var)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.from_fraction(other, self.var)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        cyc = {}
        for d in set(self.cyc) | set(other.cyc):
            cyc[d] = min(self.cyc.get(d, 0), other.cyc.get(d, 0))
        left_a = {d: self.cyc.get(d, 0) - cyc[d] for d in cyc}
        left_b = {d: other.cyc.get(d, 0) - cyc[d] for d in cyc}
        A = apply_psi_multiset(self.num, left_a.items())
        B = apply_psi_multiset(other.num, left_b.items())
        dpoly = self.dpoly
        if self.dpoly != other.dpoly:
            g = poly_gcd(self.dpoly, other.dpoly)
            A = A * other.dpoly.divexact(g)
            B = B * self.dpoly.divexact(g)
            dpoly = self.dpoly * other.dpoly.divexact(g)
        s = _frac_gcd(self.scale, other.scale)
        ka = self.scale / s
        kb = other.scale / s
        num = A * int(ka) + B * int(kb)
        out = RatFunc(s, num, cyc, dpoly, self.var)
        return out._reduce_if_small()

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def _reduce_if_small(self):
        # trial cancellation is worth it only on small numerators; large
        # intermediates (series convolutions) are reduced on demand by
        # the membership/valuation predicates instead
        if self.num.degree > 512:
            return self
        return self._reduce()

    def _reduce(self):
        """Cancel num against negative cyclotomic exponents where possible."""
        if self.is_zero() or self.num.coeffs == (1,):
            return self
        neg = [d for d, e in self.cyc.items() if e < 0]
        if not neg:
            return self
        num = self.num.coeffs
        cyc = None
        # largest degree first: the biggest size reduction, checked cheaply
        for d in sorted(neg, key=lambda d: -len(psi_coeffs(d))):
            e = self.cyc[d]
            while e < 0 and len(num) > 1:
                if d == 1:
                    if _raw_eval_int(num, 1) != 0:
                        break
                else:
                    folded = _fold_mod_td_minus_1(num, d)
                    if _raw_mod(folded, psi_coeffs(d)):
                        break
                num = _raw_divexact(num, psi_coeffs(d))
                e += 1
            if e != self.cyc[d]:
                if cyc is None:
                    cyc = dict(self.cyc)
                cyc[d] = e
        if cyc is None:
            return self
        return RatFunc(self.scale, IntPoly(num, self.var), cyc, self.dpoly, self.var)

    # -- views -------------------------------------------------------------

    def numerator_poly(self):
        """Expanded numerator num * prod_{e>0} Psi_d^e (content in scale)."""
        pos = [(d, e) for d, e in self.cyc.items() if e > 0]
        return self.num * expand_psi_multiset(pos, self.var)

    def denominator_poly(self):
        """Expanded denominator dpoly * prod_{e<0} Psi_d^(-e)."""
        neg = [(d, -e) for d, e in self.cyc.items() if e < 0]
        return self.dpoly * expand_psi_multiset(neg, self.var)

    def eval_at_one(self, _retry=True):
        """Exact value at t = 1; raises ZeroDivisionError on a genuine pole.

        Removable singularities (a numerator multiple of 1 - t hiding a
        negative Psi_1 exponent) are cancelled by one reduction pass.
        """
        if self.is_zero():
            return Fraction(0)
        den_val = self.dpoly(1)
        if den_val == 0:
            if _retry:
                red = self._reduce()
                if red.dpoly(1) == 0:
                    g = poly_gcd(red.num, red.dpoly)
                    if g.degree > 0:
                        red = RatFunc(
                            red.scale,
                            red.num.divexact(g),
                            red.cyc,
                            red.dpoly.divexact(g),
                            red.var,
                        )
                return red.eval_at_one(_retry=False)
            raise ZeroDivisionError("pole at t = 1")
        # Psi_1 = 1 - t is the only factor vanishing at t = 1; a negative
        # exponent is removable iff the numerator vanishes to that order,
        # and the limit is the matching (1-t)-adic digit of num
        n1 = self.cyc.get(1, 0)
        if n1 > 0:
            return Fraction(0)
        if n1 == 0:
            value = Fraction(self.num(1))
        else:
            k = -n1
            digits = list(taylor_at_one_prefix(self.num, k + 1))
            if any(digits[:k]) or len(digits) <= k:
                raise ZeroDivisionError("pole at t = 1")
            value = Fraction(digits[k])
        value *= self.scale
        for d, e in self.cyc.items():
            if d == 1:
                continue
            v = psi_at_one(d)
            if v != 1:
                value *= Fraction(v) ** e
        return value / den_val

    def substitute_power(self, k):
        """t -> t^k; Psi factors are remapped through 1 - t^(km) exactly."""
        if self.is_zero():
            return self
        cyc = {}
        for d, e in self.cyc.items():
            # Psi_d(t^k) = prod_{d' | dk, d' does not divide (d/p_i...)}:
            # use 1 - t^m = prod Psi and Moebius on the divisor lattice:
            # Psi_d(t^k) = prod_{e' | dk} Psi_e' / prod_{e' | k*(d/d)}...
            for dd in _psi_substitute_indices(d, k):
                cyc[dd] = cyc.get(dd, 0) + e
        return RatFunc(
            self.scale,
            self.num.substitute_power(k),
            cyc,
            self.dpoly.substitute_power(k),
            self.var,
        )


@lru_cache(maxsize=None)
def _psi_substitute_indices(d, k):
    """Indices so that Psi_d(t^k) = prod Psi_dd(t) over the returned tuple.

    Follows from 1 - t^(mk) = prod_{d | mk} Psi_d applied along the divisor
    lattice of d (inclusion-exclusion over the divisors of d).
    """
    counts = {}
    for e in _divisors(d):
        mu = _moebius(d // e)
        if mu == 0:
            continue
        for dd in _divisors(e * k):
            counts[dd] = counts.get(dd, 0) + mu
    items = []
    for dd, c in counts.items():
        if c < 0:
            raise AssertionError("cyclotomic substitution produced a pole")
        items.extend([dd] * c)
    return tuple(sorted(items))


@lru_cache(maxsize=None)
def _moebius(n):
    if n == 1:
        return 1
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def _fold_mod_td_minus_1(coeffs, d):
    out = [0] * d
    for i, c in enumerate(coeffs):
        out[i % d] += c
    return _trim(out)


def ratfunc_normalize(num, den):
    """Canonical RatFunc from an arbitrary integer-polynomial fraction."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return RatFunc.zero(num.var)
    g = poly_gcd(num, den)
    if g.degree > 0 or g.coeffs != (1,):
        num = num.divexact(g)
        den = den.divexact(g)
    cn = num.content()
    if num.coeffs[-1] < 0:
        cn = -cn
    cd = den.content()
    if den.coeffs[-1] < 0:
        cd = -cd
    num = IntPoly(tuple(x // cn for x in num.coeffs), num.var)
    den = IntPoly(tuple(x // cd for x in den.coeffs), den.var)
    scale = Fraction(cn, cd)
    if den.coeffs == (1,):
        return RatFunc(scale, num, var=num.var)
    return RatFunc(scale, num, None, den, num.var)
