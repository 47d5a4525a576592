"""Truncated arithmetic in the m-adic completion of Z[u]_m.

An element modulo m^N is stored by its canonical digits a_0..a_{N-1}
with 0 <= a_i < p^(N-i), representing sum_i a_i (1-u)^i: the graded
basis of m^N makes addition and convolution carry-free (any overflow of
digit i is a multiple of p^(N-i)(1-u)^i, hence 0 mod m^N).

With a root variable t (q = t^b) the same digits are taken in (1-t).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import IntPoly, taylor_at_one_prefix
from .madic import INFINITY, MAdicContext, Valuation


class ZqpElement:
    """Residue modulo m^N in canonical mixed-modulus digit form."""

    __slots__ = ("ctx", "precision", "digits")

    def __init__(self, ctx, precision, digits):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        p = ctx.p
        self.ctx = ctx
        self.precision = precision
        ds = list(digits)[:precision]
        ds += [0] * (precision - len(ds))
        self.digits = tuple(
            d % p ** (precision - i) for i, d in enumerate(ds)
        )

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx, N):
        return cls(ctx, N, ())

    @classmethod
    def one(cls, ctx, N):
        return cls(ctx, N, (1,))

    @classmethod
    def from_int(cls, c, ctx, N):
        return cls(ctx, N, (c,))

    @classmethod
    def from_fraction(cls, x, ctx, N):
        x = Fraction(x)
        if x.denominator % ctx.p == 0:
            raise ValueError("denominator is not a unit")
        inv = pow(x.denominator, -1, ctx.p**N)
        return cls(ctx, N, (x.numerator * inv,))

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not any(self.digits)

    def __eq__(self, other):
        if not isinstance(other, ZqpElement):
            return NotImplemented
        N = min(self.precision, other.precision)
        return self.ctx == other.ctx and all(
            a % self.ctx.p ** (N - i) == b % self.ctx.p ** (N - i)
            for i, (a, b) in enumerate(zip(self.digits, other.digits))
        )

    def __hash__(self):
        return hash((self.ctx, self.precision, self.digits))

    def __repr__(self):
        return f"ZqpElement(p={self.ctx.p}, N={self.precision}, {list(self.digits)})"

    def _check(self, other):
        if self.ctx != other.ctx:
            raise ValueError("context mismatch")

    def valuation(self):
        """min(v_p(a_i) + i) over stored digits; INFINITY if all zero."""
        best = None
        for i, a in enumerate(self.digits):
            if a:
                v = 0
                while a % self.ctx.p == 0:
                    a //= self.ctx.p
                    v += 1
                v += i
                if best is None or v < best:
                    best = v
            if best is not None and best <= i + 1:
                break
        return INFINITY if best is None else Valuation(best)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        self._check(other)
        N = min(self.precision, other.precision)
        return ZqpElement(
            self.ctx, N, [a + b for a, b in zip(self.digits, other.digits)]
        )

    def __neg__(self):
        return ZqpElement(self.ctx, self.precision, [-a for a in self.digits])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return ZqpElement(
                self.ctx, self.precision, [a * other for a in self.digits]
            )
        self._check(other)
        N = min(self.precision, other.precision)
        out = [0] * N
        for i, a in enumerate(self.digits[:N]):
            if a:
                for j, b in enumerate(other.digits[: N - i]):
                    out[i + j] += a * b
        return ZqpElement(self.ctx, N, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return zqp_invert(self) ** (-n)
        result = ZqpElement.one(self.ctx, self.precision)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- precision-losing helpers (for tests) ------------------------------

    def divide_by_one_minus_u(self):
        """x/(1-u) at precision N-1; requires a_0 = 0."""
        if self.digits[0] % self.ctx.p ** self.precision:
            raise ValueError("not divisible by 1-u at this precision")
        return ZqpElement(self.ctx, self.precision - 1, self.digits[1:])

    def divide_by_p(self):
        """x/p at precision N-1; requires every digit divisible by p."""
        if any(a % self.ctx.p for a in self.digits[:-1]):
            raise ValueError("not divisible by p at this precision")
        return ZqpElement(
            self.ctx, self.precision - 1,
            [a // self.ctx.p for a in self.digits[:-1]],
        )


def reduce(P, N, ctx):
    """Canonical digits of an integer polynomial at precision N."""
    return ZqpElement(ctx, N, list(taylor_at_one_prefix(P, N)))


def zqp_add(x, y):
    return x + y


def zqp_mul(x, y):
    return x * y


def zqp_invert(x):
    """Newton iteration y <- y(2 - xy) from the residue-field inverse."""
    p, N = x.ctx.p, x.precision
    a0 = x.digits[0]
    if a0 % p == 0:
        raise ZeroDivisionError("not a unit: constant digit divisible by p")
    y = ZqpElement.from_int(pow(a0, -1, p), x.ctx, N)
    two = ZqpElement.from_int(2, x.ctx, N)
    for _ in range(max(1, math.ceil(math.log2(N)) + 1) if N > 1 else 1):
        y = y * (two - x * y)
    return y


def zqp_frobenius(x):
    """Image under u -> u^p, recanonicalized at the same precision."""
    ctx, N = x.ctx, x.precision
    # (1-u^p) in digit form, then Horner on sum a_i (1-u^p)^i
    base = reduce(IntPoly((1,) + (0,) * (ctx.p - 1) + (-1,)), N, ctx)
    result = ZqpElement.zero(ctx, N)
    for a in reversed(x.digits):
        result = result * base + ZqpElement.from_int(a, ctx, N)
    return result


def zqp_ev(x):
    """Specialization u -> 1: the constant digit, a residue mod p^N."""
    return x.digits[0]


def zqp_from_ratfunc(X, N, ctx):
    """Push an exact rational function of t into digits (unit denominator)."""
    if X.is_zero():
        return ZqpElement.zero(ctx, N)
    num = reduce(X.numerator_poly(), N, ctx)
    den = reduce(X.denominator_poly(), N, ctx)
    out = num * zqp_invert(den)
    return out * ZqpElement.from_fraction(X.scale, ctx, N)


@dataclass(frozen=True)
class PadicDigits:
    """The p-adic integer a/b (b a p-unit) with digits materialized on demand."""

    a: int
    b: int
    p: int

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("b must be positive")
        if self.b % self.p == 0:
            raise ValueError("b must be coprime to p")

    def digit_list(self, k):
        """First k base-p digits s_0..s_{k-1} of a/b."""
        x = self.a * pow(self.b, -1, self.p**k) % self.p**k
        out = []
        for _ in range(k):
            out.append(x % self.p)
            x //= self.p
        return out

    def partial_value(self, k):
        """The integer sum_{n<k} s_n p^n."""
        return self.a * pow(self.b, -1, self.p**k) % self.p**k

    def times_p(self):
        """Digits of p * (a/b) — a left shift."""
        return PadicDigits(self.a * self.p, self.b, self.p)


def padic_digits(a, b, p, k):
    """First k digits of a/b in Z_p (validates and materializes)."""
    d = PadicDigits(a, b, p)
    d.digit_list(k)
    return d


def q_power_beta(beta, N, ctx):
    """q^beta modulo m^N via the digit series.

    The partial sum of the series through level j = N telescopes to the
    plain power q^(beta mod p^(N+1)); each dropped tail term carries
    valuation >= N+1, so the truncation is exact at precision N.
    """
    if beta.p != ctx.p:
        raise ValueError("digit prime differs from context prime")
    e = beta.partial_value(N + 1)
    q = reduce(IntPoly((0,) * ctx.b + (1,)), N, ctx)  # q = t^b
    # beta = a/b with the context's root index: q^beta = t^(b*beta), an
    # exact monomial when b divides b*e... in general just the power below
    return q**e


def t_power_beta_exact(beta, N, ctx):
    """For beta = a/ctx.b: the exact root-variable value t^a reduced."""
    if beta.b != ctx.b:
        raise ValueError("digit denominator differs from the root index")
    a = beta.a % (ctx.p ** (N + 1) * ctx.b)
    return reduce(IntPoly((0,) * a + (1,)), N, ctx) if a else ZqpElement.one(ctx, N)
