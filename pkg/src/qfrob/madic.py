"""Valuation and membership predicates for the ideal m = (p, 1 - u).

For a polynomial P = sum_i a_i (1-u)^i the valuation is
min_i (v_p(a_i) + i): this matches the graded basis {p^(n-i)(1-u)^i} of
m^n and is multiplicative.  Extended to fractions by v(num) - v(den).

When a root variable t with q = t^b is in play (gcd(p, b) = 1), the ideal
(p, 1-t) of Z[t] restricts to (p, 1-q) on Z[q] with the same valuation,
because 1-q = (1-t)(1+t+...+t^(b-1)) and the cofactor is a unit at t=1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    IntPoly,
    RatFunc,
    cyclotomic,
    is_prime,
    one_minus_power,
    poly_gcd,
    psi_madic_valuation,
    taylor_at_one_prefix,
)


class Valuation:
    """A nonnegative integer or the distinguished INFINITY (value of 0)."""

    __slots__ = ("_value",)

    def __init__(self, value):
        if value is not None and value < 0:
            raise ValueError("valuations here are nonnegative")
        self._value = value

    @property
    def is_infinite(self):
        return self._value is None

    @property
    def value(self):
        if self._value is None:
            raise ValueError("INFINITY has no integer value")
        return self._value

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self._value == other._value
        if isinstance(other, int):
            return self._value is not None and self._value == other
        return NotImplemented

    def __hash__(self):
        return hash(self._value)

    def _key(self):
        return math.inf if self._value is None else self._value

    def __lt__(self, other):
        o = other._key() if isinstance(other, Valuation) else other
        return self._key() < o

    def __le__(self, other):
        o = other._key() if isinstance(other, Valuation) else other
        return self._key() <= o

    def __gt__(self, other):
        o = other._key() if isinstance(other, Valuation) else other
        return self._key() > o

    def __ge__(self, other):
        o = other._key() if isinstance(other, Valuation) else other
        return self._key() >= o

    def __add__(self, other):
        if isinstance(other, int):
            other = Valuation(other)
        if self.is_infinite or other.is_infinite:
            return INFINITY
        return Valuation(self._value + other._value)

    __radd__ = __add__

    def __repr__(self):
        return "INFINITY" if self._value is None else f"Valuation({self._value})"


INFINITY = Valuation(None)


@dataclass(frozen=True)
class MAdicContext:
    """Prime p with root index b (q = t^b) and exponent alpha = a/b.

    hyp_ok iff p = 1 mod b, the hypothesis making q^alpha = t^a exact.
    """

    p: int
    b: int = 1
    a: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.b < 1:
            raise ValueError("root index must be >= 1")
        if math.gcd(self.p, self.b) != 1:
            raise ValueError("p must be coprime to the root index")
        if self.a < 1 or math.gcd(self.a, self.b) != 1:
            raise ValueError("alpha must be a/b in lowest terms with a >= 1")

    @classmethod
    def for_alpha(cls, p, alpha):
        alpha = Fraction(alpha)
        return cls(p, alpha.denominator, alpha.numerator)

    @property
    def alpha(self):
        return Fraction(self.a, self.b)

    @property
    def hyp_ok(self):
        return (self.p - 1) % self.b == 0

    def require_hyp(self):
        if not self.hyp_ok:
            raise HypothesisError(
                f"p = {self.p} is not congruent to 1 modulo b = {self.b}"
            )

    def phi_p_ratfunc(self, var="t"):
        """phi_p(q) = (1 - t^(bp)) / (1 - t^b) as an exact rational function."""
        return RatFunc.from_one_minus_powers([self.b * self.p], [self.b], var)


class HypothesisError(ValueError):
    """The congruence p = 1 (mod b) required by the series family fails."""


def _vp_int(n, p):
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x, p):
    """p-adic valuation of a rational number (possibly negative); None for 0."""
    x = Fraction(x)
    if x == 0:
        return None
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def valuation_poly(P, ctx):
    """m-adic valuation min_i (v_p(a_i) + i) over the (1-u)-expansion of P.

    The expansion is consumed lazily: once the running minimum mu satisfies
    mu <= i for the next index i, later terms (each contributing >= i)
    cannot lower it.
    """
    if P.is_zero():
        return INFINITY
    p = ctx.p
    best = None
    for i, a in enumerate(taylor_at_one_prefix(P, P.degree + 1)):
        if a != 0:
            v = _vp_int(a, p) + i
            if best is None or v < best:
                best = v
        if best is not None and best <= i + 1:
            break
    return Valuation(best)


def valuation_ratfunc(X, ctx):
    """v(scale) + v(num) + sum of factored-part valuations - v(dpoly)."""
    if X.is_zero():
        return INFINITY
    v = vp_fraction(X.scale, ctx.p)
    v += valuation_poly(X.num, ctx).value
    for d, e in X.cyc.items():
        v += e * psi_madic_valuation(d, ctx.p)
    if X.dpoly.coeffs != (1,):
        v -= valuation_poly(X.dpoly, ctx).value
    if v < 0:
        # a negative valuation is fine for Q(q) but never a Valuation;
        # callers needing the raw integer use valuation_ratfunc_int
        raise ValueError(f"element has negative valuation {v}")
    return Valuation(v)


def valuation_ratfunc_int(X, ctx):
    """Signed valuation on Q(t); None for zero."""
    if X.is_zero():
        return None
    v = vp_fraction(X.scale, ctx.p)
    v += valuation_poly(X.num, ctx).value
    for d, e in X.cyc.items():
        v += e * psi_madic_valuation(d, ctx.p)
    if X.dpoly.coeffs != (1,):
        v -= valuation_poly(X.dpoly, ctx).value
    return v


def valuation_below_bound(X, bound, ctx):
    """The exact valuation when it is < bound, else None ("at least bound").

    Only the first few (1-u)-digits of the numerator are consumed, so
    congruence checks mod m^s cost O(s * deg) instead of the full scan.
    """
    if X.is_zero():
        return None
    base = vp_fraction(X.scale, ctx.p)
    for d, e in X.cyc.items():
        base += e * psi_madic_valuation(d, ctx.p)
    if X.dpoly.coeffs != (1,):
        base -= valuation_poly(X.dpoly, ctx).value
    need = bound - base
    if need <= 0:
        return None  # v(num) >= 0 already puts the total at >= bound
    best = None
    for i, a in enumerate(taylor_at_one_prefix(X.num, need)):
        if a != 0:
            v = _vp_int(a, ctx.p) + i
            if best is None or v < best:
                best = v
    if best is None or best >= need:
        return None
    return base + best


def is_in_localization(X, ctx):
    """True iff X lies in Z[t]_m: nonneg scale valuation, unit denominator.

    The only irreducible polynomials inside m are 1 - t and the
    p-power cyclotomics (all others evaluate at t = 1 to a p-unit), so
    after cancelling those against the numerator the test is a p-unit
    check on scale and denominator.
    """
    if X.is_zero():
        return True
    X = X._reduce()
    if vp_fraction(X.scale, ctx.p) < 0:
        return False
    for d, e in X.cyc.items():
        if e < 0 and psi_madic_valuation(d, ctx.p):
            return False
    if X.dpoly.coeffs != (1,):
        if X.dpoly(1) % ctx.p == 0:
            # try a genuine gcd in case num shares the offending factor
            g = poly_gcd(X.num, X.dpoly)
            d = X.dpoly if g.degree < 1 else X.dpoly.divexact(g)
            if d(1) % ctx.p == 0:
                return False
    return True


def check_mod_m_power(X, s, ctx):
    """True iff X = 0 mod m^s, i.e. the valuation is at least s."""
    if X.is_zero():
        return True
    return valuation_below_bound(X, s, ctx) is None


def check_mod_cyclotomic(X, ctx):
    """True iff X lies in phi_p(q) * Z[t]_m (a sufficient certificate)."""
    if X.is_zero():
        return True
    return is_in_localization(X * ctx.phi_p_ratfunc(X.var).inverse(), ctx)


def product_identity_check(j, ctx):
    """Exact identity 1 - q^(p^j) = (1-q) * phi_p(q) * ... * phi_p(q^(p^(j-1)))."""
    if j < 1:
        raise ValueError("j must be >= 1")
    p = ctx.p
    prod = IntPoly((1, -1), "q")
    phi = cyclotomic(p, "q")
    for i in range(j):
        prod = prod * phi.substitute_power(p**i)
    return prod == one_minus_power(p**j, "q")
