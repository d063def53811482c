"""Exact rational, polynomial and quotient-ring arithmetic.

Rationals are :class:`fractions.Fraction`.  Polynomials are dense coefficient
lists (index = degree).  Character sums over the roots of a squarefree monic
polynomial ``m`` are evaluated exactly as traces in ``Q[x]/(m)`` using power
sums obtained from Newton's identities, so no root is ever approximated.
"""
from __future__ import annotations

import os
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

__all__ = [
    "NonInvertible",
    "RationalPoly",
    "QuotientRingElement",
    "double_factorial",
    "chebyshev_like_s",
    "newton_power_sums",
    "poly_modinv",
    "quotient_trace",
    "default_precision",
    "workprec",
]


class NonInvertible(ArithmeticError):
    """Raised when a polynomial has no inverse modulo the given modulus."""


def default_precision() -> int:
    """Mantissa bits for the float cross-check layer (``DOPER_PRECISION_BITS``)."""
    return int(os.environ.get("DOPER_PRECISION_BITS", "256"))


def workprec(bits: int | None = None):
    return mpmath.workprec(bits or default_precision())


def double_factorial(n: int) -> int:
    """``n!!`` for odd ``n >= -1``, with ``(-1)!! = 1``."""
    if n < -1 or n % 2 == 0:
        raise ValueError(f"double factorial needs odd n >= -1, got {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _strip(coeffs: Iterable) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class RationalPoly:
    """Dense univariate polynomial over Q.  Immutable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _strip(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoly is immutable")

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "RationalPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = _as_poly(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "RationalPoly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*x^{k}")
        return "RationalPoly(" + " + ".join(terms) + ")"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = RationalPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = 1 / other.lead()
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv_lead
            if c:
                quot[k - dq] = c
                for j, cb in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * cb
        return RationalPoly(quot), RationalPoly(rem[:dq] if dq > 0 else [])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self) -> "RationalPoly":
        if self.is_zero():
            return self
        return RationalPoly([c / self.lead() for c in self.coeffs])


def _as_poly(v) -> RationalPoly:
    if isinstance(v, RationalPoly):
        return v
    if isinstance(v, QuotientRingElement):
        return v.value
    return RationalPoly([v])


def chebyshev_like_s(k: int) -> RationalPoly:
    """``S_k`` with ``S_k(2 cos t) = sin((k+1) t) / sin t``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    prev, cur = RationalPoly([1]), RationalPoly([0, 1])
    if k == 0:
        return prev
    x = RationalPoly.x()
    for _ in range(k - 1):
        prev, cur = cur, x * cur - prev
    return cur


def newton_power_sums(m: RationalPoly, n: int) -> list[Fraction]:
    """Power sums ``p_0..p_n`` of the roots of the monic polynomial ``m``."""
    if not m.is_monic() or m.degree < 1:
        raise ValueError("newton_power_sums needs a monic polynomial of degree >= 1")
    d = m.degree
    # m = x^d + a_{d-1} x^{d-1} + ... ; e_k = (-1)^k a_{d-k}
    a = m.coeffs
    e = [Fraction(1)] + [(-1) ** k * a[d - k] for k in range(1, d + 1)]
    p = [Fraction(d)]
    for k in range(1, n + 1):
        s = Fraction(0)
        for i in range(1, min(k - 1, d) + 1):
            s += (-1) ** (i - 1) * e[i] * p[k - i]
        if k <= d:
            s += (-1) ** (k - 1) * k * e[k]
        p.append(s)
    return p


def poly_gcdex(a: RationalPoly, b: RationalPoly):
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` and ``g`` monic."""
    r0, r1 = a, b
    s0, s1 = RationalPoly([1]), RationalPoly()
    t0, t1 = RationalPoly(), RationalPoly([1])
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lc = r0.lead()
    return r0.monic(), RationalPoly([c / lc for c in s0.coeffs]), RationalPoly([c / lc for c in t0.coeffs])


def poly_modinv(q: RationalPoly, m: RationalPoly) -> RationalPoly:
    """Inverse of ``q`` modulo ``m``."""
    q, m = _as_poly(q), _as_poly(m)
    g, s, _ = poly_gcdex(q % m, m)
    if g.degree != 0:
        raise NonInvertible(f"gcd(q, m) has degree {g.degree}")
    inv = s % m
    assert ((q * inv) % m) == RationalPoly([1])
    return inv


class QuotientRingElement:
    """Element of ``Q[x]/(modulus)`` with a monic modulus."""

    __slots__ = ("modulus", "value")

    def __init__(self, value, modulus: RationalPoly):
        modulus = _as_poly(modulus)
        if not modulus.is_monic():
            raise ValueError("quotient modulus must be monic")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "value", _as_poly(value) % modulus)

    def __setattr__(self, name, value):
        raise AttributeError("QuotientRingElement is immutable")

    def _wrap(self, v):
        return QuotientRingElement(v, self.modulus)

    def _check(self, other):
        if isinstance(other, QuotientRingElement):
            if other.modulus != self.modulus:
                raise ValueError("mixing elements of different quotient rings")
            return other.value
        return _as_poly(other)

    def __add__(self, other):
        return self._wrap(self.value + self._check(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.value - self._check(other))

    def __rsub__(self, other):
        return self._wrap(self._check(other) - self.value)

    def __neg__(self):
        return self._wrap(-self.value)

    def __mul__(self, other):
        return self._wrap(self.value * self._check(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self._wrap(RationalPoly([1]))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "QuotientRingElement":
        return self._wrap(poly_modinv(self.value, self.modulus))

    def __truediv__(self, other):
        other = other if isinstance(other, QuotientRingElement) else self._wrap(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, QuotientRingElement):
            return self.modulus == other.modulus and self.value == other.value
        return self.value == _as_poly(other) % self.modulus

    def __hash__(self):
        return hash((self.modulus, self.value))

    def __repr__(self):
        return f"QuotientRingElement({self.value!r} mod {self.modulus!r})"

    def trace(self, power_sums: Sequence[Fraction] | None = None) -> Fraction:
        """Sum of ``value(c)`` over the roots ``c`` of the modulus."""
        if power_sums is None:
            power_sums = newton_power_sums(self.modulus, self.modulus.degree)
        return sum((c * power_sums[k] for k, c in enumerate(self.value.coeffs)), Fraction(0))


def quotient_trace(num: RationalPoly, den: RationalPoly, m: RationalPoly) -> Fraction:
    """Exact ``sum num(c)/den(c)`` over the roots ``c`` of squarefree monic ``m``."""
    num, den, m = _as_poly(num), _as_poly(den), _as_poly(m)
    elt = QuotientRingElement(num, m) * QuotientRingElement(poly_modinv(den, m), m)
    return elt.trace()
