from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from doper.arith import (
    NonInvertible,
    QuotientRingElement,
    RationalPoly,
    chebyshev_like_s,
    double_factorial,
    newton_power_sums,
    poly_modinv,
    quotient_trace,
)

X = RationalPoly.x()


@pytest.mark.parametrize("n, expected", [(-1, 1), (1, 1), (5, 15), (7, 105), (9, 945)])
def test_double_factorial(n, expected):
    assert double_factorial(n) == expected


@pytest.mark.parametrize("n", [-3, 0, 2, 4])
def test_double_factorial_rejects(n):
    with pytest.raises(ValueError):
        double_factorial(n)


def test_chebyshev_like_small():
    assert chebyshev_like_s(0) == RationalPoly([1])
    assert chebyshev_like_s(2) == RationalPoly([-1, 0, 1])
    assert chebyshev_like_s(4) == RationalPoly([1, 0, -3, 0, 1])
    for k in range(12):
        s = chebyshev_like_s(k)
        assert s.degree == k and s.is_monic()
        assert all(c.denominator == 1 for c in s.coeffs)


def test_chebyshev_sine_identity():
    rng = __import__("random").Random(1)
    with mpmath.workprec(128):
        for _ in range(100):
            theta = mpmath.mpf(rng.uniform(0.01, 3.13))
            k = rng.randint(0, 40)
            s = chebyshev_like_s(k)
            val = sum(mpmath.mpf(c.numerator) / c.denominator * (2 * mpmath.cos(theta)) ** i
                      for i, c in enumerate(s.coeffs))
            assert abs(val * mpmath.sin(theta) - mpmath.sin((k + 1) * theta)) < 1e-10


@pytest.mark.parametrize("m, n, expected", [
    (RationalPoly([1, 0, -3, 0, 1]), 2, [4, 0, 6]),
    (RationalPoly([-1, 1]), 3, [1, 1, 1, 1]),
    (RationalPoly([-2, 0, 1]), 2, [2, 0, 4]),
])
def test_newton_power_sums(m, n, expected):
    assert newton_power_sums(m, n) == expected


def test_newton_rejects_non_monic():
    with pytest.raises(ValueError):
        newton_power_sums(RationalPoly([1, 2]), 2)


def test_poly_modinv_examples():
    m = RationalPoly([-2, 0, 1])
    assert poly_modinv(X, m) == RationalPoly([0, Fraction(1, 2)])
    assert poly_modinv(RationalPoly([1]), m) == RationalPoly([1])
    with pytest.raises(NonInvertible):
        poly_modinv(m, m)


@pytest.mark.parametrize("num, den, expected", [
    (RationalPoly([1]), RationalPoly([1]), 4),
    (RationalPoly([4, 0, -1]), RationalPoly([1]), 10),
    (RationalPoly([1]), RationalPoly([4, 0, -1]), 2),
])
def test_quotient_trace_examples(num, den, expected):
    assert quotient_trace(num, den, RationalPoly([1, 0, -3, 0, 1])) == expected


small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@settings(max_examples=100, deadline=None)
@given(q=st.lists(small_fracs, min_size=1, max_size=6),
       m=st.lists(small_fracs, min_size=1, max_size=6))
def test_modinv_round_trip(q, m):
    mod = RationalPoly(list(m) + [1])
    qq = RationalPoly(q)
    try:
        inv = poly_modinv(qq, mod)
    except NonInvertible:
        return
    assert (qq * inv) % mod == RationalPoly([1])
    assert inv.degree < mod.degree


@settings(max_examples=40, deadline=None)
@given(roots=st.lists(st.integers(-6, 6), min_size=1, max_size=12, unique=True),
       num=st.lists(st.integers(-5, 5), min_size=1, max_size=8))
def test_trace_against_numeric_roots(roots, num):
    m = RationalPoly([1])
    for r in roots:
        m = m * RationalPoly([-r, 1])
    # perturb into an irrational-rooted polynomial of the same degree
    m = m + RationalPoly([Fraction(1, 3)])
    numerator = RationalPoly(num)
    exact = quotient_trace(numerator, RationalPoly([1]), m)
    with mpmath.workprec(256):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(m.coeffs)]
        zs = mpmath.polyroots(coeffs, maxsteps=400, extraprec=600)
        approx = sum(sum(mpmath.mpf(int(c)) * z ** i for i, c in enumerate(num)) for z in zs)
        assert abs(approx - mpmath.mpf(exact.numerator) / exact.denominator) < mpmath.mpf(10) ** -20


@settings(max_examples=60, deadline=None)
@given(a=st.lists(small_fracs, max_size=5), b=st.lists(small_fracs, max_size=5), c=st.lists(small_fracs, max_size=5))
def test_ring_axioms(a, b, c):
    A, B, C = RationalPoly(a), RationalPoly(b), RationalPoly(c)
    assert (A + B) + C == A + (B + C)
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    for coeff in (A * B).coeffs:
        assert coeff.denominator > 0
    if not B.is_zero():
        q, r = A.divmod(B)
        assert q * B + r == A and (r.is_zero() or r.degree < B.degree)


def test_quotient_ring_element():
    m = RationalPoly([-2, 0, 1])
    x = QuotientRingElement(X, m)
    assert x * x == 2
    assert x ** -1 == QuotientRingElement(RationalPoly([0, Fraction(1, 2)]), m)
    assert (x / x) == 1
    assert QuotientRingElement(RationalPoly([3]), m).trace() == 6
    with pytest.raises(ValueError):
        QuotientRingElement(X, RationalPoly([1, 2]))
    with pytest.raises(AttributeError):
        x.value = RationalPoly([1])
