"""Brute-force finite-field count of hypergeometric equations with a full set
of algebraic solutions, their sign-flip equivalence classes, and the
per-radius census of those classes.

This module deliberately shares nothing with the TQFT code: the census is
compared against the fusion table only at the end.
"""
from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fusion import _check_prime

__all__ = [
    "UndefinedCoefficient",
    "ClassSizeViolation",
    "DegenerateExponent",
    "HGTriple",
    "LaurentPolyFp",
    "tilde",
    "admits_full_solutions",
    "hypergeometric_poly",
    "second_solution",
    "apply_hypergeometric_operator",
    "count_full_solution_triples",
    "verify_solutions",
    "equivalence_classes",
    "oper_equivalence_classes",
    "exponents",
    "radius_of",
    "radius_census",
    "sorted_census",
    "fusion_census",
    "census_report",
]


class UndefinedCoefficient(ArithmeticError):
    """A denominator of the series vanishes before the numerator does."""


class ClassSizeViolation(AssertionError):
    pass


class DegenerateExponent(ValueError):
    pass


def tilde(a: int, p: int) -> int:
    """Lift of ``a mod p`` to ``{1, ..., p}``."""
    r = a % p
    return r if r else p


@dataclass(frozen=True)
class HGTriple:
    a: int
    b: int
    c: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        object.__setattr__(self, "c", self.c % self.p)


@dataclass(frozen=True)
class LaurentPolyFp:
    """``sum_k coeffs[k] x^(min_degree + k)`` over ``F_p``; zero has no coefficients."""

    min_degree: int
    coeffs: tuple
    p: int

    def __post_init__(self):
        c = [x % self.p for x in self.coeffs]
        lo = 0
        while lo < len(c) and c[lo] == 0:
            lo += 1
        c = c[lo:]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "min_degree", self.min_degree + lo if c else 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        if self.is_zero():
            raise ValueError("zero has no valuation")
        return self.min_degree

    def shift(self, k: int) -> "LaurentPolyFp":
        return LaurentPolyFp(self.min_degree + k, self.coeffs, self.p)

    def as_dict(self) -> dict[int, int]:
        return {self.min_degree + k: c for k, c in enumerate(self.coeffs) if c}


def admits_full_solutions(t: HGTriple) -> bool:
    """Either ``b~ >= c~ > a~`` or ``a~ >= c~ > b~``."""
    a, b, c = (tilde(x, t.p) for x in (t.a, t.b, t.c))
    return (b >= c > a) or (a >= c > b)


def hypergeometric_poly(t: HGTriple) -> LaurentPolyFp:
    """Truncated series ``y_{a,b,c}``, stopped once the numerator vanishes."""
    p = t.p
    coeffs = [1]
    for k in range(p):
        num = (t.a + k) * (t.b + k) % p
        if num == 0:
            break
        den = (k + 1) * (t.c + k) % p
        if den == 0:
            raise UndefinedCoefficient(f"denominator vanishes at k={k} for {t}")
        coeffs.append(coeffs[-1] * num * pow(den, p - 2, p) % p)
    return LaurentPolyFp(0, tuple(coeffs), p)


def second_solution(t: HGTriple) -> LaurentPolyFp:
    """``x^(1 - c~) y_{a-c+1, b-c+1, 2-c}``."""
    shifted = HGTriple(t.a - t.c + 1, t.b - t.c + 1, 2 - t.c, t.p)
    return hypergeometric_poly(shifted).shift(1 - tilde(t.c, t.p))


def apply_hypergeometric_operator(t: HGTriple, f: LaurentPolyFp) -> LaurentPolyFp:
    """Cleared operator ``x(x-1) f'' + (c(x-1) + (1-c+a+b) x) f' + ab f``.

    On monomials the coefficient of ``x^m`` in the image is
    ``(m+a)(m+b) f_m - (m+1)(m+c) f_{m+1}``.
    """
    p = t.p
    if f.is_zero():
        return f
    d = f.as_dict()
    lo = f.min_degree - 1
    hi = f.min_degree + len(f.coeffs) - 1
    out = []
    for m in range(lo, hi + 1):
        out.append(((m + t.a) * (m + t.b) * d.get(m, 0) - (m + 1) * (m + t.c) * d.get(m + 1, 0)) % p)
    return LaurentPolyFp(lo, tuple(out), p)


def _expected_count(p: int) -> int:
    return (p ** 3 - p) // 3


def _admissible_triples(p: int) -> np.ndarray:
    triples = _kernels.all_triples(p)
    return triples[_kernels.admissible_mask(triples, p)]


def count_full_solution_triples(p: int, threads: int = 1) -> int:
    """Exhaustive count over all ``p^3`` triples of the admissibility criterion."""
    _check_prime(p)
    triples = _kernels.all_triples(p)
    if threads > 1:
        chunks = np.array_split(triples, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return int(sum(pool.map(lambda ch: int(_kernels.admissible_mask(ch, p).sum()), chunks)))
    return int(_kernels.admissible_mask(triples, p).sum())


def verify_solutions(p: int) -> dict:
    """Check both displayed solutions on every admissible triple (batch kernels).

    Returns counts of verified triples, triples whose series is undefined,
    residual failures, and failures of the valuation independence test.
    """
    _check_prime(p)
    adm = _admissible_triples(p)
    a, b, c = adm[:, 0], adm[:, 1], adm[:, 2]
    shifted = np.stack([(a - c + 1) % p, (b - c + 1) % p, (2 - c) % p], axis=1)
    c_t = np.where(c == 0, p, c)
    c1, l1, s1 = _kernels.series_coefficients(adm, p)
    c2, l2, s2 = _kernels.series_coefficients(shifted, p)
    ok1 = _kernels.operator_residual(adm, c1, l1, np.zeros(len(adm), dtype=np.int64), p)
    ok2 = _kernels.operator_residual(adm, c2, l2, (1 - c_t).astype(np.int64), p)
    defined = (s1 == _kernels.DEFINED) & (s2 == _kernels.DEFINED)
    independent = (1 - c_t) % p != 0
    verified = defined & ok1 & ok2 & independent
    return {
        "admissible": int(len(adm)),
        "verified": int(verified.sum()),
        "undefined": [tuple(int(x) for x in row) for row in adm[~defined]],
        "residual_failures": [tuple(int(x) for x in row) for row in adm[defined & ~(ok1 & ok2)]],
        "dependent": [tuple(int(x) for x in row) for row in adm[defined & ~independent]],
    }


def exponents(t: HGTriple) -> tuple[int, int, int]:
    """Exponent differences ``(1-c, c-a-b, b-a)`` at ``0, 1, infinity``."""
    p = t.p
    return ((1 - t.c) % p, (t.c - t.a - t.b) % p, (t.b - t.a) % p)


def _from_exponents(alpha: int, beta: int, gamma: int, p: int) -> HGTriple:
    half = (p + 1) // 2
    c = 1 - alpha
    a = (1 - alpha - beta - gamma) * half
    b = (1 - alpha - beta + gamma) * half
    return HGTriple(a, b, c, p)


def _class_key(t: HGTriple) -> tuple:
    p = t.p
    return tuple(min(x, (-x) % p) for x in exponents(t))


def equivalence_classes(p: int) -> list[list[HGTriple]]:
    """Admissible triples grouped by the eight sign flips of their exponents.

    Every class must have exactly eight admissible members.
    """
    _check_prime(p)
    admissible = {HGTriple(*map(int, row), p) for row in _admissible_triples(p)}
    classes: dict[tuple, list] = {}
    for t in sorted(admissible, key=lambda s: (s.a, s.b, s.c)):
        classes.setdefault(_class_key(t), []).append(t)
    for key, members in classes.items():
        orbit = {_from_exponents(s0 * key[0], s1 * key[1], s2 * key[2], p)
                 for s0, s1, s2 in itertools.product((1, -1), repeat=3)}
        if len(members) != 8 or set(members) != orbit:
            raise ClassSizeViolation(f"class {key} has {len(members)} admissible members, orbit size {len(orbit)}")
    return [classes[k] for k in sorted(classes)]


def oper_equivalence_classes(p: int) -> int:
    return len(equivalence_classes(p))


def radius_of(d: int, p: int) -> int:
    """Fold an exponent difference into ``{0, ..., (p-3)/2}``."""
    d = d % p
    if d == 0:
        raise DegenerateExponent("exponent difference 0 has no radius")
    m = d if d % 2 else p - d
    return (m - 1) // 2


def radius_census(p: int) -> Counter:
    """Classes counted by the ordered radius triple at ``(0, 1, infinity)``."""
    census: Counter = Counter()
    for members in equivalence_classes(p):
        t = members[0]
        if not admits_full_solutions(t):
            raise AssertionError("class representative is not admissible")
        census[tuple(radius_of(d, p) for d in exponents(t))] += 1
    return census


def sorted_census(census: Counter) -> Counter:
    out: Counter = Counter()
    for key, k in census.items():
        out[tuple(sorted(key))] += k
    return out


def fusion_census(p: int) -> Counter:
    """Ordered triples ``(a, b, c)`` of integer spins with ``N_abc = 1``."""
    from .fusion import build_pgl2_dopers

    A = build_pgl2_dopers(p)
    out: Counter = Counter()
    for (a, b, c), v in A.structure.items():
        if v:
            out[(a, b, c)] += 1
    return out


def census_report(p: int, threads: int = 1) -> dict:
    """JSON-ready summary of the whole finite-field pipeline."""
    _check_prime(p)
    count = count_full_solution_triples(p, threads)
    expected = _expected_count(p)
    warnings = []
    if count != expected:
        warnings.append(f"criterion count {count} differs from {expected}")
    classes = oper_equivalence_classes(p)
    census = radius_census(p)
    fusion = fusion_census(p)
    if census != fusion:
        if sum(census.values()) == sum(fusion.values()):
            warnings.append("radius normalization: only the aggregate census matches the fusion table")
        else:
            warnings.append("radius census disagrees with the fusion table")
    ver = verify_solutions(p)
    if ver["undefined"]:
        warnings.append(f"{len(ver['undefined'])} admissible triples have an undefined series")
    if ver["residual_failures"] or ver["dependent"]:
        warnings.append("some displayed solutions failed verification")
    return {
        "p": p,
        "criterion_count": count,
        "expected": expected,
        "classes": classes,
        "expected_classes": (p ** 3 - p) // 24,
        "census": {f"({a},{b},{c})": k for (a, b, c), k in sorted(census.items())},
        "census_matches_fusion": census == fusion,
        "verified_solutions": ver["verified"],
        "warnings": warnings,
    }
