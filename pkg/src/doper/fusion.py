"""Fusion rings and Frobenius algebras.

The SL2 WZW fusion ring at level ``p - 2`` has basis the spins
``0, 1/2, ..., (p-2)/2``.  Its integer-spin subring is the Frobenius algebra
whose 2d TQFT counts dormant PGL2-opers; index ``n`` of that algebra is the
radius ``n`` in ``{0, ..., (p-3)/2}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Hashable, Sequence

import mpmath

from .arith import default_precision, workprec

__all__ = [
    "Spin",
    "FrobeniusAlgebra",
    "AlgebraError",
    "SingularAlgebra",
    "fusion_coefficient",
    "build_sl2_wzw",
    "build_pgl2_dopers",
    "trivial_algebra",
    "casimir",
    "characters_numeric",
    "casimir_character_value",
    "canonical_basis_numeric",
    "CanonicalBasis",
    "load_algebra",
    "algebra_from_json",
    "is_prime",
]


class AlgebraError(ValueError):
    """A Frobenius algebra failed validation."""


class SingularAlgebra(ArithmeticError):
    """The character matrix is numerically singular (algebra not semisimple)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 5 or not is_prime(p):
        raise ValueError(f"need a prime p >= 5, got {p!r}")


@dataclass(frozen=True, order=True)
class Spin:
    """A spin ``j`` stored as ``2j`` so half-integers stay exact."""

    twice_value: int

    def __post_init__(self):
        if self.twice_value < 0:
            raise ValueError("spin must be nonnegative")

    @classmethod
    def of(cls, j) -> "Spin":
        j2 = Fraction(j) * 2
        if j2.denominator != 1:
            raise ValueError(f"{j} is not a half-integer")
        return cls(int(j2))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/2"


def fusion_coefficient(a: Spin, b: Spin, c: Spin, level: int) -> int:
    """Level-``level`` SL2 fusion multiplicity ``N_{abc}`` (0 or 1)."""
    for s in (a, b, c):
        if s.twice_value > level:
            raise ValueError(f"spin {s} outside level {level}")
    A, B, C = a.twice_value, b.twice_value, c.twice_value
    total = A + B + C
    if total % 2:
        return 0
    if total // 2 > level:
        return 0
    return int(abs(B - C) <= A <= B + C)


@dataclass(frozen=True, eq=False)
class FrobeniusAlgebra:
    """Commutative Frobenius algebra with a distinguished basis.

    ``structure[(a, b, c)]`` is the coefficient of ``e_c`` in ``e_a * e_b``;
    ``metric[(a, b)]`` is ``eta(e_a, e_b)``.  Both are stored sparsely over
    basis *indices*; ``basis`` keeps the user-facing labels.
    """

    basis: tuple
    unit: int
    structure: dict
    metric: dict
    center_order: int = 1
    prime: int | None = None
    kind: str = "custom"
    dual: tuple = field(default=())

    def __post_init__(self):
        if not self.dual:
            object.__setattr__(self, "dual", tuple(self._dual_from_metric()))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label) -> int:
        try:
            return self._label_index[label]
        except (KeyError, TypeError):
            pass
        # spin bases also accept plain numbers, read as the spin value
        if self.basis and isinstance(self.basis[0], Spin) and isinstance(label, (int, Fraction)):
            try:
                return self._label_index[Spin.of(label)]
            except (KeyError, ValueError):
                pass
        raise KeyError(f"{label!r} is not a basis label")

    @cached_property
    def _label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.basis)}

    def _dual_from_metric(self) -> list[int]:
        dual = []
        for a in range(self.dim):
            partners = [b for b in range(self.dim) if self.metric.get((a, b), 0) != 0]
            if len(partners) != 1:
                raise AlgebraError(f"basis element {self.basis[a]!r} has {len(partners)} metric partners")
            dual.append(partners[0])
        return dual

    @cached_property
    def structure_matrix(self) -> list[list[list[Fraction]]]:
        n = self.dim
        N = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (a, b, c), v in self.structure.items():
            N[a][b][c] = Fraction(v)
        return N

    @cached_property
    def metric_matrix(self) -> list[list[Fraction]]:
        n = self.dim
        return [[Fraction(self.metric.get((a, b), 0)) for b in range(n)] for a in range(n)]

    @cached_property
    def inverse_metric(self) -> list[list[Fraction]]:
        return _invert(self.metric_matrix)

    @cached_property
    def trilinear(self) -> list[list[list[Fraction]]]:
        """``T[a][b][c] = eta(e_a * e_b, e_c)``."""
        n = self.dim
        N, g = self.structure_matrix, self.metric_matrix
        return [[[sum((N[a][b][d] * g[d][c] for d in range(n)), Fraction(0)) for c in range(n)]
                 for b in range(n)] for a in range(n)]

    def element(self, coeffs: dict | None = None) -> dict:
        return {k: Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    def basis_element(self, i: int) -> dict:
        return {i: Fraction(1)}

    def multiply(self, u: dict, v: dict) -> dict:
        out: dict[int, Fraction] = {}
        N = self.structure_matrix
        for a, x in u.items():
            for b, y in v.items():
                row = N[a][b]
                for c in range(self.dim):
                    if row[c]:
                        out[c] = out.get(c, Fraction(0)) + x * y * row[c]
        return {k: v for k, v in out.items() if v != 0}

    def pair(self, u: dict, v: dict) -> Fraction:
        g = self.metric_matrix
        return sum((x * y * g[a][b] for a, x in u.items() for b, y in v.items()), Fraction(0))

    def axiom_violations(self) -> list[str]:
        """Every failed Frobenius axiom, as human-readable strings."""
        n = self.dim
        out = []
        g = self.metric_matrix
        for a in range(n):
            for b in range(n):
                if g[a][b] != g[b][a]:
                    out.append(f"metric not symmetric at ({a},{b})")
        if _rank(g) != n:
            out.append("metric is degenerate")
        e = [self.basis_element(i) for i in range(n)]
        unit = e[self.unit]
        for b in range(n):
            if self.multiply(unit, e[b]) != e[b]:
                out.append(f"unit law fails for {self.basis[b]!r}")
            for a in range(n):
                if self.multiply(e[a], e[b]) != self.multiply(e[b], e[a]):
                    out.append(f"not commutative at ({a},{b})")
        for a in range(n):
            for b in range(n):
                ab = self.multiply(e[a], e[b])
                for c in range(n):
                    bc = self.multiply(e[b], e[c])
                    if self.multiply(ab, e[c]) != self.multiply(e[a], bc):
                        out.append(f"associativity fails at ({a},{b},{c})")
                    if self.pair(ab, e[c]) != self.pair(e[a], bc):
                        out.append(f"Frobenius compatibility fails at ({a},{b},{c})")
        d = self.dual
        for a in range(n):
            if d[d[a]] != a:
                out.append(f"dual is not an involution at {a}")
            for b in range(n):
                if (g[a][b] != 0) != (b == d[a]):
                    out.append(f"metric support disagrees with duality at ({a},{b})")
        return out

    def validate(self) -> "FrobeniusAlgebra":
        bad = self.axiom_violations()
        if bad:
            raise AlgebraError("; ".join(bad[:10]))
        return self


def _invert(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise AlgebraError("metric is degenerate")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _rank(m: list[list[Fraction]]) -> int:
    a = [list(r) for r in m]
    rank = 0
    rows, cols = len(a), len(a[0]) if a else 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rows):
            if r != rank and a[r][col] != 0:
                f = a[r][col] / a[rank][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def _fusion_algebra(p: int, spins: Sequence[Spin], kind: str) -> FrobeniusAlgebra:
    level = p - 2
    n = len(spins)
    structure = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if fusion_coefficient(spins[a], spins[b], spins[c], level):
                    structure[(a, b, c)] = Fraction(1)
    metric = {(a, a): Fraction(1) for a in range(n)}
    alg = FrobeniusAlgebra(basis=tuple(spins), unit=0, structure=structure, metric=metric,
                           center_order=1, prime=p, kind=kind)
    assert spins[alg.unit].twice_value == 0
    return alg


def build_sl2_wzw(p: int) -> FrobeniusAlgebra:
    """SL2 WZW fusion ring at level ``p - 2`` (basis: all spins up to ``(p-2)/2``)."""
    _check_prime(p)
    return _fusion_algebra(p, [Spin(k) for k in range(p - 1)], "sl2_wzw")


def build_pgl2_dopers(p: int) -> FrobeniusAlgebra:
    """Integer-spin subring of the level ``p-2`` fusion ring.

    Closure holds because two integer spins only fuse to integer spins.
    """
    _check_prime(p)
    alg = _fusion_algebra(p, [Spin(2 * n) for n in range((p - 1) // 2)], "pgl2")
    if any(alg.dual[i] != i for i in range(alg.dim)):
        raise AlgebraError("PGL2 algebra should be self-dual")
    return alg


def trivial_algebra() -> FrobeniusAlgebra:
    """One-dimensional algebra ``Q`` (the TQFT of a point)."""
    return FrobeniusAlgebra(basis=(0,), unit=0, structure={(0, 0, 0): Fraction(1)},
                            metric={(0, 0): Fraction(1)}, kind="trivial")


def casimir(A: FrobeniusAlgebra) -> dict:
    """``sum_rho e_rho * e_{rho^dual}`` as a coefficient dict over basis indices."""
    total: dict[int, Fraction] = {}
    for r in range(A.dim):
        prod = A.multiply(A.basis_element(r), A.basis_element(A.dual[r]))
        for k, v in prod.items():
            total[k] = total.get(k, Fraction(0)) + v
    return {k: v for k, v in total.items() if v != 0}


def handle_element(A: FrobeniusAlgebra) -> dict:
    """``sum_{a,b} eta^{ab} e_a e_b``; equals ``|Z| * casimir`` for ``eta = delta/|Z|``."""
    ginv = A.inverse_metric
    total: dict[int, Fraction] = {}
    for a in range(A.dim):
        for b in range(A.dim):
            if ginv[a][b]:
                for k, v in A.multiply(A.basis_element(a), A.basis_element(b)).items():
                    total[k] = total.get(k, Fraction(0)) + ginv[a][b] * v
    return {k: v for k, v in total.items() if v != 0}


def _sl2_like(A: FrobeniusAlgebra) -> bool:
    return A.kind in ("sl2_wzw", "pgl2") and A.prime is not None


def characters_numeric(A: FrobeniusAlgebra, j: int, precision_bits: int | None = None) -> list:
    """Values of the ``j``-th sine character on the basis of an SL2-type algebra."""
    if not _sl2_like(A):
        raise ValueError("sine characters are only defined for the SL2/PGL2 fusion algebras")
    p = A.prime
    jmax = (p - 1) // 2 if A.kind == "pgl2" else p - 1
    if not 1 <= j <= jmax:
        raise ValueError(f"character index {j} outside 1..{jmax}")
    with workprec(precision_bits):
        s = mpmath.sin(j * mpmath.pi / p)
        return [mpmath.sin((spin.twice_value + 1) * j * mpmath.pi / p) / s for spin in A.basis]


def casimir_character_value(p: int, j: int, precision_bits: int | None = None):
    """``p / (2 sin(j pi / p))^2``."""
    with workprec(precision_bits):
        return mpmath.mpf(p) / (2 * mpmath.sin(j * mpmath.pi / p)) ** 2


@dataclass
class CanonicalBasis:
    """Numeric idempotent basis of a semisimple algebra.

    ``idempotents[k][a]`` is the coefficient of ``e_a`` in ``e†_k``;
    ``characters[k][a] = chi_k(e_a)``; ``nu[k] = eta(e†_k, e†_k)``.
    """

    idempotents: list
    characters: list
    nu: list
    precision_bits: int

    def s_matrix(self) -> list:
        """``S[rho][lam] = chi_lam(e_rho) * sqrt(nu_lam)`` (principal root)."""
        with workprec(self.precision_bits):
            roots = [mpmath.sqrt(v) for v in self.nu]
            n = len(self.nu)
            return [[self.characters[k][r] * roots[k] for k in range(n)] for r in range(n)]


def _num_mult(A: FrobeniusAlgebra, u: Sequence, v: Sequence) -> list:
    n = A.dim
    out = [mpmath.mpf(0)] * n
    for (a, b, c), w in A.structure.items():
        if u[a] and v[b]:
            out[c] += u[a] * v[b] * mpmath.mpf(w.numerator) / w.denominator
    return out


def canonical_basis_numeric(A: FrobeniusAlgebra, precision_bits: int | None = None) -> CanonicalBasis:
    """Idempotents from the eigenvectors of a generic multiplication operator."""
    bits = precision_bits or default_precision()
    n = A.dim
    with workprec(bits):
        tol = mpmath.mpf(2) ** (-(bits // 2))
        for attempt in range(1, 6):
            # deterministic generic element; retried if eigenvalues collide
            x = [mpmath.mpf(1) / (k + 1 + attempt) + mpmath.mpf(k * attempt) / 7 for k in range(n)]
            L = mpmath.matrix(n, n)
            for (a, b, c), w in A.structure.items():
                L[c, b] += x[a] * mpmath.mpf(w.numerator) / w.denominator
            evals, evecs = mpmath.eig(L)
            gaps = [abs(evals[i] - evals[k]) for i in range(n) for k in range(i)]
            if not gaps or min(gaps) > tol:
                break
        else:
            raise SingularAlgebra("could not separate eigenvalues of a generic element")
        idems, chars, nus = [], [], []
        unit = [mpmath.mpf(0)] * n
        unit[A.unit] = mpmath.mpf(1)
        g = A.metric_matrix
        for k in range(n):
            v = [evecs[i, k] for i in range(n)]
            v = [_realify(c) for c in v]
            sq = _num_mult(A, v, v)
            piv = max(range(n), key=lambda i: abs(v[i]))
            if abs(v[piv]) < tol:
                raise SingularAlgebra("zero eigenvector")
            s = sq[piv] / v[piv]
            if abs(s) < tol:
                raise SingularAlgebra("nilpotent direction: algebra is not semisimple")
            e = [c / s for c in v]
            idems.append(e)
            row = []
            for a in range(n):
                ea = [mpmath.mpf(int(i == a)) for i in range(n)]
                prod = _num_mult(A, ea, e)
                row.append(prod[piv] / e[piv])
            chars.append(row)
            nus.append(sum(e[a] * e[b] * mpmath.mpf(g[a][b].numerator) / g[a][b].denominator
                           for a in range(n) for b in range(n) if g[a][b]))
        order = sorted(range(n), key=lambda k: (-mpmath.re(nus[k]), mpmath.im(nus[k])))
        cb = CanonicalBasis([idems[k] for k in order], [chars[k] for k in order],
                            [nus[k] for k in order], bits)
        det = mpmath.det(mpmath.matrix(cb.characters))
        if abs(det) < tol:
            raise SingularAlgebra("character matrix is singular")
        return cb


def _realify(c):
    if isinstance(c, mpmath.mpc) and c.imag == 0:
        return c.real
    return c


def _parse_label(x) -> Hashable:
    return tuple(x) if isinstance(x, list) else x


def algebra_from_json(doc: dict[str, Any]) -> FrobeniusAlgebra:
    """Build and validate an algebra from the JSON document layout.

    Layout: ``{"basis": [...], "unit": label, "structure": [[a,b,c,num,den],...],
    "metric": [[a,b,num,den],...], "dual": [[a,b],...], "center_order": n}``.
    """
    try:
        basis = tuple(_parse_label(b) for b in doc["basis"])
        idx = {b: i for i, b in enumerate(basis)}
        if len(idx) != len(basis):
            raise AlgebraError("duplicate basis labels")
        structure = {}
        for a, b, c, num, den in doc["structure"]:
            structure[(idx[_parse_label(a)], idx[_parse_label(b)], idx[_parse_label(c)])] = Fraction(num, den)
        metric = {}
        for a, b, num, den in doc["metric"]:
            metric[(idx[_parse_label(a)], idx[_parse_label(b)])] = Fraction(num, den)
        unit = idx[_parse_label(doc["unit"])]
        center = int(doc.get("center_order", 1))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise AlgebraError(f"malformed algebra document: {exc!r}") from exc
    structure = {k: v for k, v in structure.items() if v != 0}
    metric = {k: v for k, v in metric.items() if v != 0}
    alg = FrobeniusAlgebra(basis=basis, unit=unit, structure=structure, metric=metric,
                           center_order=center)
    if "dual" in doc:
        declared = {idx[_parse_label(a)]: idx[_parse_label(b)] for a, b in doc["dual"]}
        if any(declared.get(i) != alg.dual[i] for i in range(alg.dim)):
            raise AlgebraError("declared dual disagrees with the metric")
    return alg.validate()


def load_algebra(path) -> FrobeniusAlgebra:
    with open(path) as fh:
        return algebra_from_json(json.load(fh))
