"""Evaluation of the 2d TQFT attached to a Frobenius algebra.

Four independent routes to the same numbers:

* ``degree_exact``: character sum over the roots of ``S_{p-1}``, evaluated
  exactly as a trace in ``Q[x]/(S_{p-1})``.  This is the authoritative path.
* ``contract``: tensor-network contraction of 3-point tensors along a
  trivalent dual graph, with the inverse metric on internal edges.
* ``degree_float``: the same character sum as sines in extended precision.
* ``degree_via_s_matrix``: Verlinde sum built from numeric idempotents.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from .arith import (
    QuotientRingElement,
    RationalPoly,
    chebyshev_like_s,
    newton_power_sums,
    default_precision,
    poly_modinv,
    workprec,
)
from .fusion import (
    FrobeniusAlgebra,
    _check_prime,
    build_pgl2_dopers,
    canonical_basis_numeric,
    handle_element,
)

__all__ = [
    "InvalidGraph",
    "PrecisionExhausted",
    "IntegralityViolation",
    "DualGraph",
    "DegreeResult",
    "pants_decomposition",
    "enumerate_trivalent_graphs",
    "contract",
    "algebra_value",
    "degree_exact",
    "degree_float",
    "degree_via_s_matrix",
    "pgln_degree",
    "check_tree_factorization",
    "check_loop_factorization",
    "check_tail",
    "three_point_with_unit",
    "inertia_prime_bound",
    "degree_table",
    "factorization_suite",
    "graph_independence",
    "GRAPH_CASES",
]


class InvalidGraph(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    """The float sum is too far from an integer at the working precision."""


class IntegralityViolation(AssertionError):
    pass


def _check_stable(g: int, r: int) -> None:
    if g < 0 or r < 0 or 2 * g - 2 + r <= 0:
        raise ValueError(f"(g, r) = ({g}, {r}) is not stable: need 2g - 2 + r > 0")


# ---------------------------------------------------------------- dual graphs

@dataclass(frozen=True)
class DualGraph:
    """Trivalent graph; half-edges are integers ``0 .. 3V-1``.

    ``vertices[v]`` lists the three half-edges at ``v``; ``edges`` pairs
    half-edges (a pair at the same vertex is a self-loop); ``legs`` is an
    ordered list of ``(half_edge, label)``.
    """

    vertices: tuple
    edges: tuple
    legs: tuple

    @property
    def genus(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    def validate(self, g: int | None = None, r: int | None = None) -> "DualGraph":
        owner = {}
        for v, hs in enumerate(self.vertices):
            if len(hs) != 3:
                raise InvalidGraph(f"vertex {v} has {len(hs)} half-edges")
            for h in hs:
                if h in owner:
                    raise InvalidGraph(f"half-edge {h} on two vertices")
                owner[h] = v
        used = [h for e in self.edges for h in e] + [h for h, _ in self.legs]
        if sorted(used) != sorted(owner):
            raise InvalidGraph("every half-edge must lie in exactly one edge or leg")
        # connectivity
        adj: dict[int, set] = {v: set() for v in range(len(self.vertices))}
        for a, b in self.edges:
            adj[owner[a]].add(owner[b])
            adj[owner[b]].add(owner[a])
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            raise InvalidGraph("graph is disconnected")
        if g is not None and self.genus != g:
            raise InvalidGraph(f"graph has genus {self.genus}, expected {g}")
        if r is not None and self.n_legs != r:
            raise InvalidGraph(f"graph has {self.n_legs} legs, expected {r}")
        return self

    def relabel(self, labels: Sequence) -> "DualGraph":
        if len(labels) != len(self.legs):
            raise ValueError("wrong number of leg labels")
        return DualGraph(self.vertices, self.edges,
                         tuple((h, lab) for (h, _), lab in zip(self.legs, labels)))

    @classmethod
    def from_incidence(cls, n_vertices: int, leg_vertex: Sequence[int],
                       vertex_edges: Iterable[tuple[int, int]], labels: Sequence | None = None) -> "DualGraph":
        """Build from ``leg i sits on vertex leg_vertex[i]`` and vertex pairs."""
        free: list[list[int]] = [[3 * v, 3 * v + 1, 3 * v + 2] for v in range(n_vertices)]
        legs, edges = [], []
        labels = list(labels) if labels is not None else [None] * len(leg_vertex)
        for v, lab in zip(leg_vertex, labels):
            if not free[v]:
                raise InvalidGraph(f"vertex {v} over-full")
            legs.append((free[v].pop(0), lab))
        for u, v in vertex_edges:
            if not free[u] or not free[v] or (u == v and len(free[u]) < 2):
                raise InvalidGraph(f"vertex over-full at edge ({u},{v})")
            a = free[u].pop(0)
            b = free[v].pop(0)
            edges.append((a, b))
        if any(free):
            raise InvalidGraph("some vertex is not trivalent")
        verts = tuple((3 * v, 3 * v + 1, 3 * v + 2) for v in range(n_vertices))
        return cls(verts, tuple(edges), tuple(legs)).validate()


def pants_decomposition(g: int, r: int, radii: Sequence | None = None) -> DualGraph:
    """Canonical caterpillar graph of type ``(g, r)``.

    Tadpoles (a vertex carrying a self-loop) and legs hang off a path of
    ``g + r - 2`` spine vertices, tadpoles first.  ``(1,1)`` is the bare
    tadpole and ``(2,0)`` the theta graph.
    """
    _check_stable(g, r)
    radii = list(radii) if radii is not None else [0] * r
    if len(radii) != r:
        raise ValueError(f"expected {r} radii, got {len(radii)}")
    if (g, r) == (1, 1):
        return DualGraph.from_incidence(1, [0], [(0, 0)], radii)
    if (g, r) == (2, 0):
        return DualGraph.from_incidence(2, [], [(0, 1)] * 3, radii)
    m = g + r - 2
    n_vertices = m + g
    slots = []  # spine vertex for each attachment
    if m == 1:
        slots = [0, 0, 0]
    else:
        slots = [0, 0] + list(range(1, m - 1)) + [m - 1, m - 1]
    edges = [(i, i + 1) for i in range(m - 1)]
    leg_vertex = []
    for k, s in enumerate(slots):
        if k < g:
            t = m + k
            edges.append((s, t))
            edges.append((t, t))
        else:
            leg_vertex.append(s)
    return DualGraph.from_incidence(n_vertices, leg_vertex, edges, radii).validate(g, r)


def _degree_sequences_edges(remaining: list[int], start: int = 0):
    """All multisets of vertex pairs (loops allowed) realizing ``remaining``."""
    u = next((i for i, d in enumerate(remaining) if d > 0), None)
    if u is None:
        yield []
        return
    for v in range(u, len(remaining)):
        need = 2 if v == u else 1
        if remaining[v] < need or (v == u and remaining[u] < 2):
            continue
        remaining[u] -= 1
        remaining[v] -= 1
        for rest in _degree_sequences_edges(remaining):
            yield [(u, v)] + rest
        remaining[u] += 1
        remaining[v] += 1


def _canonical_form(n_vertices: int, leg_vertex: Sequence[int], edges: Sequence[tuple[int, int]]):
    best = None
    for perm in itertools.permutations(range(n_vertices)):
        lv = tuple(perm[v] for v in leg_vertex)
        es = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
        key = (lv, es)
        if best is None or key < best:
            best = key
    return best


def enumerate_trivalent_graphs(g: int, r: int) -> list[DualGraph]:
    """All connected trivalent graphs of type ``(g, r)`` with labeled legs, up to isomorphism.

    Exhaustive over vertex permutations, so only meant for a handful of vertices.
    """
    _check_stable(g, r)
    n_vertices = 2 * g - 2 + r
    if n_vertices > 6:
        raise ValueError("exhaustive enumeration is limited to 6 vertices")
    seen = set()
    out = []
    for leg_vertex in itertools.product(range(n_vertices), repeat=r):
        load = [3] * n_vertices
        for v in leg_vertex:
            load[v] -= 1
        if min(load) < 0:
            continue
        for edges in _degree_sequences_edges(load):
            key = _canonical_form(n_vertices, leg_vertex, edges)
            if key in seen:
                continue
            try:
                graph = DualGraph.from_incidence(n_vertices, leg_vertex, edges)
            except InvalidGraph:
                continue
            seen.add(key)
            out.append(graph)
    return out


# ---------------------------------------------------------------- contraction

def _as_object(rows) -> np.ndarray:
    arr = np.empty(np.shape(rows), dtype=object)
    for idx in itertools.product(*(range(s) for s in arr.shape)):
        v = rows
        for i in idx:
            v = v[i]
        arr[idx] = Fraction(v)
    return arr


@lru_cache(maxsize=64)
def _algebra_tensors(A: FrobeniusAlgebra):
    return _as_object(A.trilinear), _as_object(A.inverse_metric)


def _trace_repeated(t: np.ndarray, idx: list):
    while True:
        dup = next(((i, j) for i in range(len(idx)) for j in range(i + 1, len(idx)) if idx[i] == idx[j]), None)
        if dup is None:
            return t, idx
        i, j = dup
        t = np.diagonal(t, axis1=i, axis2=j).sum(axis=-1)
        idx = [x for k, x in enumerate(idx) if k not in (i, j)]


def _contract_fixed(A: FrobeniusAlgebra, G: DualGraph, fixed: dict) -> Fraction:
    T, Ginv = _algebra_tensors(A)
    label_of = {h: A.index(lab) for h, lab in G.legs}
    label_of.update(fixed)
    tensors = []
    for hs in G.vertices:
        t = T
        idx = []
        # slice fixed legs, keeping axes for free half-edges
        sl = tuple(label_of[h] if h in label_of else slice(None) for h in hs)
        t = t[sl]
        idx = [h for h in hs if h not in label_of]
        tensors.append((t, idx))
    for a, b in G.edges:
        if a in fixed or b in fixed:
            continue
        tensors.append((Ginv, [a, b]))
    tensors = [_trace_repeated(np.asarray(t, dtype=object), list(i)) for t, i in tensors]
    while len(tensors) > 1:
        # greedy: merge the pair sharing indices whose result is smallest
        best = None
        for i in range(len(tensors)):
            for j in range(i + 1, len(tensors)):
                shared = set(tensors[i][1]) & set(tensors[j][1])
                if not shared:
                    continue
                size = len(tensors[i][1]) + len(tensors[j][1]) - 2 * len(shared)
                if best is None or size < best[0]:
                    best = (size, i, j, shared)
        if best is None:
            # disconnected pieces (only after fixing edges): multiply scalars
            (t1, i1), (t2, i2) = tensors[0], tensors[1]
            tensors = [(np.multiply.outer(t1, t2), i1 + i2)] + tensors[2:]
            continue
        _, i, j, shared = best
        (t1, i1), (t2, i2) = tensors[i], tensors[j]
        ax1 = [i1.index(s) for s in shared]
        ax2 = [i2.index(s) for s in shared]
        t = np.tensordot(t1, t2, axes=(ax1, ax2))
        idx = [x for x in i1 if x not in shared] + [x for x in i2 if x not in shared]
        t, idx = _trace_repeated(np.asarray(t, dtype=object), idx)
        tensors = [tensors[k] for k in range(len(tensors)) if k not in (i, j)] + [(t, idx)]
    t, idx = tensors[0]
    if idx:
        raise InvalidGraph("dangling half-edges after contraction")
    return Fraction(t.item() if isinstance(t, np.ndarray) else t)


def contract(A: FrobeniusAlgebra, G: DualGraph, threads: int = 1) -> Fraction:
    """Tensor-network value of ``G`` with 3-point tensor ``eta(e_a e_b, e_c)``.

    With ``threads > 1`` the sum is split over the labelings of one internal
    edge and reduced in a fixed order, so the result does not depend on the
    pool size.
    """
    G.validate()
    for _, lab in G.legs:
        A.index(lab)
    if threads <= 1 or not G.edges:
        return _contract_fixed(A, G, {})
    a, b = G.edges[0]
    ginv = A.inverse_metric
    jobs = [(x, y) for x in range(A.dim) for y in range(A.dim) if ginv[x][y]]

    def one(job):
        x, y = job
        return ginv[x][y] * _contract_fixed(A, G, {a: x, b: y})

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(one, jobs))
    return sum(parts, Fraction(0))


def algebra_value(A: FrobeniusAlgebra, g: int, labels: Sequence) -> Fraction:
    """Closed-form TQFT value ``eps(e_1 ... e_r H^g)`` with ``H`` the handle element."""
    v = A.basis_element(A.unit)
    for lab in labels:
        v = A.multiply(v, A.basis_element(A.index(lab)))
    H = handle_element(A)
    for _ in range(g):
        v = A.multiply(v, H)
    return A.pair(v, A.basis_element(A.unit))


# ---------------------------------------------------------------- exact path

@dataclass
class DegreeResult:
    p: int
    g: int
    r: int
    radii: tuple
    value: Fraction
    method: str
    raw: object = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {"p": self.p, "g": self.g, "r": self.r, "radii": list(self.radii),
                "value": f"{self.value.numerator}/{self.value.denominator}", "method": self.method}


class _TraceContext:
    """Per-prime data for traces over the roots of ``S_{p-1}``."""

    def __init__(self, p: int):
        self.p = p
        self.modulus = chebyshev_like_s(p - 1)
        self.power_sums = newton_power_sums(self.modulus, 2 * (p - 1))
        x = RationalPoly.x()
        four_minus = RationalPoly([4]) - x * x
        self.handle = QuotientRingElement(p * poly_modinv(four_minus, self.modulus), self.modulus)
        self.handle_inv = QuotientRingElement(four_minus * Fraction(1, p), self.modulus)
        self._s = {}
        self._lock_free_cache = {}

    def s_even(self, n: int) -> QuotientRingElement:
        if n not in self._s:
            self._s[n] = QuotientRingElement(chebyshev_like_s(2 * n), self.modulus)
        return self._s[n]

    def handle_power(self, k: int) -> QuotientRingElement:
        if k not in self._lock_free_cache:
            base = self.handle if k >= 0 else self.handle_inv
            self._lock_free_cache[k] = base ** abs(k)
        return self._lock_free_cache[k]


@lru_cache(maxsize=None)
def _trace_context(p: int) -> _TraceContext:
    return _TraceContext(p)


def _check_radii(p: int, r: int, radii: Sequence[int]) -> tuple:
    radii = tuple(int(x) for x in radii)
    if len(radii) != r:
        raise ValueError(f"expected {r} radii, got {len(radii)}")
    top = (p - 3) // 2
    for n in radii:
        if not 0 <= n <= top:
            raise ValueError(f"radius {n} outside 0..{top}")
    return radii


@lru_cache(maxsize=None)
def _degree_exact_sorted(p: int, g: int, radii: tuple) -> Fraction:
    ctx = _trace_context(p)
    elt = ctx.handle_power(g - 1)
    for n in radii:
        elt = elt * ctx.s_even(n)
    value = elt.trace(ctx.power_sums) / 2
    if value.denominator != 1 or value < 0:
        raise IntegralityViolation(f"degree {value} at p={p}, g={g}, radii={radii} is not a nonnegative integer")
    return value


def degree_exact(p: int, g: int, r: int, radii: Sequence[int] = ()) -> Fraction:
    """Generic degree of the dormant PGL2-oper moduli as an exact rational."""
    _check_prime(p)
    _check_stable(g, r)
    radii = _check_radii(p, r, radii)
    return _degree_exact_sorted(p, g, tuple(sorted(radii)))


def _trig_sum(p: int, g: int, radii: Sequence[int], bits: int):
    with workprec(bits):
        pi = mpmath.pi
        total = mpmath.mpf(0)
        for j in range(1, p):
            s = mpmath.sin(j * pi / p)
            term = mpmath.mpf(1)
            for n in radii:
                term *= mpmath.sin((2 * n + 1) * j * pi / p)
            total += term / s ** (2 * g - 2 + len(radii))
        return mpmath.mpf(p) ** (g - 1) / mpmath.mpf(2) ** (2 * g - 1) * total


def _round_checked(raw, bits: int) -> Fraction:
    with workprec(bits):
        val = mpmath.re(raw) if isinstance(raw, mpmath.mpc) else raw
        nearest = int(mpmath.nint(val))
        if abs(raw - nearest) > mpmath.mpf(2) ** (-(bits // 2)):
            raise PrecisionExhausted(f"{mpmath.nstr(raw, 30)} is not within 2^-{bits // 2} of an integer")
    return Fraction(nearest)


def degree_float(p: int, g: int, r: int, radii: Sequence[int] = (), precision_bits: int | None = None) -> DegreeResult:
    """Closed sine sum in extended precision, rounded to the nearest integer."""
    _check_prime(p)
    _check_stable(g, r)
    radii = _check_radii(p, r, radii)
    bits = precision_bits or default_precision()
    raw = _trig_sum(p, g, radii, bits)
    return DegreeResult(p, g, r, radii, _round_checked(raw, bits), "float_rounded", raw)


@lru_cache(maxsize=None)
def _pgl2_canonical(p: int, bits: int):
    return canonical_basis_numeric(build_pgl2_dopers(p), bits)


def degree_via_s_matrix(p: int, g: int, r: int, radii: Sequence[int] = (),
                        precision_bits: int | None = None) -> DegreeResult:
    """Verlinde sum ``sum_l prod_i S[rho_i][l] / S[0][l]^(2g-2+r)``."""
    _check_prime(p)
    _check_stable(g, r)
    radii = _check_radii(p, r, radii)
    bits = precision_bits or default_precision()
    cb = _pgl2_canonical(p, bits)
    S = cb.s_matrix()
    with workprec(bits):
        raw = mpmath.mpf(0)
        for lam in range(len(S)):
            term = mpmath.mpf(1)
            for n in radii:
                term *= S[n][lam]
            raw += term / S[0][lam] ** (2 * g - 2 + r)
    return DegreeResult(p, g, r, radii, _round_checked(raw, bits), "s_matrix", raw)


# ---------------------------------------------------------------- PGL_n

def _cyclotomic(p: int) -> RationalPoly:
    return RationalPoly([1] * p)


def pgln_degree(n: int, g: int, p: int) -> Fraction:
    """Closed formula over ordered ``n``-tuples of distinct ``p``-th roots of unity.

    Every term lives in ``Q[x]/(Phi_p)``; the total is Galois-invariant, hence a
    constant, which is checked before returning.
    """
    _check_prime(p)
    if n < 2 or g < 2:
        raise ValueError("need n >= 2 and g >= 2")
    if p <= n * max(g - 1, 2):
        raise ValueError(f"need p > n*max(g-1, 2) = {n * max(g - 1, 2)}")
    m = _cyclotomic(p)
    one = QuotientRingElement(RationalPoly([1]), m)
    xpow = [QuotientRingElement(RationalPoly([0] * k + [1]), m) for k in range(p)]
    inv_diff = {d: (xpow[d] - one).inverse() for d in range(1, p)}
    e = (n - 1) * (g - 1)
    total = QuotientRingElement(RationalPoly(), m)
    for tup in itertools.permutations(range(p), n):
        term = xpow[(e * sum(tup)) % p]
        for i in range(n):
            for j in range(n):
                if i != j:
                    # 1/(z^a - z^b) = z^(-b) / (z^(a-b) - 1)
                    a, b = tup[i], tup[j]
                    term = term * (xpow[(-b) % p] * inv_diff[(a - b) % p]) ** (g - 1)
        total = total + term
    if total.value.degree > 0:
        raise ArithmeticError("PGL_n sum is not rational")
    s = total.value.coeffs[0] if total.value.coeffs else Fraction(0)
    return Fraction(p) ** (e - 1) / math.factorial(n) * s


# ---------------------------------------------------------------- factorization

def _value_source(src) -> tuple[Callable, list, int]:
    """``(value(g, labels), [(a, b, eta^ab)], unit label)`` for a prime or an algebra."""
    if isinstance(src, FrobeniusAlgebra):
        A = src
        ginv = A.inverse_metric
        pairs = [(A.basis[a], A.basis[b], ginv[a][b])
                 for a in range(A.dim) for b in range(A.dim) if ginv[a][b]]
        return (lambda g, labs: algebra_value(A, g, labs)), pairs, A.basis[A.unit]
    p = src
    _check_prime(p)
    # metric delta / |Z| with |Z| = 1, so eta^{ab} = delta_{ab}
    pairs = [(k, k, Fraction(1)) for k in range((p - 1) // 2)]
    A = build_pgl2_dopers(p)

    def value(g, labs):
        if 2 * g - 2 + len(labs) <= 0:
            # unstable types: Lambda_{0,2} is the metric, Lambda_{1,0} the dimension
            return algebra_value(A, g, labs)
        return degree_exact(p, g, len(labs), labs)

    return value, pairs, 0


def _report(kind: str, lhs: Fraction, rhs: Fraction, **extra) -> dict:
    return {"check": kind, "lhs": lhs, "rhs": rhs, "ok": lhs == rhs, **extra}


def check_tree_factorization(src, g1: int, r1: int, radii1: Sequence, g2: int, r2: int, radii2: Sequence) -> dict:
    """Separating node: ``Lambda_{g1+g2}(v1, v2) = sum eta^{ab} Lambda_{g1}(v1, a) Lambda_{g2}(v2, b)``."""
    if 2 * g1 - 1 + r1 <= 0 or 2 * g2 - 1 + r2 <= 0:
        raise ValueError("each side must satisfy 2g - 1 + r > 0")
    if len(radii1) != r1 or len(radii2) != r2:
        raise ValueError("radii length mismatch")
    value, pairs, _ = _value_source(src)
    lhs = value(g1 + g2, list(radii1) + list(radii2))
    terms = [(a, b, w * value(g1, list(radii1) + [a]) * value(g2, list(radii2) + [b])) for a, b, w in pairs]
    rhs = sum((t for *_, t in terms), Fraction(0))
    return _report("tree", lhs, rhs, terms=terms)


def check_loop_factorization(src, g: int, r: int, radii: Sequence) -> dict:
    """Non-separating node: ``Lambda_{g+1}(v) = sum eta^{ab} Lambda_g(v, a, b)``."""
    if 2 * g + r <= 0:
        raise ValueError("need 2g + r > 0")
    if len(radii) != r:
        raise ValueError("radii length mismatch")
    value, pairs, _ = _value_source(src)
    lhs = value(g + 1, list(radii))
    terms = [(a, b, w * value(g, list(radii) + [a, b])) for a, b, w in pairs]
    return _report("loop", lhs, sum((t for *_, t in terms), Fraction(0)), terms=terms)


def check_tail(src, g: int, r: int, radii: Sequence) -> dict:
    """Forgetting a unit-labeled point leaves the value unchanged."""
    if 2 * g - 1 + r <= 0:
        raise ValueError("need 2g - 1 + r > 0")
    if len(radii) != r:
        raise ValueError("radii length mismatch")
    value, _, unit = _value_source(src)
    return _report("tail", value(g, list(radii) + [unit]), value(g, list(radii)))


def three_point_with_unit(p: int, rho1: int, rho2: int) -> Fraction:
    """Metric value ``eta(e_rho1, e_rho2)`` read off the 3-point degree with a unit insertion."""
    value = degree_exact(p, 0, 3, (rho1, rho2, 0))
    expected = Fraction(1) if rho1 == rho2 else Fraction(0)
    if value != expected:
        raise AssertionError(f"3-point value {value} differs from the metric {expected}")
    return value


def inertia_prime_bound(g: int, r: int, p: int) -> int:
    """Integer bound beyond which the Witten-Kontsevich comparison holds for every prime."""
    _check_stable(g, r)
    m = 0
    while (2 * p ** (m + 1) - 1) ** 2 <= 1 + 8 * g:
        m += 1
    u = p ** (3 * m) * (p ** (3 * m) + 1) * (p ** (2 * m) - 1)
    return math.factorial(2 * g - 2 + r) * max(4, 16 * g ** 4 - 1, u)


def degree_table(p: int, g: int, r: int, threads: int = 1) -> list[tuple[tuple, Fraction]]:
    """``degree_exact`` for every radii tuple, in lexicographic order."""
    _check_prime(p)
    _check_stable(g, r)
    rows = list(itertools.product(range((p - 1) // 2), repeat=r))
    fn = lambda radii: degree_exact(p, g, r, radii)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(fn, rows))
    else:
        vals = [fn(x) for x in rows]
    return list(zip(rows, vals))


# ---------------------------------------------------------------- suites

def _radii_tuples(p: int, r: int):
    return itertools.product(range((p - 1) // 2), repeat=r)


def factorization_suite(p: int, genus_max: int = 2, marks_max: int = 3) -> list[dict]:
    """Tree, loop and tail identities over every radii labeling in the grid."""
    out = []
    for g in range(genus_max + 1):
        for r in range(marks_max + 1):
            for g1 in range(g + 1):
                for r1 in range(r + 1):
                    g2, r2 = g - g1, r - r1
                    if 2 * g1 - 1 + r1 <= 0 or 2 * g2 - 1 + r2 <= 0 or (g1, r1) > (g2, r2):
                        continue
                    for rad in _radii_tuples(p, r):
                        rep = check_tree_factorization(p, g1, r1, rad[:r1], g2, r2, rad[r1:])
                        out.append({**rep, "p": p, "g": [g1, g2], "radii": [list(rad[:r1]), list(rad[r1:])]})
            if g + 1 <= genus_max and 2 * g + r > 0:
                for rad in _radii_tuples(p, r):
                    out.append({**check_loop_factorization(p, g, r, rad), "p": p, "g": g, "radii": list(rad)})
            if 2 * g - 1 + r > 0:
                for rad in _radii_tuples(p, r):
                    out.append({**check_tail(p, g, r, rad), "p": p, "g": g, "radii": list(rad)})
    return out


GRAPH_CASES = ((0, 4), (0, 5), (1, 1), (1, 2), (2, 0))


def graph_independence(p: int, cases: Sequence[tuple[int, int]] = GRAPH_CASES) -> list[dict]:
    """Contract every trivalent graph of each type under every leg labeling."""
    A = build_pgl2_dopers(p)
    out = []
    for g, r in cases:
        graphs = enumerate_trivalent_graphs(g, r)
        for rad in _radii_tuples(p, r):
            values = [contract(A, G.relabel(rad)) for G in graphs]
            out.append({"p": p, "g": g, "r": r, "radii": list(rad), "graphs": len(graphs),
                        "values": values, "ok": len(set(values)) == 1})
    return out
