import json
from fractions import Fraction

import mpmath
import pytest

from doper.fusion import (
    AlgebraError,
    SingularAlgebra,
    Spin,
    algebra_from_json,
    build_pgl2_dopers,
    build_sl2_wzw,
    canonical_basis_numeric,
    casimir,
    casimir_character_value,
    characters_numeric,
    fusion_coefficient,
    load_algebra,
    trivial_algebra,
)

PRIMES = [5, 7, 11, 13]


def S(x):
    return Spin.of(x)


@pytest.mark.parametrize("a, b, c, expected", [
    (0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 1, 1), (Fraction(1, 2), Fraction(1, 2), 1, 1),
    (Fraction(1, 2), 0, 0, 0), (Fraction(3, 2), Fraction(3, 2), 0, 1), (Fraction(3, 2), Fraction(3, 2), 1, 0),
])
def test_fusion_coefficient_level3(a, b, c, expected):
    assert fusion_coefficient(S(a), S(b), S(c), 3) == expected


def test_fusion_symmetric_and_range():
    level = 9
    spins = [Spin(k) for k in range(level + 1)]
    for a in spins:
        for b in spins:
            for c in spins:
                v = fusion_coefficient(a, b, c, level)
                assert v == fusion_coefficient(b, a, c, level) == fusion_coefficient(c, b, a, level)
    with pytest.raises(ValueError):
        fusion_coefficient(Spin(4), Spin(0), Spin(0), 3)


def test_wzw_p5():
    U = build_sl2_wzw(5)
    assert [str(s) for s in U.basis] == ["0", "1/2", "1", "3/2"]
    half = U.basis_element(U.index(S(Fraction(1, 2))))
    assert U.multiply(half, half) == {U.index(0): 1, U.index(1): 1}
    assert U.unit == U.index(0)
    assert build_sl2_wzw(7).dim == 6


def test_pgl2_p5():
    V = build_pgl2_dopers(5)
    assert V.dim == 2
    e1 = V.basis_element(1)
    assert V.multiply(e1, e1) == {0: 1, 1: 1}
    for p in PRIMES:
        V = build_pgl2_dopers(p)
        assert V.dim == (p - 1) // 2
        assert all(V.dual[i] == i for i in range(V.dim))
        for b in range(V.dim):
            assert V.multiply(V.basis_element(0), V.basis_element(b)) == V.basis_element(b)


@pytest.mark.parametrize("p", [4, 9, 3, 15])
def test_builders_reject(p):
    with pytest.raises(ValueError):
        build_sl2_wzw(p)
    with pytest.raises(ValueError):
        build_pgl2_dopers(p)


@pytest.mark.parametrize("p", PRIMES)
def test_axioms_exhaustive(p):
    assert build_sl2_wzw(p).axiom_violations() == []
    assert build_pgl2_dopers(p).axiom_violations() == []


def test_subring_closure():
    for p in [5, 7, 11, 13, 17, 19, 23, 29, 31]:
        level = p - 2
        ints = [Spin(2 * n) for n in range((p - 1) // 2)]
        for a in ints:
            for b in ints:
                for c2 in range(level + 1):
                    if fusion_coefficient(a, b, Spin(c2), level):
                        assert c2 % 2 == 0


def test_casimir():
    assert casimir(build_pgl2_dopers(5)) == {0: 2, 1: 1}
    assert casimir(build_pgl2_dopers(7))[0] == 3
    assert casimir(trivial_algebra()) == {0: 1}


def test_characters_p5():
    V = build_pgl2_dopers(5)
    with mpmath.workprec(256):
        phi = (1 + mpmath.sqrt(5)) / 2
        c1 = characters_numeric(V, 1)
        c2 = characters_numeric(V, 2)
        assert c1[0] == 1 and c2[0] == 1
        assert abs(c1[1] - phi) < 1e-60
        assert abs(c2[1] - (1 - phi)) < 1e-60
        assert abs(casimir_character_value(5, 1) - (phi + 2)) < 1e-60
        assert abs(casimir_character_value(5, 2) - (3 - phi)) < 1e-60
    with pytest.raises(ValueError):
        characters_numeric(V, 3)
    with pytest.raises(ValueError):
        characters_numeric(V, 0)


@pytest.mark.parametrize("p", PRIMES)
def test_character_homomorphism_and_casimir(p):
    V = build_pgl2_dopers(p)
    cas = casimir(V)
    with mpmath.workprec(256):
        for j in range(1, (p - 1) // 2 + 1):
            chi = characters_numeric(V, j)
            for a in range(V.dim):
                for b in range(V.dim):
                    prod = V.multiply(V.basis_element(a), V.basis_element(b))
                    lhs = sum(c * chi[k] for k, c in prod.items())
                    assert abs(lhs - chi[a] * chi[b]) < mpmath.mpf(10) ** -25
            cas_val = sum(c * chi[k] for k, c in cas.items())
            assert abs(cas_val - casimir_character_value(p, j)) < mpmath.mpf(2) ** -(256 - 32)


def test_character_matrix_invertible():
    for p in [5, 7, 11, 13, 17, 19, 23, 29, 31]:
        V = build_pgl2_dopers(p)
        with mpmath.workprec(256):
            M = mpmath.matrix([characters_numeric(V, j) for j in range(1, V.dim + 1)])
            assert abs(mpmath.det(M)) > 1e-10


@pytest.mark.parametrize("p", PRIMES)
def test_canonical_basis(p):
    V = build_pgl2_dopers(p)
    cb = canonical_basis_numeric(V, 256)
    tol = mpmath.mpf(10) ** -30
    with mpmath.workprec(256):
        from doper.fusion import _num_mult
        for a, ea in enumerate(cb.idempotents):
            for b, eb in enumerate(cb.idempotents):
                prod = _num_mult(V, ea, eb)
                target = ea if a == b else [0] * V.dim
                assert max(abs(x - y) for x, y in zip(prod, target)) < tol
        total = [sum(col) for col in zip(*cb.idempotents)]
        assert max(abs(x - (1 if i == 0 else 0)) for i, x in enumerate(total)) < tol
        # nu equals the inverse Casimir character, in some order
        expected = sorted(1 / casimir_character_value(p, j) for j in range(1, V.dim + 1))
        assert max(abs(x - y) for x, y in zip(sorted(cb.nu), expected)) < tol


def test_canonical_trivial():
    cb = canonical_basis_numeric(trivial_algebra(), 256)
    assert cb.idempotents == [[1]] and cb.nu == [1]


def test_canonical_rejects_nilpotent():
    doc = {"basis": [0, 1], "unit": 0,
           "structure": [[0, 0, 0, 1, 1], [0, 1, 1, 1, 1], [1, 0, 1, 1, 1]],
           "metric": [[0, 1, 1, 1], [1, 0, 1, 1]]}
    A = algebra_from_json(doc)  # dual numbers Q[e]/(e^2): Frobenius, not semisimple
    with pytest.raises(SingularAlgebra):
        canonical_basis_numeric(A, 256)


def _doc_for(A):
    return {
        "basis": [str(b) for b in A.basis],
        "unit": str(A.basis[A.unit]),
        "structure": [[str(A.basis[a]), str(A.basis[b]), str(A.basis[c]), v.numerator, v.denominator]
                      for (a, b, c), v in A.structure.items()],
        "metric": [[str(A.basis[a]), str(A.basis[b]), v.numerator, v.denominator] for (a, b), v in A.metric.items()],
        "dual": [[str(A.basis[a]), str(A.basis[A.dual[a]])] for a in range(A.dim)],
        "center_order": 1,
    }


def test_json_round_trip(tmp_path):
    V = build_pgl2_dopers(7)
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(_doc_for(V)))
    W = load_algebra(path)
    assert W.dim == V.dim and W.axiom_violations() == []
    assert W.structure == V.structure


@pytest.mark.parametrize("mutate", [
    lambda d: d["structure"].pop(),                        # breaks associativity / unit
    lambda d: d["metric"].append(["0", "1", 1, 1]),        # two metric partners
    lambda d: d.__setitem__("unit", "1"),                  # wrong unit
    lambda d: d["metric"].__setitem__(0, ["0", "0", 1, 0]),  # zero denominator
    lambda d: d.__setitem__("dual", [["0", "1"], ["1", "0"], ["2", "2"]]),
])
def test_json_rejects(mutate):
    doc = _doc_for(build_pgl2_dopers(7))
    mutate(doc)
    with pytest.raises(AlgebraError):
        algebra_from_json(doc)
